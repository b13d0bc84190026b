#pragma once

#include <cstdint>
#include <vector>

#include "hardnet/lift.hpp"

namespace hardnet {

struct ReductionReport {
  std::uint64_t checked = 0;
  std::uint64_t failures = 0;  // y~ differs from the naive lift at z
  std::vector<double> ks;      // per coordinate
  double max_ks = 0;
};

/// Transforms `count` realizable examples and compares every label against
/// exact evaluation of the naive lift; KS statistics of each coordinate
/// against the law of `dist`.
ReductionReport reduction_consistency(const CompressibleFn& cf, const GadgetParams& params,
                                      const DistributionSpec& dist, std::uint64_t count, std::uint64_t seed,
                                      int threads = 1);

struct GoodSetEstimate {
  std::size_t d = 0;
  std::uint64_t samples = 0;
  double empirical = 0;
  double predicted = 0;
  double sigma = 0;  // binomial standard deviation at `predicted`
  bool within_3sigma() const;
};

GoodSetEstimate good_set_estimate(const DistributionSpec& dist, std::size_t d, std::uint64_t samples,
                                  std::uint64_t seed, int threads = 1);

/// Least-squares fit of 1 - P[S] = c / d over several dimensions.
struct GoodSetFit {
  std::vector<GoodSetEstimate> points;
  double c = 0;
  double max_residual = 0;
  bool monotone = false;
};

GoodSetFit good_set_fit(const DistributionSpec& dist, const std::vector<std::size_t>& dims, std::uint64_t samples,
                        std::uint64_t seed, int threads = 1);

}  // namespace hardnet
