#include "hardnet/verify.hpp"

#include <cmath>

#include "hardnet/parallel.hpp"

namespace hardnet {

ReductionReport reduction_consistency(const CompressibleFn& cf, const GadgetParams& params,
                                      const DistributionSpec& dist, std::uint64_t count, std::uint64_t seed,
                                      int threads) {
  const auto lifted = lift_naive(cf, params);
  const auto data = sample_lifted(cf, params, dist, count, seed, threads);
  std::vector<std::uint8_t> bad(count);
  parallel_for(count, threads, [&](std::size_t i) {
    bad[i] = eval_exact(lifted.net, data[i].z_exact) != data[i].y_tilde;
  });
  ReductionReport r;
  r.checked = count;
  for (auto b : bad) r.failures += b;
  r.ks.resize(params.d);
  parallel_for(params.d, threads, [&](std::size_t j) {
    std::vector<double> column(count);
    for (std::size_t i = 0; i < count; ++i) column[i] = data[i].z[j];
    const auto law = dist.coordinate(j);
    r.ks[j] = ks_statistic(std::move(column), [&](double x) { return law.cdf(x); });
  });
  for (double k : r.ks) r.max_ks = std::max(r.max_ks, k);
  return r;
}

bool GoodSetEstimate::within_3sigma() const { return std::abs(empirical - predicted) <= 3 * sigma; }

GoodSetEstimate good_set_estimate(const DistributionSpec& dist, std::size_t d, std::uint64_t samples,
                                  std::uint64_t seed, int threads) {
  const auto params = GadgetParams::for_dimension(d);
  std::vector<std::uint8_t> hit(samples);
  parallel_for(samples, threads, [&](std::size_t i) {
    const auto g = draw_half_sample(d, dist, Stream::kRandomPoints, seed, i);
    hit[i] = in_good_set(std::span<const double>(g), params);
  });
  GoodSetEstimate e;
  e.d = d;
  e.samples = samples;
  std::uint64_t kept = 0;
  for (auto h : hit) kept += h;
  e.empirical = samples ? static_cast<double>(kept) / static_cast<double>(samples) : 0.0;
  e.predicted = good_set_prob(dist, d);
  e.sigma = std::sqrt(e.predicted * (1 - e.predicted) / static_cast<double>(samples));
  return e;
}

GoodSetFit good_set_fit(const DistributionSpec& dist, const std::vector<std::size_t>& dims, std::uint64_t samples,
                        std::uint64_t seed, int threads) {
  GoodSetFit fit;
  double num = 0, den = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    fit.points.push_back(good_set_estimate(dist, dims[i], samples, seed + i, threads));
    const double inv = 1.0 / static_cast<double>(dims[i]);
    num += (1 - fit.points.back().empirical) * inv;
    den += inv * inv;
  }
  fit.c = den > 0 ? num / den : 0.0;
  fit.monotone = true;
  for (std::size_t i = 0; i < fit.points.size(); ++i) {
    const auto& p = fit.points[i];
    fit.max_residual = std::max(fit.max_residual, std::abs((1 - p.empirical) - fit.c / static_cast<double>(p.d)));
    if (i > 0 && p.empirical < fit.points[i - 1].empirical) fit.monotone = false;
  }
  return fit;
}

}  // namespace hardnet
