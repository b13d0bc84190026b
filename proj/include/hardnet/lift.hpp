#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hardnet/distributions.hpp"
#include "hardnet/families.hpp"
#include "hardnet/gadgets.hpp"
#include "hardnet/relu_ir.hpp"

namespace hardnet {

/// A Boolean function on {-1,1}^d, evaluated exactly.
using CornerFn = std::function<Rational(std::span<const int>)>;

/// eval_family on the {-1,1} form of `cf`.
CornerFn corner_fn(const CompressibleFn& cf);

enum class LiftKind { kNaive, kCompressed };

struct LiftedNetwork {
  ReluNetwork net;
  LiftKind kind = LiftKind::kNaive;
  std::string source;
  Rational n2_scale;
  Rational bound_C;
};

/// Largest |sigma(t)| over T. With constant extrapolation this bounds
/// sigma(h(.)) at any real input.
Rational compute_bound(const CompressibleFn& cf);
/// Interval bound on |f| over the solid cube [-1,1]^d.
Rational compute_bound(const ReluNetwork& f_net);

/// Gadget parameters for lifting `cf`: delta = 1/d^2, K = max(1, bound),
/// W = required_n3_W for the scaled-slack form.
GadgetParams lift_params(const CompressibleFn& cf);

/// relu(f(N1(z)) - K N2(z)) with f on {-1,1}^d. Throws when K < bound_C.
LiftedNetwork lift_naive(const ReluNetwork& f_net, const GadgetParams& params, const Rational& bound_C);
LiftedNetwork lift_naive(const ReluNetwork& f_net, const GadgetParams& params);
LiftedNetwork lift_naive(const CompressibleFn& cf, const GadgetParams& params);

enum class CompressedForm {
  /// sigma(t*) N3(K N2(z) / sigma(t*), h(N1(z)); t*): equal to
  /// relu(sigma(t*) 1[t = t*] - K N2) for every sigma(t*) > 0.
  kScaledSlack,
  /// sigma(t*) N3(K N2(z), h(N1(z)); t*): exact only when sigma takes values in {0, 1}.
  kLiteral
};

/// sum over t* of sigma(t*) N3(., h(N1(z)); t*), with the first N3 input
/// chosen by `form`.
LiftedNetwork lift_compressed(const CompressibleFn& cf, const GadgetParams& params,
                              CompressedForm form = CompressedForm::kScaledSlack);

/// Smallest W accepted by lift_compressed: 2dK / (least nonzero sigma) + 1
/// for kScaledSlack, 2dK + 1 for kLiteral; never below the h bound.
Rational required_n3_W(const CompressibleFn& cf, const GadgetParams& params, CompressedForm form);

/// relu(f(sgn z) - K N2(z)), sgn(0) = +1.
Rational reference_eval(const CornerFn& f, const GadgetParams& params, std::span<const Rational> z);
double reference_eval_f64(const std::function<double(std::span<const int>)>& f, const GadgetParams& params,
                          std::span<const double> z);

std::vector<int> sign_pattern(std::span<const Rational> z);
std::vector<int> sign_pattern(std::span<const double> z);

/// relu(y - K N2(|z|)).
Rational label_map(const Rational& y, std::span<const Rational> abs_z, const GadgetParams& params);

enum class LabelCase { kGood, kBoundary, kZeroed };
/// kGood: every |z_j| >= 2 delta. kZeroed: some |z_j| <= delta. Otherwise kBoundary.
LabelCase classify(std::span<const Rational> z, const GadgetParams& params);
bool in_good_set(std::span<const Rational> z, const GadgetParams& params);
bool in_good_set(std::span<const double> z, const GadgetParams& params);

/// prod_j (1 - m_j), m_j the mass of (-2/d^2, 2/d^2) under coordinate j.
double good_set_prob(const DistributionSpec& dist, std::size_t d);

struct RealExample {
  std::vector<double> z;
  std::vector<Rational> z_exact;
  std::vector<double> g;
  Rational y_tilde;
};

/// Half-sample g from (seed, transform, index); z = g x, y~ = label_map(y, g).
RealExample transform_example(const BooleanExample& ex, const DistributionSpec& dist, const GadgetParams& params,
                              std::uint64_t seed, std::uint64_t index);
/// Realizable Boolean examples of `cf` pushed through transform_example.
std::vector<RealExample> sample_lifted(const CompressibleFn& cf, const GadgetParams& params,
                                       const DistributionSpec& dist, std::size_t count, std::uint64_t seed,
                                       int threads = 1);
RealExample transform_with_g(const BooleanExample& ex, std::span<const double> g, const GadgetParams& params);
std::vector<double> draw_half_sample(std::size_t d, const DistributionSpec& dist, Stream stream, std::uint64_t seed,
                                     std::uint64_t index);

/// B(x) = 1[clamp(h(g x), 0, 1) >= 1/2] with a fresh half-sample g for
/// every call index.
class WeakPredictor {
 public:
  using Hypothesis = std::function<double(std::span<const double>)>;

  WeakPredictor(Hypothesis h, DistributionSpec dist, std::uint64_t seed)
      : h_(std::move(h)), dist_(std::move(dist)), seed_(seed) {}

  int predict(std::span<const int> x, std::uint64_t index) const;
  /// Mean of (B(x_i) - f(x_i))^2 over `count` seeded uniform corners.
  double squared_loss(const CornerFn& f, std::size_t d, std::size_t count, int threads = 1) const;

 private:
  Hypothesis h_;
  DistributionSpec dist_;
  std::uint64_t seed_;
};

/// Answers real-point queries through a Boolean membership oracle, exactly
/// one Boolean query per real query.
class MqWrapper {
 public:
  MqWrapper(CornerFn oracle, GadgetParams params) : oracle_(std::move(oracle)), params_(std::move(params)) {}

  Rational query(std::span<const Rational> z);
  std::uint64_t real_queries() const { return real_queries_; }
  std::uint64_t boolean_queries() const { return boolean_queries_; }

 private:
  CornerFn oracle_;
  GadgetParams params_;
  std::uint64_t real_queries_ = 0;
  std::uint64_t boolean_queries_ = 0;
};

enum class PointRegion {
  kAny,          // coordinates anywhere, with many near the ramps
  kOutsideRamp,  // every |z_j| > delta
  kForcedZeroed  // at least one |z_j| <= delta
};

/// Coordinates: half of them log-uniform in (0, 2 delta] (or (delta, 2 delta]
/// outside the ramp), some pinned to the thresholds, the rest in [2 delta, 2];
/// random signs.
std::vector<double> adversarial_point(std::size_t d, const GadgetParams& params, PointRegion region,
                                      std::uint64_t seed, std::uint64_t index);
/// Standard Gaussian point; for kOutsideRamp it is redrawn until every
/// |z_j| > delta.
std::vector<double> gaussian_point(std::size_t d, const GadgetParams& params, PointRegion region, std::uint64_t seed,
                                   std::uint64_t index);

struct DeviationReport {
  std::uint64_t checked = 0;
  std::uint64_t failures = 0;  // points with nonzero deviation
  Rational max_abs_deviation;
  double mean_abs_deviation = 0;
  double nonzero_fraction() const { return checked ? static_cast<double>(failures) / checked : 0.0; }
};

/// |eval(lifted) - reference_eval| on `random` Gaussian and `adversarial`
/// boundary points from `region`.
DeviationReport lift_deviation(const LiftedNetwork& lifted, const CornerFn& f, const GadgetParams& params,
                               std::uint64_t random, std::uint64_t adversarial, PointRegion region,
                               std::uint64_t seed, int threads = 1);

/// Deviation sweep over points with a coordinate forced into [0, delta].
DeviationReport case3_discrepancy(const LiftedNetwork& lifted, const CornerFn& f, const GadgetParams& params,
                                  std::uint64_t sample_budget, std::uint64_t seed, int threads = 1);

}  // namespace hardnet
