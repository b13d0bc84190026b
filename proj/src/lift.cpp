#include "hardnet/lift.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "hardnet/parallel.hpp"
#include "hardnet/simd.hpp"

namespace hardnet {

CornerFn corner_fn(const CompressibleFn& cf) {
  auto pm = std::make_shared<const CompressibleFn>(to_pm_one(cf));
  return [pm](std::span<const int> x) { return eval_family(*pm, x); };
}

Rational compute_bound(const CompressibleFn& cf) {
  Rational bound = 0;
  for (const auto& s : cf.sigma) bound = std::max<Rational>(bound, abs(s));
  return bound;
}

Rational compute_bound(const ReluNetwork& f_net) {
  std::vector<Rational> lo(f_net.input_dim(), -1), hi(f_net.input_dim(), 1);
  for (const auto& layer : f_net.layers()) {
    std::vector<Rational> nlo(layer.output_width()), nhi(layer.output_width());
    for (std::size_t r = 0; r < layer.output_width(); ++r) {
      Rational a = layer.bias[r], b = layer.bias[r];
      for (std::size_t c = 0; c < layer.input_width(); ++c) {
        const Rational& w = layer.weights(r, c);
        if (sgn(w) > 0) {
          a += w * lo[c];
          b += w * hi[c];
        } else if (sgn(w) < 0) {
          a += w * hi[c];
          b += w * lo[c];
        }
      }
      if (layer.activation == Activation::kRelu) {
        a = relu(a);
        b = relu(b);
      }
      nlo[r] = a;
      nhi[r] = b;
    }
    lo = std::move(nlo);
    hi = std::move(nhi);
  }
  Rational bound = 0;
  for (std::size_t i = 0; i < lo.size(); ++i) bound = std::max<Rational>({bound, abs(lo[i]), abs(hi[i])});
  return bound;
}

GadgetParams lift_params(const CompressibleFn& cf) {
  GadgetParams p = GadgetParams::for_dimension(cf.dim());
  p.n2_scale = std::max<Rational>(1, compute_bound(cf));
  p.n3_W = required_n3_W(cf, p, CompressedForm::kScaledSlack);
  return p;
}

Rational required_n3_W(const CompressibleFn& cf, const GadgetParams& params, CompressedForm form) {
  Rational reach = 2 * Rational(static_cast<unsigned long>(params.d)) * params.n2_scale;
  if (form == CompressedForm::kScaledSlack) {
    Rational least = 0;
    for (const auto& s : cf.sigma) {
      if (sgn(s) > 0 && (sgn(least) == 0 || s < least)) least = s;
    }
    if (sgn(least) > 0) reach /= least;
  }
  return std::max<Rational>(reach + 1, cf.h_bound);
}

namespace {

ReluNetwork outer_relu() {
  std::vector<AffineLayer> layers;
  layers.push_back({RationalMatrix::identity(1), {0}, Activation::kRelu});
  layers.push_back({RationalMatrix::identity(1), {0}, Activation::kLinear});
  return ReluNetwork::create(1, std::move(layers));
}

void check_scale(const GadgetParams& params, const Rational& bound_C) {
  if (params.n2_scale < 1 || params.n2_scale < bound_C) {
    throw std::invalid_argument("N2 scale K = " + to_string(params.n2_scale) + " is below max(1, C) with C = " +
                                to_string(bound_C));
  }
}

}  // namespace

LiftedNetwork lift_naive(const ReluNetwork& f_net, const GadgetParams& params, const Rational& bound_C) {
  params.validate();
  if (f_net.output_dim() != 1 || f_net.input_dim() != params.d) {
    throw std::invalid_argument("naive lift needs a scalar network on d = " + std::to_string(params.d) + " inputs");
  }
  check_scale(params, bound_C);
  const WeightedNetwork terms[] = {{1, compose(f_net, build_n1_vec(params))}, {-1, build_n2(params)}};
  return {compose(outer_relu(), linear_combine(terms, 0)), LiftKind::kNaive, "network", params.n2_scale, bound_C};
}

LiftedNetwork lift_naive(const ReluNetwork& f_net, const GadgetParams& params) {
  return lift_naive(f_net, params, compute_bound(f_net));
}

LiftedNetwork lift_naive(const CompressibleFn& cf, const GadgetParams& params) {
  auto lifted = lift_naive(to_network(to_pm_one(cf)), params, compute_bound(cf));
  lifted.source = family_kind_name(cf.kind);
  return lifted;
}

LiftedNetwork lift_compressed(const CompressibleFn& cf, const GadgetParams& params, CompressedForm form) {
  params.validate();
  const CompressibleFn pm = to_pm_one(cf);
  if (pm.dim() != params.d) throw std::invalid_argument("family dimension does not match the gadget parameters");
  const Rational bound_C = compute_bound(cf);
  check_scale(params, bound_C);
  for (const auto& s : pm.sigma) {
    if (sgn(s) < 0) throw std::invalid_argument("compressed lift needs a nonnegative sigma table");
  }
  const Rational needed = required_n3_W(pm, params, form);
  if (params.n3_W < needed) {
    throw std::invalid_argument("N3 parameter W = " + to_string(params.n3_W) + " is below the required " +
                                to_string(needed));
  }

  const ReluNetwork inner[] = {build_n2(params), compose(pm.inner_h, build_n1_vec(params))};
  const ReluNetwork s_and_t = parallel(inner);

  std::vector<WeightedNetwork> terms;
  for (std::size_t i = 0; i < pm.range_T.size(); ++i) {
    if (sgn(pm.sigma[i]) == 0) continue;
    ReluNetwork n3 = build_n3(params, pm.range_T, pm.range_T[i]);
    if (form == CompressedForm::kScaledSlack && pm.sigma[i] != 1) {
      RationalMatrix rescale(2, 2);
      rescale(0, 0) = 1 / pm.sigma[i];
      rescale(1, 1) = 1;
      n3 = compose(n3, affine_network(std::move(rescale), {0, 0}));
    }
    terms.push_back({pm.sigma[i], std::move(n3)});
  }
  if (terms.empty()) terms.push_back({0, build_n3(params, pm.range_T, pm.range_T.front())});
  return {compose(linear_combine(terms, 0), s_and_t), LiftKind::kCompressed, std::string(family_kind_name(cf.kind)),
          params.n2_scale, bound_C};
}

std::vector<int> sign_pattern(std::span<const Rational> z) {
  std::vector<int> x(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) x[j] = sign_of(z[j]);
  return x;
}

std::vector<int> sign_pattern(std::span<const double> z) {
  std::vector<int> x(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) x[j] = sign_of(z[j]);
  return x;
}

Rational reference_eval(const CornerFn& f, const GadgetParams& params, std::span<const Rational> z) {
  return relu(f(sign_pattern(z)) - n2_value(params, z));
}

double reference_eval_f64(const std::function<double(std::span<const int>)>& f, const GadgetParams& params,
                          std::span<const double> z) {
  const double v = f(sign_pattern(z)) - n2_value(params, z);
  return v > 0 ? v : 0.0;
}

Rational label_map(const Rational& y, std::span<const Rational> abs_z, const GadgetParams& params) {
  return relu(y - n2_value(params, abs_z));
}

LabelCase classify(std::span<const Rational> z, const GadgetParams& params) {
  bool good = true;
  for (const auto& v : z) {
    const Rational a = abs(v);
    if (a <= params.delta) return LabelCase::kZeroed;
    if (a < 2 * params.delta) good = false;
  }
  return good ? LabelCase::kGood : LabelCase::kBoundary;
}

bool in_good_set(std::span<const Rational> z, const GadgetParams& params) {
  const Rational threshold = 2 * params.delta;
  for (const auto& v : z) {
    if (abs(v) < threshold) return false;
  }
  return true;
}

bool in_good_set(std::span<const double> z, const GadgetParams& params) {
  return in_good_set(to_rationals(z), params);
}

double good_set_prob(const DistributionSpec& dist, std::size_t d) {
  const double width = 2.0 / (static_cast<double>(d) * static_cast<double>(d));
  double prob = 1.0;
  for (std::size_t j = 0; j < d; ++j) prob *= 1.0 - dist.interval_mass(j, width);
  return prob;
}

std::vector<double> draw_half_sample(std::size_t d, const DistributionSpec& dist, Stream stream, std::uint64_t seed,
                                     std::uint64_t index) {
  CounterRng rng(seed, stream, index);
  std::vector<double> g(d);
  for (std::size_t j = 0; j < d; ++j) g[j] = dist.coordinate(j).sample_half(rng);
  return g;
}

RealExample transform_with_g(const BooleanExample& ex, std::span<const double> g, const GadgetParams& params) {
  if (g.size() != ex.x.size()) throw std::invalid_argument("half-sample and corner differ in dimension");
  std::vector<double> x(ex.x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (ex.x[j] != 1 && ex.x[j] != -1) throw std::invalid_argument("transform needs a {-1,1} corner");
    x[j] = ex.x[j];
  }
  RealExample out;
  out.g.assign(g.begin(), g.end());
  out.z.resize(x.size());
  simd::kernels().hadamard(out.g.data(), x.data(), out.z.data(), x.size());
  out.z_exact = to_rationals(out.z);
  out.y_tilde = label_map(ex.y, to_rationals(g), params);
  return out;
}

RealExample transform_example(const BooleanExample& ex, const DistributionSpec& dist, const GadgetParams& params,
                              std::uint64_t seed, std::uint64_t index) {
  return transform_with_g(ex, draw_half_sample(ex.x.size(), dist, Stream::kTransform, seed, index), params);
}

std::vector<RealExample> sample_lifted(const CompressibleFn& cf, const GadgetParams& params,
                                       const DistributionSpec& dist, std::size_t count, std::uint64_t seed,
                                       int threads) {
  const auto data = sample_dataset(to_pm_one(cf), count, LabelMode::kRealizable, seed, threads);
  std::vector<RealExample> out(count);
  parallel_for(count, threads, [&](std::size_t i) { out[i] = transform_example(data[i], dist, params, seed, i); });
  return out;
}

int WeakPredictor::predict(std::span<const int> x, std::uint64_t index) const {
  const auto g = draw_half_sample(x.size(), dist_, Stream::kPredictor, seed_, index);
  std::vector<double> z(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) z[j] = g[j] * x[j];
  const double v = std::clamp(h_(z), 0.0, 1.0);
  return v >= 0.5 ? 1 : 0;
}

double WeakPredictor::squared_loss(const CornerFn& f, std::size_t d, std::size_t count, int threads) const {
  std::vector<double> loss(count);
  parallel_for(count, threads, [&](std::size_t i) {
    CounterRng rng(seed_, Stream::kPredictor, ~static_cast<std::uint64_t>(i));
    std::vector<int> x(d);
    for (auto& v : x) v = (rng() >> 63) ? -1 : 1;
    const double diff = predict(x, i) - to_double(f(x));
    loss[i] = diff * diff;
  });
  double total = 0;
  for (double v : loss) total += v;
  return count ? total / static_cast<double>(count) : 0.0;
}

Rational MqWrapper::query(std::span<const Rational> z) {
  if (z.size() != params_.d) throw std::invalid_argument("query point has the wrong dimension");
  ++real_queries_;
  const auto x = sign_pattern(z);
  ++boolean_queries_;
  const Rational y = oracle_(x);
  return relu(y - n2_value(params_, z));
}

namespace {

// Smallest double strictly above / at most the exact rational bound.
double above(double v, const Rational& bound) {
  while (from_double(v) <= bound) v = std::nextafter(v, INFINITY);
  return v;
}

double at_most(double v, const Rational& bound) {
  while (from_double(v) > bound) v = std::nextafter(v, 0.0);
  return v;
}

double zeroed_magnitude(CounterRng& rng, const GadgetParams& params, double delta) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = unit(rng);
  if (r < 0.1) return 0.0;
  if (r < 0.2) return at_most(delta, params.delta);
  return at_most(delta * std::pow(10.0, -6.0 * unit(rng)), params.delta);
}

}  // namespace

std::vector<double> adversarial_point(std::size_t d, const GadgetParams& params, PointRegion region,
                                      std::uint64_t seed, std::uint64_t index) {
  CounterRng rng(seed, Stream::kAdversarial, index);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double delta = to_double(params.delta);
  std::vector<double> z(d);
  for (auto& v : z) {
    const double r = unit(rng);
    double mag;
    if (region == PointRegion::kOutsideRamp) {
      if (r < 0.45) {
        mag = above(delta * std::pow(2.0, 1.0 - unit(rng)), params.delta);
      } else if (r < 0.55) {
        mag = above(2 * delta, params.delta);
      } else {
        mag = 2 * delta + unit(rng) * (2.0 - 2 * delta);
      }
    } else if (r < 0.4) {
      mag = 2 * delta * std::pow(10.0, -6.0 * unit(rng));
    } else if (r < 0.5) {
      const double pinned[] = {0.0, delta, 2 * delta};
      mag = pinned[std::min<std::size_t>(2, static_cast<std::size_t>(3 * unit(rng)))];
    } else {
      mag = 2 * delta + unit(rng) * (2.0 - 2 * delta);
    }
    v = (rng() >> 63) ? -mag : mag;
  }
  if (region == PointRegion::kForcedZeroed) {
    const auto j = static_cast<std::size_t>(rng() % d);
    const double mag = zeroed_magnitude(rng, params, delta);
    z[j] = (rng() >> 63) ? -mag : mag;
  }
  return z;
}

std::vector<double> gaussian_point(std::size_t d, const GadgetParams& params, PointRegion region, std::uint64_t seed,
                                   std::uint64_t index) {
  CounterRng rng(seed, Stream::kRandomPoints, index);
  std::normal_distribution<double> normal;
  std::vector<double> z(d);
  for (auto& v : z) {
    v = normal(rng);
    if (region == PointRegion::kOutsideRamp) {
      while (from_double(std::abs(v)) <= params.delta) v = normal(rng);
    }
  }
  if (region == PointRegion::kForcedZeroed) {
    const auto j = static_cast<std::size_t>(rng() % d);
    const double mag = zeroed_magnitude(rng, params, to_double(params.delta));
    z[j] = (rng() >> 63) ? -mag : mag;
  }
  return z;
}

DeviationReport lift_deviation(const LiftedNetwork& lifted, const CornerFn& f, const GadgetParams& params,
                               std::uint64_t random, std::uint64_t adversarial, PointRegion region,
                               std::uint64_t seed, int threads) {
  const std::size_t total = random + adversarial;
  std::vector<Rational> dev(total);
  parallel_for(total, threads, [&](std::size_t i) {
    const auto z = i < random ? gaussian_point(params.d, params, region, seed, i)
                              : adversarial_point(params.d, params, region, seed, i - random);
    const auto ze = to_rationals(z);
    dev[i] = abs(eval_exact(lifted.net, ze) - reference_eval(f, params, ze));
  });
  DeviationReport report;
  report.checked = total;
  double sum = 0;
  for (const auto& v : dev) {
    if (sgn(v) != 0) ++report.failures;
    if (v > report.max_abs_deviation) report.max_abs_deviation = v;
    sum += to_double(v);
  }
  report.mean_abs_deviation = total ? sum / static_cast<double>(total) : 0.0;
  return report;
}

DeviationReport case3_discrepancy(const LiftedNetwork& lifted, const CornerFn& f, const GadgetParams& params,
                                  std::uint64_t sample_budget, std::uint64_t seed, int threads) {
  return lift_deviation(lifted, f, params, 0, sample_budget, PointRegion::kForcedZeroed, seed, threads);
}

}  // namespace hardnet
