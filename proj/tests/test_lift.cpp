#include <gtest/gtest.h>

#include <cmath>

#include "hardnet/lift.hpp"

namespace hardnet {
namespace {

Rational q(const char* s) { return parse_rational(s); }

struct ParityFixture {
  CompressibleFn cf = build_parity({10, {1}});
  GadgetParams params = lift_params(cf);
  CornerFn f = corner_fn(cf);
};

std::vector<Rational> case1_point() {
  std::vector<Rational> z(10, q("1/2"));
  z[0] = q("-1/2");
  return z;
}

std::vector<Rational> case2_point() {
  std::vector<Rational> z(10, -1);
  z[9] = q("3/200");
  return z;
}

std::vector<Rational> zeroed_point() {
  std::vector<Rational> z(10, q("1/2"));
  z[0] = q("1/200");
  return z;
}

TEST(Lift, ComputeBound) {
  EXPECT_EQ(compute_bound(build_parity({5, {1, 2}})), 1);
  EXPECT_EQ(compute_bound(build_parity({5, {}})), 0);
  EXPECT_EQ(compute_bound(build_lwr({2, 2, 8, {3, 5}})), q("1/2"));
  RationalMatrix w(1, 3);
  w(0, 0) = 10;
  EXPECT_EQ(compute_bound(affine_network(w, {0})), 10);
  const auto zero = build_parity({5, {}});
  EXPECT_EQ(lift_params(zero).n2_scale, 1);
}

TEST(Lift, NaiveExamples) {
  ParityFixture fx;
  const auto lifted = lift_naive(fx.cf, fx.params);
  EXPECT_EQ(lifted.net.hidden_layers(), 3u);
  EXPECT_EQ(lifted.kind, LiftKind::kNaive);
  EXPECT_EQ(eval_exact(lifted.net, case1_point()), 1);
  EXPECT_EQ(eval_exact(lifted.net, zeroed_point()), 0);
  EXPECT_EQ(eval_exact(lifted.net, case2_point()), q("1/2"));
  EXPECT_EQ(reference_eval(fx.f, fx.params, case1_point()), 1);
  EXPECT_EQ(reference_eval(fx.f, fx.params, zeroed_point()), 0);
  EXPECT_EQ(reference_eval(fx.f, fx.params, case2_point()), q("1/2"));
}

TEST(Lift, CompressedExamples) {
  ParityFixture fx;
  const auto lifted = lift_compressed(fx.cf, fx.params);
  EXPECT_EQ(lifted.net.hidden_layers(), 2u);
  EXPECT_EQ(eval_exact(lifted.net, case1_point()), 1);
  EXPECT_EQ(eval_exact(lifted.net, case2_point()), q("1/2"));
}

TEST(Lift, ScaleAndWidthChecks) {
  ParityFixture fx;
  RationalMatrix w(1, 10);
  w(0, 0) = 10;
  EXPECT_THROW(lift_naive(affine_network(w, {0}), fx.params), std::invalid_argument);
  auto big = fx.params;
  big.n2_scale = 10;
  EXPECT_NO_THROW(lift_naive(affine_network(w, {0}), big));
  auto narrow = fx.params;
  narrow.n3_W = 5;
  EXPECT_THROW(lift_compressed(fx.cf, narrow), std::invalid_argument);
}

TEST(Lift, LabelMap) {
  const auto params = GadgetParams::for_dimension(10);
  const std::vector<Rational> good(10, 1);
  EXPECT_EQ(label_map(q("3/4"), good, params), q("3/4"));
  auto boundary = std::vector<Rational>(10, 1);
  boundary[9] = q("3/200");
  EXPECT_EQ(label_map(1, boundary, params), q("1/2"));
  auto zeroed = std::vector<Rational>(10, 1);
  zeroed[2] = q("1/100");
  EXPECT_EQ(label_map(1, zeroed, params), 0);
  EXPECT_EQ(classify(good, params), LabelCase::kGood);
  EXPECT_EQ(classify(boundary, params), LabelCase::kBoundary);
  EXPECT_EQ(classify(zeroed, params), LabelCase::kZeroed);
}

TEST(Lift, NaiveMatchesReferenceEverywhere) {
  for (const auto& cf : {build_parity({6, {1, 3, 4}}), build_lwr({2, 2, 4, {3, 1}}), build_keyed_toy(3, 5, 2)}) {
    const auto params = lift_params(cf);
    const auto f = corner_fn(cf);
    const auto lifted = lift_naive(cf, params);
    const auto report = lift_deviation(lifted, f, params, 300, 300, PointRegion::kAny, 1);
    EXPECT_EQ(report.failures, 0u) << family_kind_name(cf.kind);
    const auto forced = case3_discrepancy(lifted, f, params, 300, 2);
    EXPECT_EQ(forced.max_abs_deviation, 0);
  }
}

TEST(Lift, CompressedMatchesReferenceOutsideRamp) {
  for (const auto& cf : {build_parity({6, {1, 3, 4}}), build_lwr({2, 2, 4, {3, 1}}), build_keyed_toy(3, 5, 2)}) {
    const auto params = lift_params(cf);
    const auto lifted = lift_compressed(cf, params);
    EXPECT_EQ(lifted.net.hidden_layers(), cf.hidden_layers() + 1);
    const auto report = lift_deviation(lifted, corner_fn(cf), params, 300, 300, PointRegion::kOutsideRamp, 3);
    EXPECT_EQ(report.failures, 0u) << family_kind_name(cf.kind);
  }
}

TEST(Lift, LiteralFormNeedsBinarySigma) {
  const auto parity = build_parity({6, {2, 5}});
  const auto pp = lift_params(parity);
  const auto literal_parity = lift_compressed(parity, pp, CompressedForm::kLiteral);
  EXPECT_EQ(lift_deviation(literal_parity, corner_fn(parity), pp, 200, 200, PointRegion::kOutsideRamp, 8).failures, 0u);

  const auto lwr = build_lwr({2, 2, 4, {3, 1}});
  const auto lp = lift_params(lwr);
  const auto literal_lwr = lift_compressed(lwr, lp, CompressedForm::kLiteral);
  const auto report = lift_deviation(literal_lwr, corner_fn(lwr), lp, 0, 400, PointRegion::kOutsideRamp, 8);
  EXPECT_GT(report.failures, 0u);
  // case-2 point: N2 = 1/4 and f = 1/2 gives relu(1/2 - 1/4) = 1/4 against (1/2)(1 - 1/4) = 3/8
  EXPECT_EQ(report.max_abs_deviation <= parse_rational("1/4"), true);
}

TEST(Lift, RequiredWidth) {
  const auto lwr = build_lwr({2, 4, 8, {3, 1}});
  auto p = lift_params(lwr);
  EXPECT_EQ(p.n3_W, std::max<Rational>(12 * 4 + 1, lwr.h_bound));
  EXPECT_EQ(required_n3_W(lwr, p, CompressedForm::kLiteral), std::max<Rational>(12 + 1, lwr.h_bound));
}

TEST(Lift, CompressedCase3IsMeasured) {
  ParityFixture fx;
  const auto lifted = lift_compressed(fx.cf, fx.params);
  const auto report = case3_discrepancy(lifted, fx.f, fx.params, 200, 4);
  EXPECT_EQ(report.checked, 200u);
  EXPECT_TRUE(std::isfinite(to_double(report.max_abs_deviation)));
  const auto zero = build_parity({10, {}});
  const auto zero_lift = lift_compressed(zero, lift_params(zero));
  EXPECT_EQ(case3_discrepancy(zero_lift, corner_fn(zero), lift_params(zero), 200, 4).max_abs_deviation, 0);
}

TEST(Lift, PointGeneratorsRespectRegions) {
  const auto params = GadgetParams::for_dimension(8);
  for (std::uint64_t i = 0; i < 500; ++i) {
    const auto out = to_rationals(adversarial_point(8, params, PointRegion::kOutsideRamp, 5, i));
    EXPECT_NE(classify(out, params), LabelCase::kZeroed);
    const auto g = to_rationals(gaussian_point(8, params, PointRegion::kOutsideRamp, 5, i));
    EXPECT_NE(classify(g, params), LabelCase::kZeroed);
    const auto forced = to_rationals(adversarial_point(8, params, PointRegion::kForcedZeroed, 5, i));
    EXPECT_EQ(classify(forced, params), LabelCase::kZeroed);
  }
}

TEST(Lift, TransformExamples) {
  const auto cf = build_parity({10, {1, 2}});
  const auto params = lift_params(cf);
  const BooleanExample ex{{-1, 1, 1, 1, 1, 1, 1, 1, 1, 1}, 1};
  const std::vector<double> half(10, 0.5);
  const auto good = transform_with_g(ex, half, params);
  EXPECT_EQ(good.y_tilde, 1);
  EXPECT_EQ(good.z[0], -0.5);
  auto small = half;
  small[0] = 0.005;
  EXPECT_EQ(transform_with_g(ex, small, params).y_tilde, 0);
  const auto lifted = lift_naive(cf, params);
  for (std::uint64_t i = 0; i < 300; ++i) {
    const auto data = sample_dataset(cf, 1, LabelMode::kRealizable, i);
    const auto real = transform_example(data[0], DistributionSpec::gaussian(), params, 9, i);
    EXPECT_EQ(real.y_tilde, eval_exact(lifted.net, real.z_exact));
  }
}

TEST(Lift, GoodSetProbability) {
  const double p10 = good_set_prob(DistributionSpec::gaussian(), 10);
  const double m = std::erf(0.02 / std::sqrt(2.0));
  EXPECT_NEAR(p10, std::pow(1 - m, 10), 1e-9);
  EXPECT_NEAR(p10, 0.851, 0.001);
  const auto params = GadgetParams::for_dimension(10);
  EXPECT_TRUE(in_good_set(std::vector<double>(10, 1.0), params));
  auto z = std::vector<double>(10, 1.0);
  z[3] = 0.01;
  EXPECT_FALSE(in_good_set(z, params));
  const double pu = good_set_prob(DistributionSpec::symmetric_uniform(), 10);
  EXPECT_NEAR(pu, std::pow(1 - 0.02, 10), 1e-9);
}

TEST(Lift, AnticoncentrationCertificates) {
  EXPECT_TRUE(DistributionSpec::gaussian().certify(10).valid());
  EXPECT_TRUE(DistributionSpec::symmetric_uniform().certify(10).valid());
  const auto custom = DistributionSpec::custom_product(
      {{CoordinateLaw::kLaplace, 1.0}, {CoordinateLaw::kGaussian, 2.0}, {CoordinateLaw::kUniform, 0.5}});
  EXPECT_TRUE(custom.certify(10).valid());
  EXPECT_NEAR(custom.interval_mass(0, 0.02), 1 - std::exp(-0.02), 1e-9);
  const auto tight = DistributionSpec::custom_product({{CoordinateLaw::kGaussian, 1e-4}});
  EXPECT_FALSE(tight.certify(10).valid());
}

TEST(Lift, MarginalOfTransformIsTarget) {
  const auto cf = build_parity({4, {1, 2}});
  const auto params = lift_params(cf);
  for (const auto& dist : {DistributionSpec::gaussian(), DistributionSpec::symmetric_uniform()}) {
    const std::size_t n = 20000;
    std::vector<double> coord0(n);
    const auto data = sample_dataset(cf, n, LabelMode::kRealizable, 3);
    for (std::size_t i = 0; i < n; ++i) coord0[i] = transform_example(data[i], dist, params, 7, i).z[0];
    const auto law = dist.coordinate(0);
    EXPECT_LT(ks_statistic(coord0, [&](double x) { return law.cdf(x); }), 1.63 / std::sqrt(static_cast<double>(n)));
  }
}

TEST(Lift, WeakPredictorRules) {
  const CornerFn one = [](std::span<const int>) { return Rational(1); };
  const WeakPredictor half([](std::span<const double>) { return 0.5; }, DistributionSpec::gaussian(), 1);
  const int x[] = {1, -1, 1};
  for (std::uint64_t i = 0; i < 10; ++i) EXPECT_EQ(half.predict(x, i), 1);
  const WeakPredictor two([](std::span<const double>) { return 2.0; }, DistributionSpec::gaussian(), 1);
  EXPECT_EQ(two.predict(x, 0), 1);
  const WeakPredictor neg([](std::span<const double>) { return -3.0; }, DistributionSpec::gaussian(), 1);
  EXPECT_EQ(neg.predict(x, 0), 0);
  EXPECT_EQ(half.squared_loss(one, 3, 100), 0.0);
}

TEST(Lift, WeakPredictorFromReference) {
  const auto cf = build_parity({20, {2, 5, 11}});
  const auto params = lift_params(cf);
  const auto f = corner_fn(cf);
  const std::function<double(std::span<const int>)> fd = [&](std::span<const int> x) { return to_double(f(x)); };
  const WeakPredictor pred([&](std::span<const double> z) { return reference_eval_f64(fd, params, z); },
                           DistributionSpec::gaussian(), 5);
  EXPECT_LT(pred.squared_loss(f, 20, 10000), 1.0 / 16);
}

TEST(Lift, MqWrapperCountsAndAgrees) {
  const auto cf = build_parity({8, {2, 7}});
  const auto params = lift_params(cf);
  const auto f = corner_fn(cf);
  std::uint64_t oracle_calls = 0;
  MqWrapper mq([&](std::span<const int> x) {
    ++oracle_calls;
    return f(x);
  }, params);
  for (std::uint64_t i = 0; i < 2000; ++i) {
    const auto z = to_rationals(adversarial_point(8, params, PointRegion::kAny, 3, i));
    EXPECT_EQ(mq.query(z), reference_eval(f, params, z));
  }
  EXPECT_EQ(mq.real_queries(), 2000u);
  EXPECT_EQ(mq.boolean_queries(), 2000u);
  EXPECT_EQ(oracle_calls, 2000u);
  std::vector<Rational> zero(8, 1);
  zero[4] = 0;
  EXPECT_EQ(mq.query(zero), 0);
}

}  // namespace
}  // namespace hardnet
