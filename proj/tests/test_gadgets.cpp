#include <gtest/gtest.h>

#include <random>

#include "hardnet/gadgets.hpp"

namespace hardnet {
namespace {

Rational q(const char* s) { return parse_rational(s); }

Rational eval1(const ReluNetwork& net, const Rational& t) {
  const Rational z[] = {t};
  return eval_exact(net, z);
}

Rational eval2(const ReluNetwork& net, const Rational& s, const Rational& t) {
  const Rational z[] = {s, t};
  return eval_exact(net, z);
}

TEST(Gadgets, N1Examples) {
  const auto n1 = build_n1(GadgetParams::for_dimension(10));
  EXPECT_EQ(n1.hidden_layers(), 1u);
  EXPECT_LE(n1.meta().unit_count, 2u);
  EXPECT_EQ(eval1(n1, q("1/2")), 1);
  EXPECT_EQ(eval1(n1, 0), 0);
  EXPECT_EQ(eval1(n1, from_double(0.005)), eval1(n1, from_double(0.005)));
  EXPECT_EQ(eval1(n1, q("1/200")), q("1/2"));
  const double z[] = {0.005};
  EXPECT_NEAR(eval_f64(n1, z), 0.5, 1e-12);
}

TEST(Gadgets, N1SignOutsideRamp) {
  for (std::size_t d : {1u, 3u, 10u}) {
    const auto p = GadgetParams::for_dimension(d);
    const auto n1 = build_n1(p);
    std::mt19937_64 gen(d);
    std::uniform_int_distribution<long> num(1, 1000000);
    for (int k = 0; k < 2000; ++k) {
      Rational t = p.delta + ratio(num(gen), 100000);
      if (t > 10) t = 10;
      EXPECT_EQ(eval1(n1, t), 1);
      EXPECT_EQ(eval1(n1, -t), -1);
    }
    EXPECT_EQ(eval1(n1, p.delta), 1);
    EXPECT_EQ(eval1(n1, -p.delta), -1);
  }
}

TEST(Gadgets, N1VecIsCoordinatewise) {
  const auto p = GadgetParams::for_dimension(3);
  const auto v = build_n1_vec(p);
  EXPECT_EQ(v.output_dim(), 3u);
  const Rational z[] = {1, -1, q("1/9")};
  EXPECT_EQ(eval_vec_exact(v, z), (std::vector<Rational>{1, -1, 1}));
  const Rational zero[] = {0, 0, 0};
  EXPECT_EQ(eval_vec_exact(v, zero), (std::vector<Rational>{0, 0, 0}));
}

TEST(Gadgets, N2Examples) {
  const auto p = GadgetParams::for_dimension(10);
  const auto n2 = build_n2(p);
  EXPECT_EQ(n2.hidden_layers(), 1u);
  EXPECT_EQ(n2.meta().unit_count, 30u);
  std::vector<Rational> ones(10, 1);
  EXPECT_EQ(eval_exact(n2, ones), 0);
  std::vector<Rational> zero(10, 0);
  EXPECT_EQ(eval_exact(n2, zero), 20);
  ones[0] = q("1/200");
  EXPECT_EQ(eval_exact(n2, ones), q("3/2"));
  EXPECT_EQ(n2_value(p, ones), q("3/2"));
}

TEST(Gadgets, N2ClosedFormAndEvenness) {
  auto p = GadgetParams::for_dimension(5);
  p.n2_scale = q("7/2");
  const auto n2 = build_n2(p);
  std::mt19937_64 gen(1);
  std::uniform_int_distribution<long> num(-300, 300);
  for (int k = 0; k < 500; ++k) {
    std::vector<Rational> z(5), abs_z(5);
    for (int j = 0; j < 5; ++j) {
      z[j] = ratio(num(gen), 1000);
      abs_z[j] = abs(z[j]);
    }
    const Rational v = eval_exact(n2, z);
    EXPECT_EQ(v, n2_value(p, z));
    EXPECT_EQ(v, eval_exact(n2, abs_z));
    EXPECT_GE(v, 0);
    EXPECT_LE(v, 2 * 5 * p.n2_scale);
  }
}

TEST(Gadgets, N3Examples) {
  auto p = GadgetParams::for_dimension(2);
  p.n3_W = 4;
  const long T[] = {0, 1, 2, 3, 4, 5};
  const auto n3 = build_n3(p, T, 3);
  EXPECT_EQ(n3.hidden_layers(), 1u);
  EXPECT_EQ(eval2(n3, q("1/4"), 3), q("3/4"));
  EXPECT_EQ(eval2(n3, q("1/2"), 4), 0);
  EXPECT_EQ(eval2(n3, 2, 1), 0);
  EXPECT_THROW(build_n3(p, T, 9), std::invalid_argument);
}

TEST(Gadgets, N3IntegerTable) {
  auto p = GadgetParams::for_dimension(3);
  p.n3_W = 5;
  std::vector<long> T;
  for (long t = 0; t <= 10; ++t) T.push_back(t);
  for (long ts : T) {
    const auto n3 = build_n3(p, T, ts);
    for (long t : T) {
      for (int i = 0; i <= 100; ++i) {
        const Rational s = p.n3_W * ratio(i, 100);
        const Rational expect = relu(Rational(t == ts ? 1 : 0) - s);
        EXPECT_EQ(eval2(n3, s, t), expect) << "t*=" << ts << " t=" << t << " s=" << s;
      }
    }
  }
}

TEST(Gadgets, OneOverDeltaIndicatorDeviates) {
  auto p = GadgetParams::for_dimension(10);
  p.n3_indicator_variant = IndicatorVariant::kOneOverDelta;
  const auto ind = build_n3_indicator(p, 5);
  for (long t = 0; t <= 4; ++t) EXPECT_EQ(eval1(ind, t), 100);
  EXPECT_EQ(eval1(ind, 5), 0);
  EXPECT_EQ(eval1(ind, 6), 0);
  p.n3_indicator_variant = IndicatorVariant::kUnitSlope;
  const auto unit = build_n3_indicator(p, 5);
  for (long t = 0; t <= 4; ++t) EXPECT_EQ(eval1(unit, t), 1);
  EXPECT_EQ(eval1(unit, 5), 0);
}

TEST(Gadgets, Majority) {
  const auto m3 = build_majority(3);
  const Rational a[] = {1, 1, -1}, b[] = {-1, -1, -1};
  EXPECT_EQ(eval_exact(m3, a), 1);
  EXPECT_EQ(eval_exact(m3, b), 0);
  const auto m5 = build_majority(5);
  for (int mask = 0; mask < 32; ++mask) {
    std::vector<Rational> x;
    int votes = 0;
    for (int j = 0; j < 5; ++j) {
      const int v = (mask >> j) & 1 ? 1 : -1;
      x.push_back(v);
      votes += v;
    }
    EXPECT_EQ(eval_exact(m5, x), votes > 0 ? 1 : 0);
  }
  EXPECT_THROW(build_majority(4), std::invalid_argument);
  EXPECT_THROW(build_majority(0), std::invalid_argument);
}

TEST(Gadgets, ParamValidation) {
  auto p = GadgetParams::for_dimension(4);
  EXPECT_EQ(p.delta, q("1/16"));
  p.n2_scale = q("1/2");
  EXPECT_THROW(build_n2(p), std::invalid_argument);
  EXPECT_EQ(sign_of(Rational(0)), 1);
  EXPECT_EQ(sign_of(-0.0), 1);
}

}  // namespace
}  // namespace hardnet
