#include <gtest/gtest.h>

#include "hardnet/verify.hpp"

namespace hardnet {
namespace {

TEST(Verify, ReductionConsistencySmall) {
  const auto cf = build_lwr({2, 2, 4, {1, 3}});
  const auto r = reduction_consistency(cf, lift_params(cf), DistributionSpec::gaussian(), 3000, 1, 2);
  EXPECT_EQ(r.checked, 3000u);
  EXPECT_EQ(r.failures, 0u);
  ASSERT_EQ(r.ks.size(), 4u);
  EXPECT_LT(r.max_ks, 1.63 / std::sqrt(3000.0));
}

TEST(Verify, GoodSetEstimateIsThreadIndependent) {
  const auto dist = DistributionSpec::symmetric_uniform();
  const auto a = good_set_estimate(dist, 6, 5000, 3, 1);
  const auto b = good_set_estimate(dist, 6, 5000, 3, 4);
  EXPECT_EQ(a.empirical, b.empirical);
  // uniform on [-1, 1]: each coordinate misses (-2/36, 2/36) with probability 1 - 2/36
  EXPECT_NEAR(a.predicted, std::pow(1 - 2.0 / 36, 6), 1e-9);
  EXPECT_TRUE(a.within_3sigma());
}

TEST(Verify, GoodSetFitRecoversSlope) {
  const auto fit = good_set_fit(DistributionSpec::symmetric_uniform(), {10, 20, 40, 80}, 40000, 9);
  EXPECT_TRUE(fit.monotone);
  // 1 - (1 - 2/d^2)^d is about 2/d for the unit uniform law
  EXPECT_NEAR(fit.c, 2.0, 0.15);
  EXPECT_LT(fit.max_residual, 0.01);
}

}  // namespace
}  // namespace hardnet
