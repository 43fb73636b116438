#include <gtest/gtest.h>

#include "hkglue/checks.hpp"
#include "hkglue/errors.hpp"

using namespace hkglue;

TEST(Checks, CheapChecksPassAtDefaults) {
  for (const auto& r : {check_flux(), check_balancing(), check_topology(), check_green_asymptotics()}) {
    EXPECT_TRUE(r.pass) << r.id << " " << r.title;
    EXPECT_TRUE(r.failures.empty());
  }
}

TEST(Checks, TightenedToleranceFailsAndNamesTheCondition) {
  CheckTolerances t;
  set_tolerance(t, "flux", 1e-300);
  const CheckResult r = check_flux(t);
  EXPECT_FALSE(r.pass);
  ASSERT_FALSE(r.failures.empty());
  EXPECT_NE(r.failures.front().find("flux"), std::string::npos);
}

TEST(Checks, BudgetFailureStaysOutOfSerialization) {
  CheckTolerances t;
  set_tolerance(t, "budget5", 1e-300);
  const CheckResult slow = check_balancing(t);
  EXPECT_FALSE(slow.pass);
  EXPECT_EQ(serialize({slow}), serialize({check_balancing()}));
}

TEST(Checks, ToleranceNamesRoundTrip) {
  CheckTolerances t;
  for (const auto& n : tolerance_names()) EXPECT_NO_THROW(set_tolerance(t, n, 0.5)) << n;
  EXPECT_THROW(set_tolerance(t, "nope", 1.0), ConfigError);
  EXPECT_THROW(set_tolerance(t, "flux", -1.0), ConfigError);
  EXPECT_THROW(set_tolerance(t, "budget9", 1.0), ConfigError);
}

TEST(Checks, SerializationIsDeterministic) {
  const auto a = serialize({check_hk_algebra(3, {}, 50), check_closedness(3, {}, 8), check_topology()});
  const auto b = serialize({check_hk_algebra(3, {}, 50), check_closedness(3, {}, 8), check_topology()});
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("1 hyperkahler algebra PASS"), std::string::npos);
}

TEST(ModelResidualsTest, DefaultAlgStarIsClean) {
  ALGStarParams p;
  p.nu = 2;
  p.kappa0 = 1.0;
  const ModelResiduals r = model_residuals(p, 1, 40);
  EXPECT_LT(r.q_residual_max, 1e-10);
  EXPECT_LT(r.selfdual_residual_max, 1e-9);
  EXPECT_LT(r.closedness_residual_max, 1e-4);
  EXPECT_LT(r.iota_invariance_residual, 1e-10);
}

TEST(ModelResidualsTest, AlgSectorInvariance) {
  const ModelResiduals r = model_residuals(make_alg_params("III", 1.0, 1.0), 2, 40);
  EXPECT_LT(r.q_residual_max, 1e-10);
  EXPECT_LT(r.iota_invariance_residual, 1e-10);
}

TEST(ModelResidualsTest, InjectedControlBreaksClosedness) {
  const ModelResiduals r = model_residuals(ALGStarParams{}, 1, 20, true);
  EXPECT_LT(r.q_residual_max, 1e-10);
  EXPECT_GT(r.closedness_residual_max, 1e-2);
}
