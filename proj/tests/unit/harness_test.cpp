#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "sve/error.hpp"
#include "sve/gaussian.hpp"
#include "sve/harness.hpp"

namespace {

TEST(HestonCheck, ClosedFormsAgree) {
  for (const sve::HestonParams& p :
       {sve::HestonParams{1.0, 0.04, 0.5, 1.0, -0.5}, sve::HestonParams{1.0, 1.0, 0.5, 1.0, -0.5},
        sve::HestonParams{4.0, 0.3, 0.5, 0.2, 0.7}}) {
    const auto r = sve::heston_analytic_check(p, 1.0);
    EXPECT_TRUE(r.pass) << p.xi << " " << p.mu;
    EXPECT_LT(r.alpha_rel_error, 1e-5);
    EXPECT_LT(r.sigma2_rel_error, 1e-5);
  }
}

TEST(HestonCheck, FellerViolationWarns) {
  const auto r = sve::heston_analytic_check({1.0, 0.04, 0.5, 1.0, -0.5}, 1.0);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(Invariance, RescaledMeasureIsUnchanged) {
  for (double eta : {0.5, 0.1}) {
    const auto r = sve::invariance_check(sve::fouque_ou({}), eta);
    EXPECT_TRUE(r.pass) << eta;
    EXPECT_LT(r.epsilon_ratio_error, 1e-10);
  }
}

TEST(FitLogSlope, RecoversPowerLaw) {
  const std::vector<double> x{0.4, 0.2, 0.1, 0.05};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * v * v);
  EXPECT_NEAR(sve::fit_log_slope(x, y, {1.0, 2.0, 3.0, 4.0}), 2.0, 1e-12);
}

TEST(Convergence, NeedsThreeDecreasingEtas) {
  sve::ConvergenceOptions o;
  o.etas = {0.3};
  try {
    sve::convergence_study(sve::fouque_ou({}), {}, sve::Payoff::put(1.0), o);
    FAIL();
  } catch (const sve::Error& e) {
    EXPECT_EQ(e.kind(), sve::ErrorKind::Precondition);
  }
  o.etas = {0.1, 0.2, 0.4};
  EXPECT_THROW(sve::convergence_study(sve::fouque_ou({}), {}, sve::Payoff::put(1.0), o),
               sve::Error);
}

TEST(Convergence, ConstantVolHasNoIdentifiableOrder) {
  // The expansion is exact, so only Monte Carlo noise remains.
  sve::OuParams p;
  p.rho = 0.0;
  p.phi = [](double) { return 0.2; };
  sve::MarketSpec mk;
  mk.maturity = 0.1;
  sve::ConvergenceOptions o;
  o.mc.n_paths = 2000;
  o.mc.antithetic = true;
  o.dt_factor = 0.1;
  o.max_paths = 8000;
  const auto r = sve::convergence_study(sve::fouque_ou(p), mk, sve::Payoff::put(1.0), o);
  EXPECT_FALSE(r.order_identified);
  EXPECT_FALSE(r.note.empty());
  ASSERT_EQ(r.errors.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_LE(r.paths[i], o.max_paths);
}

TEST(ErgodicQuantile, GaussianOu) {
  sve::OuParams p;
  p.m = 0.2;
  const auto m = sve::build_ergodic_measure(sve::fouque_ou(p));
  for (double q : {0.025, 0.5, 0.9})
    EXPECT_NEAR(sve::ergodic_quantile(m, q), p.m + p.nu * sve::norm_inv_cdf(q), 1e-7);
}

TEST(KsDistance, SmallSample) {
  const std::vector<double> s{0.1, 0.4, 0.7};
  // Uniform cdf: steps at k/3 against x.
  const double d = sve::ks_distance(s, [](double x) { return std::clamp(x, 0.0, 1.0); });
  EXPECT_NEAR(d, std::max({0.1, 1.0 / 3 - 0.1, 0.4 - 1.0 / 3, 2.0 / 3 - 0.4, 0.7 - 2.0 / 3,
                           1.0 - 0.7}),
              1e-15);
}

}  // namespace
