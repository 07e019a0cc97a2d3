#include <gtest/gtest.h>

#include <cmath>

#include "sve/error.hpp"
#include "sve/model.hpp"

namespace {

TEST(Model, HestonLogCoefficients) {
  const sve::HestonParams p{2.0, 0.3, 0.5, 0.5, -0.7};
  const auto s = sve::heston_log(p);
  const double x = -0.4;
  EXPECT_NEAR(s.b(x), (p.xi * p.mu * std::exp(-x) - p.xi - 0.5 * std::exp(-x)) / 0.25, 1e-14);
  EXPECT_NEAR(s.c(x), std::exp(-0.5 * x) / 0.5, 1e-14);
  EXPECT_NEAR(s.phi(x), std::exp(0.5 * x), 1e-15);
  EXPECT_DOUBLE_EQ(s.rho(x), -0.7);
  ASSERT_TRUE(s.variance.has_value());
  EXPECT_NEAR(s.variance->kappa, p.xi / 0.25, 1e-14);
  EXPECT_NEAR(s.variance->theta, p.mu, 1e-15);
  EXPECT_NEAR(s.variance->sigma, 2.0, 1e-15);
  // Drift ratio b / c^2 = xi mu - xi e^x - 1/2 for nu = 1/2.
  EXPECT_NEAR(s.drift_ratio(0.7), p.xi * p.mu - p.xi * std::exp(0.7) - 0.5, 1e-13);
}

TEST(Model, HestonWarnsWhenVarianceCanVanish) {
  const auto low = sve::heston_log({1.0, 0.04, 0.5, 1.0, -0.5});
  EXPECT_FALSE(low.warnings.empty());
  const auto high = sve::heston_log({1.0, 1.0, 0.5, 1.0, -0.5});
  EXPECT_TRUE(high.warnings.empty());
}

TEST(Model, PresetRejectsUnknownParameter) {
  try {
    sve::preset("heston_log", {{"xi", 1.0}, {"kappa", 2.0}});
    FAIL();
  } catch (const sve::Error& e) {
    EXPECT_NE(std::string(e.what()).find("kappa"), std::string::npos);
  }
  EXPECT_THROW(sve::preset("nope", {}), sve::Error);
  EXPECT_NO_THROW(sve::preset("sinh_mix", {{"xi", 3.0}}));
}

TEST(Model, InvalidParameters) {
  EXPECT_THROW(sve::fouque_ou({0.0, -1.0}), sve::Error);
  sve::OuParams p;
  p.rho = 1.5;
  EXPECT_THROW(sve::fouque_ou(p), sve::Error);
  EXPECT_THROW(sve::rescale(sve::fouque_ou({}), 0.0), sve::Error);
}

TEST(Model, VanishingDiffusionIsSingular) {
  auto s = sve::fouque_ou({});
  s.c = [](double x) { return x; };
  try {
    s.drift_ratio(0.0);
    FAIL();
  } catch (const sve::Error& e) {
    EXPECT_EQ(e.kind(), sve::ErrorKind::SingularCoefficient);
  }
}

TEST(Model, RescaleScalesCoefficients) {
  const auto base = sve::heston_log({1.0, 1.0, 0.5, 1.0, -0.5});
  const auto r = sve::rescale(base, 0.25);
  for (double x : {-1.0, 0.0, 0.8}) {
    EXPECT_NEAR(r.b(x), base.b(x) / 0.0625, 1e-12);
    EXPECT_NEAR(r.c(x), base.c(x) / 0.25, 1e-12);
    EXPECT_NEAR(r.drift_ratio(x), base.drift_ratio(x), 1e-12);
  }
  EXPECT_NEAR(r.variance->kappa, base.variance->kappa / 0.0625, 1e-12);
}

TEST(Model, MarketDiscounting) {
  sve::MarketSpec m;
  m.rate = 0.05;
  m.maturity = 2.0;
  EXPECT_NEAR(m.discount(), std::exp(-0.1), 1e-15);
  m.rate_curve = [](double t) { return 0.02 + 0.01 * t; };
  EXPECT_NEAR(m.integrated_rate(), 0.04 + 0.02, 1e-14);
  EXPECT_NEAR(m.average_rate(), 0.03, 1e-14);
  m.maturity = -1.0;
  EXPECT_THROW(m.validate(), sve::Error);
}

}  // namespace
