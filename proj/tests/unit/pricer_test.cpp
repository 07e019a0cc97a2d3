#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "sve/edgeworth.hpp"
#include "sve/ergodic.hpp"
#include "sve/error.hpp"
#include "sve/gaussian.hpp"
#include "sve/pricer.hpp"

namespace {

TEST(BlackScholes, KnownPutAndParity) {
  // S = K = 1, sigma = 0.2, T = 1, r = 0: put = 2 N(0.1) - 1.
  EXPECT_NEAR(sve::bs_put(1.0, 0.04, 0.0, 1.0), 2.0 * sve::norm_cdf(0.1) - 1.0, 1e-15);
  const double d = std::exp(-0.03);
  for (double k : {0.7, 1.0, 1.4})
    EXPECT_NEAR(sve::bs_call(k, 0.09, 0.1, d) - sve::bs_put(k, 0.09, 0.1, d),
                std::exp(0.1) - d * k, 1e-14);
}

TEST(BlackScholes, ImpliedVolRoundTrip) {
  const double d = std::exp(-0.02);
  for (double vol : {0.05, 0.2, 0.8})
    for (double k : {0.6, 1.0, 1.5})
      for (bool call : {false, true}) {
        const double s2 = vol * vol * 0.5;
        const double p = call ? sve::bs_call(k, s2, 0.0, d) : sve::bs_put(k, s2, 0.0, d);
        const double intrinsic = std::max(call ? 1.0 - d * k : d * k - 1.0, 0.0);
        if (p - intrinsic < 1e-8) continue;  // no time value left to invert
        EXPECT_NEAR(sve::implied_vol(p, k, 0.5, 0.0, d, call), vol, 1e-9) << vol << " " << k;
      }
  EXPECT_THROW(sve::implied_vol(2.0, 1.0, 1.0, 0.0, 1.0, false), sve::Error);
}

TEST(Expansion, CorrectionPolynomialIsHermiteCombination) {
  const double a = -0.03, s2 = 0.05;
  const auto c = sve::correction_polynomial(a, s2);
  for (double z : {-2.0, 0.3, 1.7}) {
    const double expect = -a * (z * z - 1.0) + a / std::sqrt(s2) * (z * z * z - 3.0 * z);
    EXPECT_NEAR(sve::eval_polynomial(c, z), expect, 1e-14);
  }
}

TEST(Expansion, PutClosedFormMatchesQuadrature) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> uk(0.7, 1.3), us(0.01, 0.25), ua(-0.05, 0.05);
  for (int i = 0; i < 20; ++i) {
    const double k = uk(gen), s2 = us(gen), a = ua(gen);
    const auto q = sve::expansion_price(sve::Payoff::put(k), a, s2, 0.0, 1.0);
    EXPECT_NEAR(q.corrected, sve::put_closed_form(k, a, s2, 0.0, 1.0), 1e-8);
    EXPECT_NEAR(q.baseline, sve::bs_put(k, s2, 0.0, 1.0), 1e-12);
  }
}

TEST(Expansion, ForwardIsPreserved) {
  // The correction integrates e^z to zero, so parity holds for the expansion too.
  const double a = 0.04, s2 = 0.09, d = std::exp(-0.05);
  const double k = 1.1;
  const auto call = sve::expansion_price(sve::Payoff::call(k), a, s2, 0.0, d);
  const auto direct = sve::expansion_price(
      sve::Payoff::make_custom([k](double z) { return std::max(std::exp(z) - k, 0.0); }, 50.0,
                               {std::log(k)}),
      a, s2, 0.0, d);
  EXPECT_NEAR(call.corrected, direct.corrected, 1e-10);
  const auto fwd = sve::expansion_price(
      sve::Payoff::make_custom([](double z) { return std::exp(z); }, 1e4), a, s2, 0.0, d);
  EXPECT_NEAR(fwd.corrected, 1.0, 1e-10);
}

TEST(Expansion, GramCharlierCrossCheck) {
  const double a = -0.035, s2 = 0.06, k = 0.95, d = 1.0;
  const std::vector<double> moments{1.0, 0.0, -2.0 * a, 6.0 * a / std::sqrt(s2)};
  const double centre = -0.5 * s2;
  const auto f = [&](double y) { return std::max(k - std::exp(centre + std::sqrt(s2) * y), 0.0); };
  const std::vector<double> cut{(std::log(k) - centre) / std::sqrt(s2)};
  const double gc = sve::gram_charlier_expectation(f, moments, 3, cut);
  EXPECT_NEAR(gc, sve::expansion_price(sve::Payoff::put(k), a, s2, 0.0, d).corrected, 1e-10);
}

TEST(Expansion, DigitalAndValidation) {
  const auto q = sve::expansion_price(sve::Payoff::digital(1.0), 0.0, 0.04, 0.0, 1.0);
  EXPECT_NEAR(q.corrected, sve::norm_cdf(0.1), 1e-12);
  EXPECT_THROW(sve::Payoff::put(-1.0).validate(), sve::Error);
  EXPECT_THROW(sve::Payoff::make_custom([](double) { return 1.0; }, 0.0).validate(), sve::Error);
}

TEST(Heston, AlphaSigmaAndPsiClosedForms) {
  for (double eta : {1.0, 0.5}) {
    const sve::HestonParams p{1.0, 1.0, 0.5, eta, -0.6};
    const auto spec = sve::heston_log(p);
    const auto m = sve::build_ergodic_measure(spec);
    sve::MarketSpec mk;
    mk.maturity = 0.7;
    EXPECT_NEAR(sve::alpha_coefficient(m, spec).value, eta * p.rho / (2.0 * p.xi), 1e-10);
    EXPECT_NEAR(sve::sigma_total(m, spec, mk), p.mu * mk.maturity, 1e-10);
    const sve::PsiFunction psi(m, spec, mk);
    for (double x : {-1.5, -0.2, 0.4})
      EXPECT_NEAR(psi(x), -mk.maturity / (p.xi * m.epsilon * spec.c(x)), 1e-9) << x;
  }
}

TEST(Heston, RhoZeroGivesZeroAlpha) {
  const auto spec = sve::heston_log({1.0, 0.04, 0.5, 0.1, 0.0});
  EXPECT_EQ(sve::alpha_coefficient(sve::build_ergodic_measure(spec), spec).value, 0.0);
}

TEST(Expansion, AlphaIdentityThroughPsi) {
  sve::MarketSpec mk;
  mk.maturity = 1.3;
  for (const auto& spec : {sve::heston_log({2.0, 0.5, 0.5, 0.3, -0.7}), sve::fouque_ou({})}) {
    const auto m = sve::build_ergodic_measure(spec);
    const double s2 = sve::sigma_total(m, spec, mk);
    const sve::PsiFunction psi(m, spec, mk);
    const double via_psi =
        -m.epsilon *
        m.expectation([&](double x) { return spec.phi(x) * spec.rho(x) * psi(x); }).value /
        (2.0 * s2);
    const double direct = sve::alpha_coefficient(m, spec).value;
    EXPECT_NEAR(via_psi / direct, 1.0, 1e-6) << spec.name;
  }
}

TEST(Skew, LineAndCalibrationRoundTrip) {
  const double alpha = -0.02, phi2 = 0.04, r = 0.01;
  const auto line = sve::skew_line(alpha, phi2, r);
  EXPECT_NEAR(line.a, alpha / std::sqrt(phi2), 1e-15);
  EXPECT_NEAR(line.v3, -alpha * phi2, 1e-15);
  EXPECT_NEAR(line.v2, 2.0 * line.v3, 1e-15);
  std::vector<sve::IvPoint> pts;
  for (double k : {0.8, 0.9, 1.0, 1.1, 1.2})
    for (double t : {0.5, 1.0})
      pts.push_back({k, t, line.a * std::log(k) / t + line.b});
  const auto fit = sve::calibrate_skew(pts, 1.0, r, line.sigma_bar);
  EXPECT_NEAR(fit.a, line.a, 1e-12);
  EXPECT_NEAR(fit.b, line.b, 1e-12);
  EXPECT_NEAR(fit.v2, line.v2, 1e-12);
  EXPECT_NEAR(fit.v3, line.v3, 1e-12);
  EXPECT_LT(fit.residual_norm, 1e-12);
}

TEST(Skew, UnidentifiableDesign) {
  const std::vector<sve::IvPoint> pts{{1.0, 1.0, 0.2}, {1.0, 1.0, 0.21}};
  try {
    sve::calibrate_skew(pts, 1.0, 0.0);
    FAIL();
  } catch (const sve::Error& e) {
    EXPECT_EQ(e.kind(), sve::ErrorKind::Unidentifiable);
  }
}

TEST(Skew, SyntheticHestonSurface) {
  const auto spec = sve::heston_log({1.0, 0.04, 0.5, 0.1, -0.5});
  const auto m = sve::build_ergodic_measure(spec);
  sve::MarketSpec mk;
  std::vector<sve::IvPoint> pts;
  double alpha = 0.0, sbar = 0.0;
  for (double k : {0.9, 0.95, 1.0, 1.05, 1.1}) {
    const auto q = sve::price_corrected(sve::Payoff::put(k), m, spec, mk);
    alpha = q.alpha;
    sbar = std::sqrt(q.sigma2 / mk.maturity);
    pts.push_back({k, mk.maturity, sve::implied_vol(q.price_corrected, k, 1.0, 0.0, 1.0, false)});
  }
  const auto fit = sve::calibrate_skew(pts, 1.0, 0.0);
  EXPECT_NEAR(fit.a, alpha / sbar, 0.15 * std::abs(alpha / sbar));
}

}  // namespace
