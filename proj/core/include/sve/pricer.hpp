#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sve/ergodic.hpp"
#include "sve/model.hpp"

namespace sve {

/// Payoff as a function of the terminal log-price.
struct Payoff {
  enum class Kind { Put, Call, Digital, Custom };

  Kind kind = Kind::Put;
  double strike = 1.0;
  std::function<double(double)> custom;
  std::vector<double> breakpoints;  // kinks and jumps in log-price
  double bound = 0.0;               // sup |f|, required for custom payoffs

  static Payoff put(double strike);
  static Payoff call(double strike);
  /// 1{Z_T <= log K}.
  static Payoff digital(double strike);
  static Payoff make_custom(std::function<double(double)> f, double bound,
                            std::vector<double> breakpoints = {});

  double operator()(double z) const;
  /// Kinks and jumps, including log K for the vanilla kinds.
  std::vector<double> kinks() const;
  void validate() const;
};

// Black-Scholes in terms of total variance Sigma, log-spot z0 and discount D.
double bs_d2(double strike, double sigma2, double z0, double discount);
double bs_put(double strike, double sigma2, double z0, double discount);
double bs_call(double strike, double sigma2, double z0, double discount);

/// Black-Scholes implied volatility by safeguarded Newton with bisection
/// fallback; tolerance 1e-10 in volatility. Throws Domain when the price lies
/// outside the no-arbitrage bounds.
double implied_vol(double price, double strike, double maturity, double z0, double discount,
                   bool is_call);

/// Sigma = Pi[phi^2] T.
double sigma_total(const ErgodicMeasure& measure, const DiffusionSpec& spec,
                   const MarketSpec& market);

/// alpha = -int F(x) phi(x) rho(x) / c(x) dx with F(x) = int_{-inf}^x (phi^2/Pi[phi^2] - 1) dPi.
Estimate alpha_coefficient(const ErgodicMeasure& measure, const DiffusionSpec& spec);

/// psi(x) = 2 eps c(x) s'(x) int_{-inf}^x (T phi^2 - Sigma) dPi, with the
/// cumulative integral precomputed once.
class PsiFunction {
 public:
  PsiFunction(const ErgodicMeasure& measure, const DiffusionSpec& spec, const MarketSpec& market);

  double operator()(double x) const;
  /// psi at the measure's grid nodes.
  std::vector<double> node_values() const;

 private:
  const ErgodicMeasure* m_;
  const DiffusionSpec* spec_;
  CumulativeIntegral cum_;
};

/// One-off evaluation of psi; build a PsiFunction for repeated use.
double psi_function(const ErgodicMeasure& measure, const DiffusionSpec& spec,
                    const MarketSpec& market, double x);

/// Coefficients (c0, c1, c2, c3) of p(z) = alpha (1 - z^2) + alpha/sqrt(Sigma) (z^3 - 3z).
std::array<double, 4> correction_polynomial(double alpha, double sigma2);

double eval_polynomial(const std::array<double, 4>& coeffs, double z);

/// D E[(1 + p(N)) f(z0 - log D - Sigma/2 + sqrt(Sigma) N)] and the same with p = 0.
struct ExpansionPrice {
  double corrected = 0.0;
  double baseline = 0.0;
  double error = 0.0;
};

ExpansionPrice expansion_price(const Payoff& payoff, double alpha, double sigma2, double z0,
                               double discount);

/// P_BS(K, Sigma) - alpha d2 D K phi(d2).
double put_closed_form(double strike, double alpha, double sigma2, double z0, double discount);
double put_closed_form(double strike, const ErgodicMeasure& measure, const DiffusionSpec& spec,
                       const MarketSpec& market);

struct SkewLine {
  double a = 0.0;
  double b = 0.0;
  double v2 = 0.0;
  double v3 = 0.0;
  double sigma_bar = 0.0;
};

/// Implied-volatility line sigma_BS ~ a log(K/S)/T + b from alpha and Pi[phi^2].
SkewLine skew_line(double alpha, double mean_phi2, double rate);
SkewLine skew_line(double alpha, const ErgodicMeasure& measure, const DiffusionSpec& spec,
                   const MarketSpec& market);

struct ExpansionQuote {
  double sigma2 = 0.0;
  double alpha = 0.0;
  double alpha_error = 0.0;
  bool alpha_resolved = true;  // |alpha| exceeds its own error estimate
  double discount = 1.0;
  double price_corrected = 0.0;
  double price_bs = 0.0;
  double correction = 0.0;
  double price_error = 0.0;
  double skew_a = 0.0;
  double skew_b = 0.0;
  double v2 = 0.0;
  double v3 = 0.0;
  std::array<double, 4> poly{};
};

/// Full expansion quote. Calls are priced through put-call parity.
ExpansionQuote price_corrected(const Payoff& payoff, const ErgodicMeasure& measure,
                               const DiffusionSpec& spec, const MarketSpec& market);

struct IvPoint {
  double strike = 0.0;
  double maturity = 0.0;
  double iv = 0.0;
};

struct SkewFit {
  double a = 0.0;
  double b = 0.0;
  double v2 = 0.0;
  double v3 = 0.0;
  double sigma_bar = 0.0;
  double residual_norm = 0.0;
};

/// Least-squares fit of iv = a log(K/S)/T + b; V2 and V3 follow with sigma_bar
/// set to the fitted b unless supplied.
SkewFit calibrate_skew(std::span<const IvPoint> points, double spot, double rate,
                       std::optional<double> sigma_bar = std::nullopt);

}  // namespace sve
