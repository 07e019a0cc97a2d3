#pragma once

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sve {

using ScalarFn = std::function<double(double)>;

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const { return x > lo && x < hi; }
  bool empty() const { return !(lo < hi); }
};

/// Mean-reverting variance V = exp(X) with dV = kappa (theta - V) dt + sigma V^power dW1.
/// Only attached by presets where phi(x) = exp(x / 2) and rho is constant, so a
/// simulator may work on V directly.
struct VarianceDynamics {
  double kappa = 0.0;
  double theta = 0.0;
  double sigma = 0.0;
  double power = 0.5;
  double rho = 0.0;
};

/// Coefficients of dZ = (r - phi^2/2) dt + phi (rho dW1 + sqrt(1 - rho^2) dW2),
/// dX = b dt + c dW1.
struct DiffusionSpec {
  ScalarFn b;
  ScalarFn c;
  ScalarFn phi;
  ScalarFn rho;
  Interval u_interval;
  double x0 = 0.0;
  std::optional<VarianceDynamics> variance;
  std::string name = "custom";
  std::vector<std::string> warnings;

  /// c(x), throwing SingularCoefficient unless it is finite and positive.
  double diffusion(double x) const;
  /// b(x) / c(x)^2 with the same checks.
  double drift_ratio(double x) const;

  /// Checks that all functions are set, u_interval is non-empty, and that
  /// |rho| <= 1 and c > 0 at a few probe points.
  void validate() const;
};

struct MarketSpec {
  double spot_log = 0.0;
  double rate = 0.0;
  ScalarFn rate_curve;  // optional r(t); overrides `rate` when set
  double maturity = 1.0;

  double integrated_rate() const;
  double discount() const;
  double average_rate() const { return integrated_rate() / maturity; }
  void validate() const;
};

/// (b, c) -> (b / eta^2, c / eta): the same ergodic law on a faster clock.
DiffusionSpec rescale(const DiffusionSpec& spec, double eta);

struct OuParams {
  double m = 0.0;
  double nu = 0.70710678118654752;
  double eta = 1.0;
  double rho = -0.5;
  double sigma = 1.0;  // phi(x) = sigma * exp(x) unless `phi` is set
  ScalarFn lambda;     // market price of volatility risk, zero if unset
  ScalarFn phi;
};

/// b = (m - x)/eta^2 - nu sqrt(2) Lambda(x)/eta, c = nu sqrt(2)/eta.
DiffusionSpec fouque_ou(const OuParams& p);

struct HestonParams {
  double xi = 1.0;
  double mu = 0.04;
  double nu = 0.5;
  double eta = 1.0;
  double rho = -0.5;
};

/// Log-variance coordinates: b = eta^-2 (xi mu e^-x - xi - e^{-2(1-nu)x}/2),
/// c = eta^-1 e^{-(1-nu)x}, phi = e^{x/2}.
DiffusionSpec heston_log(const HestonParams& p);

struct SinhParams {
  double xi = 5.0;
  double mu = 0.0;     // phi^2 grows like e^{mu |x|}
  double sigma = 0.2;  // phi(x) = sigma (1 + tanh(x)/2) cosh(x)^{mu/2}
  double eta = 1.0;
  double rho = -0.5;
};

/// b = -eta^-2 (1/2 + xi) tanh(x)/cosh(x)^2, c = eta^-1 / cosh(x).
DiffusionSpec sinh_mix(const SinhParams& p);

/// Builds a preset by name from a flat parameter map. Unknown names or
/// parameters throw Configuration errors naming the offender.
DiffusionSpec preset(std::string_view name, const std::map<std::string, double>& params);

}  // namespace sve
