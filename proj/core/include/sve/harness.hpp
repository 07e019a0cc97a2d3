#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sve/cycles.hpp"
#include "sve/edgeworth.hpp"
#include "sve/ergodic.hpp"
#include "sve/mc.hpp"
#include "sve/model.hpp"
#include "sve/pricer.hpp"

namespace sve {

struct ConvergenceOptions {
  std::vector<double> etas{0.4, 0.2, 0.1};
  McConfig mc;                        // n_paths, seed, scheme, antithetic, threads
  double dt_factor = 1e-4;            // dt = dt_factor * eta^2
  std::size_t max_paths = 2'000'000;  // cap for automatic path escalation
};

struct ConvergenceReport {
  std::vector<double> etas;
  std::vector<double> errors;     // |price_mc - price_corrected|
  std::vector<double> mc_errors;  // standard errors
  std::vector<double> price_mc;
  std::vector<double> price_expansion;
  std::vector<std::size_t> paths;
  std::vector<double> runtime_s;
  double fitted_order = 0.0;
  bool order_identified = false;
  std::string note;
};

/// Prices `payoff` by Monte Carlo and by the expansion on the rescaled models
/// (b / eta^2, c / eta) of `base` and fits the slope of log error against log eta.
ConvergenceReport convergence_study(const DiffusionSpec& base, const MarketSpec& market,
                                    const Payoff& payoff, const ConvergenceOptions& options);

/// Weighted least-squares slope of log y against log x.
double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y,
                     const std::vector<double>& weights);

struct HestonCheck {
  double alpha = 0.0;
  double alpha_expected = 0.0;
  double alpha_rel_error = 0.0;
  double sigma2 = 0.0;
  double sigma2_expected = 0.0;
  double sigma2_rel_error = 0.0;
  double runtime_s = 0.0;
  bool pass = false;
  std::vector<std::string> warnings;
};

/// Quadrature alpha and Sigma against eta rho / (2 xi) and mu T.
HestonCheck heston_analytic_check(const HestonParams& params, double maturity,
                                  double tolerance = 1e-5);

struct InvarianceCheck {
  double eta = 1.0;
  double max_pi_diff = 0.0;      // max relative difference of pi node values
  double max_s_diff = 0.0;       // max relative difference of s node values
  double epsilon_ratio_error = 0.0;  // |eps_eta / (eta eps_1) - 1|
  bool pass = false;
};

/// Rebuilds the measure of rescale(base, eta) on the window of the eta = 1 measure.
InvarianceCheck invariance_check(const DiffusionSpec& base, double eta, double tolerance = 1e-10);

struct FitOptions {
  double t_scale = 100.0;          // T_n
  std::size_t n_samples = 100000;  // functional samples
  McConfig mc;                     // dt (fast scale), seed, scheme, threads
  std::size_t cycle_paths = 64;
  double cycle_horizon = 4000.0;   // fast time per cycle path
  std::optional<double> x0;        // cycle levels; Pi-quantiles 0.35 / 0.65 by default
  std::optional<double> x1;
};

struct FitReport {
  double statistic = 0.0;           // sup |F_emp - F_q|
  double baseline_statistic = 0.0;  // sup |F_emp - Phi(./sqrt v)|
  std::size_t n_samples = 0;
  EdgeworthDensity density;
  CycleStats stats;
  double sigma2 = 0.0;
  double epsilon = 0.0;
  double x0 = 0.0, x1 = 0.0;
  bool pass = false;
};

/// Samples sqrt(T_n) A(K_{T_n} / T_n) and compares its law with the Edgeworth
/// density built from cycle statistics and with the same-variance Gaussian.
FitReport edgeworth_fit_study(const DiffusionSpec& spec, const MarketSpec& market,
                              const FitOptions& options);

/// Quantile of the ergodic distribution by bisection on the cumulative mass.
double ergodic_quantile(const ErgodicMeasure& measure, double p);

/// sup_x |F_emp(x) - F(x)| over a sorted sample.
double ks_distance(const std::vector<double>& sorted, const std::function<double(double)>& cdf);

}  // namespace sve
