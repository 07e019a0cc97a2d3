#include "sve/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "sve/error.hpp"
#include "sve/gaussian.hpp"

namespace sve {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace

double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y,
                     const std::vector<double>& weights) {
  if (x.size() != y.size() || x.size() != weights.size() || x.size() < 2)
    throw Error(ErrorKind::Precondition, "slope fit needs matching arrays of length >= 2");
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0 && weights[i] > 0.0))
      throw Error(ErrorKind::Domain, "slope fit needs positive values and weights");
    sw += weights[i];
    sx += weights[i] * std::log(x[i]);
    sy += weights[i] * std::log(y[i]);
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += weights[i] * dx * dx;
    sxy += weights[i] * dx * (std::log(y[i]) - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorKind::Unidentifiable, "slope fit needs distinct x values");
  return sxy / sxx;
}

ConvergenceReport convergence_study(const DiffusionSpec& base, const MarketSpec& market,
                                    const Payoff& payoff, const ConvergenceOptions& options) {
  const auto& etas = options.etas;
  if (etas.size() < 3)
    throw Error(ErrorKind::Precondition, "convergence study needs at least three eta values");
  for (std::size_t i = 0; i < etas.size(); ++i) {
    if (!(etas[i] > 0.0)) throw Error(ErrorKind::Precondition, "eta values must be positive");
    if (i > 0 && !(etas[i] < etas[i - 1]))
      throw Error(ErrorKind::Precondition, "eta values must be strictly decreasing");
  }
  payoff.validate();
  market.validate();

  ConvergenceReport rep;
  rep.etas = etas;
  std::optional<double> unresolved_from;
  for (double eta : etas) {
    const auto t0 = std::chrono::steady_clock::now();
    const DiffusionSpec spec = rescale(base, eta);
    const auto measure = build_ergodic_measure(spec);
    const auto quote = price_corrected(payoff, measure, spec, market);
    McConfig mc = options.mc;
    mc.dt = options.dt_factor * eta * eta;
    McEstimate est = price_mc(payoff, spec, market, mc);
    double err = std::abs(est.mean - quote.price_corrected);
    // The MC error must sit below half the measured error; otherwise quadruple
    // the paths (halving the standard error) while the cap allows.
    while (!(est.std_error < 0.5 * err) && mc.n_paths * 4 <= options.max_paths) {
      mc.n_paths *= 4;
      est = price_mc(payoff, spec, market, mc);
      err = std::abs(est.mean - quote.price_corrected);
    }
    if (!(est.std_error < 0.5 * err) && !unresolved_from) unresolved_from = eta;
    rep.errors.push_back(err);
    rep.mc_errors.push_back(est.std_error);
    rep.price_mc.push_back(est.mean);
    rep.price_expansion.push_back(quote.price_corrected);
    rep.paths.push_back(mc.n_paths);
    rep.runtime_s.push_back(seconds_since(t0));
  }
  if (unresolved_from) {
    std::ostringstream os;
    os << "order unidentifiable below eta = " << *unresolved_from
       << " (Monte Carlo noise exceeds half the error)";
    rep.note = os.str();
    rep.order_identified = false;
    return rep;
  }
  std::vector<double> w(etas.size());
  for (std::size_t i = 0; i < etas.size(); ++i) {
    const double rel = rep.mc_errors[i] / rep.errors[i];
    w[i] = rel > 0.0 ? 1.0 / (rel * rel) : 1e12;
  }
  rep.fitted_order = fit_log_slope(etas, rep.errors, w);
  rep.order_identified = true;
  return rep;
}

HestonCheck heston_analytic_check(const HestonParams& params, double maturity, double tolerance) {
  const auto t0 = std::chrono::steady_clock::now();
  const DiffusionSpec spec = heston_log(params);
  const auto measure = build_ergodic_measure(spec);
  MarketSpec market;
  market.maturity = maturity;
  HestonCheck out;
  out.warnings = spec.warnings;
  out.alpha = alpha_coefficient(measure, spec).value;
  out.alpha_expected = params.eta * params.rho / (2.0 * params.xi);
  out.alpha_rel_error = rel_diff(out.alpha, out.alpha_expected);
  out.sigma2 = sigma_total(measure, spec, market);
  out.sigma2_expected = params.mu * maturity;
  out.sigma2_rel_error = rel_diff(out.sigma2, out.sigma2_expected);
  out.pass = out.alpha_rel_error <= tolerance && out.sigma2_rel_error <= tolerance;
  out.runtime_s = seconds_since(t0);
  return out;
}

InvarianceCheck invariance_check(const DiffusionSpec& base, double eta, double tolerance) {
  const auto m1 = build_ergodic_measure(base);
  MeasureOptions opt;
  opt.window = m1.window;
  const auto m1w = build_ergodic_measure(base, opt);
  const auto me = build_ergodic_measure(rescale(base, eta), opt);
  InvarianceCheck out;
  out.eta = eta;
  if (me.grid.size() != m1w.grid.size())
    throw Error(ErrorKind::Precondition, "rescaled measure produced a different node set");
  for (std::size_t j = 0; j < me.grid.size(); ++j) {
    out.max_pi_diff = std::max(out.max_pi_diff, rel_diff(me.pi_vals[j], m1w.pi_vals[j]));
    out.max_s_diff = std::max(out.max_s_diff, std::abs(me.s_vals[j] - m1w.s_vals[j]) /
                                                  std::max(1.0, std::abs(m1w.s_vals[j])));
  }
  out.epsilon_ratio_error = std::abs(me.epsilon / (eta * m1w.epsilon) - 1.0);
  out.pass = out.max_pi_diff <= tolerance && out.max_s_diff <= tolerance &&
             out.epsilon_ratio_error <= tolerance;
  return out;
}

double ergodic_quantile(const ErgodicMeasure& measure, double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::Domain, "quantile level must lie in (0, 1)");
  const CumulativeIntegral cdf(measure, [](double) { return 1.0; });
  double lo = measure.window.first, hi = measure.window.second;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < p * cdf.total() ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double ks_distance(const std::vector<double>& sorted, const std::function<double(double)>& cdf) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, std::abs(static_cast<double>(i + 1) / n - f),
                  std::abs(f - static_cast<double>(i) / n)});
  }
  return d;
}

FitReport edgeworth_fit_study(const DiffusionSpec& spec, const MarketSpec& market,
                              const FitOptions& options) {
  market.validate();
  if (!(options.t_scale > 0.0)) throw Error(ErrorKind::Domain, "t_scale must be positive");
  if (options.n_samples < 2) throw Error(ErrorKind::Precondition, "need at least two samples");
  const auto measure = build_ergodic_measure(spec);
  FitReport rep;
  rep.epsilon = measure.epsilon;
  rep.sigma2 = sigma_total(measure, spec, market);
  rep.x0 = options.x0 ? *options.x0 : ergodic_quantile(measure, 0.35);
  rep.x1 = options.x1 ? *options.x1 : ergodic_quantile(measure, 0.65);

  CycleSetup setup;
  setup.x0 = rep.x0;
  setup.x1 = rep.x1;
  setup.epsilon = measure.epsilon;
  setup.maturity = market.maturity;
  setup.sigma2 = rep.sigma2;
  setup.start = spec.x0;

  McConfig cyc = options.mc;
  cyc.n_paths = options.cycle_paths;
  cyc.antithetic = false;
  setup.horizon = options.cycle_horizon;
  const auto cycles = extract_cycles(spec, setup, cyc);
  rep.stats = cycle_stats(cycles);

  const double tn = options.t_scale;
  const double s = std::sqrt(rep.sigma2);
  const std::vector<double> grad{-1.0 / (2.0 * std::sqrt(tn) * s), std::sqrt(market.maturity) / s};
  const std::vector<double> hess(4, 0.0);
  rep.density = edgeworth_coefficients(rep.stats, grad, hess, tn);

  McConfig smp = options.mc;
  smp.n_paths = options.n_samples;
  smp.antithetic = false;
  smp.seed = options.mc.seed + 1;
  setup.horizon = tn;
  const auto ks = simulate_functional(spec, setup, smp);
  std::vector<double> y;
  y.reserve(ks.size());
  for (const auto& k : ks)
    y.push_back((std::sqrt(market.maturity) * k[1] / std::sqrt(tn) - k[0] / (2.0 * tn)) / s);
  std::sort(y.begin(), y.end());
  rep.n_samples = y.size();
  const auto q = rep.density;
  rep.statistic = ks_distance(y, [&](double z) { return q.cdf(z); });
  rep.baseline_statistic = ks_distance(y, [&](double z) { return norm_cdf(z / std::sqrt(q.v)); });
  rep.pass = rep.statistic < rep.baseline_statistic;
  return rep;
}

}  // namespace sve
