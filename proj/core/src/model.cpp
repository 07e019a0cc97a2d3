#include "sve/model.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "sve/error.hpp"
#include "sve/quadrature.hpp"

namespace sve {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

double DiffusionSpec::diffusion(double x) const {
  const double cx = c(x);
  if (!(cx > 0.0) || !std::isfinite(cx))
    throw Error(ErrorKind::SingularCoefficient, "c(" + fmt(x) + ") = " + fmt(cx));
  return cx;
}

double DiffusionSpec::drift_ratio(double x) const {
  const double cx = diffusion(x);
  const double bx = b(x);
  const double r = bx / (cx * cx);
  if (!std::isfinite(r))
    throw Error(ErrorKind::SingularCoefficient, "b/c^2 at x = " + fmt(x) + " is " + fmt(r));
  return r;
}

void DiffusionSpec::validate() const {
  if (!b || !c || !phi || !rho)
    throw Error(ErrorKind::Configuration, "diffusion spec is missing a coefficient function");
  if (u_interval.empty())
    throw Error(ErrorKind::Configuration, "u_interval is empty");
  for (double x : {x0, -1.0, 0.0, 1.0}) {
    diffusion(x);
    const double r = rho(x);
    if (!(std::abs(r) <= 1.0))
      throw Error(ErrorKind::Parameter, "|rho(" + fmt(x) + ")| = " + fmt(r) + " exceeds 1");
  }
}

double MarketSpec::integrated_rate() const {
  if (!rate_curve) return rate * maturity;
  const auto q = integrate(rate_curve, 0.0, maturity);
  if (!q.converged) throw Error(ErrorKind::Precision, "rate curve integral did not converge");
  return q.value;
}

double MarketSpec::discount() const { return std::exp(-integrated_rate()); }

void MarketSpec::validate() const {
  if (!(maturity > 0.0) || !std::isfinite(maturity))
    throw Error(ErrorKind::Parameter, "maturity must be positive, got " + fmt(maturity));
  if (!std::isfinite(spot_log))
    throw Error(ErrorKind::Parameter, "spot_log must be finite");
}

DiffusionSpec rescale(const DiffusionSpec& spec, double eta) {
  if (!(eta > 0.0)) throw Error(ErrorKind::Parameter, "eta must be positive");
  DiffusionSpec out = spec;
  const double e2 = eta * eta;
  out.b = [b = spec.b, e2](double x) { return b(x) / e2; };
  out.c = [c = spec.c, eta](double x) { return c(x) / eta; };
  if (out.variance) {
    out.variance->kappa /= e2;
    out.variance->sigma /= eta;
  }
  return out;
}

DiffusionSpec fouque_ou(const OuParams& p) {
  if (!(p.nu > 0.0)) throw Error(ErrorKind::Parameter, "fouque_ou: nu must be positive");
  if (!(p.eta > 0.0)) throw Error(ErrorKind::Parameter, "fouque_ou: eta must be positive");
  if (!(std::abs(p.rho) <= 1.0)) throw Error(ErrorKind::Parameter, "fouque_ou: |rho| > 1");
  DiffusionSpec s;
  s.name = "fouque_ou";
  const double vol = p.nu * std::numbers::sqrt2;
  const double e = p.eta;
  if (p.lambda)
    s.b = [m = p.m, vol, e, lam = p.lambda](double x) {
      return (m - x) / (e * e) - vol * lam(x) / e;
    };
  else
    s.b = [m = p.m, e](double x) { return (m - x) / (e * e); };
  s.c = [v = vol / e](double) { return v; };
  if (p.phi)
    s.phi = p.phi;
  else
    s.phi = [sig = p.sigma](double x) { return sig * std::exp(x); };
  s.rho = [r = p.rho](double) { return r; };
  s.x0 = p.m;
  return s;
}

DiffusionSpec heston_log(const HestonParams& p) {
  if (!(p.xi > 0.0) || !(p.mu > 0.0) || !(p.eta > 0.0))
    throw Error(ErrorKind::Parameter, "heston_log: xi, mu and eta must be positive");
  if (!(p.nu >= 0.5)) throw Error(ErrorKind::Parameter, "heston_log: nu must be >= 1/2");
  if (!(std::abs(p.rho) < 1.0)) throw Error(ErrorKind::Parameter, "heston_log: |rho| must be < 1");
  DiffusionSpec s;
  s.name = "heston_log";
  const double e2 = p.eta * p.eta;
  const double k = 1.0 - p.nu;
  s.b = [xi = p.xi, mu = p.mu, k, e2](double x) {
    return (xi * mu * std::exp(-x) - xi - 0.5 * std::exp(-2.0 * k * x)) / e2;
  };
  s.c = [k, eta = p.eta](double x) { return std::exp(-k * x) / eta; };
  s.phi = [](double x) { return std::exp(0.5 * x); };
  s.rho = [r = p.rho](double) { return r; };
  s.variance = VarianceDynamics{p.xi / e2, p.mu, 1.0 / p.eta, p.nu, p.rho};
  if (p.nu == 0.5 && p.xi * p.mu <= 0.5)
    s.warnings.push_back("xi*mu = " + fmt(p.xi * p.mu) +
                         " <= 1/2: the variance can reach zero and the log-variance "
                         "scale function is bounded below");
  return s;
}

DiffusionSpec sinh_mix(const SinhParams& p) {
  if (!(p.xi > 0.5)) throw Error(ErrorKind::Parameter, "sinh_mix: xi must exceed 1/2");
  if (!(p.mu >= 0.0)) throw Error(ErrorKind::Parameter, "sinh_mix: mu must be >= 0");
  if (!(p.eta > 0.0)) throw Error(ErrorKind::Parameter, "sinh_mix: eta must be positive");
  if (!(std::abs(p.rho) <= 1.0)) throw Error(ErrorKind::Parameter, "sinh_mix: |rho| > 1");
  DiffusionSpec s;
  s.name = "sinh_mix";
  const double e2 = p.eta * p.eta;
  s.b = [k = 0.5 + p.xi, e2](double x) {
    const double ch = std::cosh(x);
    return -k * std::tanh(x) / (ch * ch) / e2;
  };
  s.c = [eta = p.eta](double x) { return 1.0 / (eta * std::cosh(x)); };
  s.phi = [sig = p.sigma, mu = p.mu](double x) {
    return sig * (1.0 + 0.5 * std::tanh(x)) * std::pow(std::cosh(x), 0.5 * mu);
  };
  s.rho = [r = p.rho](double) { return r; };
  return s;
}

namespace {

double take(std::map<std::string, double>& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  const double v = it->second;
  params.erase(it);
  return v;
}

void reject_leftovers(std::string_view preset_name, const std::map<std::string, double>& left) {
  if (!left.empty())
    throw Error(ErrorKind::Configuration, "unknown parameter '" + left.begin()->first +
                                              "' for preset '" + std::string(preset_name) +
                                              "'");
}

}  // namespace

DiffusionSpec preset(std::string_view name, const std::map<std::string, double>& params) {
  auto left = params;
  if (name == "fouque_ou") {
    OuParams p;
    p.m = take(left, "m", p.m);
    p.nu = take(left, "nu", p.nu);
    p.eta = take(left, "eta", p.eta);
    p.rho = take(left, "rho", p.rho);
    p.sigma = take(left, "sigma", p.sigma);
    reject_leftovers(name, left);
    return fouque_ou(p);
  }
  if (name == "heston_log") {
    HestonParams p;
    p.xi = take(left, "xi", p.xi);
    p.mu = take(left, "mu", p.mu);
    p.nu = take(left, "nu", p.nu);
    p.eta = take(left, "eta", p.eta);
    p.rho = take(left, "rho", p.rho);
    reject_leftovers(name, left);
    return heston_log(p);
  }
  if (name == "sinh_mix") {
    SinhParams p;
    p.xi = take(left, "xi", p.xi);
    p.mu = take(left, "mu", p.mu);
    p.sigma = take(left, "sigma", p.sigma);
    p.eta = take(left, "eta", p.eta);
    p.rho = take(left, "rho", p.rho);
    reject_leftovers(name, left);
    return sinh_mix(p);
  }
  throw Error(ErrorKind::Configuration, "unknown preset '" + std::string(name) + "'");
}

}  // namespace sve
