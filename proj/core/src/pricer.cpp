#include "sve/pricer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sve/error.hpp"
#include "sve/gaussian.hpp"
#include "sve/quadrature.hpp"

namespace sve {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void require_strike(double k) {
  if (!(k > 0.0) || !std::isfinite(k))
    throw Error(ErrorKind::Domain, "strike must be positive, got " + fmt(k));
}

double mean_phi2(const ErgodicMeasure& measure, const DiffusionSpec& spec) {
  const double m = measure
                       .expectation([&](double x) {
                         const double p = spec.phi(x);
                         return p * p;
                       })
                       .value;
  if (!(m > 0.0)) throw Error(ErrorKind::Degenerate, "Pi[phi^2] vanishes");
  return m;
}

}  // namespace

Payoff Payoff::put(double strike) {
  require_strike(strike);
  Payoff p;
  p.kind = Kind::Put;
  p.strike = strike;
  p.bound = strike;
  return p;
}

Payoff Payoff::call(double strike) {
  require_strike(strike);
  Payoff p;
  p.kind = Kind::Call;
  p.strike = strike;
  p.bound = std::numeric_limits<double>::infinity();
  return p;
}

Payoff Payoff::digital(double strike) {
  require_strike(strike);
  Payoff p;
  p.kind = Kind::Digital;
  p.strike = strike;
  p.bound = 1.0;
  return p;
}

Payoff Payoff::make_custom(std::function<double(double)> f, double bound,
                           std::vector<double> breakpoints) {
  Payoff p;
  p.kind = Kind::Custom;
  p.custom = std::move(f);
  p.bound = bound;
  p.breakpoints = std::move(breakpoints);
  p.validate();
  return p;
}

double Payoff::operator()(double z) const {
  switch (kind) {
    case Kind::Put: return std::max(strike - std::exp(z), 0.0);
    case Kind::Call: return std::max(std::exp(z) - strike, 0.0);
    case Kind::Digital: return z <= std::log(strike) ? 1.0 : 0.0;
    case Kind::Custom: return custom(z);
  }
  return 0.0;
}

std::vector<double> Payoff::kinks() const {
  std::vector<double> out = breakpoints;
  if (kind != Kind::Custom) out.push_back(std::log(strike));
  std::sort(out.begin(), out.end());
  return out;
}

void Payoff::validate() const {
  if (kind == Kind::Custom) {
    if (!custom) throw Error(ErrorKind::Configuration, "custom payoff has no function");
    if (!(bound > 0.0) || !std::isfinite(bound))
      throw Error(ErrorKind::Configuration, "custom payoff needs a finite positive bound");
  } else {
    require_strike(strike);
  }
}

double bs_d2(double strike, double sigma2, double z0, double discount) {
  const double sd = std::sqrt(sigma2);
  return -(std::log(strike) - z0 + std::log(discount)) / sd - 0.5 * sd;
}

double bs_put(double strike, double sigma2, double z0, double discount) {
  require_strike(strike);
  if (sigma2 <= 0.0) return std::max(discount * strike - std::exp(z0), 0.0);
  const double d2 = bs_d2(strike, sigma2, z0, discount);
  return discount * strike * norm_cdf(-d2) - std::exp(z0) * norm_cdf(-d2 - std::sqrt(sigma2));
}

double bs_call(double strike, double sigma2, double z0, double discount) {
  require_strike(strike);
  if (sigma2 <= 0.0) return std::max(std::exp(z0) - discount * strike, 0.0);
  const double d2 = bs_d2(strike, sigma2, z0, discount);
  return std::exp(z0) * norm_cdf(d2 + std::sqrt(sigma2)) - discount * strike * norm_cdf(d2);
}

double implied_vol(double price, double strike, double maturity, double z0, double discount,
                   bool is_call) {
  require_strike(strike);
  if (!(maturity > 0.0)) throw Error(ErrorKind::Domain, "maturity must be positive");
  const double spot = std::exp(z0);
  const double fwd_k = discount * strike;
  const double lower = is_call ? std::max(spot - fwd_k, 0.0) : std::max(fwd_k - spot, 0.0);
  const double upper = is_call ? spot : fwd_k;
  if (!(price > lower && price < upper))
    throw Error(ErrorKind::Domain, "price " + fmt(price) + " outside no-arbitrage bounds (" +
                                       fmt(lower) + ", " + fmt(upper) + ")");
  auto value = [&](double vol) {
    const double s2 = vol * vol * maturity;
    return is_call ? bs_call(strike, s2, z0, discount) : bs_put(strike, s2, z0, discount);
  };
  double lo = 1e-8, hi = 1.0;
  while (value(hi) < price) {
    hi *= 2.0;
    if (hi > 1e3) throw Error(ErrorKind::Domain, "implied volatility above 1000");
  }
  double vol = 0.5 * (lo + hi);
  for (int it = 0; it < 300; ++it) {
    const double diff = value(vol) - price;
    if (diff > 0.0)
      hi = vol;
    else
      lo = vol;
    const double s = vol * std::sqrt(maturity);
    const double d1 = bs_d2(strike, s * s, z0, discount) + s;
    const double vega = spot * norm_pdf(d1) * std::sqrt(maturity);
    double next = vega > 0.0 ? vol - diff / vega : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - vol);
    vol = next;
    if (step < 1e-12 || hi - lo < 1e-12) break;
  }
  return vol;
}

double sigma_total(const ErgodicMeasure& measure, const DiffusionSpec& spec,
                   const MarketSpec& market) {
  market.validate();
  return mean_phi2(measure, spec) * market.maturity;
}

Estimate alpha_coefficient(const ErgodicMeasure& measure, const DiffusionSpec& spec) {
  const double m2 = mean_phi2(measure, spec);
  const CumulativeIntegral F(measure, [&](double x) {
    const double p = spec.phi(x);
    return p * p / m2 - 1.0;
  });
  const auto& fv = F.node_values();
  CompensatedSum kron, gauss, abs_w;
  for (std::size_t j = 0; j < measure.grid.size(); ++j) {
    const double x = measure.grid[j];
    const double w = spec.phi(x) * spec.rho(x) / spec.diffusion(x);
    kron.add(measure.weights[j] * fv[j] * w);
    gauss.add(measure.gauss_weights[j] * fv[j] * w);
    abs_w.add(measure.weights[j] * std::abs(w));
  }
  Estimate e;
  e.value = -kron.value();
  e.error = std::abs(kron.value() - gauss.value()) + std::abs(F.total()) * abs_w.value();
  if (!std::isfinite(e.value))
    throw Error(ErrorKind::TailDivergence, "alpha integrand is not integrable");
  return e;
}

PsiFunction::PsiFunction(const ErgodicMeasure& measure, const DiffusionSpec& spec,
                         const MarketSpec& market)
    : m_(&measure),
      spec_(&spec),
      cum_(measure, [&spec, T = market.maturity, m2 = mean_phi2(measure, spec)](double x) {
        const double p = spec.phi(x);
        return T * (p * p - m2);
      }) {}

double PsiFunction::operator()(double x) const {
  return 2.0 * m_->epsilon * spec_->diffusion(x) * m_->scale_derivative(x) * cum_(x);
}

std::vector<double> PsiFunction::node_values() const {
  const auto& f = cum_.node_values();
  std::vector<double> out(f.size());
  for (std::size_t j = 0; j < f.size(); ++j)
    out[j] = 2.0 * m_->epsilon * spec_->diffusion(m_->grid[j]) * m_->s_prime[j] * f[j];
  return out;
}

double psi_function(const ErgodicMeasure& measure, const DiffusionSpec& spec,
                    const MarketSpec& market, double x) {
  measure.locate(x);
  return PsiFunction(measure, spec, market)(x);
}

std::array<double, 4> correction_polynomial(double alpha, double sigma2) {
  if (!(sigma2 > 0.0)) throw Error(ErrorKind::Domain, "Sigma must be positive");
  const double k = alpha / std::sqrt(sigma2);
  return {alpha, -3.0 * k, -alpha, k};
}

double eval_polynomial(const std::array<double, 4>& c, double z) {
  return c[0] + z * (c[1] + z * (c[2] + z * c[3]));
}

ExpansionPrice expansion_price(const Payoff& payoff, double alpha, double sigma2, double z0,
                               double discount) {
  payoff.validate();
  if (payoff.kind == Payoff::Kind::Call) {
    auto put = expansion_price(Payoff::put(payoff.strike), alpha, sigma2, z0, discount);
    const double parity = std::exp(z0) - discount * payoff.strike;
    return {put.corrected + parity, put.baseline + parity, put.error};
  }
  const auto poly = correction_polynomial(alpha, sigma2);
  const double sd = std::sqrt(sigma2);
  const double centre = z0 - std::log(discount) - 0.5 * sigma2;
  constexpr double zmax = 10.0;
  std::vector<double> cuts;
  for (double k : payoff.kinks()) cuts.push_back((k - centre) / sd);
  QuadOptions opt;
  opt.abs_tol = 1e-15;
  opt.rel_tol = 1e-14;
  opt.max_subdivisions = 20000;
  const auto base = integrate(
      [&](double z) { return payoff(centre + sd * z) * norm_pdf(z); }, -zmax, zmax, cuts, opt);
  const auto corr = integrate(
      [&](double z) { return eval_polynomial(poly, z) * payoff(centre + sd * z) * norm_pdf(z); },
      -zmax, zmax, cuts, opt);
  if (!base.converged || !corr.converged)
    throw Error(ErrorKind::Precision, "expansion quadrature did not converge (estimate " +
                                          fmt(discount * (base.value + corr.value)) + ")");
  // Beyond |z| = 10: |f| <= bound and |p(z)| <= sum |c_i| z^3 there.
  double pmax = 0.0;
  for (double c : poly) pmax += std::abs(c);
  const double tail_bound = std::isfinite(payoff.bound)
                                ? payoff.bound * (1.0 + pmax * 1e3) * 2.0 * norm_cdf(-zmax)
                                : 0.0;
  ExpansionPrice out;
  out.baseline = discount * base.value;
  out.corrected = discount * (base.value + corr.value);
  out.error = discount * (base.error + corr.error + tail_bound);
  return out;
}

double put_closed_form(double strike, double alpha, double sigma2, double z0, double discount) {
  require_strike(strike);
  if (!(sigma2 > 0.0)) throw Error(ErrorKind::Domain, "Sigma must be positive");
  const double d2 = bs_d2(strike, sigma2, z0, discount);
  return bs_put(strike, sigma2, z0, discount) - alpha * d2 * discount * strike * norm_pdf(d2);
}

double put_closed_form(double strike, const ErgodicMeasure& measure, const DiffusionSpec& spec,
                       const MarketSpec& market) {
  const double sigma2 = sigma_total(measure, spec, market);
  const double alpha = alpha_coefficient(measure, spec).value;
  return put_closed_form(strike, alpha, sigma2, market.spot_log, market.discount());
}

SkewLine skew_line(double alpha, double phi2, double rate) {
  if (!(phi2 > 0.0)) throw Error(ErrorKind::Degenerate, "sigma_bar vanishes");
  SkewLine s;
  s.sigma_bar = std::sqrt(phi2);
  s.v3 = -alpha * phi2;
  s.v2 = 2.0 * s.v3;
  const double sb = s.sigma_bar;
  s.a = -s.v3 / (sb * sb * sb);
  s.b = sb - s.v2 / sb - s.a * (rate + 1.5 * phi2);
  return s;
}

SkewLine skew_line(double alpha, const ErgodicMeasure& measure, const DiffusionSpec& spec,
                   const MarketSpec& market) {
  return skew_line(alpha, mean_phi2(measure, spec), market.average_rate());
}

ExpansionQuote price_corrected(const Payoff& payoff, const ErgodicMeasure& measure,
                               const DiffusionSpec& spec, const MarketSpec& market) {
  market.validate();
  ExpansionQuote q;
  const double m2 = mean_phi2(measure, spec);
  q.sigma2 = m2 * market.maturity;
  const auto a = alpha_coefficient(measure, spec);
  q.alpha = a.value;
  q.alpha_error = a.error;
  q.alpha_resolved = std::abs(a.value) > a.error;
  q.discount = market.discount();
  const auto p = expansion_price(payoff, q.alpha, q.sigma2, market.spot_log, q.discount);
  q.price_corrected = p.corrected;
  q.price_bs = p.baseline;
  q.correction = q.price_corrected - q.price_bs;
  q.price_error = p.error;
  const auto line = skew_line(q.alpha, m2, market.average_rate());
  q.skew_a = line.a;
  q.skew_b = line.b;
  q.v2 = line.v2;
  q.v3 = line.v3;
  q.poly = correction_polynomial(q.alpha, q.sigma2);
  return q;
}

SkewFit calibrate_skew(std::span<const IvPoint> points, double spot, double rate,
                       std::optional<double> sigma_bar) {
  if (points.size() < 2) throw Error(ErrorKind::Precondition, "need at least two iv points");
  if (!(spot > 0.0)) throw Error(ErrorKind::Domain, "spot must be positive");
  std::vector<double> x(points.size()), y(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!(p.maturity > 0.0)) throw Error(ErrorKind::Domain, "maturity must be positive");
    require_strike(p.strike);
    x[i] = std::log(p.strike / spot) / p.maturity;
    y[i] = p.iv;
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxx = 0.0, sxy = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    scale += x[i] * x[i];
  }
  if (sxx <= 1e-14 * (1.0 + scale))
    throw Error(ErrorKind::Unidentifiable, "all points share the same log-moneyness per unit time");
  SkewFit f;
  f.a = sxy / sxx;
  f.b = my - f.a * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.a * x[i] + f.b);
    rss += r * r;
  }
  f.residual_norm = std::sqrt(rss);
  f.sigma_bar = sigma_bar.value_or(f.b);
  const double sb = f.sigma_bar;
  f.v3 = -f.a * sb * sb * sb;
  f.v2 = sb * ((sb - f.b) - f.a * (rate + 1.5 * sb * sb));
  return f;
}

}  // namespace sve
