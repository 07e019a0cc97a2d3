#include "sve/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "sve/error.hpp"

namespace sve {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

AssgamResult check_assgam(const DiffusionSpec& spec, const ErgodicMeasure& measure,
                          std::pair<double, double> gamma, double delta, int grid_points) {
  if (!(gamma.first >= 0.0 && gamma.second >= 0.0))
    throw Error(ErrorKind::Precondition, "gamma must be non-negative");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorKind::Precondition, "delta must be in (0,1)");
  if (grid_points < 2) throw Error(ErrorKind::Precondition, "grid_points must be >= 2");

  AssgamResult res;
  res.grid_points = grid_points;
  res.worst_excess = -std::numeric_limits<double>::infinity();
  const double log_inv_delta = -std::log(delta);

  for (int side : {1, -1}) {
    const double edge = side > 0 ? measure.window.second : measure.window.first;
    const double g = side > 0 ? gamma.first : gamma.second;
    std::vector<double> x(grid_points), lhs_x(grid_points), lsp(grid_points);
    for (int i = 0; i < grid_points; ++i) {
      x[i] = edge * i / (grid_points - 1);
      const double ph = spec.phi(x[i]);
      lhs_x[i] = std::log1p(ph * ph) + measure.log_density(x[i]);
      lsp[i] = measure.log_s_prime(x[i]);
    }
    // |x| >= |y| with x, y on the same side of 0.
    for (int i = 0; i < grid_points; ++i) {
      for (int j = 0; j <= i; ++j) {
        const double dist = std::abs(x[i] - x[j]);
        const double rhs = log_inv_delta + g * std::abs(x[i]) - (4.0 * g + delta) * dist;
        const double excess = lhs_x[i] + lsp[j] - rhs;
        if (excess > res.worst_excess) {
          res.worst_excess = excess;
          res.witness = std::pair{x[i], x[j]};
        }
      }
    }
  }
  const double tol = 1e-9 * (1.0 + log_inv_delta);
  res.ok = res.worst_excess <= tol;
  if (res.ok) res.witness.reset();
  return res;
}

AssintResult check_assint(const DiffusionSpec& spec, const ErgodicMeasure& measure, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorKind::Precondition, "delta must be in (0,1)");
  const double bound = 1.0 / delta;
  const double lo = std::max({spec.u_interval.lo, measure.window.first, -bound});
  const double hi = std::min({spec.u_interval.hi, measure.window.second, bound});
  if (!(lo < hi))
    throw Error(ErrorKind::Configuration, "u_interval does not meet the measure window");

  const auto mode_it = std::max_element(measure.pi_vals.begin(), measure.pi_vals.end());
  const double mode = measure.grid[static_cast<std::size_t>(mode_it - measure.pi_vals.begin())];

  constexpr int kCenters = 161;
  std::vector<double> centers(kCenters);
  for (int i = 0; i < kCenters; ++i) centers[i] = lo + (hi - lo) * i / (kCenters - 1);
  std::stable_sort(centers.begin(), centers.end(), [mode](double a, double b) {
    return std::abs(a - mode) < std::abs(b - mode);
  });

  constexpr int kWidths = 48;
  std::vector<double> widths(kWidths);
  for (int i = 0; i < kWidths; ++i)
    widths[i] = bound * std::pow(delta * delta, static_cast<double>(i) / (kWidths - 1));

  auto weight = [&](double y) {
    return std::sqrt(measure.density(y) / measure.scale_derivative(y)) * spec.phi(y) * spec.rho(y);
  };
  auto point_ok = [&](double y, double a) {
    const double sp = measure.scale_derivative(y);
    const double pi = measure.density(y);
    if (!(sp <= bound && pi <= bound && 1.0 / sp <= bound && 1.0 / pi <= bound)) return false;
    const double h = 1e-5 * a;
    const double d = (weight(y + h) - weight(y - h)) / (2.0 * h);
    return std::abs(d) <= bound;
  };

  constexpr int kSamples = 65;
  for (double x : centers) {
    for (double a : widths) {
      const double l = x - a, r = x + a;
      if (!(l > spec.u_interval.lo && r < spec.u_interval.hi)) continue;
      const double h = 1e-5 * a;
      if (!(l - h >= measure.window.first && r + h <= measure.window.second)) continue;
      // Endpoints first: most failures happen in the tails.
      bool ok = point_ok(l, a) && point_ok(r, a);
      for (int k = 1; ok && k + 1 < kSamples; ++k) ok = point_ok(l + (r - l) * k / (kSamples - 1), a);
      if (ok) return {true, std::pair{x, a}};
    }
  }
  return {false, std::nullopt};
}

namespace {

enum class Trend { Flat, Converging, Diverging, Oscillating };

struct TrendFit {
  Trend trend = Trend::Oscillating;
  int direction = 0;  // +1 increasing, -1 decreasing
  double limit = 0.0;
};

TrendFit classify(const std::vector<double>& q, double tol) {
  TrendFit f;
  const std::size_t n = q.size();
  double scale = 1.0;
  for (double v : q) scale = std::max(scale, std::abs(v));
  std::vector<double> d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) d[i] = q[i + 1] - q[i];
  const double noise = 1e-12 * scale;
  const double total = std::accumulate(d.begin(), d.end(), 0.0, [](double s, double v) {
    return s + std::abs(v);
  });
  if (total <= tol * scale) {
    f.trend = Trend::Flat;
    f.limit = q.back();
    return f;
  }
  int sign_changes = 0, last = 0;
  for (double v : d) {
    if (std::abs(v) <= noise) continue;
    const int s = v > 0 ? 1 : -1;
    if (last != 0 && s != last) ++sign_changes;
    last = s;
  }
  if (sign_changes > 0) return f;
  f.direction = last;
  const std::size_t quarter = std::max<std::size_t>(1, d.size() / 4);
  double first = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < quarter; ++i) {
    first += std::abs(d[i]);
    tail += std::abs(d[d.size() - 1 - i]);
  }
  if (tail >= 0.5 * first || std::abs(q.back()) > 1.0 / tol) {
    f.trend = Trend::Diverging;
    f.limit = f.direction * std::numeric_limits<double>::infinity();
    return f;
  }
  f.trend = Trend::Converging;
  const double d1 = d[d.size() - 2], d2 = d.back();
  const double r = d1 != 0.0 ? d2 / d1 : 0.0;
  f.limit = (r > 0.0 && r < 1.0) ? q.back() + d2 * r / (1.0 - r) : q.back();
  return f;
}

Verdict growth_verdict(const TrendFit& f) {
  if (f.trend == Trend::Oscillating) return Verdict::Inconclusive;
  if (f.trend == Trend::Diverging && f.direction > 0) return Verdict::Fail;
  return Verdict::Pass;
}

Verdict combine(std::initializer_list<Verdict> vs) {
  Verdict out = Verdict::Pass;
  for (Verdict v : vs) {
    if (v == Verdict::Fail) return Verdict::Fail;
    if (v == Verdict::Inconclusive) out = Verdict::Inconclusive;
  }
  return out;
}

}  // namespace

AsskResult check_assk(const DiffusionSpec& spec, std::pair<double, double> gamma, double v_probe,
                      double tol) {
  if (!(v_probe > 0.0)) throw Error(ErrorKind::Precondition, "v_probe must be positive");
  AsskResult res;
  constexpr int kProbe = 33;
  for (int side : {1, -1}) {
    const double g = side > 0 ? gamma.first : gamma.second;
    double probe = v_probe;
    std::vector<double> q(kProbe), growth(kProbe);
    for (;;) {
      try {
        for (int i = 0; i < kProbe; ++i) {
          const double v = side * probe * (0.5 + 0.5 * i / (kProbe - 1));
          q[i] = -side * spec.drift_ratio(v);
          const double ph = spec.phi(v);
          growth[i] = std::log1p(ph * ph) - g * std::abs(v) - 2.0 * std::log(spec.diffusion(v));
          if (!std::isfinite(q[i]) || !std::isfinite(growth[i]))
            throw Error(ErrorKind::Evaluation, "non-finite probe value");
        }
        break;
      } catch (const Error&) {
        probe *= 0.5;
        if (probe < 1.0) throw;
      }
    }
    const auto fit = classify(q, tol);
    const Verdict kappa_status =
        fit.trend == Trend::Oscillating ? Verdict::Inconclusive : Verdict::Pass;
    const Verdict gv = growth_verdict(classify(growth, tol));
    Verdict bound = Verdict::Inconclusive;
    if (kappa_status == Verdict::Pass) bound = fit.limit > 2.0 * g ? Verdict::Pass : Verdict::Fail;
    if (side > 0) {
      res.kappa_plus = fit.limit;
      res.kappa_plus_status = kappa_status;
      res.growth_plus = gv;
    } else {
      res.kappa_minus = fit.limit;
      res.kappa_minus_status = kappa_status;
      res.growth_minus = gv;
    }
    res.verdict = side > 0 ? combine({bound, gv}) : combine({res.verdict, bound, gv});
  }
  return res;
}

Verdict ConditionReport::overall() const {
  return combine({assgam.ok ? Verdict::Pass : Verdict::Fail,
                  assint.ok ? Verdict::Pass : Verdict::Fail, assk.verdict});
}

ConditionReport check_conditions(const DiffusionSpec& spec, const ErgodicMeasure& measure,
                                 std::pair<double, double> gamma, double delta, double v_probe) {
  ConditionReport r;
  r.gamma = gamma;
  r.delta = delta;
  r.assgam = check_assgam(spec, measure, gamma, delta);
  r.assint = check_assint(spec, measure, delta);
  r.assk = check_assk(spec, gamma, v_probe);
  return r;
}

}  // namespace sve
