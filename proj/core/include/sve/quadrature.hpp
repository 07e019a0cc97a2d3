#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <span>
#include <vector>

namespace sve {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
  int evaluations = 0;
};

struct QuadOptions {
  double abs_tol = 1e-14;
  double rel_tol = 1e-11;
  int max_subdivisions = 4000;
};

namespace gk15 {

// Kronrod abscissae on [-1, 1]; odd indices are the embedded 7-point Gauss nodes.
inline constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline constexpr int kPoints = 15;

/// Abscissa k (0..14) of the 15-point rule mapped to [a, b], ordered left to right.
inline double node(int k, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  return k < 7 ? mid - half * kNodes[k] : (k == 7 ? mid : mid + half * kNodes[14 - k]);
}

/// Kronrod weight of abscissa k on [a, b].
inline double kronrod_weight(int k, double a, double b) {
  const int j = k < 8 ? k : 14 - k;
  return 0.5 * (b - a) * kKronrodWeights[j];
}

/// Gauss weight of abscissa k on [a, b]; zero for Kronrod-only points.
inline double gauss_weight(int k, double a, double b) {
  const int j = k < 8 ? k : 14 - k;
  if (j % 2 == 0) return 0.0;
  return 0.5 * (b - a) * kGaussWeights[j / 2];
}

}  // namespace gk15

struct PanelEstimate {
  double kronrod = 0.0;
  double gauss = 0.0;
  double error() const { return std::abs(kronrod - gauss); }
};

/// One 7/15-point Gauss-Kronrod panel.
template <class F>
PanelEstimate gk15_panel(F&& f, double a, double b) {
  PanelEstimate out;
  for (int k = 0; k < gk15::kPoints; ++k) {
    const double fx = f(gk15::node(k, a, b));
    out.kronrod += gk15::kronrod_weight(k, a, b) * fx;
    out.gauss += gk15::gauss_weight(k, a, b) * fx;
  }
  return out;
}

/// Globally adaptive Gauss-Kronrod integration on a finite interval: the panel
/// with the largest error estimate is bisected until the summed estimate meets
/// max(abs_tol, rel_tol * |value|).
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
  QuadResult res;
  if (a == b) return res;
  const double sign = a < b ? 1.0 : -1.0;
  if (a > b) std::swap(a, b);

  struct Piece {
    double a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  std::priority_queue<Piece> heap;
  auto push = [&](double lo, double hi) {
    const auto est = gk15_panel(f, lo, hi);
    res.evaluations += gk15::kPoints;
    heap.push({lo, hi, est.kronrod, est.error()});
    res.value += est.kronrod;
    res.error += est.error();
  };
  push(a, b);
  int splits = 0;
  while (res.error > std::max(opt.abs_tol, opt.rel_tol * std::abs(res.value))) {
    if (splits >= opt.max_subdivisions || !std::isfinite(res.value)) {
      res.converged = false;
      break;
    }
    const Piece worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      res.converged = false;
      break;
    }
    heap.pop();
    res.value -= worst.value;
    res.error -= worst.error;
    push(worst.a, mid);
    push(mid, worst.b);
    ++splits;
  }
  // Re-sum to remove drift from the running subtractions.
  double v = 0.0, e = 0.0;
  while (!heap.empty()) {
    v += heap.top().value;
    e += heap.top().error;
    heap.pop();
  }
  res.value = sign * v;
  res.error = e;
  return res;
}

/// Adaptive integration split at interior breakpoints (kinks or jumps of f).
template <class F>
QuadResult integrate(F&& f, double a, double b, std::span<const double> breakpoints,
                     const QuadOptions& opt = {}) {
  std::vector<double> cuts{a};
  for (double x : breakpoints)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  QuadResult total;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    const auto part = integrate(f, cuts[i], cuts[i + 1], opt);
    total.value += part.value;
    total.error += part.error;
    total.evaluations += part.evaluations;
    total.converged = total.converged && part.converged;
  }
  return total;
}

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1].
GaussRule gauss_legendre(int n);

/// Gauss-Hermite rule for the standard normal weight: sum w_i f(x_i) ~ E[f(N)].
GaussRule gauss_hermite_normal(int n);

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace sve
