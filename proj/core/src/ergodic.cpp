#include "sve/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sve/error.hpp"
#include "sve/quadrature.hpp"

namespace sve {

namespace {

constexpr int kP = gk15::kPoints;
constexpr double kLogMax = 700.0;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

template <class F>
double k15(F&& f, double a, double b) {
  if (a == b) return 0.0;
  double sum = 0.0;
  for (int k = 0; k < kP; ++k) sum += gk15::kronrod_weight(k, a, b) * f(gk15::node(k, a, b));
  return sum;
}

QuadOptions tight() {
  QuadOptions o;
  o.abs_tol = 1e-13;
  o.rel_tol = 1e-13;
  o.max_subdivisions = 20000;
  return o;
}

double log_c(const DiffusionSpec& s, double x) { return std::log(s.diffusion(x)); }

/// Local behaviour of log(1/(s' c^2)) and log s' at a window edge.
struct EdgeInfo {
  double log_sp = 0.0;
  double log_u = 0.0;
  double decay = 0.0;     // outward decay rate of log u
  double sp_decay = 0.0;  // outward decay rate of log s'
  double tail = 0.0;      // unnormalized mass beyond the edge
};

EdgeInfo edge_info(const DiffusionSpec& spec, double edge, double log_sp, int side) {
  EdgeInfo e;
  e.log_sp = log_sp;
  e.log_u = -log_sp - 2.0 * log_c(spec, edge);
  const double h = 1e-5 * std::max(1.0, std::abs(edge));
  const double dlogc = (log_c(spec, edge + h) - log_c(spec, edge - h)) / (2.0 * h);
  const double ratio = spec.drift_ratio(edge);
  const double dlogu = 2.0 * ratio - 2.0 * dlogc;
  e.decay = -side * dlogu;
  e.sp_decay = side * 2.0 * ratio;
  e.tail = e.decay > 0.0 ? std::exp(e.log_u) / e.decay : std::numeric_limits<double>::infinity();
  return e;
}

double log_sp_from_zero(const DiffusionSpec& spec, double x) {
  const auto q = integrate([&](double u) { return spec.drift_ratio(u); }, 0.0, x, tight());
  if (!std::isfinite(q.value))
    throw Error(ErrorKind::SingularCoefficient, "int b/c^2 is not finite up to x = " + fmt(x));
  return -2.0 * q.value;
}

/// Trapezoid estimate of int_lo^hi 1/(s' c^2), only used to scale the tail test.
double crude_eps2(const DiffusionSpec& spec, double lo, double hi) {
  constexpr double h = 0.125;
  auto ratio = [&](double u) { return spec.drift_ratio(u); };
  double total = 0.0;
  for (int side : {-1, 1}) {
    const double end = side > 0 ? hi : lo;
    double x = 0.0, lsp = 0.0;
    double u_prev = std::exp(-2.0 * log_c(spec, 0.0));
    while (side * (end - x) > 0.0) {
      const double nx = side > 0 ? std::min(x + h, end) : std::max(x - h, end);
      lsp -= 2.0 * k15(ratio, x, nx);
      const double u = std::exp(-lsp - 2.0 * log_c(spec, nx));
      total += 0.5 * (u + u_prev) * std::abs(nx - x);
      u_prev = u;
      x = nx;
    }
  }
  return total;
}

struct RawPanel {
  double a, b;
  double delta_b;                // -2 int_a^b b/c^2
  std::array<double, kP> delta;  // -2 int_a^{x_k} b/c^2
};

class PanelBuilder {
 public:
  PanelBuilder(const DiffusionSpec& spec, const MeasureOptions& opt) : spec_(spec), opt_(opt) {}

  void build(double a, double b, std::vector<RawPanel>& out, int depth = 0) {
    auto ratio = [&](double u) { return spec_.drift_ratio(u); };
    const auto est = gk15_panel(ratio, a, b);
    RawPanel p{a, b, -2.0 * est.kronrod, {}};
    double lo_s = std::min(0.0, p.delta_b), hi_s = std::max(0.0, p.delta_b);
    const double lu_a = -2.0 * log_c(spec_, a);
    const double lu_b = -p.delta_b - 2.0 * log_c(spec_, b);
    double lo_u = std::min(lu_a, lu_b), hi_u = std::max(lu_a, lu_b);
    for (int k = 0; k < kP; ++k) {
      const double x = gk15::node(k, a, b);
      p.delta[k] = -2.0 * k15(ratio, a, x);
      lo_s = std::min(lo_s, p.delta[k]);
      hi_s = std::max(hi_s, p.delta[k]);
      const double lu = -p.delta[k] - 2.0 * log_c(spec_, x);
      lo_u = std::min(lo_u, lu);
      hi_u = std::max(hi_u, lu);
    }
    const bool rough = est.error() > opt_.quad_tol * std::max(1.0, std::abs(est.kronrod)) ||
                       hi_s - lo_s > opt_.max_log_step || hi_u - lo_u > opt_.max_log_step;
    const bool splittable = (b - a) > 1e-9 * std::max(1.0, std::abs(a)) && depth < 60;
    if (rough && splittable) {
      const double mid = 0.5 * (a + b);
      build(a, mid, out, depth + 1);
      build(mid, b, out, depth + 1);
      return;
    }
    if (static_cast<int>(out.size()) >= opt_.max_panels)
      throw Error(ErrorKind::Precision, "ergodic measure needs more than " +
                                            std::to_string(opt_.max_panels) + " panels");
    out.push_back(p);
  }

 private:
  const DiffusionSpec& spec_;
  const MeasureOptions& opt_;
};

}  // namespace

ScaleTable build_scale(const DiffusionSpec& spec, std::pair<double, double> window, int n_nodes) {
  const auto [lo, hi] = window;
  if (!(lo < 0.0 && hi > 0.0))
    throw Error(ErrorKind::Configuration, "scale window must contain 0, got (" + fmt(lo) + ", " +
                                              fmt(hi) + ")");
  if (n_nodes < 64) throw Error(ErrorKind::Precondition, "build_scale needs at least 64 nodes");
  ScaleTable t;
  for (int i = 0; i < n_nodes; ++i) t.grid.push_back(lo + (hi - lo) * i / (n_nodes - 1));
  if (std::find(t.grid.begin(), t.grid.end(), 0.0) == t.grid.end()) {
    t.grid.push_back(0.0);
    std::sort(t.grid.begin(), t.grid.end());
  }
  const std::size_t n = t.grid.size();
  const std::size_t j0 = static_cast<std::size_t>(
      std::find(t.grid.begin(), t.grid.end(), 0.0) - t.grid.begin());
  auto ratio = [&](double u) { return spec.drift_ratio(u); };
  std::vector<double> lsp(n, 0.0);
  t.s.assign(n, 0.0);
  auto step = [&](std::size_t from, std::size_t to) {
    const double xa = t.grid[from], xb = t.grid[to];
    lsp[to] = lsp[from] - 2.0 * integrate(ratio, xa, xb, tight()).value;
    if (!std::isfinite(lsp[to]))
      throw Error(ErrorKind::SingularCoefficient, "b/c^2 not integrable near x = " + fmt(xb));
    if (std::abs(lsp[to]) > kLogMax)
      throw Error(ErrorKind::WindowTooWide,
                  "s' overflows at x = " + fmt(xb) + "; shrink the window to within (" +
                      fmt(to > j0 ? lo : xa) + ", " + fmt(to > j0 ? xa : hi) + ")");
    const double base = lsp[from];
    const auto q = integrate(
        [&](double u) { return std::exp(base - 2.0 * integrate(ratio, xa, u, tight()).value); },
        xa, xb, tight());
    t.s[to] = t.s[from] + q.value;
  };
  for (std::size_t j = j0; j + 1 < n; ++j) step(j, j + 1);
  for (std::size_t j = j0; j > 0; --j) step(j, j - 1);
  t.s_prime.resize(n);
  for (std::size_t j = 0; j < n; ++j) t.s_prime[j] = std::exp(lsp[j]);
  return t;
}

ErgodicMeasure build_ergodic_measure(const DiffusionSpec& spec, const MeasureOptions& opt) {
  spec.validate();
  if (!(opt.tail_tol > 0.0 && opt.tail_tol <= 1e-3))
    throw Error(ErrorKind::Precondition, "tail_tol must lie in (0, 1e-3]");

  ErgodicMeasure m;
  m.spec_ = spec;
  m.warnings = spec.warnings;

  double lo, hi;
  if (opt.window) {
    std::tie(lo, hi) = *opt.window;
    if (!(lo < 0.0 && hi > 0.0))
      throw Error(ErrorKind::Configuration, "measure window must contain 0");
  } else {
    const double w0 = std::max(opt.initial_half_width, std::abs(spec.x0) + 1.0);
    lo = -w0;
    hi = w0;
    bool done_lo = false, done_hi = false;
    while (!(done_lo && done_hi)) {
      const double scale = crude_eps2(spec, lo, hi);
      if (!(scale > 0.0) || !std::isfinite(scale))
        throw Error(ErrorKind::NotErgodic, "speed measure mass is not finite on (" + fmt(lo) +
                                               ", " + fmt(hi) + ")");
      for (int side : {-1, 1}) {
        bool& done = side < 0 ? done_lo : done_hi;
        if (done) continue;
        double& edge = side < 0 ? lo : hi;
        const auto e = edge_info(spec, edge, log_sp_from_zero(spec, edge), side);
        if (e.tail <= opt.tail_tol * scale) {
          done = true;
          continue;
        }
        const double next = 2.0 * edge;
        bool next_ok = std::abs(next) <= opt.max_half_width;
        if (next_ok) {
          try {
            const double lsp = log_sp_from_zero(spec, next);
            const auto en = edge_info(spec, next, lsp, side);
            next_ok = std::abs(lsp) <= kLogMax && std::isfinite(en.log_u);
          } catch (const Error&) {
            next_ok = false;
          }
        }
        if (next_ok) {
          edge = next;
          continue;
        }
        if (!std::isfinite(e.tail))
          throw Error(ErrorKind::NotErgodic,
                      "speed density does not decay beyond x = " + fmt(edge) +
                          " (the speed measure has infinite mass)");
        m.warnings.push_back("tail mass beyond x = " + fmt(edge) + " is about " +
                             fmt(e.tail / scale) + " of the total, above tail_tol");
        done = true;
      }
    }
  }

  // Panels: 0 is always a breakpoint so s(0) = 0 anchors the cumulative sums.
  std::vector<double> cuts;
  for (double x = 0.0; x > lo; x -= opt.max_panel_width) cuts.push_back(x);
  cuts.push_back(lo);
  std::reverse(cuts.begin(), cuts.end());
  for (double x = opt.max_panel_width; x < hi; x += opt.max_panel_width) cuts.push_back(x);
  cuts.push_back(hi);
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<RawPanel> raw;
  PanelBuilder builder(spec, opt);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) builder.build(cuts[i], cuts[i + 1], raw);

  const std::size_t np = raw.size();
  std::size_t i0 = 0;
  while (i0 < np && raw[i0].a < 0.0) ++i0;
  std::vector<double> lsp_a(np + 1, 0.0);
  for (std::size_t i = i0; i < np; ++i) lsp_a[i + 1] = lsp_a[i] + raw[i].delta_b;
  for (std::size_t i = i0; i-- > 0;) lsp_a[i] = lsp_a[i + 1] - raw[i].delta_b;

  const std::size_t nn = np * kP;
  m.grid.resize(nn);
  m.weights.resize(nn);
  m.gauss_weights.resize(nn);
  m.log_sp_nodes_.resize(nn);
  std::vector<double> log_u(nn);
  double max_lu = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < np; ++i) {
    for (int k = 0; k < kP; ++k) {
      const std::size_t j = i * kP + k;
      const double x = gk15::node(k, raw[i].a, raw[i].b);
      m.grid[j] = x;
      m.weights[j] = gk15::kronrod_weight(k, raw[i].a, raw[i].b);
      m.gauss_weights[j] = gk15::gauss_weight(k, raw[i].a, raw[i].b);
      m.log_sp_nodes_[j] = lsp_a[i] + raw[i].delta[k];
      log_u[j] = -m.log_sp_nodes_[j] - 2.0 * log_c(spec, x);
      max_lu = std::max(max_lu, log_u[j]);
    }
  }

  CompensatedSum win;
  for (std::size_t j = 0; j < nn; ++j) win.add(m.weights[j] * std::exp(log_u[j] - max_lu));
  const auto el = edge_info(spec, lo, lsp_a[0], -1);
  const auto eh = edge_info(spec, hi, lsp_a[np], +1);
  auto tail_scaled = [&](const EdgeInfo& e) {
    if (!(e.decay > 0.0)) {
      m.warnings.push_back("speed density is not decaying at the window edge; tail ignored");
      return 0.0;
    }
    return std::exp(e.log_u - max_lu) / e.decay;
  };
  const double tl = tail_scaled(el), th = tail_scaled(eh);
  const double total = win.value() + tl + th;
  if (!(total > 0.0) || !std::isfinite(total))
    throw Error(ErrorKind::NotErgodic, "speed measure mass is not finite");
  m.log_eps2_ = max_lu + std::log(total);
  m.epsilon = std::exp(0.5 * m.log_eps2_);
  m.tail_left = tl / total;
  m.tail_right = th / total;
  m.tail_mass_bound = m.tail_left + m.tail_right;
  m.window = {lo, hi};

  for (const auto* e : {&el, &eh}) {
    const double edge = e == &el ? lo : hi;
    if (e->sp_decay * std::abs(edge) > 1.0)
      m.warnings.push_back("s' decays beyond x = " + fmt(edge) +
                           ": the scale function is bounded on that side (not recurrent)");
  }

  m.pi_vals.resize(nn);
  m.s_prime.resize(nn);
  for (std::size_t j = 0; j < nn; ++j) {
    m.pi_vals[j] = std::exp(log_u[j] - m.log_eps2_);
    m.s_prime[j] = std::exp(m.log_sp_nodes_[j]);
  }

  m.panels_.resize(np);
  std::vector<double> s_a(np + 1, 0.0);
  auto panel_sp_integral = [&](std::size_t i) {
    double sum = 0.0;
    for (int k = 0; k < kP; ++k) sum += m.weights[i * kP + k] * m.s_prime[i * kP + k];
    return sum;
  };
  for (std::size_t i = i0; i < np; ++i) s_a[i + 1] = s_a[i] + panel_sp_integral(i);
  for (std::size_t i = i0; i-- > 0;) s_a[i] = s_a[i + 1] - panel_sp_integral(i);
  for (std::size_t i = 0; i < np; ++i) m.panels_[i] = {raw[i].a, raw[i].b, lsp_a[i], s_a[i]};

  m.s_vals.resize(nn);
  for (std::size_t j = 0; j < nn; ++j) m.s_vals[j] = m.scale(m.grid[j]);
  return m;
}

std::size_t ErgodicMeasure::locate(double x) const {
  if (!(x >= window.first && x <= window.second))
    throw Error(ErrorKind::Extrapolation, "x = " + fmt(x) + " lies outside the window (" +
                                              fmt(window.first) + ", " + fmt(window.second) +
                                              ")");
  auto it = std::upper_bound(panels_.begin(), panels_.end(), x,
                             [](double v, const Panel& p) { return v < p.a; });
  return it == panels_.begin() ? 0 : static_cast<std::size_t>(it - panels_.begin()) - 1;
}

double ErgodicMeasure::log_s_prime(double x) const {
  const auto& p = panels_[locate(x)];
  return p.log_sp_a - 2.0 * k15([this](double u) { return spec_.drift_ratio(u); }, p.a, x);
}

double ErgodicMeasure::scale_derivative(double x) const { return std::exp(log_s_prime(x)); }

double ErgodicMeasure::scale(double x) const {
  const auto& p = panels_[locate(x)];
  auto ratio = [this](double u) { return spec_.drift_ratio(u); };
  return p.s_a + k15([&](double u) { return std::exp(p.log_sp_a - 2.0 * k15(ratio, p.a, u)); },
                     p.a, x);
}

double ErgodicMeasure::log_density(double x) const {
  return -log_s_prime(x) - 2.0 * std::log(spec_.diffusion(x)) - log_eps2_;
}

double ErgodicMeasure::density(double x) const { return std::exp(log_density(x)); }

Estimate ErgodicMeasure::expectation(const std::function<double(double)>& g) const {
  CompensatedSum kron, gauss;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double gx = g(grid[j]);
    if (!std::isfinite(gx))
      throw Error(ErrorKind::Evaluation, "integrand is " + fmt(gx) + " at node x = " +
                                             fmt(grid[j]));
    kron.add(weights[j] * gx * pi_vals[j]);
    gauss.add(gauss_weights[j] * gx * pi_vals[j]);
  }
  Estimate e;
  e.value = kron.value();
  e.error = std::abs(kron.value() - gauss.value());
  for (auto [x, mass] : {std::pair{window.first, tail_left}, std::pair{window.second, tail_right}}) {
    if (mass == 0.0) continue;
    const double gx = g(x);
    if (std::isfinite(gx)) {
      e.value += gx * mass;
      e.error += std::abs(gx * mass);
    }
  }
  return e;
}

Estimate expectation(const ErgodicMeasure& measure, const std::function<double(double)>& g) {
  return measure.expectation(g);
}

CumulativeIntegral::CumulativeIntegral(const ErgodicMeasure& measure,
                                       std::function<double(double)> g)
    : m_(&measure), g_(std::move(g)) {
  const auto& panels = m_->panels_;
  const std::size_t np = panels.size();
  start_.resize(np + 1);
  const double gl = g_(m_->window.first);
  start_[0] = std::isfinite(gl) ? gl * m_->tail_left : 0.0;
  for (std::size_t i = 0; i < np; ++i) {
    double sum = 0.0;
    for (int k = 0; k < kP; ++k) {
      const std::size_t j = i * kP + k;
      const double gx = g_(m_->grid[j]);
      if (!std::isfinite(gx))
        throw Error(ErrorKind::Evaluation, "integrand is not finite at node x = " +
                                               fmt(m_->grid[j]));
      sum += m_->weights[j] * gx * m_->pi_vals[j];
    }
    start_[i + 1] = start_[i] + sum;
  }
  const double gr = g_(m_->window.second);
  total_ = start_[np] + (std::isfinite(gr) ? gr * m_->tail_right : 0.0);
  nodes_.resize(m_->grid.size());
  for (std::size_t j = 0; j < nodes_.size(); ++j) nodes_[j] = (*this)(m_->grid[j]);
}

double CumulativeIntegral::operator()(double x) const {
  if (x <= m_->window.first) return start_[0];
  if (x >= m_->window.second) return start_.back();
  const std::size_t i = m_->locate(x);
  const auto& p = m_->panels_[i];
  return start_[i] + k15([&](double u) { return g_(u) * m_->density(u); }, p.a, x);
}

}  // namespace sve
