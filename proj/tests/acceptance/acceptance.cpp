// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
// Usage: sve_acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sve/conditions.hpp"
#include "sve/cycles.hpp"
#include "sve/edgeworth.hpp"
#include "sve/ergodic.hpp"
#include "sve/gaussian.hpp"
#include "sve/harness.hpp"
#include "sve/mc.hpp"
#include "sve/model.hpp"
#include "sve/pricer.hpp"
#include "sve/quadrature.hpp"
#include "sve/rng.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---- shared setups -------------------------------------------------------

struct CycleCase {
  std::string name;
  sve::DiffusionSpec spec;
  double x0, x1, horizon;
  std::size_t paths;
};

std::vector<CycleCase> cycle_cases() {
  return {{"ou", sve::fouque_ou({}), -0.3, 0.3, 1500.0, 4},
          {"heston", sve::heston_log({1.0, 1.0, 0.5, 1.0, -0.5}), -0.5, 0.3, 2000.0, 4}};
}

struct CycleRun {
  sve::CycleStats stats;
  double m_l_oracle = 0.0;
  double phi2 = 0.0;
  std::vector<sve::CyclePath> cycles;
};

CycleRun run_cycles(const CycleCase& c, unsigned threads) {
  const auto m = sve::build_ergodic_measure(c.spec);
  sve::CycleSetup s;
  s.x0 = c.x0;
  s.x1 = c.x1;
  s.start = c.x0;
  s.horizon = c.horizon;
  s.epsilon = m.epsilon;
  s.maturity = 1.0;
  s.sigma2 = 0.0;  // h = phi^2, so mu[0] estimates Pi[phi^2]
  sve::McConfig cfg;
  cfg.n_paths = c.paths;
  cfg.dt = 1e-3;
  cfg.seed = 101;
  cfg.scheme = sve::default_scheme(c.spec);
  cfg.threads = threads;
  CycleRun r;
  r.cycles = sve::extract_cycles(c.spec, s, cfg);
  r.stats = sve::cycle_stats(r.cycles);
  r.m_l_oracle = 2.0 * (m.scale(c.x1) - m.scale(c.x0));
  r.phi2 = m.expectation([&](double x) { return c.spec.phi(x) * c.spec.phi(x); }).value;
  return r;
}

struct KacRun {
  std::vector<double> values;
  double mean = 0.0, se = 0.0, oracle = 0.0;
};

KacRun run_kac(unsigned threads) {
  const auto spec = sve::fouque_ou({});
  const auto m = sve::build_ergodic_measure(spec);
  sve::McConfig cfg;
  cfg.n_paths = 10000;
  cfg.dt = 1e-3;
  cfg.seed = 202;
  cfg.threads = threads;
  KacRun r;
  r.values = sve::simulate_hitting(spec, m.epsilon, -0.5, 0.5, cfg, 1e4).values;
  sve::CompensatedSum s;
  for (double v : r.values) s.add(v);
  const double n = static_cast<double>(r.values.size());
  r.mean = s.value() / n;
  double ss = 0.0;
  for (double v : r.values) ss += (v - r.mean) * (v - r.mean);
  r.se = std::sqrt(ss / (n - 1.0) / n);
  r.oracle = sve::kac_first_moment(m, [](double) { return 1.0; }, -0.5, 0.5);
  return r;
}

sve::DiffusionSpec convergence_model() { return sve::heston_log({8.0, 0.25, 0.5, 1.0, -0.5}); }

sve::MarketSpec convergence_market() {
  sve::MarketSpec mk;
  mk.maturity = 0.1;
  return mk;
}

sve::FitOptions fit_options() {
  sve::FitOptions o;
  o.t_scale = 100.0;
  o.n_samples = 100000;
  o.mc.dt = 0.01;
  o.mc.seed = 7;
  return o;
}

sve::DiffusionSpec fit_model() { return sve::heston_log({1.0, 1.0, 0.5, 1.0, -0.8}); }

// ---- criteria ------------------------------------------------------------

Outcome heston_analytic_skew() {
  Outcome o{true, ""};
  double worst_a = 0.0, worst_s = 0.0, worst_t = 0.0;
  for (double xi : {1.0, 2.0})
    for (double rho : {-0.5, -0.8})
      for (double eta : {0.05, 0.1}) {
        const auto r = sve::heston_analytic_check({xi, 0.04, 0.5, eta, rho}, 1.0);
        worst_a = std::max(worst_a, r.alpha_rel_error);
        worst_s = std::max(worst_s, r.sigma2_rel_error);
        worst_t = std::max(worst_t, r.runtime_s);
        if (!(r.alpha_rel_error < 1e-5 && r.sigma2_rel_error < 1e-8 && r.runtime_s < 5.0))
          o.pass = false;
      }
  o.detail = fmt("max rel err alpha %.2e, Sigma %.2e; slowest case %.2fs", worst_a, worst_s,
                 worst_t);
  return o;
}

Outcome closed_form_consistency() {
  std::mt19937_64 gen(2718);
  std::uniform_real_distribution<double> uk(0.7, 1.3), us(0.01, 0.25), ua(-0.05, 0.05);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double k = uk(gen), s2 = us(gen), a = ua(gen);
    const double quad = sve::expansion_price(sve::Payoff::put(k), a, s2, 0.0, 1.0).corrected;
    worst = std::max(worst, std::abs(quad - sve::put_closed_form(k, a, s2, 0.0, 1.0)));
  }
  return {worst < 1e-8, fmt("max |diff| %.2e over 20 cases", worst)};
}

Outcome alpha_identity() {
  sve::MarketSpec mk;
  double worst = 0.0;
  for (const auto& spec : {sve::heston_log({1.0, 0.04, 0.5, 0.1, -0.5}), sve::fouque_ou({})}) {
    const auto m = sve::build_ergodic_measure(spec);
    const double s2 = sve::sigma_total(m, spec, mk);
    const sve::PsiFunction psi(m, spec, mk);
    const double via_psi =
        -m.epsilon *
        m.expectation([&](double x) { return spec.phi(x) * spec.rho(x) * psi(x); }).value /
        (2.0 * s2);
    const double direct = sve::alpha_coefficient(m, spec).value;
    worst = std::max(worst, std::abs(via_psi / direct - 1.0));
  }
  return {worst < 1e-6, fmt("max rel diff %.2e (heston, ou)", worst)};
}

Outcome rescaling_invariance() {
  Outcome o{true, ""};
  double pi = 0.0, s = 0.0, eps = 0.0;
  for (const auto& spec : {sve::heston_log({1.0, 0.04, 0.5, 1.0, -0.5}), sve::fouque_ou({})})
    for (double eta : {0.5, 2.0}) {
      const auto r = sve::invariance_check(spec, eta, 1e-10);
      pi = std::max(pi, r.max_pi_diff);
      s = std::max(s, r.max_s_diff);
      eps = std::max(eps, r.epsilon_ratio_error);
      o.pass = o.pass && r.pass;
    }
  o.detail = fmt("max rel diff pi %.2e, s %.2e, eps/eta %.2e", pi, s, eps);
  return o;
}

Outcome convergence_order() {
  sve::ConvergenceOptions opt;
  opt.etas = {0.4, 0.2, 0.1};
  opt.mc.n_paths = 200000;
  opt.mc.antithetic = true;
  opt.mc.seed = 2024;
  opt.mc.scheme = sve::default_scheme(convergence_model());
  opt.dt_factor = 1e-4;
  opt.max_paths = opt.mc.n_paths;  // fixed budget, no escalation
  const auto r =
      sve::convergence_study(convergence_model(), convergence_market(), sve::Payoff::put(1.0), opt);
  bool se_ok = true;
  std::ostringstream d;
  for (std::size_t i = 0; i < r.etas.size(); ++i) {
    se_ok = se_ok && r.mc_errors[i] < 0.5 * r.errors[i];
    d << fmt("eta %.2f err %.2e se %.1e (%.0fs); ", r.etas[i], r.errors[i], r.mc_errors[i],
             r.runtime_s[i]);
  }
  d << fmt("slope %.3f", r.fitted_order);
  if (!r.note.empty()) d << " (" << r.note << ")";
  return {se_ok && r.fitted_order >= 1.5 && r.fitted_order <= 2.5, d.str()};
}

Outcome cycle_length_oracle() {
  Outcome o{true, ""};
  for (const auto& c : cycle_cases()) {
    const auto r = run_cycles(c, 0);
    const auto& st = r.stats;
    const bool ok = st.n_cycles >= 500 && std::abs(st.m_l - r.m_l_oracle) < 4.0 * st.m_l_se;
    o.pass = o.pass && ok;
    o.detail += fmt("%s: m_l %.4f +- %.4f vs %.4f (%zu cycles); ", c.name.c_str(), st.m_l,
                    st.m_l_se, r.m_l_oracle, st.n_cycles);
  }
  return o;
}

Outcome ergodic_ratio() {
  Outcome o{true, ""};
  for (const auto& c : cycle_cases()) {
    const auto r = run_cycles(c, 0);
    const auto& st = r.stats;
    const bool ok = std::abs(st.mu[0] - r.phi2) < 4.0 * st.mu_se[0];
    o.pass = o.pass && ok;
    o.detail += fmt("%s: %.5f +- %.5f vs %.5f; ", c.name.c_str(), st.mu[0], st.mu_se[0], r.phi2);
  }
  return o;
}

Outcome kac_oracle() {
  const auto r = run_kac(0);
  return {std::abs(r.mean - r.oracle) < 4.0 * r.se,
          fmt("MC %.5f +- %.5f vs %.5f (%zu samples)", r.mean, r.se, r.oracle, r.values.size())};
}

// E[He_n(Y)] as a sum over set partitions of {1..n} into blocks of size >= 3.
double partition_sum(int n, const std::vector<double>& kappa /* kappa[r] */) {
  std::vector<int> block(n, 0);
  double total = 0.0;
  // Restricted growth strings enumerate set partitions.
  std::function<void(int, int)> rec = [&](int i, int nblocks) {
    if (i == n) {
      std::vector<int> size(nblocks, 0);
      for (int b : block) ++size[b];
      double p = 1.0;
      for (int sz : size) {
        if (sz < 3) return;
        p *= kappa[sz];
      }
      total += p;
      return;
    }
    for (int b = 0; b <= nblocks; ++b) {
      block[i] = b;
      rec(i + 1, std::max(nblocks, b + 1));
    }
  };
  rec(0, 0);
  return total;
}

Outcome edgeworth_machinery() {
  std::ostringstream d;
  // (a) exp(x t - t^2/2) = sum He_j(x) t^j / j!
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> ux(-3.0, 3.0), ut(-1.0, 1.0);
  double worst_a = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double x = ux(gen), t = ut(gen);
    double sum = 0.0, tj = 1.0;
    for (int j = 0; j <= 40; ++j) {
      if (j > 0) tj *= t / j;
      sum += sve::hermite(j, x) * tj;
    }
    worst_a = std::max(worst_a, std::abs(sum - std::exp(x * t - 0.5 * t * t)));
  }
  const bool a = worst_a < 1e-10;
  d << fmt("(a) %.1e ", worst_a);

  // (b) dyadic cumulants keep every product exact.
  const std::vector<double> kappa{0, 0, 1, 0.5, -0.25, 0.125, 1.5, -0.75, 0.375};
  const auto mom = sve::hermite_moments_from_cumulants(
      std::vector<double>(kappa.begin() + 3, kappa.end()));
  bool b = mom[6] == kappa[6] + 10.0 * kappa[3] * kappa[3];
  for (int n = 3; n <= 8; ++n) b = b && mom[n] == partition_sum(n, kappa);
  d << "(b) " << (b ? "exact " : "mismatch ");

  // (c) mass and mean of q.
  const sve::EdgeworthDensity q{1.2, 0.35, -1.8, 100.0};
  const double mass = sve::integrate([&](double z) { return q.pdf(z); }, -25.0, 25.0).value;
  const double mean = sve::integrate([&](double z) { return z * q.pdf(z); }, -25.0, 25.0).value;
  const double ce = std::max(std::abs(mass - 1.0), std::abs(mean - q.a1 / std::sqrt(q.t_scale)));
  const bool c = ce < 1e-9;
  d << fmt("(c) %.1e ", ce);

  // (d) standardized sums of m = 50 unit exponentials.
  const int m = 50;
  const std::size_t n = 1000000;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    sve::PathStream s(99, i, sve::kUniformStream);
    double sum = 0.0;
    for (int k = 0; k < m; ++k) sum -= std::log(s.uniform());
    y[i] = (sum - m) / std::sqrt(static_cast<double>(m));
  }
  std::sort(y.begin(), y.end());
  const double de = sve::ks_distance(y, [&](double x) { return sve::edgeworth_iid_cdf(1.0, 2.0, m, x); });
  const double dg = sve::ks_distance(y, [](double x) { return sve::norm_cdf(x); });
  const bool dd = de < dg;
  d << fmt("(d) edgeworth %.4f gaussian %.4f", de, dg);
  return {a && b && c && dd, d.str()};
}

Outcome edgeworth_fit() {
  const auto spec = fit_model();
  auto opt = fit_options();
  opt.mc.scheme = sve::default_scheme(spec);
  sve::MarketSpec mk;
  const auto r = sve::edgeworth_fit_study(spec, mk, opt);
  return {r.statistic < r.baseline_statistic,
          fmt("edgeworth %.5f gaussian %.5f (v %.4f A1 %.4f A3 %.4f, %zu cycles)", r.statistic,
              r.baseline_statistic, r.density.v, r.density.a1, r.density.a3, r.stats.n_cycles)};
}

Outcome condition_checkers() {
  auto sinh = [](double xi) {
    sve::SinhParams p;
    p.xi = xi;
    p.mu = 0.0;  // bounded phi
    return sve::sinh_mix(p);
  };
  const auto s5 = sinh(5.0), s3 = sinh(3.0);
  const auto v5 = sve::check_conditions(s5, sve::build_ergodic_measure(s5), {2.0, 2.0}, 0.01).overall();
  const auto v3 = sve::check_conditions(s3, sve::build_ergodic_measure(s3), {2.0, 2.0}, 0.01).overall();
  double worst = 0.0;
  for (auto [xi, mu] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.5}, std::pair{8.0, 0.25}}) {
    const auto k = sve::check_assk(sve::heston_log({xi, mu, 0.5, 1.0, -0.5}), {0.0, 0.0});
    worst = std::max(worst, std::abs(k.kappa_minus / (xi * mu - 0.5) - 1.0));
  }
  return {v5 == sve::Verdict::Pass && v3 == sve::Verdict::Fail && worst < 0.05,
          fmt("sinh xi=5 %s, xi=3 %s; heston kappa- max rel err %.2e", sve::to_string(v5).c_str(),
              sve::to_string(v3).c_str(), worst)};
}

Outcome determinism() {
  Outcome o{true, ""};
  const unsigned threads[] = {1, 2, 8};

  for (const auto& c : cycle_cases()) {
    std::vector<CycleRun> runs;
    for (unsigned t : threads) runs.push_back(run_cycles(c, t));
    for (std::size_t i = 1; i < runs.size(); ++i) {
      const auto& a = runs[0].cycles;
      const auto& b = runs[i].cycles;
      bool same = a.size() == b.size() && runs[0].stats.m_l == runs[i].stats.m_l &&
                  runs[0].stats.mu == runs[i].stats.mu;
      for (std::size_t k = 0; same && k < a.size(); ++k)
        same = a[k].l == b[k].l && a[k].g_h == b[k].g_h && a[k].g_vol == b[k].g_vol &&
               a[k].int_k == b[k].int_k;
      o.pass = o.pass && same;
    }
    o.detail += "cycles/" + c.name + " ";
  }

  {
    std::vector<KacRun> runs;
    for (unsigned t : threads) runs.push_back(run_kac(t));
    for (std::size_t i = 1; i < runs.size(); ++i)
      o.pass = o.pass && runs[i].values == runs[0].values;
    o.detail += "kac ";
  }

  {
    // Convergence pricing at the coarsest eta, reduced path count.
    const auto spec = sve::rescale(convergence_model(), 0.4);
    sve::McConfig cfg;
    cfg.n_paths = 20000;
    cfg.antithetic = true;
    cfg.seed = 2024;
    cfg.dt = 1e-4 * 0.16;
    cfg.scheme = sve::default_scheme(spec);
    std::vector<sve::McEstimate> runs;
    for (unsigned t : threads) {
      cfg.threads = t;
      runs.push_back(sve::price_mc(sve::Payoff::put(1.0), spec, convergence_market(), cfg));
    }
    for (std::size_t i = 1; i < runs.size(); ++i)
      o.pass = o.pass && runs[i].mean == runs[0].mean && runs[i].std_error == runs[0].std_error;
    o.detail += "price ";
  }

  {
    // Edgeworth fit with fewer samples and cycle paths.
    const auto spec = fit_model();
    auto opt = fit_options();
    opt.mc.scheme = sve::default_scheme(spec);
    opt.n_samples = 5000;
    opt.cycle_paths = 8;
    opt.cycle_horizon = 1000.0;
    std::vector<sve::FitReport> runs;
    for (unsigned t : threads) {
      opt.mc.threads = t;
      runs.push_back(sve::edgeworth_fit_study(spec, {}, opt));
    }
    for (std::size_t i = 1; i < runs.size(); ++i)
      o.pass = o.pass && runs[i].statistic == runs[0].statistic &&
               runs[i].density.a3 == runs[0].density.a3;
    o.detail += "edgeworth-fit ";
  }
  o.detail += o.pass ? "bit-identical across 1/2/8 threads" : "differ across thread counts";
  return o;
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "heston analytic skew", heston_analytic_skew},
    {2, "closed-form consistency", closed_form_consistency},
    {3, "alpha identity", alpha_identity},
    {4, "rescaling invariance", rescaling_invariance},
    {5, "convergence order", convergence_order},
    {6, "cycle-length oracle", cycle_length_oracle},
    {7, "ergodic ratio", ergodic_ratio},
    {8, "kac oracle", kac_oracle},
    {9, "edgeworth machinery", edgeworth_machinery},
    {10, "edgeworth fit", edgeworth_fit},
    {11, "condition checkers", condition_checkers},
    {12, "determinism", determinism},
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : kCriteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %2d %-26s %s  [%.1fs] %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL",
                seconds_since(t0), o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
