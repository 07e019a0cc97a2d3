#include "cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli/config.hpp"
#include "cli/csv.hpp"
#include "sve/conditions.hpp"
#include "sve/cycles.hpp"
#include "sve/error.hpp"
#include "sve/expression.hpp"
#include "sve/harness.hpp"
#include "sve/pricer.hpp"

namespace sve::cli {

namespace {

namespace fs = std::filesystem;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Options {
  std::string command;
  std::string config;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::string payoff = "put";
  std::vector<double> strikes;
  std::optional<std::string> expr;
  std::optional<double> bound;
  std::vector<double> breakpoints;
  std::string iv_path;
};

struct Context {
  RunConfig cfg;
  DiffusionSpec spec;
  MarketSpec market;
  McConfig mc;
  std::ostream& out;
  std::ostream& err;
  const Options& opt;
};

int exit_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Configuration:
    case ErrorKind::Parameter:
    case ErrorKind::Precondition:
    case ErrorKind::Domain:
      return kConfigError;
    default:
      return kNumericalError;
  }
}

[[noreturn]] void flag_error(const std::string& msg) {
  throw Error(ErrorKind::Configuration, msg);
}

std::vector<Payoff> payoffs(const Context& c) {
  const auto& o = c.opt;
  std::vector<Payoff> out;
  if (o.payoff == "custom") {
    if (!o.expr) flag_error("--payoff custom needs --expr");
    if (!o.bound) flag_error("--payoff custom needs --bound (payoffs must be bounded)");
    const auto f = Expression::parse(*o.expr, "z");
    out.push_back(Payoff::make_custom([f](double z) { return f(z); }, *o.bound, o.breakpoints));
    return out;
  }
  std::vector<double> strikes = o.strikes;
  if (strikes.empty()) strikes = c.cfg.numbers("pricing.strikes");
  if (strikes.empty()) flag_error("--payoff " + o.payoff + " needs --strike");
  for (double k : strikes) {
    if (o.payoff == "put")
      out.push_back(Payoff::put(k));
    else if (o.payoff == "call")
      out.push_back(Payoff::call(k));
    else if (o.payoff == "digital")
      out.push_back(Payoff::digital(k));
    else
      flag_error("--payoff must be put, call, digital or custom, got '" + o.payoff + "'");
  }
  return out;
}

void metadata(const Context& c) {
  c.out << "# sve command=" << c.opt.command << " model=" << c.spec.name
        << " seed=" << c.mc.seed << "\n";
  for (const auto& w : c.spec.warnings) c.err << "warning: " << w << "\n";
}

double safe_iv(const Context& c, double price, const Payoff& p) {
  if (p.kind != Payoff::Kind::Put && p.kind != Payoff::Kind::Call) return kNaN;
  try {
    return implied_vol(price, p.strike, c.market.maturity, c.market.spot_log,
                       c.market.discount(), p.kind == Payoff::Kind::Call);
  } catch (const Error& e) {
    c.err << "warning: no implied volatility at strike " << p.strike << ": " << e.what() << "\n";
    return kNaN;
  }
}

CsvTable price_table(const Context& c, const ErgodicMeasure& m, std::vector<ExpansionQuote>* quotes) {
  CsvTable t;
  t.header = {"strike", "maturity", "price_bs", "price_corrected", "correction", "iv_bs",
              "iv_corrected"};
  for (const auto& p : payoffs(c)) {
    const auto q = price_corrected(p, m, c.spec, c.market);
    if (quotes) quotes->push_back(q);
    const bool has_strike = p.kind != Payoff::Kind::Custom;
    t.rows.push_back({has_strike ? csv_number(p.strike) : "", csv_number(c.market.maturity),
                      csv_number(q.price_bs), csv_number(q.price_corrected),
                      csv_number(q.correction), csv_number(safe_iv(c, q.price_bs, p)),
                      csv_number(safe_iv(c, q.price_corrected, p))});
  }
  return t;
}

void print_table(std::ostream& out, const CsvTable& t) {
  for (std::size_t i = 0; i < t.header.size(); ++i)
    out << (i ? "  " : "") << std::setw(15) << t.header[i];
  out << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      out << (i ? "  " : "") << std::setw(15);
      if (r[i].empty())
        out << "-";
      else
        out << std::setprecision(8) << std::stod(r[i]);
    }
    out << "\n";
  }
}

int cmd_price(Context& c) {
  const auto m = build_ergodic_measure(c.spec);
  std::vector<ExpansionQuote> quotes;
  const auto t = price_table(c, m, &quotes);
  const auto& q = quotes.front();
  c.out << "alpha = " << q.alpha << " (+/- " << q.alpha_error << ")"
        << (q.alpha_resolved ? "" : " [not resolved]") << "\n"
        << "Sigma = " << q.sigma2 << "  epsilon = " << m.epsilon << "\n";
  print_table(c.out, t);
  write_csv(fs::path(c.opt.out_dir) / "price.csv", t);
  return kOk;
}

int cmd_skew(Context& c) {
  if (c.opt.payoff != "put" && c.opt.payoff != "call")
    flag_error("skew needs --payoff put or call");
  const auto m = build_ergodic_measure(c.spec);
  std::vector<ExpansionQuote> quotes;
  const auto t = price_table(c, m, &quotes);
  const auto& q = quotes.front();
  c.out << "skew line: a = " << q.skew_a << "  b = " << q.skew_b << "  V2 = " << q.v2
        << "  V3 = " << q.v3 << "\n";
  print_table(c.out, t);
  std::vector<IvPoint> pts;
  const std::size_t iv_col = t.column("iv_corrected");
  for (const auto& r : t.rows)
    if (!r[iv_col].empty())
      pts.push_back({parse_number(r[0], "strike"), c.market.maturity,
                     parse_number(r[iv_col], "iv")});
  if (pts.size() >= 2) {
    try {
      const auto fit = calibrate_skew(pts, std::exp(c.market.spot_log), c.market.average_rate());
      c.out << "least-squares line through iv_corrected: a = " << fit.a << "  b = " << fit.b
            << "\n";
    } catch (const Error& e) {
      c.err << "warning: " << e.what() << "\n";
    }
  }
  write_csv(fs::path(c.opt.out_dir) / "skew.csv", t);
  return kOk;
}

int cmd_check(Context& c) {
  const auto m = build_ergodic_measure(c.spec);
  const std::pair<double, double> gamma{c.cfg.number("harness.gamma_plus", 0.0),
                                        c.cfg.number("harness.gamma_minus", 0.0)};
  const double delta = c.cfg.number("harness.delta", 0.01);
  const auto r = check_conditions(c.spec, m, gamma, delta, c.cfg.number("harness.v_probe", 40.0));
  c.out << "gamma = (" << gamma.first << ", " << gamma.second << ")  delta = " << delta << "\n";
  c.out << "growth inequalities: " << (r.assgam.ok ? "pass" : "fail");
  if (r.assgam.witness)
    c.out << "  worst pair (" << r.assgam.witness->first << ", " << r.assgam.witness->second
          << ") log-excess " << r.assgam.worst_excess;
  c.out << "\n";
  c.out << "local regularity: " << (r.assint.ok ? "pass" : "fail");
  if (r.assint.witness)
    c.out << "  (x, a) = (" << r.assint.witness->first << ", " << r.assint.witness->second << ")";
  c.out << "\n";
  c.out << "tail drift: kappa+ = " << r.assk.kappa_plus << " [" << to_string(r.assk.kappa_plus_status)
        << "]  kappa- = " << r.assk.kappa_minus << " [" << to_string(r.assk.kappa_minus_status)
        << "]  growth +/- = " << to_string(r.assk.growth_plus) << "/"
        << to_string(r.assk.growth_minus) << "  -> " << to_string(r.assk.verdict) << "\n";
  const auto v = r.overall();
  c.out << "overall: " << to_string(v) << "\n";
  return v == Verdict::Pass ? kOk : v == Verdict::Fail ? kConditionFail : kInconclusive;
}

int cmd_mc_converge(Context& c) {
  const auto ps = payoffs(c);
  if (ps.size() != 1) flag_error("mc-converge takes exactly one --strike");
  ConvergenceOptions o;
  const auto etas = c.cfg.numbers("harness.etas");
  if (!etas.empty()) o.etas = etas;
  o.mc = c.mc;
  o.dt_factor = c.cfg.number("harness.dt_factor", o.dt_factor);
  o.max_paths = c.cfg.integer("harness.max_paths", o.max_paths);
  const auto rep = convergence_study(c.spec, c.market, ps.front(), o);
  CsvTable t;
  t.header = {"eta", "error", "se", "runtime"};
  for (std::size_t i = 0; i < rep.etas.size(); ++i)
    t.rows.push_back({csv_number(rep.etas[i]), csv_number(rep.errors[i]),
                      csv_number(rep.mc_errors[i]), csv_number(rep.runtime_s[i])});
  print_table(c.out, t);
  write_csv(fs::path(c.opt.out_dir) / "convergence.csv", t);
  if (!rep.order_identified) {
    c.out << "fitted order: unidentified (" << rep.note << ")\n";
    return kInconclusive;
  }
  c.out << "fitted order: " << rep.fitted_order << "\n";
  return kOk;
}

int cmd_calibrate(Context& c) {
  if (c.opt.iv_path.empty()) flag_error("calibrate needs --iv PATH");
  const auto t = read_csv(c.opt.iv_path);
  const std::size_t ks = t.column("strike"), ts = t.column("maturity"), is = t.column("iv");
  std::vector<IvPoint> pts;
  for (const auto& r : t.rows)
    pts.push_back({parse_number(r[ks], "strike"), parse_number(r[ts], "maturity"),
                   parse_number(r[is], "iv")});
  if (pts.empty()) flag_error("implied-volatility CSV has no rows");
  const auto fit = calibrate_skew(pts, std::exp(c.market.spot_log), c.market.rate);
  c.out << "a = " << fit.a << "  b = " << fit.b << "  V2 = " << fit.v2 << "  V3 = " << fit.v3
        << "  residual = " << fit.residual_norm << "\n";
  CsvTable o;
  o.header = {"a", "b", "v2", "v3", "sigma_bar", "residual_norm"};
  o.rows.push_back({csv_number(fit.a), csv_number(fit.b), csv_number(fit.v2), csv_number(fit.v3),
                    csv_number(fit.sigma_bar), csv_number(fit.residual_norm)});
  write_csv(fs::path(c.opt.out_dir) / "calibration.csv", o);
  return kOk;
}

FitOptions fit_options(const Context& c) {
  FitOptions o;
  o.mc = c.mc;
  o.t_scale = c.cfg.number("harness.t_scale", o.t_scale);
  o.n_samples = c.cfg.integer("harness.samples", o.n_samples);
  o.cycle_paths = c.cfg.integer("harness.cycle_paths", o.cycle_paths);
  o.cycle_horizon = c.cfg.number("harness.cycle_horizon", o.cycle_horizon);
  o.x0 = c.cfg.number("harness.x0");
  o.x1 = c.cfg.number("harness.x1");
  return o;
}

int cmd_edgeworth(Context& c) {
  const auto rep = edgeworth_fit_study(c.spec, c.market, fit_options(c));
  c.out << "cycles = " << rep.stats.n_cycles << "  v = " << rep.density.v
        << "  A1 = " << rep.density.a1 << "  A3 = " << rep.density.a3 << "\n"
        << "sup CDF distance: edgeworth = " << rep.statistic
        << "  gaussian = " << rep.baseline_statistic << "  -> "
        << (rep.pass ? "edgeworth closer" : "edgeworth not closer") << "\n";
  CsvTable t;
  t.header = {"statistic", "baseline", "n"};
  t.rows.push_back({csv_number(rep.statistic), csv_number(rep.baseline_statistic),
                    std::to_string(rep.n_samples)});
  write_csv(fs::path(c.opt.out_dir) / "fit.csv", t);
  return rep.pass ? kOk : kConditionFail;
}

int cmd_cycles_dump(Context& c) {
  const auto m = build_ergodic_measure(c.spec);
  const auto fo = fit_options(c);
  CycleSetup s;
  s.x0 = fo.x0 ? *fo.x0 : ergodic_quantile(m, 0.35);
  s.x1 = fo.x1 ? *fo.x1 : ergodic_quantile(m, 0.65);
  s.epsilon = m.epsilon;
  s.maturity = c.market.maturity;
  s.sigma2 = sigma_total(m, c.spec, c.market);
  s.start = c.spec.x0;
  s.horizon = fo.cycle_horizon;
  McConfig mc = c.mc;
  mc.n_paths = fo.cycle_paths;
  mc.antithetic = false;
  const auto cycles = extract_cycles(c.spec, s, mc);
  const auto st = cycle_stats(cycles);
  c.out << "cycles = " << cycles.size() << "  x0 = " << s.x0 << "  x1 = " << s.x1 << "\n"
        << "mean length = " << st.m_l << " +/- " << st.m_l_se
        << "  scale oracle = " << 2.0 * (m.scale(s.x1) - m.scale(s.x0)) << "\n";
  CsvTable t;
  t.header = {"j", "l", "g_h", "g_vol", "int_k_1", "int_k_2"};
  for (const auto& cp : cycles)
    t.rows.push_back({std::to_string(cp.j), csv_number(cp.l), csv_number(cp.g_h),
                      csv_number(cp.g_vol), csv_number(cp.int_k[0]), csv_number(cp.int_k[1])});
  write_csv(fs::path(c.opt.out_dir) / "cycles.csv", t);
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Stochastic-volatility expansion pricer and validation harness", "sve"};
  app.require_subcommand(1);
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "flat section.key = value file")->required();
    sub->add_option("--out", opt.out_dir, "output directory for CSV files");
    sub->add_option("--seed", opt.seed, "overrides mc.seed");
  };
  auto payoff_flags = [&](CLI::App* sub) {
    sub->add_option("--payoff", opt.payoff, "put, call, digital or custom");
    sub->add_option("--strike", opt.strikes, "strike(s); repeat or comma-separate")
        ->delimiter(',');
    sub->add_option("--expr", opt.expr, "custom payoff f(z) of the log-price z");
    sub->add_option("--bound", opt.bound, "sup |f| of a custom payoff");
    sub->add_option("--breakpoints", opt.breakpoints, "kinks/jumps of a custom payoff in z")
        ->delimiter(',');
  };
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"price", "expansion price, Black-Scholes baseline and implied volatilities"},
      {"skew", "implied-volatility skew line across strikes"},
      {"check", "regularity conditions (exit 0 pass, 1 fail, 4 inconclusive)"},
      {"mc-converge", "Monte Carlo error against eta"},
      {"calibrate", "fit the skew line to an implied-volatility CSV"},
      {"edgeworth", "Edgeworth fit of the regenerative functional"},
      {"cycles-dump", "dump regeneration cycles to CSV"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    common(sub);
    if (name == "price" || name == "skew" || name == "mc-converge") payoff_flags(sub);
    if (name == "calibrate") sub->add_option("--iv", opt.iv_path, "CSV with strike,maturity,iv");
    sub->callback([&opt, name = name] { opt.command = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    auto cfg = RunConfig::load(opt.config);
    auto spec = build_model(cfg);
    auto market = build_market(cfg);
    auto mc = build_mc(cfg, spec);
    if (opt.seed) mc.seed = *opt.seed;
    Context c{std::move(cfg), std::move(spec), market, mc, out, err, opt};
    metadata(c);
    if (opt.command == "price") return cmd_price(c);
    if (opt.command == "skew") return cmd_skew(c);
    if (opt.command == "check") return cmd_check(c);
    if (opt.command == "mc-converge") return cmd_mc_converge(c);
    if (opt.command == "calibrate") return cmd_calibrate(c);
    if (opt.command == "edgeworth") return cmd_edgeworth(c);
    if (opt.command == "cycles-dump") return cmd_cycles_dump(c);
    err << "error: unknown command\n";
    return kConfigError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalError;
  }
}

}  // namespace sve::cli
