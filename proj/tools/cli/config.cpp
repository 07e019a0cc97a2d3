#include "cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sve/error.hpp"
#include "sve/expression.hpp"

namespace sve::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void config_error(const std::string& msg) {
  throw Error(ErrorKind::Configuration, msg);
}

const std::vector<std::string> kModelParams = {"m", "nu", "eta", "rho", "sigma", "xi", "mu"};

}  // namespace

const std::vector<std::string>& RunConfig::known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k = {
        "model.preset", "model.x0", "model.b", "model.c", "model.phi", "model.u_lo",
        "model.u_hi",
        "market.spot", "market.rate", "market.maturity",
        "mc.paths", "mc.dt", "mc.seed", "mc.scheme", "mc.antithetic", "mc.threads", "mc.bridge",
        "pricing.strikes",
        "harness.gamma_plus", "harness.gamma_minus", "harness.delta", "harness.v_probe",
        "harness.etas", "harness.dt_factor", "harness.max_paths", "harness.t_scale",
        "harness.samples", "harness.cycle_paths", "harness.cycle_horizon", "harness.x0",
        "harness.x1"};
    for (const auto& p : kModelParams) k.push_back("model." + p);
    return k;
  }();
  return keys;
}

double parse_number(std::string_view text, const std::string& what) {
  const std::string t = trim(text);
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v, std::chars_format::general);
  if (t.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
    config_error("'" + what + "' expects a decimal number, got '" + t + "'");
  return v;
}

RunConfig RunConfig::parse(std::string_view text) {
  RunConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  const auto& known = known_keys();
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      config_error("line " + std::to_string(lineno) + ": expected 'section.key = value'");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (std::find(known.begin(), known.end(), key) == known.end())
      config_error("unknown key '" + key + "' on line " + std::to_string(lineno));
    if (cfg.values_.count(key)) config_error("duplicate key '" + key + "'");
    cfg.values_[key] = value;
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) config_error("cannot read config file '" + path.string() + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

std::string RunConfig::text(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::optional<double> RunConfig::number(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return parse_number(it->second, key);
}

double RunConfig::number(const std::string& key, double fallback) const {
  return number(key).value_or(fallback);
}

std::uint64_t RunConfig::integer(const std::string& key, std::uint64_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& t = it->second;
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    // Accept integral values written with an exponent, e.g. 2e5.
    const double d = parse_number(t, key);
    if (!(d >= 0.0 && d == std::floor(d) && d < 1.8e19))
      config_error("'" + key + "' expects a non-negative integer, got '" + t + "'");
    return static_cast<std::uint64_t>(d);
  }
  return v;
}

bool RunConfig::flag(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  config_error("'" + key + "' expects true or false, got '" + it->second + "'");
}

std::vector<double> RunConfig::numbers(const std::string& key) const {
  std::vector<double> out;
  const auto it = values_.find(key);
  if (it == values_.end()) return out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item, key));
  return out;
}

DiffusionSpec build_model(const RunConfig& cfg) {
  const std::string name = cfg.text("model.preset", "");
  if (name.empty()) config_error("missing key 'model.preset'");
  DiffusionSpec spec;
  if (name == "custom") {
    for (const char* k : {"model.b", "model.c", "model.phi"})
      if (!cfg.has(k)) config_error(std::string("custom model needs '") + k + "'");
    for (const auto& p : kModelParams)
      if (p != "rho" && cfg.has("model." + p))
        config_error("key 'model." + p + "' does not apply to the custom model");
    const auto b = Expression::parse(cfg.text("model.b", ""));
    const auto c = Expression::parse(cfg.text("model.c", ""));
    const auto phi = Expression::parse(cfg.text("model.phi", ""));
    const auto rho = Expression::parse(cfg.text("model.rho", "0"));
    spec.b = [b](double x) { return b(x); };
    spec.c = [c](double x) { return c(x); };
    spec.phi = [phi](double x) { return phi(x); };
    spec.rho = [rho](double x) { return rho(x); };
    spec.name = "custom";
  } else {
    for (const char* k : {"model.b", "model.c", "model.phi"})
      if (cfg.has(k)) config_error(std::string("key '") + k + "' only applies to model.preset = custom");
    std::map<std::string, double> params;
    for (const auto& p : kModelParams)
      if (auto v = cfg.number("model." + p)) params[p] = *v;
    spec = preset(name, params);
  }
  if (auto x0 = cfg.number("model.x0")) spec.x0 = *x0;
  if (auto lo = cfg.number("model.u_lo")) spec.u_interval.lo = *lo;
  if (auto hi = cfg.number("model.u_hi")) spec.u_interval.hi = *hi;
  spec.validate();
  return spec;
}

MarketSpec build_market(const RunConfig& cfg) {
  MarketSpec m;
  const double spot = cfg.number("market.spot", 1.0);
  if (!(spot > 0.0)) config_error("'market.spot' must be positive");
  m.spot_log = std::log(spot);
  m.rate = cfg.number("market.rate", 0.0);
  m.maturity = cfg.number("market.maturity", 1.0);
  m.validate();
  return m;
}

McConfig build_mc(const RunConfig& cfg, const DiffusionSpec& spec) {
  McConfig c;
  c.n_paths = cfg.integer("mc.paths", c.n_paths);
  c.dt = cfg.number("mc.dt", c.dt);
  c.seed = cfg.integer("mc.seed", c.seed);
  c.antithetic = cfg.flag("mc.antithetic", c.antithetic);
  c.threads = static_cast<unsigned>(cfg.integer("mc.threads", 0));
  c.bridge = cfg.flag("mc.bridge", c.bridge);
  const std::string scheme = cfg.text("mc.scheme", "auto");
  if (scheme == "auto")
    c.scheme = default_scheme(spec);
  else if (scheme == "euler")
    c.scheme = Scheme::Euler;
  else if (scheme == "full_truncation")
    c.scheme = Scheme::EulerFullTruncationVariance;
  else
    config_error("'mc.scheme' must be auto, euler or full_truncation, got '" + scheme + "'");
  c.validate();
  return c;
}

}  // namespace sve::cli
