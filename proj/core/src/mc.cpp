#include "sve/mc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dynamics.hpp"
#include "parallel.hpp"
#include "sve/error.hpp"
#include "sve/quadrature.hpp"
#include "sve/rng.hpp"

namespace sve {

namespace {

constexpr std::size_t kChunk = 256;

struct PathResult {
  double z = 0.0;
  double mean_var = 0.0;
  bool ok = true;
};

// Z_T = z0 + int r - 1/2 int phi^2 + int phi rho dW1 + int phi sqrt(1-rho^2) dW2.
// Given the W1 path the W2 integral is N(0, int phi^2 (1 - rho^2) dt), so one
// draw per path replaces the per-step W2 increments. Units (a path, or an
// antithetic pair) are advanced in lanes of kLanes to overlap their
// dependency chains; every unit reads only its own stream.
constexpr std::size_t kLanes = 8;

struct UnitState {
  double v = 0.0, w = 0.0, p = 0.0;
  bool ok = true;
};

template <class Dyn>
void terminal_lanes(const Dyn& proto, std::size_t lanes, PathStream* rng, bool antithetic,
                    double x0, double base, double maturity, double dt, std::size_t steps,
                    PathResult* out) {
  const double sqdt = std::sqrt(dt);
  std::vector<Dyn> dyn(2 * kLanes, proto);
  UnitState st[2 * kLanes];
  double n_perp[kLanes];
  const std::size_t width = antithetic ? 2 : 1;
  for (std::size_t u = 0; u < lanes; ++u) {
    n_perp[u] = rng[u].normal();
    for (std::size_t k = 0; k < width; ++k) dyn[u * 2 + k].reset(x0);
  }
  auto advance = [](Dyn& d, UnitState& s, double h, double sh, double n) {
    const double f = d.phi();
    const double r = d.rho();
    s.v += f * f * h;
    s.w += f * r * sh * n;
    s.p += f * f * (1.0 - r * r) * h;
    s.ok = d.step(h, sh, n) && s.ok;
  };
  for (std::size_t i = 0; i < steps; ++i) {
    const bool last = i + 1 == steps;
    const double h = last ? maturity - dt * static_cast<double>(steps - 1) : dt;
    const double sh = last ? std::sqrt(h) : sqdt;
    for (std::size_t u = 0; u < lanes; ++u) {
      const double n = rng[u].normal();
      advance(dyn[u * 2], st[u * 2], h, sh, n);
      if (antithetic) advance(dyn[u * 2 + 1], st[u * 2 + 1], h, sh, -n);
    }
  }
  for (std::size_t u = 0; u < lanes; ++u)
    for (std::size_t k = 0; k < width; ++k) {
      const UnitState& s = st[u * 2 + k];
      const double sign = k == 0 ? 1.0 : -1.0;
      PathResult& r = out[u * width + k];
      r.z = base - 0.5 * s.v + s.w + sign * std::sqrt(std::max(s.p, 0.0)) * n_perp[u];
      r.mean_var = s.v / maturity;
      r.ok = s.ok && std::isfinite(r.z);
    }
}

void check_flags(std::size_t flagged, std::size_t total, double cap) {
  if (static_cast<double>(flagged) > cap * static_cast<double>(total))
    throw Error(ErrorKind::Simulation, std::to_string(flagged) + " of " + std::to_string(total) +
                                           " paths produced non-finite values");
}

}  // namespace

void McConfig::validate() const {
  if (n_paths < 1) throw Error(ErrorKind::Configuration, "mc.paths must be at least 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::Configuration, "mc.dt must be positive");
  if (antithetic && n_paths % 2 != 0)
    throw Error(ErrorKind::Configuration, "mc.paths must be even with antithetic sampling");
  if (!(max_flag_fraction >= 0.0))
    throw Error(ErrorKind::Configuration, "flag fraction must be non-negative");
}

Scheme default_scheme(const DiffusionSpec& spec) {
  return spec.variance ? Scheme::EulerFullTruncationVariance : Scheme::Euler;
}

TerminalSample simulate_terminal(const DiffusionSpec& spec, const MarketSpec& market,
                                 const McConfig& config) {
  config.validate();
  spec.validate();
  market.validate();
  if (config.dt > market.maturity)
    throw Error(ErrorKind::Configuration, "mc.dt exceeds the maturity");
  if (config.scheme == Scheme::EulerFullTruncationVariance && !spec.variance)
    throw Error(ErrorKind::Configuration,
                "full-truncation scheme needs a model with variance dynamics");

  const std::size_t steps =
      static_cast<std::size_t>(std::ceil(market.maturity / config.dt - 1e-9));
  const double base = market.spot_log + market.integrated_rate();
  const std::size_t units = config.antithetic ? config.n_paths / 2 : config.n_paths;
  const std::size_t width = config.antithetic ? 2 : 1;
  std::vector<PathResult> results(config.n_paths);

  detail::for_each_chunk(units, kChunk, config.threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t u0 = lo; u0 < hi; u0 += kLanes) {
      const std::size_t lanes = std::min(kLanes, hi - u0);
      std::vector<PathStream> rng;
      rng.reserve(lanes);
      for (std::size_t u = 0; u < lanes; ++u) rng.emplace_back(config.seed, u0 + u, kNormalStream);
      PathResult* out = results.data() + u0 * width;
      if (config.scheme == Scheme::EulerFullTruncationVariance)
        terminal_lanes(detail::TruncatedVariance(*spec.variance, 1.0, 1.0), lanes, rng.data(),
                       config.antithetic, spec.x0, base, market.maturity, config.dt, steps, out);
      else
        terminal_lanes(detail::GenericDynamics(spec, 1.0, 1.0), lanes, rng.data(),
                       config.antithetic, spec.x0, base, market.maturity, config.dt, steps, out);
    }
  });

  TerminalSample out;
  out.antithetic = config.antithetic;
  out.z.reserve(config.n_paths);
  out.mean_var.reserve(config.n_paths);
  for (std::size_t u = 0; u < units; ++u) {
    bool ok = true;
    for (std::size_t k = 0; k < width; ++k) ok = ok && results[u * width + k].ok;
    if (!ok) {
      out.n_flagged += width;
      continue;
    }
    for (std::size_t k = 0; k < width; ++k) {
      out.z.push_back(results[u * width + k].z);
      out.mean_var.push_back(results[u * width + k].mean_var);
    }
  }
  check_flags(out.n_flagged, config.n_paths, config.max_flag_fraction);
  return out;
}

McEstimate sample_mean(const TerminalSample& sample, const std::function<double(double)>& g,
                       std::uint64_t seed) {
  const std::size_t width = sample.antithetic ? 2 : 1;
  const std::size_t n = sample.z.size() / width;
  if (n == 0) throw Error(ErrorKind::Simulation, "no valid paths");
  CompensatedSum s1, s2;
  std::vector<double> unit(n);
  for (std::size_t u = 0; u < n; ++u) {
    double v = 0.0;
    for (std::size_t k = 0; k < width; ++k) v += g(sample.z[u * width + k]);
    unit[u] = v / static_cast<double>(width);
    s1.add(unit[u]);
  }
  const double mean = s1.value() / static_cast<double>(n);
  for (double v : unit) s2.add((v - mean) * (v - mean));
  McEstimate est;
  est.mean = mean;
  est.std_error = n > 1 ? std::sqrt(s2.value() / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  est.n_paths = sample.z.size();
  est.seed = seed;
  est.n_flagged = sample.n_flagged;
  return est;
}

McEstimate price_mc(const Payoff& payoff, const DiffusionSpec& spec, const MarketSpec& market,
                    const McConfig& config) {
  payoff.validate();
  const auto sample = simulate_terminal(spec, market, config);
  auto est = sample_mean(sample, [&](double z) { return payoff(z); }, config.seed);
  const double d = market.discount();
  est.mean *= d;
  est.std_error *= d;
  return est;
}

namespace {

template <class Dyn>
bool hitting_path(Dyn dyn, double y, double z, double dt, double max_time, bool bridge,
                  PathStream& normals, PathStream& uniforms,
                  const std::function<double(double)>& g, double& value) {
  dyn.reset(y);
  const bool up = z > y;
  const double level = dyn.level(z);
  const double sqdt = std::sqrt(dt);
  double t = 0.0, acc = 0.0;
  double ga = g ? g(dyn.x()) : 1.0;
  while (t < max_time) {
    const double sa = dyn.state();
    const double vol = dyn.local_vol();
    if (!dyn.step(dt, sqdt, normals.normal())) return false;
    const double sb = dyn.state();
    const double gb = g ? g(dyn.x()) : 1.0;
    const bool crossed = up ? sb >= level : sb <= level;
    if (crossed) {
      const double theta = (level - sa) / (sb - sa);
      const double gl = g ? g(z) : 1.0;
      acc += 0.5 * (ga + gl) * theta * dt;
      value = acc;
      return true;
    }
    if (bridge && uniforms.uniform() < detail::bridge_hit_probability(sa, sb, level, vol, dt)) {
      acc += 0.25 * (ga + gb) * dt;
      value = acc;
      return true;
    }
    acc += 0.5 * (ga + gb) * dt;
    ga = gb;
    t += dt;
  }
  return false;
}

}  // namespace

HittingSample simulate_hitting(const DiffusionSpec& spec, double epsilon, double y, double z,
                               const McConfig& config, double max_time,
                               const std::function<double(double)>& g) {
  config.validate();
  if (!(epsilon > 0.0)) throw Error(ErrorKind::Domain, "epsilon must be positive");
  if (!(max_time > 0.0)) throw Error(ErrorKind::Configuration, "max_time must be positive");
  if (config.scheme == Scheme::EulerFullTruncationVariance && !spec.variance)
    throw Error(ErrorKind::Configuration,
                "full-truncation scheme needs a model with variance dynamics");
  std::vector<double> values(config.n_paths, 0.0);
  std::vector<char> ok(config.n_paths, 0);
  const double e2 = epsilon * epsilon;
  detail::for_each_chunk(config.n_paths, kChunk, config.threads,
                         [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      PathStream normals(config.seed, p, kNormalStream);
      PathStream uniforms(config.seed, p, kUniformStream);
      if (y == z) {
        ok[p] = 1;
        continue;
      }
      bool hit;
      if (config.scheme == Scheme::EulerFullTruncationVariance)
        hit = hitting_path(detail::TruncatedVariance(*spec.variance, e2, epsilon), y, z,
                           config.dt, max_time, config.bridge, normals, uniforms, g, values[p]);
      else
        hit = hitting_path(detail::GenericDynamics(spec, e2, epsilon), y, z, config.dt, max_time,
                           config.bridge, normals, uniforms, g, values[p]);
      ok[p] = hit ? 1 : 0;
    }
  });
  HittingSample out;
  for (std::size_t p = 0; p < config.n_paths; ++p) {
    if (ok[p])
      out.values.push_back(values[p]);
    else
      ++out.n_flagged;
  }
  check_flags(out.n_flagged, config.n_paths, config.max_flag_fraction);
  return out;
}

double kac_first_moment(const ErgodicMeasure& measure, const std::function<double(double)>& g,
                        double y, double z) {
  const auto [lo, hi] = measure.window;
  for (double p : {y, z})
    if (!(p >= lo && p <= hi))
      throw Error(ErrorKind::Extrapolation, "point " + std::to_string(p) +
                                                " lies outside the ergodic window");
  if (y == z) return 0.0;
  const CumulativeIntegral cg(measure, g);
  const CumulativeIntegral csg(measure, [&](double x) { return measure.scale(x) * g(x); });
  const double sy = measure.scale(y);
  const double sz = measure.scale(z);
  if (y < z) {
    const double inner = sz * (cg(z) - cg(y)) - (csg(z) - csg(y));
    return 2.0 * inner + 2.0 * (sz - sy) * cg(y);
  }
  const double inner = (csg(y) - csg(z)) - sz * (cg(y) - cg(z));
  return 2.0 * (sy - sz) * (cg.total() - cg(y)) + 2.0 * inner;
}

}  // namespace sve
