#include "sve/cycles.hpp"

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

constexpr std::size_t kChunk = 16;

using Vec2 = std::array<double, 2>;

struct PathRun {
  std::vector<CyclePath> cycles;
  Vec2 k_end{};
  bool ok = true;
};

template <class Dyn>
PathRun run_path(Dyn dyn, const CycleSetup& setup, double dt, bool bridge, bool detect,
                 std::uint64_t seed, std::size_t path) {
  PathStream normals(seed, path, kNormalStream);
  PathStream uniforms(seed, path, kUniformStream);
  PathRun out;
  dyn.reset(setup.start);
  const double sqdt = std::sqrt(dt);
  const double lvl0 = dyn.level(setup.x0);
  const double lvl1 = dyn.level(setup.x1);
  const std::size_t steps =
      static_cast<std::size_t>(std::ceil(setup.horizon / dt - 1e-9));

  Vec2 k{0.0, 0.0};
  bool reached = false;  // sup X^ >= x1 since the last regeneration
  std::size_t j = 0;     // index of the running cycle
  double tau = 0.0;
  Vec2 k_tau{0.0, 0.0};
  Vec2 int_k{0.0, 0.0};

  for (std::size_t i = 0; i < steps; ++i) {
    const double h = (i + 1 == steps) ? setup.horizon - dt * static_cast<double>(steps - 1) : dt;
    const double sh = (i + 1 == steps) ? std::sqrt(h) : sqdt;
    const double n1 = normals.normal();
    const double n2 = normals.normal();
    const double f = dyn.phi();
    const double r = dyn.rho();
    const double sa = dyn.state();
    const double vol = dyn.local_vol();
    const Vec2 ka = k;
    k[0] += (setup.maturity * f * f - setup.sigma2) * h;
    k[1] += f * (r * n1 + std::sqrt(std::max(0.0, 1.0 - r * r)) * n2) * sh;
    if (!dyn.step(h, sh, n1)) {
      out.ok = false;
      return out;
    }
    if (!detect) continue;
    const double sb = dyn.state();
    const double t0 = dt * static_cast<double>(i);

    double theta = -1.0;  // crossing fraction of x0 within this step
    if (!reached) {
      if (sb >= lvl1 ||
          (bridge && sa < lvl1 &&
           uniforms.uniform() < detail::bridge_hit_probability(sa, sb, lvl1, vol, h)))
        reached = true;
    } else if (sb <= lvl0) {
      theta = (sa - lvl0) / (sa - sb);
    } else if (bridge && sa > lvl0) {
      const double p = detail::bridge_hit_probability(sa, sb, lvl0, vol, h);
      if (p > 1e-300 && uniforms.uniform() < p) theta = 0.5;
    }

    if (theta < 0.0) {
      for (int c = 0; c < 2; ++c) int_k[c] += 0.5 * ((ka[c] - k_tau[c]) + (k[c] - k_tau[c])) * h;
      continue;
    }
    Vec2 kc;
    for (int c = 0; c < 2; ++c) {
      kc[c] = ka[c] + theta * (k[c] - ka[c]);
      int_k[c] += 0.5 * ((ka[c] - k_tau[c]) + (kc[c] - k_tau[c])) * theta * h;
    }
    const double tc = t0 + theta * h;
    if (j > 0) {
      CyclePath cp;
      cp.path = path;
      cp.j = j;
      cp.tau_start = tau;
      cp.tau_end = tc;
      cp.l = tc - tau;
      cp.g_h = kc[0] - k_tau[0];
      cp.g_vol = kc[1] - k_tau[1];
      cp.int_k = int_k;
      cp.k_start = k_tau;
      out.cycles.push_back(cp);
    }
    ++j;
    tau = tc;
    k_tau = kc;
    reached = false;
    for (int c = 0; c < 2; ++c) int_k[c] = 0.5 * (k[c] - kc[c]) * (1.0 - theta) * h;
  }
  out.k_end = k;
  return out;
}

std::vector<PathRun> run_paths(const DiffusionSpec& spec, const CycleSetup& setup,
                               const McConfig& config, bool detect) {
  config.validate();
  setup.validate();
  if (config.scheme == Scheme::EulerFullTruncationVariance && !spec.variance)
    throw Error(ErrorKind::Configuration,
                "full-truncation scheme needs a model with variance dynamics");
  std::vector<PathRun> runs(config.n_paths);
  const double e = setup.epsilon;
  detail::for_each_chunk(config.n_paths, kChunk, config.threads,
                         [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      if (config.scheme == Scheme::EulerFullTruncationVariance)
        runs[p] = run_path(detail::TruncatedVariance(*spec.variance, e * e, e), setup, config.dt,
                           config.bridge, detect, config.seed, p);
      else
        runs[p] = run_path(detail::GenericDynamics(spec, e * e, e), setup, config.dt,
                           config.bridge, detect, config.seed, p);
    }
  });
  std::size_t flagged = 0;
  for (const auto& r : runs) flagged += r.ok ? 0 : 1;
  if (static_cast<double>(flagged) > config.max_flag_fraction * static_cast<double>(runs.size()))
    throw Error(ErrorKind::Simulation, std::to_string(flagged) + " of " +
                                           std::to_string(runs.size()) +
                                           " paths produced non-finite values");
  return runs;
}

}  // namespace

void CycleSetup::validate() const {
  if (!(x0 < x1)) throw Error(ErrorKind::Configuration, "cycle levels need x0 < x1");
  if (!(horizon > 0.0)) throw Error(ErrorKind::Configuration, "horizon must be positive");
  if (!(epsilon > 0.0)) throw Error(ErrorKind::Domain, "epsilon must be positive");
  if (!(maturity > 0.0)) throw Error(ErrorKind::Domain, "maturity must be positive");
}

std::vector<CyclePath> extract_cycles(const DiffusionSpec& spec, const CycleSetup& setup,
                                      const McConfig& config) {
  auto runs = run_paths(spec, setup, config, true);
  std::vector<CyclePath> all;
  for (auto& r : runs) {
    if (!r.ok) continue;
    all.insert(all.end(), r.cycles.begin(), r.cycles.end());
  }
  if (all.size() < kMinCycles)
    throw Error(ErrorKind::InsufficientCycles,
                "only " + std::to_string(all.size()) + " complete cycles (need " +
                    std::to_string(kMinCycles) + "); increase the horizon or the path count");
  return all;
}

std::vector<std::array<double, 2>> simulate_functional(const DiffusionSpec& spec,
                                                       const CycleSetup& setup,
                                                       const McConfig& config) {
  auto runs = run_paths(spec, setup, config, false);
  std::vector<std::array<double, 2>> out;
  out.reserve(runs.size());
  for (const auto& r : runs)
    if (r.ok) out.push_back(r.k_end);
  return out;
}

namespace {

struct Moments {
  double m_l = 0.0;
  Vec2 mean_g{};
};

Moments first_moments(std::span<const CyclePath> c, std::size_t skip_lo, std::size_t skip_hi) {
  CompensatedSum sl, s0, s1;
  std::size_t n = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i >= skip_lo && i < skip_hi) continue;
    sl.add(c[i].l);
    s0.add(c[i].g_h);
    s1.add(c[i].g_vol);
    ++n;
  }
  const double dn = static_cast<double>(n);
  return {sl.value() / dn, {s0.value() / dn, s1.value() / dn}};
}

}  // namespace

CycleStats cycle_stats(std::span<const CyclePath> cycles, std::size_t jackknife_groups) {
  const std::size_t n = cycles.size();
  if (n < kMinCycles)
    throw Error(ErrorKind::InsufficientCycles,
                "cycle statistics need at least " + std::to_string(kMinCycles) + " cycles");
  constexpr std::size_t d = 2;
  const double dn = static_cast<double>(n);
  CycleStats st;
  st.dim = d;
  st.n_cycles = n;
  const auto mom = first_moments(cycles, n, n);
  st.m_l = mom.m_l;
  if (!(st.m_l > 0.0)) throw Error(ErrorKind::Degenerate, "mean cycle length is not positive");
  st.mean_g = {mom.mean_g[0], mom.mean_g[1]};
  st.mu = {st.mean_g[0] / st.m_l, st.mean_g[1] / st.m_l};

  // Centered cycle increments G - l m_G / m_L and l - m_L.
  std::vector<std::array<double, 3>> c(n);
  for (std::size_t i = 0; i < n; ++i) {
    c[i][0] = cycles[i].g_h - cycles[i].l * st.mu[0];
    c[i][1] = cycles[i].g_vol - cycles[i].l * st.mu[1];
    c[i][2] = cycles[i].l - st.m_l;
  }
  st.var_gl.assign(9, 0.0);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) {
      CompensatedSum s;
      for (const auto& r : c) s.add(r[a] * r[b]);
      st.var_gl[a * 3 + b] = s.value() / dn;
    }
  st.active.assign(d, true);
  for (std::size_t k = 0; k < d; ++k)
    st.active[k] = st.var_gl[k * 3 + k] > 1e-20 * (1.0 + st.m_l * st.m_l);
  if (!(st.var_gl[8] > 0.0))
    throw Error(ErrorKind::Degenerate, "cycle lengths have zero variance");

  // Cholesky of the active block of Var[(G, l)].
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < d; ++k)
    if (st.active[k]) idx.push_back(k);
  idx.push_back(2);
  const std::size_t m = idx.size();
  std::vector<double> L(m * m, 0.0);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b <= a; ++b) {
      double s = st.var_gl[idx[a] * 3 + idx[b]];
      for (std::size_t q = 0; q < b; ++q) s -= L[a * m + q] * L[b * m + q];
      if (a == b) {
        if (!(s > 1e-12 * st.var_gl[idx[a] * 3 + idx[a]]))
          throw Error(ErrorKind::Degenerate,
                      "cycle covariance matrix is singular (x0 = x1 or phi = 0?)");
        L[a * m + a] = std::sqrt(s);
      } else {
        L[a * m + b] = s / L[b * m + b];
      }
    }

  st.mu_kl.assign(d * d, 0.0);
  st.rho_cov.assign(d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    if (!st.active[k]) continue;
    st.rho_cov[k] = st.var_gl[k * 3 + 2];
    for (std::size_t l = 0; l < d; ++l)
      if (st.active[l]) st.mu_kl[k * d + l] = st.var_gl[k * 3 + l] / st.m_l;
  }
  st.kappa3.assign(d * d * d, 0.0);
  st.mu_klm.assign(d * d * d, 0.0);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b)
      for (std::size_t g = 0; g < d; ++g) {
        if (!(st.active[a] && st.active[b] && st.active[g])) continue;
        CompensatedSum s;
        for (const auto& r : c) s.add(r[a] * r[b] * r[g]);
        const double k3 = s.value() / dn;
        st.kappa3[(a * d + b) * d + g] = k3;
        st.mu_klm[(a * d + b) * d + g] =
            (k3 - st.rho_cov[a] * st.mu_kl[b * d + g] - st.rho_cov[b] * st.mu_kl[g * d + a] -
             st.rho_cov[g] * st.mu_kl[a * d + b]) /
            st.m_l;
      }

  // Initial-cycle quantities: K at the first regeneration of each path and the
  // within-cycle integral of K restarted at the cycle start.
  st.e_k_tau1.assign(d, 0.0);
  st.e_int_k.assign(d, 0.0);
  std::size_t n_first = 0;
  CompensatedSum k0, k1, i0, i1;
  for (const auto& cp : cycles) {
    i0.add(cp.int_k[0]);
    i1.add(cp.int_k[1]);
    if (cp.j == 1) {
      k0.add(cp.k_start[0]);
      k1.add(cp.k_start[1]);
      ++n_first;
    }
  }
  if (n_first > 0) {
    st.e_k_tau1 = {k0.value() / static_cast<double>(n_first),
                   k1.value() / static_cast<double>(n_first)};
  }
  st.e_int_k = {i0.value() / dn, i1.value() / dn};
  for (std::size_t k = 0; k < d; ++k)
    if (!st.active[k]) st.e_int_k[k] = st.e_k_tau1[k] = 0.0;

  // Delete-a-group jackknife.
  const std::size_t groups = std::clamp<std::size_t>(jackknife_groups, 2, n);
  std::vector<double> jm(groups);
  std::vector<Vec2> jmu(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t lo = g * n / groups, hi = (g + 1) * n / groups;
    const auto mg = first_moments(cycles, lo, hi);
    jm[g] = mg.m_l;
    jmu[g] = {mg.mean_g[0] / mg.m_l, mg.mean_g[1] / mg.m_l};
  }
  auto jk = [&](auto get) {
    double mean = 0.0;
    for (std::size_t g = 0; g < groups; ++g) mean += get(g);
    mean /= static_cast<double>(groups);
    double ss = 0.0;
    for (std::size_t g = 0; g < groups; ++g) ss += (get(g) - mean) * (get(g) - mean);
    return std::sqrt(ss * static_cast<double>(groups - 1) / static_cast<double>(groups));
  };
  st.m_l_se = jk([&](std::size_t g) { return jm[g]; });
  st.mu_se = {jk([&](std::size_t g) { return jmu[g][0]; }),
              jk([&](std::size_t g) { return jmu[g][1]; })};
  return st;
}

}  // namespace sve
