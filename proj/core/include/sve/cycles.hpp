#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "sve/edgeworth.hpp"
#include "sve/mc.hpp"
#include "sve/model.hpp"

namespace sve {

/// Fast-scale simulation of X^ (coefficients eps^2 b, eps c) together with
/// K = (int h(X^) dt, int phi (rho dW1 + sqrt(1-rho^2) dW2)), h = T phi^2 - Sigma.
struct CycleSetup {
  double x0 = 0.0;        // regeneration level
  double x1 = 0.5;        // level to reach between regenerations, x1 > x0
  double horizon = 1e3;   // fast-scale time per path
  double epsilon = 1.0;
  double maturity = 1.0;  // T
  double sigma2 = 0.0;    // Sigma
  double start = 0.0;     // X^_0

  void validate() const;
};

struct CyclePath {
  std::size_t path = 0;
  std::size_t j = 0;  // 1 for the first complete cycle of its path
  double tau_start = 0.0;
  double tau_end = 0.0;
  double l = 0.0;
  double g_h = 0.0;
  double g_vol = 0.0;
  std::array<double, 2> int_k{};    // int over the cycle of (K_t - K_{tau_start}) dt
  std::array<double, 2> k_start{};  // K at tau_start
};

inline constexpr std::size_t kMinCycles = 30;

/// Cycles tau_{j+1} = inf{t > tau_j : X^_t = x0 after reaching x1}; the initial
/// segment [0, tau_1) of every path is discarded.
std::vector<CyclePath> extract_cycles(const DiffusionSpec& spec, const CycleSetup& setup,
                                      const McConfig& config);

/// Plug-in cycle moments with jackknife errors on m_l and mu.
CycleStats cycle_stats(std::span<const CyclePath> cycles, std::size_t jackknife_groups = 100);

/// K at fast time `setup.horizon` for config.n_paths independent paths.
std::vector<std::array<double, 2>> simulate_functional(const DiffusionSpec& spec,
                                                       const CycleSetup& setup,
                                                       const McConfig& config);

}  // namespace sve
