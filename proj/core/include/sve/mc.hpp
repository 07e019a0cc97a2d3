#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "sve/ergodic.hpp"
#include "sve/model.hpp"
#include "sve/pricer.hpp"

namespace sve {

enum class Scheme {
  Euler,                      // plain Euler-Maruyama in the model coordinate
  EulerFullTruncationVariance // full-truncation Euler on V = e^X (needs variance dynamics)
};

struct McConfig {
  std::size_t n_paths = 100000;
  double dt = 1e-3;
  std::uint64_t seed = 42;
  Scheme scheme = Scheme::Euler;
  bool antithetic = false;
  unsigned threads = 0;           // 0: hardware concurrency
  bool bridge = true;             // Brownian-bridge barrier correction for hitting times
  double max_flag_fraction = 1e-3;

  void validate() const;
};

/// Picks the full-truncation scheme when the model carries variance dynamics.
Scheme default_scheme(const DiffusionSpec& spec);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
  std::size_t n_flagged = 0;
};

struct TerminalSample {
  std::vector<double> z;        // terminal log-prices; antithetic partners are adjacent
  std::vector<double> mean_var; // (1/T) int phi^2 dt per path
  std::size_t n_flagged = 0;
  bool antithetic = false;
};

TerminalSample simulate_terminal(const DiffusionSpec& spec, const MarketSpec& market,
                                 const McConfig& config);

/// Sample mean and standard error of g over paths (pair averages when antithetic).
McEstimate sample_mean(const TerminalSample& sample, const std::function<double(double)>& g,
                       std::uint64_t seed = 0);

McEstimate price_mc(const Payoff& payoff, const DiffusionSpec& spec, const MarketSpec& market,
                    const McConfig& config);

struct HittingSample {
  std::vector<double> values;  // int_0^tau g(X^) dt per path
  std::size_t n_flagged = 0;   // paths that did not hit before max_time
};

/// E_y[int_0^{tau(z)} g(X^_t) dt] by simulation of the fast-scale process with
/// coefficients (eps^2 b, eps c). g == nullptr means g = 1 (the hitting time).
HittingSample simulate_hitting(const DiffusionSpec& spec, double epsilon, double y, double z,
                               const McConfig& config, double max_time,
                               const std::function<double(double)>& g = nullptr);

/// G^1_g(y; z) from the scale function and the ergodic distribution.
double kac_first_moment(const ErgodicMeasure& measure, const std::function<double(double)>& g,
                        double y, double z);

}  // namespace sve
