#pragma once

#include <optional>
#include <string>
#include <utility>

#include "sve/ergodic.hpp"
#include "sve/model.hpp"

namespace sve {

enum class Verdict { Pass, Fail, Inconclusive };

std::string to_string(Verdict v);

/// Exponential-tail domination of (1 + phi^2) pi(x) s'(y), checked on a finite
/// product grid. A passing result is a grid certificate, not a proof.
struct AssgamResult {
  bool ok = false;
  std::optional<std::pair<double, double>> witness;  // worst (x, y)
  double worst_excess = 0.0;  // max of log(lhs) - log(rhs)
  int grid_points = 0;        // per axis and sign
};

AssgamResult check_assgam(const DiffusionSpec& spec, const ErgodicMeasure& measure,
                          std::pair<double, double> gamma, double delta, int grid_points = 401);

/// Local regularity near some x with half-width a: sup of |(sqrt(pi/s') phi rho)'|,
/// s', pi, 1/s' and 1/pi on [x - a, x + a] must stay below 1/delta.
struct AssintResult {
  bool ok = false;
  std::optional<std::pair<double, double>> witness;  // (x, a)
};

AssintResult check_assint(const DiffusionSpec& spec, const ErgodicMeasure& measure, double delta);

/// Estimated limits of -b/c^2 at +inf (kappa_plus) and b/c^2 at -inf
/// (kappa_minus) from a probe grid, plus the phi-growth bound.
struct AsskResult {
  double kappa_plus = 0.0;
  double kappa_minus = 0.0;
  Verdict kappa_plus_status = Verdict::Inconclusive;  // Pass = limit identified
  Verdict kappa_minus_status = Verdict::Inconclusive;
  Verdict growth_plus = Verdict::Inconclusive;
  Verdict growth_minus = Verdict::Inconclusive;
  Verdict verdict = Verdict::Inconclusive;
  bool ok() const { return verdict == Verdict::Pass; }
};

AsskResult check_assk(const DiffusionSpec& spec, std::pair<double, double> gamma,
                      double v_probe = 40.0, double tol = 1e-8);

struct ConditionReport {
  std::pair<double, double> gamma{0.0, 0.0};
  double delta = 0.0;
  AssgamResult assgam;
  AssintResult assint;
  AsskResult assk;

  /// Fail beats Inconclusive beats Pass.
  Verdict overall() const;
};

ConditionReport check_conditions(const DiffusionSpec& spec, const ErgodicMeasure& measure,
                                 std::pair<double, double> gamma, double delta,
                                 double v_probe = 40.0);

}  // namespace sve
