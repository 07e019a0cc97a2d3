#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sve/model.hpp"

namespace sve {

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

struct ScaleTable {
  std::vector<double> grid;
  std::vector<double> s;
  std::vector<double> s_prime;
};

/// Tabulates s and s' = exp(-2 int_0^x b/c^2) on a uniform grid over `window`
/// (0 is always a node). Throws WindowTooWide when s' overflows.
ScaleTable build_scale(const DiffusionSpec& spec, std::pair<double, double> window, int n_nodes);

struct MeasureOptions {
  double tail_tol = 1e-12;          // admissible speed-measure mass outside the window, relative
  double initial_half_width = 1.0;  // each side of the window doubles from here
  double max_half_width = 1024.0;
  double max_panel_width = 0.5;
  double max_log_step = 1.0;        // max change of log s' and log pi across one panel
  double quad_tol = 1e-13;          // Kronrod/Gauss gap allowed for int b/c^2 over a panel
  int max_panels = 200000;
  std::optional<std::pair<double, double>> window;  // fixed window, skips the search
};

/// Scale function, normalized speed density and normalizer epsilon of a
/// one-dimensional diffusion, tabulated on 15-point Gauss-Kronrod panels.
///
/// Point evaluations anywhere in the window integrate b/c^2 from the nearest
/// panel start with a nested 15-point rule, so they carry the same accuracy as
/// the tabulated nodes.
class ErgodicMeasure {
 public:
  std::vector<double> grid;     // all quadrature nodes, increasing
  std::vector<double> s_vals;
  std::vector<double> s_prime;
  std::vector<double> pi_vals;
  std::vector<double> weights;        // Kronrod weights matching `grid`
  std::vector<double> gauss_weights;  // embedded Gauss weights, zero at Kronrod-only nodes
  double epsilon = 0.0;
  std::pair<double, double> window{0.0, 0.0};
  double tail_mass_bound = 0.0;  // estimated Pi-mass outside the window
  double tail_left = 0.0;        // Pi-mass below window.first
  double tail_right = 0.0;       // Pi-mass above window.second
  std::vector<std::string> warnings;

  double log_s_prime(double x) const;
  double scale_derivative(double x) const;
  double scale(double x) const;
  double log_density(double x) const;
  double density(double x) const;

  /// Pi[g] with a Kronrod-minus-Gauss error estimate (plus the tail term).
  Estimate expectation(const std::function<double(double)>& g) const;

  const DiffusionSpec& spec() const { return spec_; }
  std::size_t panel_count() const { return panels_.size(); }

  struct Panel {
    double a = 0.0;
    double b = 0.0;
    double log_sp_a = 0.0;
    double s_a = 0.0;
  };
  const std::vector<Panel>& panels() const { return panels_; }

  /// Index of the panel containing x; throws Extrapolation outside the window.
  std::size_t locate(double x) const;

 private:
  friend ErgodicMeasure build_ergodic_measure(const DiffusionSpec&, const MeasureOptions&);
  friend class CumulativeIntegral;

  DiffusionSpec spec_;
  std::vector<Panel> panels_;
  std::vector<double> log_sp_nodes_;
  double log_eps2_ = 0.0;
};

/// Builds the measure. Throws NotErgodic when the speed measure has infinite
/// mass; attaches a warning when s(x) stays bounded on one side.
ErgodicMeasure build_ergodic_measure(const DiffusionSpec& spec, const MeasureOptions& opt = {});

/// Pi[g]; free-function form of ErgodicMeasure::expectation.
Estimate expectation(const ErgodicMeasure& measure, const std::function<double(double)>& g);

/// x -> int_{-inf}^x g dPi, precomputed at panel starts.
class CumulativeIntegral {
 public:
  CumulativeIntegral(const ErgodicMeasure& measure, std::function<double(double)> g);

  double operator()(double x) const;
  double total() const { return total_; }
  /// Values at the measure's grid nodes.
  const std::vector<double>& node_values() const { return nodes_; }

 private:
  const ErgodicMeasure* m_;
  std::function<double(double)> g_;
  std::vector<double> start_;  // value at each panel start
  std::vector<double> nodes_;
  double total_ = 0.0;
};

}  // namespace sve
