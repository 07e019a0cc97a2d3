#pragma once

#include <cmath>
#include <numbers>

namespace sve {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934381868;

inline double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

/// Inverse of the standard normal CDF on (0, 1), accurate to ~1e-15 after one
/// Halley correction step.
double norm_inv_cdf(double p);

/// Density of N(0, v) at z.
inline double gauss_density(double z, double v) {
  return std::exp(-0.5 * z * z / v) / std::sqrt(2.0 * std::numbers::pi * v);
}

}  // namespace sve
