#include "sve/edgeworth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "sve/error.hpp"
#include "sve/gaussian.hpp"
#include "sve/quadrature.hpp"

namespace sve {

double hermite(int j, double x) {
  if (j < 0) throw Error(ErrorKind::Domain, "Hermite index must be non-negative");
  if (j == 0) return 1.0;
  double prev = 1.0, cur = x;
  for (int k = 1; k < j; ++k) {
    const double next = x * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// Partitions of `rest` into parts >= 3, non-increasing (parts <= max_part).
// Each contributes (number of set partitions with those block sizes) * prod kappa_r,
// an integer weight j! / (prod r_i! prod mult_r!), so dyadic cumulants stay exact.
void partitions(int rest, int max_part, std::vector<int>& parts, std::span<const double> kappa,
                double& sum) {
  if (rest == 0) {
    std::uint64_t num = 1, den = 1;
    int total = 0;
    for (int r : parts) total += r;
    for (int k = 2; k <= total; ++k) num *= k;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      for (int k = 2; k <= parts[i]; ++k) den *= k;
      std::size_t run = 1;
      while (i + run < parts.size() && parts[i + run] == parts[i]) ++run;
      if (i == 0 || parts[i - 1] != parts[i])
        for (std::size_t k = 2; k <= run; ++k) den *= k;
    }
    double prod = static_cast<double>(num / den);
    for (int r : parts) prod *= kappa[r - 3];
    sum += prod;
    return;
  }
  for (int r = std::min(rest, max_part); r >= 3; --r) {
    if (rest - r != 0 && rest - r < 3) continue;
    parts.push_back(r);
    partitions(rest - r, r, parts, kappa, sum);
    parts.pop_back();
  }
}

}  // namespace

std::vector<double> hermite_moments_from_cumulants(std::span<const double> cumulants) {
  const int J = static_cast<int>(cumulants.size()) + 2;
  if (J > 8) throw Error(ErrorKind::Domain, "cumulant order above 8 is not supported");
  std::vector<double> out(J + 1, 0.0);
  out[0] = 1.0;
  for (int j = 3; j <= J; ++j) {
    std::vector<int> parts;
    double sum = 0.0;
    partitions(j, j, parts, cumulants, sum);
    out[j] = sum;
  }
  return out;
}

double gram_charlier_expectation(const std::function<double(double)>& f,
                                 std::span<const double> hermite_moments, int order,
                                 std::span<const double> breakpoints) {
  if (order < 0 || order >= static_cast<int>(hermite_moments.size()))
    throw Error(ErrorKind::Domain, "Gram-Charlier order exceeds the available moments");
  QuadOptions opt;
  opt.abs_tol = 1e-15;
  opt.rel_tol = 1e-13;
  opt.max_subdivisions = 20000;
  double sum = 0.0;
  for (int j = 0; j <= order; ++j) {
    if (hermite_moments[j] == 0.0) continue;
    const auto q = integrate([&](double z) { return f(z) * hermite(j, z) * norm_pdf(z); }, -12.0,
                             12.0, breakpoints, opt);
    sum += hermite_moments[j] / factorial(j) * q.value;
  }
  return sum;
}

double edgeworth_iid_density(std::span<const double> v, std::span<const double> kappa3, double m,
                             std::span<const double> x) {
  const std::size_t d = x.size();
  if (d < 1 || d > 2 || v.size() != d * d || kappa3.size() != d * d * d)
    throw Error(ErrorKind::Domain, "edgeworth_iid_density supports dimension 1 or 2");
  if (!(m > 0.0)) throw Error(ErrorKind::Domain, "m must be positive");
  double w[4];
  double det;
  if (d == 1) {
    det = v[0];
    if (!(det > 0.0)) throw Error(ErrorKind::Domain, "variance is not positive definite");
    w[0] = 1.0 / det;
  } else {
    det = v[0] * v[3] - v[1] * v[2];
    if (!(v[0] > 0.0 && det > 0.0) || std::abs(v[1] - v[2]) > 1e-12 * (std::abs(v[1]) + 1.0))
      throw Error(ErrorKind::Domain, "variance matrix is not symmetric positive definite");
    w[0] = v[3] / det;
    w[1] = -v[1] / det;
    w[2] = -v[2] / det;
    w[3] = v[0] / det;
  }
  double y[2] = {0.0, 0.0};
  double quad = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) y[i] += w[i * d + j] * x[j];
    quad += x[i] * y[i];
  }
  const double phi = std::exp(-0.5 * quad) /
                     (std::pow(2.0 * std::numbers::pi, 0.5 * static_cast<double>(d)) *
                      std::sqrt(det));
  double corr = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k) {
        const double third = -y[i] * y[j] * y[k] + y[i] * w[j * d + k] + y[j] * w[i * d + k] +
                             y[k] * w[i * d + j];
        corr += kappa3[(i * d + j) * d + k] * third;
      }
  return phi * (1.0 - corr / (6.0 * std::sqrt(m)));
}

double edgeworth_iid_cdf(double v, double kappa3, double m, double x) {
  if (!(v > 0.0)) throw Error(ErrorKind::Domain, "variance must be positive");
  const double phi = gauss_density(x, v);
  const double second = (x * x / (v * v) - 1.0 / v) * phi;
  return norm_cdf(x / std::sqrt(v)) - kappa3 / (6.0 * std::sqrt(m)) * second;
}

double EdgeworthDensity::pdf(double z) const {
  const double phi = gauss_density(z, v);
  const double d1 = z / v * phi;                                   // -phi'
  const double d3 = (z * z * z / (v * v * v) - 3.0 * z / (v * v)) * phi;  // -phi'''
  return phi + (a1 * d1 + a3 / 6.0 * d3) / std::sqrt(t_scale);
}

double EdgeworthDensity::cdf(double z) const {
  const double phi = gauss_density(z, v);
  const double second = (z * z / (v * v) - 1.0 / v) * phi;  // phi''
  return norm_cdf(z / std::sqrt(v)) + (-a1 * phi - a3 / 6.0 * second) / std::sqrt(t_scale);
}

EdgeworthDensity edgeworth_coefficients(const CycleStats& stats, std::span<const double> a_grad,
                                        std::span<const double> a_hess, double t_scale) {
  const std::size_t d = stats.dim;
  if (a_grad.size() != d || a_hess.size() != d * d)
    throw Error(ErrorKind::Precondition, "gradient/Hessian size does not match the cycle stats");
  if (!(stats.m_l > 0.0)) throw Error(ErrorKind::Degenerate, "mean cycle length is not positive");
  if (!(t_scale > 0.0)) throw Error(ErrorKind::Domain, "t_scale must be positive");
  EdgeworthDensity q;
  q.t_scale = t_scale;
  double v = 0.0, a1 = 0.0, a3 = 0.0;
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t l = 0; l < d; ++l) {
      v += stats.mu2(k, l) * a_grad[k] * a_grad[l];
      a1 += 0.5 * a_hess[k * d + l] * stats.mu2(k, l);
    }
  for (std::size_t k = 0; k < d; ++k)
    a1 += a_grad[k] * (stats.e_k_tau1[k] + stats.e_int_k[k] / stats.m_l -
                       stats.rho_cov[k] / stats.m_l);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t l = 0; l < d; ++l)
      for (std::size_t m = 0; m < d; ++m) a3 += a_grad[k] * a_grad[l] * a_grad[m] * stats.mu3(k, l, m);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t l = 0; l < d; ++l)
        for (std::size_t m = 0; m < d; ++m)
          a3 += 3.0 * a_grad[j] * a_grad[k] * a_hess[l * d + m] * stats.mu2(j, l) * stats.mu2(k, m);
  if (!(v > 0.0)) throw Error(ErrorKind::Degenerate, "Edgeworth variance v is not positive");
  q.v = v;
  q.a1 = a1;
  q.a3 = a3;
  return q;
}

}  // namespace sve
