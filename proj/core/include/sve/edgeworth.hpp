#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sve {

/// Probabilists' Hermite polynomial He_j(x).
double hermite(int j, double x);

/// E[He_j(Y)] for j = 0..J of a standardized Y from its cumulants
/// kappa_3..kappa_J (J <= 8).
std::vector<double> hermite_moments_from_cumulants(std::span<const double> cumulants);

/// sum_{j<=J} E[He_j(Y)]/j! int f He_j phi dz: the Gram-Charlier value of E[f(Y)].
double gram_charlier_expectation(const std::function<double(double)>& f,
                                 std::span<const double> hermite_moments, int order,
                                 std::span<const double> breakpoints = {});

/// Two-term density of a normalized sum of m iid vectors (dimension 1 or 2):
/// phi(x; v) - (1/(6 sqrt m)) sum kappa_ijk d_i d_j d_k phi(x; v).
/// `v` is row-major d x d, `kappa3` is the d^3 third-cumulant tensor.
double edgeworth_iid_density(std::span<const double> v, std::span<const double> kappa3,
                             double m, std::span<const double> x);

/// Distribution function of the one-dimensional case above.
double edgeworth_iid_cdf(double v, double kappa3, double m, double x);

/// Moment estimates of one regeneration cycle of a d-dimensional functional.
/// Components with vanishing variance stay in the arrays with zero rows.
struct CycleStats {
  std::size_t dim = 0;
  double m_l = 0.0;                 // mean cycle length
  std::vector<double> mean_g;       // E[G]
  std::vector<double> mu;           // E[G] / m_l
  std::vector<double> var_gl;       // (dim+1)^2 covariance of (centered G, l)
  std::vector<double> mu_kl;        // dim^2, Var[centered G] / m_l
  std::vector<double> rho_cov;      // Cov[centered G, l]
  std::vector<double> kappa3;       // dim^3 third moments of centered G
  std::vector<double> mu_klm;       // dim^3
  std::vector<double> e_k_tau1;     // E[K at the first regeneration time]
  std::vector<double> e_int_k;      // E[int of K over the first full cycle]
  std::vector<bool> active;         // false for zero-variance components
  std::size_t n_cycles = 0;
  // Jackknife standard errors.
  double m_l_se = 0.0;
  std::vector<double> mu_se;

  double mu2(std::size_t k, std::size_t l) const { return mu_kl[k * dim + l]; }
  double mu3(std::size_t k, std::size_t l, std::size_t m) const {
    return mu_klm[(k * dim + l) * dim + m];
  }
};

/// q(z) = phi(z; v) + T^{-1/2} (A1 (-phi') + A3/6 (-phi''')).
struct EdgeworthDensity {
  double v = 1.0;
  double a1 = 0.0;
  double a3 = 0.0;
  double t_scale = 1.0;

  double pdf(double z) const;
  double cdf(double z) const;
};

/// A1, A3 and v for sqrt(T)(A(K_T/T) - A(mu)) from cycle statistics and the
/// gradient / Hessian of A at mu (row-major dim x dim).
EdgeworthDensity edgeworth_coefficients(const CycleStats& stats, std::span<const double> a_grad,
                                        std::span<const double> a_hess, double t_scale);

}  // namespace sve
