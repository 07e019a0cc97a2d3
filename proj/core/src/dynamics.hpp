#pragma once

#include <cmath>
#include <limits>

#include "sve/model.hpp"

namespace sve::detail {

// Euler step of dX = ds*b dt + vs*c dW in the model's own coordinate.
class GenericDynamics {
 public:
  GenericDynamics(const DiffusionSpec& spec, double drift_scale, double vol_scale)
      : spec_(&spec), ds_(drift_scale), vs_(vol_scale) {}

  void reset(double x) { x_ = x; }
  double x() const { return x_; }
  double state() const { return x_; }
  double level(double x) const { return x; }
  double phi() const { return spec_->phi(x_); }
  double rho() const { return spec_->rho(x_); }
  double local_vol() const { return vs_ * spec_->c(x_); }

  bool step(double dt, double sqdt, double dw) {
    const double b = spec_->b(x_);
    const double c = spec_->c(x_);
    x_ += ds_ * b * dt + vs_ * c * sqdt * dw;
    return std::isfinite(x_);
  }

 private:
  const DiffusionSpec* spec_;
  double ds_, vs_;
  double x_ = 0.0;
};

// Full-truncation Euler on V = e^X with dV = k(theta - V)dt + sigma V^p dW; phi = sqrt(V+).
class TruncatedVariance {
 public:
  TruncatedVariance(const VarianceDynamics& v, double drift_scale, double vol_scale)
      : kappa_(v.kappa * drift_scale), theta_(v.theta), sigma_(v.sigma * vol_scale),
        power_(v.power), rho_(v.rho) {}

  void reset(double x) { v_ = std::exp(x); }
  double x() const {
    return v_ > 0.0 ? std::log(v_) : -std::numeric_limits<double>::infinity();
  }
  double state() const { return v_; }
  double level(double x) const { return std::exp(x); }
  double phi() const { return v_ > 0.0 ? std::sqrt(v_) : 0.0; }
  double rho() const { return rho_; }
  double local_vol() const { return sigma_ * diff(std::max(v_, 0.0)); }

  bool step(double dt, double sqdt, double dw) {
    const double vp = std::max(v_, 0.0);
    v_ += kappa_ * (theta_ - vp) * dt + sigma_ * diff(vp) * sqdt * dw;
    return std::isfinite(v_);
  }

 private:
  double diff(double vp) const { return power_ == 0.5 ? std::sqrt(vp) : std::pow(vp, power_); }

  double kappa_, theta_, sigma_, power_, rho_;
  double v_ = 0.0;
};

// Probability that a Brownian bridge between a and b (same side of L) touches L.
inline double bridge_hit_probability(double a, double b, double level, double vol, double dt) {
  const double var = vol * vol * dt;
  if (!(var > 0.0)) return 0.0;
  return std::exp(-2.0 * (level - a) * (level - b) / var);
}

}  // namespace sve::detail
