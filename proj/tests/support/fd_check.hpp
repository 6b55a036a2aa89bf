#pragma once

// Central-difference checks of analytic derivative data. Test-only.

#include <cmath>

#include "twostage/ode.hpp"

namespace twostage::testing {

inline double fd_step(double x) { return 1e-6 * (1.0 + std::fabs(x)); }

inline double fd_rhs_t(const ScalarProblem& p, double t, double u) {
  const double h = fd_step(t);
  return (p.rhs(t + h, u) - p.rhs(t - h, u)) / (2.0 * h);
}

inline double fd_rhs_u(const ScalarProblem& p, double t, double u) {
  const double h = fd_step(u);
  return (p.rhs(t, u + h) - p.rhs(t, u - h)) / (2.0 * h);
}

inline Vector fd_rhs_t(const SystemProblem& p, double t, const Vector& u) {
  const double h = fd_step(t);
  return (p.rhs(t + h, u) - p.rhs(t - h, u)) / (2.0 * h);
}

inline Matrix fd_jacobian(const SystemProblem& p, double t, const Vector& u) {
  Matrix j(p.dim, p.dim);
  for (Eigen::Index k = 0; k < p.dim; ++k) {
    const double h = fd_step(u(k));
    Vector up = u;
    Vector um = u;
    up(k) += h;
    um(k) -= h;
    j.col(k) = (p.rhs(t, up) - p.rhs(t, um)) / (2.0 * h);
  }
  return j;
}

/// d/dt of a scalar exact solution.
template <class F>
double fd_time(F&& f, double t) {
  const double h = fd_step(t);
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

/// Relative difference scaled by 1 + |b|.
inline double scaled_diff(double a, double b) { return std::fabs(a - b) / (1.0 + std::fabs(b)); }

}  // namespace twostage::testing
