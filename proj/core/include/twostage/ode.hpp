#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>

#include <Eigen/Dense>

#include "twostage/errors.hpp"

namespace twostage {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

namespace detail {
bool all_finite(double v) noexcept;
bool all_finite(const Vector& v) noexcept;
}  // namespace detail

/// A point (t, u) on a trajectory. Construction rejects non-finite values.
template <class Value>
class State {
 public:
  State(double t, Value u) : t_(t), u_(std::move(u)) {
    if (!detail::all_finite(t_) || !detail::all_finite(u_)) {
      throw NonFiniteState("state has non-finite components");
    }
  }

  double t() const noexcept { return t_; }
  const Value& u() const noexcept { return u_; }

 private:
  double t_;
  Value u_;
};

using ScalarState = State<double>;
using SystemState = State<Vector>;

/// u' = L(t, u) for scalar u, together with the partial derivatives the
/// two-derivative scheme consumes.
struct ScalarProblem {
  std::function<double(double t, double u)> rhs;
  std::function<double(double t, double u)> rhs_t;  // dL/dt
  std::function<double(double t, double u)> rhs_u;  // dL/du
  std::function<double(double t)> exact;           // optional
};

/// u' = L(t, u) for u in R^dim.
struct SystemProblem {
  Eigen::Index dim = 0;
  std::function<Vector(double t, const Vector& u)> rhs;
  std::function<Vector(double t, const Vector& u)> rhs_t;
  std::function<Matrix(double t, const Vector& u)> jacobian;  // dL/du
  std::function<Vector(double t)> exact;                      // optional
};

/// Total derivative D_t L = L_t + L * L_u.
double dt_l_scalar(const ScalarProblem& p, double t, double u);

/// Total derivative D_t L = L_t + J L.
Vector dt_l_system(const SystemProblem& p, double t, const Vector& u);

/// Wraps a scalar problem as a one-dimensional system.
SystemProblem as_system(const ScalarProblem& p);

/// Call counters for instrumented problem wrappers.
struct EvalCounters {
  std::atomic<std::size_t> rhs{0};
  std::atomic<std::size_t> rhs_t{0};
  std::atomic<std::size_t> rhs_u{0};
  std::atomic<std::size_t> jacobian{0};

  void reset() noexcept {
    rhs = 0;
    rhs_t = 0;
    rhs_u = 0;
    jacobian = 0;
  }
};

/// Returns a copy of p whose callbacks bump the shared counters.
ScalarProblem instrument(const ScalarProblem& p, std::shared_ptr<EvalCounters> counters);
SystemProblem instrument(const SystemProblem& p, std::shared_ptr<EvalCounters> counters);

}  // namespace twostage
