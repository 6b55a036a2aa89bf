#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "twostage/ode.hpp"

namespace twostage {

/// Steps with |beta| below this are rejected as degenerate.
inline constexpr double kBetaGuard = 1e-3;

/// Any state component above this magnitude marks the run as blown up.
inline constexpr double kOverflowGuard = 1e100;

/// Which weight receives the cubic correction (C/60)(tau L_u)^3.
enum class WeightMode { AlphaShift, BetaShift };

struct Weights {
  double alpha;
  double beta;
};

/// The weight family alpha + beta = 1 + (C/60)(tau L_u)^3 with beta = 2/3 + O(tau).
///
/// AlphaShift puts the correction on alpha (beta = 2/3), BetaShift puts it
/// on beta (alpha = 1/3). C = 0 recovers the fixed weights (1/3, 2/3).
struct WeightPolicy {
  double c = 0.0;
  WeightMode mode = WeightMode::AlphaShift;

  Weights evaluate(double tau, double l_u) const noexcept;
};

/// One step of a method. When blew_up is set, u_to holds whatever
/// non-finite value the step produced and must not be used as a state.
template <class Value, class Alpha>
struct StepRecord {
  double t_from = 0.0;
  double t_to = 0.0;
  Value u_from{};
  Value u_to{};
  Alpha alpha_used{};
  double beta_used = 0.0;
  bool blew_up = false;
};

using ScalarStepRecord = StepRecord<double, double>;
using SystemStepRecord = StepRecord<Vector, Matrix>;

/// Two-stage fourth-order step with variable weights, scalar form.
/// Evaluates D_t L exactly twice: at (t, u) and at (t*, u*).
ScalarStepRecord step_two_stage_scalar(const ScalarProblem& p, const ScalarState& s, double tau,
                                       const WeightPolicy& w);

/// System form: beta = 2/3 and the matrix weight alpha = I/3 + (C/60)(tau J)^3,
/// J the Jacobian at the start of the step.
SystemStepRecord step_two_stage_system(const SystemProblem& p, const SystemState& s, double tau,
                                       double c);

/// Classical four-stage RK4 written in the (u1, u2, u3, 1/3-combination) form.
/// alpha_used/beta_used are not meaningful for RK4 and are left NaN/empty.
ScalarStepRecord step_rk4(const ScalarProblem& p, const ScalarState& s, double tau);
SystemStepRecord step_rk4(const SystemProblem& p, const SystemState& s, double tau);

struct TwoStage {
  WeightPolicy weights;
};
struct Rk4 {};
using Method = std::variant<TwoStage, Rk4>;

std::string method_tag(const Method& m);

template <class Value>
struct Trajectory {
  std::vector<State<Value>> states;
  double step_size = 0.0;
  std::string method_tag;
  bool blew_up = false;
  std::optional<double> blow_up_time;

  std::size_t steps() const noexcept { return states.empty() ? 0 : states.size() - 1; }
  const State<Value>& back() const { return states.back(); }
};

/// Fixed-step integration from t0 to t_end. The last step is clipped to land
/// on t_end exactly. Stops early (blew_up set) on a non-finite step or when
/// a component exceeds kOverflowGuard.
Trajectory<double> integrate(const ScalarProblem& p, double u0, double t0, double t_end, double tau,
                             const Method& method);

/// System overload; TwoStage requires WeightMode::AlphaShift (matrix alpha).
Trajectory<Vector> integrate(const SystemProblem& p, const Vector& u0, double t0, double t_end,
                             double tau, const Method& method);

/// Number of steps integrate() takes over [t0, t_end].
std::size_t step_count(double t0, double t_end, double tau);

}  // namespace twostage
