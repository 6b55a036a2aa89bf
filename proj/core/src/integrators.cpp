#include "twostage/integrators.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace twostage {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_step_size(double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw ContractViolation("step size must be finite and non-negative");
  }
}

bool exceeds_guard(double u) { return !std::isfinite(u) || std::abs(u) > kOverflowGuard; }
bool exceeds_guard(const Vector& u) {
  return !u.allFinite() || u.cwiseAbs().maxCoeff() > kOverflowGuard;
}

}  // namespace

Weights WeightPolicy::evaluate(double tau, double l_u) const noexcept {
  const double x = tau * l_u;
  const double shift = (c / 60.0) * (x * x * x);
  if (mode == WeightMode::AlphaShift) return {1.0 / 3.0 + shift, 2.0 / 3.0};
  return {1.0 / 3.0, 2.0 / 3.0 + shift};
}

ScalarStepRecord step_two_stage_scalar(const ScalarProblem& p, const ScalarState& s, double tau,
                                       const WeightPolicy& w) {
  check_step_size(tau);
  const double t = s.t();
  const double u = s.u();

  const double l = p.rhs(t, u);
  const double l_u = p.rhs_u(t, u);
  const double d = p.rhs_t(t, u) + l * l_u;

  const Weights wt = w.evaluate(tau, l_u);
  if (!(std::abs(wt.beta) >= kBetaGuard)) {
    throw WeightDegeneracyError(t, u, tau, w.c, wt.beta);
  }

  ScalarStepRecord rec{t, t + tau, u, kNaN, wt.alpha, wt.beta, false};

  const double shift = tau / (3.0 * wt.beta);
  const double u_star = u + shift * l + (tau * tau) / (12.0 * wt.beta) * d;
  const double t_star = t + shift;
  if (!std::isfinite(d) || !std::isfinite(u_star)) {
    rec.blew_up = true;
    return rec;
  }
  const double d_star = p.rhs_t(t_star, u_star) + p.rhs(t_star, u_star) * p.rhs_u(t_star, u_star);

  rec.u_to = u + tau * l + (tau * tau) / 2.0 * (wt.alpha * d + wt.beta * d_star);
  rec.blew_up = !std::isfinite(rec.u_to);
  return rec;
}

SystemStepRecord step_two_stage_system(const SystemProblem& p, const SystemState& s, double tau,
                                       double c) {
  check_step_size(tau);
  const double t = s.t();
  const Vector& u = s.u();
  if (u.size() != p.dim) throw ContractViolation("state length does not match problem dimension");

  const Matrix jac = p.jacobian(t, u);
  const Vector l = p.rhs(t, u);
  const Vector d = p.rhs_t(t, u) + jac * l;

  constexpr double beta = 2.0 / 3.0;
  const Matrix scaled = tau * jac;
  const Matrix cube = (scaled * scaled) * scaled;
  const Matrix alpha = Matrix::Identity(p.dim, p.dim) / 3.0 + (c / 60.0) * cube;

  SystemStepRecord rec{t, t + tau, u, Vector::Constant(p.dim, kNaN), alpha, beta, false};

  const double shift = tau / (3.0 * beta);
  const Vector u_star = u + shift * l + (tau * tau) / (12.0 * beta) * d;
  const double t_star = t + shift;
  if (!d.allFinite() || !u_star.allFinite() || !alpha.allFinite()) {
    rec.blew_up = true;
    return rec;
  }
  const Vector d_star = p.rhs_t(t_star, u_star) + p.jacobian(t_star, u_star) * p.rhs(t_star, u_star);

  rec.u_to = u + tau * l + (tau * tau) / 2.0 * (alpha * d + beta * d_star);
  rec.blew_up = !rec.u_to.allFinite();
  return rec;
}

ScalarStepRecord step_rk4(const ScalarProblem& p, const ScalarState& s, double tau) {
  check_step_size(tau);
  const double t = s.t();
  const double u = s.u();
  if (tau == 0.0) return {t, t, u, u, kNaN, kNaN, false};
  const double half = 0.5 * tau;

  const double u1 = u + half * p.rhs(t, u);
  const double u2 = u + half * p.rhs(t + half, u1);
  const double u3 = u + tau * p.rhs(t + half, u2);
  const double next = (u1 + 2.0 * u2 + u3 - u + half * p.rhs(t + tau, u3)) / 3.0;

  return {t, t + tau, u, next, kNaN, kNaN, !std::isfinite(next)};
}

SystemStepRecord step_rk4(const SystemProblem& p, const SystemState& s, double tau) {
  check_step_size(tau);
  const double t = s.t();
  const Vector& u = s.u();
  if (u.size() != p.dim) throw ContractViolation("state length does not match problem dimension");
  if (tau == 0.0) return {t, t, u, u, Matrix(), kNaN, false};
  const double half = 0.5 * tau;

  const Vector u1 = u + half * p.rhs(t, u);
  const Vector u2 = u + half * p.rhs(t + half, u1);
  const Vector u3 = u + tau * p.rhs(t + half, u2);
  Vector next = (u1 + 2.0 * u2 + u3 - u + half * p.rhs(t + tau, u3)) / 3.0;

  const bool bad = !next.allFinite();
  return {t, t + tau, u, std::move(next), Matrix(), kNaN, bad};
}

std::string method_tag(const Method& m) {
  if (std::holds_alternative<Rk4>(m)) return "rk4";
  const auto& w = std::get<TwoStage>(m).weights;
  std::ostringstream os;
  os << "two-stage(C=" << w.c << ","
     << (w.mode == WeightMode::AlphaShift ? "alpha-shift" : "beta-shift") << ")";
  return os.str();
}

std::size_t step_count(double t0, double t_end, double tau) {
  if (!(tau > 0.0)) throw ContractViolation("tau must be positive");
  if (!(t_end >= t0)) throw ContractViolation("t_end must not precede t0");
  const double ratio = (t_end - t0) / tau;
  // Absorb representation error when tau divides the horizon.
  return static_cast<std::size_t>(std::ceil(ratio - 1e-9));
}

namespace {

template <class Problem, class Value, class StepFn>
Trajectory<Value> integrate_impl(const Problem& p, const Value& u0, double t0, double t_end,
                                 double tau, std::string tag, StepFn&& step) {
  const std::size_t n = step_count(t0, t_end, tau);
  Trajectory<Value> traj;
  traj.step_size = tau;
  traj.method_tag = std::move(tag);
  traj.states.reserve(n + 1);
  traj.states.emplace_back(t0, u0);

  for (std::size_t k = 0; k < n; ++k) {
    const auto& cur = traj.states.back();
    const bool last = k + 1 == n;
    const double t_next = last ? t_end : t0 + static_cast<double>(k + 1) * tau;
    const double h = last ? t_end - cur.t() : tau;

    decltype(step(p, cur, h)) rec;
    try {
      rec = step(p, cur, h);
    } catch (const WeightDegeneracyError& e) {
      throw e.with_step_index(k);
    }
    if (rec.blew_up || exceeds_guard(rec.u_to)) {
      traj.blew_up = true;
      traj.blow_up_time = t_next;
      break;
    }
    traj.states.emplace_back(t_next, std::move(rec.u_to));
  }
  return traj;
}

}  // namespace

Trajectory<double> integrate(const ScalarProblem& p, double u0, double t0, double t_end, double tau,
                             const Method& method) {
  if (!(tau > 0.0)) throw ContractViolation("tau must be positive");
  if (const auto* ts = std::get_if<TwoStage>(&method)) {
    const WeightPolicy w = ts->weights;
    return integrate_impl(p, u0, t0, t_end, tau, method_tag(method),
                          [w](const ScalarProblem& q, const ScalarState& s, double h) {
                            return step_two_stage_scalar(q, s, h, w);
                          });
  }
  return integrate_impl(p, u0, t0, t_end, tau, method_tag(method),
                        [](const ScalarProblem& q, const ScalarState& s, double h) {
                          return step_rk4(q, s, h);
                        });
}

Trajectory<Vector> integrate(const SystemProblem& p, const Vector& u0, double t0, double t_end,
                             double tau, const Method& method) {
  if (!(tau > 0.0)) throw ContractViolation("tau must be positive");
  if (u0.size() != p.dim) throw ContractViolation("initial state length does not match problem");
  if (const auto* ts = std::get_if<TwoStage>(&method)) {
    if (ts->weights.mode != WeightMode::AlphaShift) {
      throw UnsupportedModeError("systems only support the matrix-alpha (alpha-shift) weights");
    }
    const double c = ts->weights.c;
    return integrate_impl(p, u0, t0, t_end, tau, method_tag(method),
                          [c](const SystemProblem& q, const SystemState& s, double h) {
                            return step_two_stage_system(q, s, h, c);
                          });
  }
  return integrate_impl(p, u0, t0, t_end, tau, method_tag(method),
                        [](const SystemProblem& q, const SystemState& s, double h) {
                          return step_rk4(q, s, h);
                        });
}

}  // namespace twostage
