#include "twostage/ode.hpp"

#include <cmath>
#include <sstream>

namespace twostage {

namespace detail {

bool all_finite(double v) noexcept { return std::isfinite(v); }

bool all_finite(const Vector& v) noexcept { return v.allFinite(); }

}  // namespace detail

EvaluationError::EvaluationError(const std::string& what, double t, double u)
    : Error([&] {
        std::ostringstream os;
        os.precision(17);
        os << what << " at (t=" << t << ", u=" << u << ")";
        return os.str();
      }()),
      t_(t),
      u_(u) {}

WeightDegeneracyError::WeightDegeneracyError(double t, double u, double tau, double c,
                                             double beta,
                                             std::optional<std::size_t> step_index)
    : Error([&] {
        std::ostringstream os;
        os.precision(17);
        os << "weight beta=" << beta << " below degeneracy guard at (t=" << t << ", u=" << u
           << ", tau=" << tau << ", C=" << c << ")";
        if (step_index) os << " in step " << *step_index;
        return os.str();
      }()),
      t_(t),
      u_(u),
      tau_(tau),
      c_(c),
      beta_(beta),
      step_index_(step_index) {}

WeightDegeneracyError WeightDegeneracyError::with_step_index(std::size_t index) const {
  return {t_, u_, tau_, c_, beta_, index};
}

double dt_l_scalar(const ScalarProblem& p, double t, double u) {
  const double value = p.rhs_t(t, u) + p.rhs(t, u) * p.rhs_u(t, u);
  if (!std::isfinite(value)) throw EvaluationError("non-finite D_t L", t, u);
  return value;
}

Vector dt_l_system(const SystemProblem& p, double t, const Vector& u) {
  if (u.size() != p.dim) {
    throw ContractViolation("state length " + std::to_string(u.size()) +
                            " does not match problem dimension " + std::to_string(p.dim));
  }
  const Vector l = p.rhs(t, u);
  const Vector lt = p.rhs_t(t, u);
  const Matrix jac = p.jacobian(t, u);
  if (l.size() != p.dim || lt.size() != p.dim || jac.rows() != p.dim || jac.cols() != p.dim) {
    throw ContractViolation("problem callback returned a result of the wrong shape");
  }
  Vector value = lt + jac * l;
  if (!value.allFinite()) throw EvaluationError("non-finite D_t L", t, u.size() ? u[0] : 0.0);
  return value;
}

SystemProblem as_system(const ScalarProblem& p) {
  SystemProblem s;
  s.dim = 1;
  s.rhs = [f = p.rhs](double t, const Vector& u) { return Vector::Constant(1, f(t, u[0])); };
  s.rhs_t = [f = p.rhs_t](double t, const Vector& u) { return Vector::Constant(1, f(t, u[0])); };
  s.jacobian = [f = p.rhs_u](double t, const Vector& u) {
    return Matrix::Constant(1, 1, f(t, u[0]));
  };
  if (p.exact) {
    s.exact = [f = p.exact](double t) { return Vector::Constant(1, f(t)); };
  }
  return s;
}

ScalarProblem instrument(const ScalarProblem& p, std::shared_ptr<EvalCounters> counters) {
  ScalarProblem q = p;
  q.rhs = [f = p.rhs, counters](double t, double u) {
    ++counters->rhs;
    return f(t, u);
  };
  q.rhs_t = [f = p.rhs_t, counters](double t, double u) {
    ++counters->rhs_t;
    return f(t, u);
  };
  q.rhs_u = [f = p.rhs_u, counters](double t, double u) {
    ++counters->rhs_u;
    return f(t, u);
  };
  return q;
}

SystemProblem instrument(const SystemProblem& p, std::shared_ptr<EvalCounters> counters) {
  SystemProblem q = p;
  q.rhs = [f = p.rhs, counters](double t, const Vector& u) {
    ++counters->rhs;
    return f(t, u);
  };
  q.rhs_t = [f = p.rhs_t, counters](double t, const Vector& u) {
    ++counters->rhs_t;
    return f(t, u);
  };
  q.jacobian = [f = p.jacobian, counters](double t, const Vector& u) {
    ++counters->jacobian;
    return f(t, u);
  };
  return q;
}

}  // namespace twostage
