#include "twostage/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "twostage/errors.hpp"
#include "twostage/stability.hpp"

namespace twostage {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vector vec1(double v) {
  Vector out(1);
  out(0) = v;
  return out;
}

Trajectory<Vector> lift(const Trajectory<double>& in) {
  Trajectory<Vector> out;
  out.step_size = in.step_size;
  out.method_tag = in.method_tag;
  out.blew_up = in.blew_up;
  out.blow_up_time = in.blow_up_time;
  out.states.reserve(in.states.size());
  for (const auto& s : in.states) out.states.emplace_back(s.t(), vec1(s.u()));
  return out;
}

Vector exact_at(const ProblemInstance& inst, double t) {
  if (inst.scalar) {
    if (!inst.scalar->exact) throw ContractViolation("problem has no exact solution");
    return vec1(inst.scalar->exact(t));
  }
  if (!inst.system->exact) throw ContractViolation("problem has no exact solution");
  return inst.system->exact(t);
}

bool has_exact(const ProblemInstance& inst) {
  return inst.scalar ? static_cast<bool>(inst.scalar->exact) : static_cast<bool>(inst.system->exact);
}

std::vector<double> relative_errors(const Vector& ref, const Vector& approx) {
  std::vector<double> out(static_cast<std::size_t>(ref.size()));
  for (Eigen::Index i = 0; i < ref.size(); ++i) {
    out[static_cast<std::size_t>(i)] = relative_error(ref(i), approx(i));
  }
  return out;
}

ErrorRow divergent_row(double tau, double t, std::size_t nvars) {
  ErrorRow row;
  row.tau = tau;
  row.t = t;
  row.errors.assign(nvars, kInf);
  row.divergent = true;
  return row;
}

// Integrates across consecutive output times, restarting the step grid at
// each one. Returns the joined trajectory; states at output times are
// reported through `at_outputs` (empty optional after a blow-up).
Trajectory<Vector> integrate_through(const ProblemInstance& inst, const Method& method, double tau,
                                     const std::vector<double>& outputs,
                                     std::vector<std::optional<Vector>>& at_outputs,
                                     std::vector<std::size_t>& steps_at) {
  Trajectory<Vector> joined;
  joined.step_size = tau;
  joined.method_tag = method_tag(method);
  joined.states.emplace_back(inst.t0, inst.u0);
  at_outputs.assign(outputs.size(), std::nullopt);
  steps_at.assign(outputs.size(), 0);

  std::size_t steps = 0;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const auto start = joined.states.back();
    if (outputs[i] <= start.t()) throw ContractViolation("output times must be increasing");
    auto piece = integrate_instance(inst, start.u(), start.t(), outputs[i], tau, method);
    for (std::size_t k = 1; k < piece.states.size(); ++k) joined.states.push_back(piece.states[k]);
    steps += piece.steps();
    if (piece.blew_up) {
      joined.blew_up = true;
      joined.blow_up_time = piece.blow_up_time;
      break;
    }
    at_outputs[i] = piece.back().u();
    steps_at[i] = steps;
  }
  return joined;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view problem_name(ProblemId id) noexcept {
  switch (id) {
    case ProblemId::ExpDecay: return "exp-decay";
    case ProblemId::StiffLinear: return "stiff-linear";
    case ProblemId::StiffNonlinear: return "stiff-nonlinear";
    case ProblemId::SpringOscillator: return "spring";
    case ProblemId::Lorenz: return "lorenz";
  }
  return "unknown";
}

std::optional<ProblemId> parse_problem(std::string_view name) noexcept {
  for (auto id : {ProblemId::ExpDecay, ProblemId::StiffLinear, ProblemId::StiffNonlinear,
                  ProblemId::SpringOscillator, ProblemId::Lorenz}) {
    if (problem_name(id) == name) return id;
  }
  return std::nullopt;
}

bool is_system(ProblemId id) noexcept {
  return id == ProblemId::SpringOscillator || id == ProblemId::Lorenz;
}

ScalarProblem exp_decay_problem() {
  ScalarProblem p;
  p.rhs = [](double, double u) { return -u; };
  p.rhs_t = [](double, double) { return 0.0; };
  p.rhs_u = [](double, double) { return -1.0; };
  p.exact = [](double t) { return std::exp(-t); };
  return p;
}

ScalarProblem stiff_linear_problem(double lambda) {
  ScalarProblem p;
  p.rhs = [lambda](double t, double u) { return lambda * (u - std::cos(t)) - std::sin(t); };
  p.rhs_t = [lambda](double t, double) { return lambda * std::sin(t) - std::cos(t); };
  p.rhs_u = [lambda](double, double) { return lambda; };
  p.exact = [](double t) { return std::cos(t); };
  return p;
}

ScalarProblem stiff_nonlinear_problem(double mu1, double mu2) {
  ScalarProblem p;
  p.rhs = [mu1, mu2](double t, double u) {
    const double c = std::cos(t);
    return mu1 * (u - c) + mu2 * (u * u - c * c) - std::sin(t);
  };
  p.rhs_t = [mu1, mu2](double t, double) {
    const double s = std::sin(t);
    return mu1 * s + 2.0 * mu2 * std::cos(t) * s - std::cos(t);
  };
  p.rhs_u = [mu1, mu2](double, double u) { return mu1 + 2.0 * mu2 * u; };
  p.exact = [](double t) { return std::cos(t); };
  return p;
}

Matrix spring_matrix(double mass, double damping, double stiffness) {
  Matrix a(2, 2);
  a << -damping / mass, -stiffness, 1.0 / mass, 0.0;
  return a;
}

SystemProblem spring_problem(double mass, double damping, double stiffness) {
  const Matrix a = spring_matrix(mass, damping, stiffness);
  SystemProblem p;
  p.dim = 2;
  p.rhs = [a](double, const Vector& u) -> Vector { return a * u; };
  p.rhs_t = [](double, const Vector&) -> Vector { return Vector::Zero(2); };
  p.jacobian = [a](double, const Vector&) -> Matrix { return a; };
  // e^{-t}(-1, 1) solves the system only when -1 is an eigenvalue with that eigenvector.
  const Vector v = a * (Vector(2) << -1.0, 1.0).finished();
  if (std::fabs(v(0) - 1.0) < 1e-12 && std::fabs(v(1) + 1.0) < 1e-12) {
    p.exact = [](double t) -> Vector { return std::exp(-t) * (Vector(2) << -1.0, 1.0).finished(); };
  }
  return p;
}

SystemProblem lorenz_problem(double a, double b, double c) {
  SystemProblem p;
  p.dim = 3;
  p.rhs = [a, b, c](double, const Vector& u) -> Vector {
    Vector out(3);
    out << a * (u(1) - u(0)), c * u(0) - u(1) - u(0) * u(2), u(0) * u(1) - b * u(2);
    return out;
  };
  p.rhs_t = [](double, const Vector&) -> Vector { return Vector::Zero(3); };
  p.jacobian = [a, b, c](double, const Vector& u) -> Matrix {
    Matrix j(3, 3);
    j << -a, a, 0.0, c - u(2), -1.0, -u(0), u(1), u(0), -b;
    return j;
  };
  return p;
}

ProblemInstance make_problem(ProblemId id, const ProblemParams& params) {
  ProblemInstance inst{id, std::nullopt, std::nullopt, 0.0, Vector(), {}};
  switch (id) {
    case ProblemId::ExpDecay:
      inst.scalar = exp_decay_problem();
      inst.u0 = vec1(1.0);
      inst.variables = {"u"};
      break;
    case ProblemId::StiffLinear:
      inst.scalar = stiff_linear_problem(params.lambda);
      inst.u0 = vec1(1.0);
      inst.variables = {"u"};
      break;
    case ProblemId::StiffNonlinear:
      inst.scalar = stiff_nonlinear_problem(params.mu1, params.mu2);
      inst.u0 = vec1(1.0);
      inst.variables = {"u"};
      break;
    case ProblemId::SpringOscillator:
      inst.system = spring_problem(params.mass, params.damping, params.stiffness);
      inst.u0 = (Vector(2) << -1.0, 1.0).finished();
      inst.variables = {"p", "q"};
      break;
    case ProblemId::Lorenz:
      inst.system = lorenz_problem(params.lorenz_a, params.lorenz_b, params.lorenz_c);
      inst.u0 = (Vector(3) << 4.0, 4.0, 8.0).finished();
      inst.variables = {"x", "y", "z"};
      break;
  }
  return inst;
}

Trajectory<Vector> integrate_instance(const ProblemInstance& inst, const Vector& u0, double t0,
                                      double t_end, double tau, const Method& method) {
  if (inst.scalar) {
    if (u0.size() != 1) throw ContractViolation("scalar problem needs a one-component state");
    return lift(integrate(*inst.scalar, u0(0), t0, t_end, tau, method));
  }
  return integrate(*inst.system, u0, t0, t_end, tau, method);
}

// ---------------------------------------------------------------------------

Method MethodConfig::to_method() const {
  if (kind == Kind::Rk4) return Rk4{};
  return TwoStage{WeightPolicy{c, mode}};
}

std::string MethodConfig::label() const { return method_tag(to_method()); }

ExperimentSpec default_spec(ProblemId id) {
  ExperimentSpec spec;
  spec.problem = id;
  switch (id) {
    case ProblemId::ExpDecay:
      spec.horizon = 4.0;
      break;
    case ProblemId::StiffLinear:
    case ProblemId::StiffNonlinear:
      spec.horizon = 10.0;
      break;
    case ProblemId::SpringOscillator:
      spec.horizon = 16.0;
      spec.sample_times = {2, 4, 6, 8, 10, 12, 14, 16};
      break;
    case ProblemId::Lorenz:
      spec.horizon = 10.0;
      spec.sample_times = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
      spec.metric = ErrorMetric::ReferenceRelative;
      break;
  }
  return spec;
}

double relative_error(double exact, double approx) noexcept {
  return std::fabs(exact - approx) / std::fabs(exact);
}

std::optional<double> observed_order(double tau_prev, double err_prev, double tau_cur,
                                     double err_cur) noexcept {
  if (!(err_prev > 0.0) || !(err_cur > 0.0) || !std::isfinite(err_prev) ||
      !std::isfinite(err_cur) || tau_prev == tau_cur) {
    return std::nullopt;
  }
  return std::log(err_prev / err_cur) / std::log(tau_prev / tau_cur);
}

std::vector<double> halving_schedule(double tau0, std::size_t levels) {
  std::vector<double> taus;
  double tau = tau0;
  for (std::size_t k = 0; k < levels; ++k, tau /= 2.0) taus.push_back(tau);
  return taus;
}

ExperimentSpec table1_spec(double c, WeightMode mode, std::size_t levels) {
  double tau0 = 0.0;
  if (c == 0.0) {
    tau0 = 2.7;
  } else if (c == 0.5) {
    tau0 = 5.8;
  } else if (c == 1.0) {
    tau0 = 3.2;
  } else {
    // Outside the published blocks: stay inside the stability interval.
    tau0 = std::floor(-stability_interval(c).left() * 10.0) / 10.0;
  }
  ExperimentSpec spec = default_spec(ProblemId::ExpDecay);
  spec.method = MethodConfig::two_stage(c, mode);
  spec.taus = halving_schedule(tau0, levels);
  return spec;
}

ErrorReport run_convergence(const ExperimentSpec& spec) {
  if (spec.taus.empty()) throw ContractViolation("step-size schedule is empty");
  const ProblemInstance inst = make_problem(spec.problem, spec.params);
  if (!has_exact(inst)) throw ContractViolation("convergence runs need an exact solution");
  const Method method = spec.method.to_method();
  const Vector exact = exact_at(inst, spec.horizon);

  ErrorReport report;
  report.experiment = std::string(problem_name(spec.problem)) + "/convergence";
  report.method = spec.method.label();
  report.c = spec.method.c;
  report.tau = spec.taus.front();
  report.variables = inst.variables;
  report.reference = "analytic";

  for (double tau : spec.taus) {
    const auto traj = integrate_instance(inst, inst.u0, inst.t0, spec.horizon, tau, method);
    if (traj.blew_up) {
      report.rows.push_back(divergent_row(tau, spec.horizon, inst.variables.size()));
      report.rows.back().step = traj.steps();
      continue;
    }
    ErrorRow row;
    row.tau = tau;
    row.t = spec.horizon;
    row.step = traj.steps();
    row.errors = relative_errors(exact, traj.back().u());
    if (!report.rows.empty()) {
      const auto& prev = report.rows.back();
      if (!prev.divergent) {
        row.order = observed_order(prev.tau, prev.errors.front(), tau, row.errors.front());
      }
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

// ---------------------------------------------------------------------------

GrowthVerdict classify_growth(const std::vector<double>& times, const std::vector<double>& errors) {
  if (times.size() != errors.size()) throw ContractViolation("times and errors differ in length");
  GrowthVerdict v;
  for (double e : errors) {
    if (!std::isfinite(e) || e >= kLostAccuracy) {
      v.divergent = true;
      v.slope = kInf;
      v.t_stat = kInf;
      return v;
    }
  }
  const std::size_t n = times.size();
  const std::size_t first = n - std::max<std::size_t>(n / 4, std::min<std::size_t>(n, 2));
  std::vector<double> ts;
  std::vector<double> ls;
  for (std::size_t i = first; i < n; ++i) {
    if (!(errors[i] > 0.0)) continue;
    ts.push_back(times[i]);
    ls.push_back(std::log(errors[i]));
  }
  const std::size_t m = ts.size();
  if (m < 2) return v;
  const double md = static_cast<double>(m);
  double tbar = 0.0, lbar = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    tbar += ts[i] / md;
    lbar += ls[i] / md;
  }
  double stt = 0.0, stl = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    stt += (ts[i] - tbar) * (ts[i] - tbar);
    stl += (ts[i] - tbar) * (ls[i] - lbar);
  }
  if (stt == 0.0) return v;
  v.slope = stl / stt;
  double rss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = ls[i] - lbar - v.slope * (ts[i] - tbar);
    rss += r * r;
  }
  const double se = m > 2 ? std::sqrt(rss / (md - 2.0) / stt) : 0.0;
  v.t_stat = se > 0.0 ? v.slope / se : (v.slope > 0.0 ? kInf : 0.0);
  v.window_growth = v.slope * (ts.back() - ts.front());
  v.divergent = v.slope > 0.0 && v.t_stat > kGrowthSignificance &&
                v.window_growth >= std::log(kGrowthFactor);
  return v;
}

std::vector<double> uniform_samples(double horizon, double dt) {
  if (!(dt > 0.0) || !(horizon > 0.0)) throw ContractViolation("sample spacing must be positive");
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::llround(horizon / dt));
  for (std::size_t k = 1; k <= n; ++k) out.push_back(std::min(horizon, static_cast<double>(k) * dt));
  if (out.empty() || out.back() < horizon) out.push_back(horizon);
  return out;
}

SweepResult run_stability_cell(const ExperimentSpec& spec, double tau) {
  const ProblemInstance inst = make_problem(spec.problem, spec.params);
  if (!has_exact(inst)) throw ContractViolation("stability sweeps need an exact solution");
  const Method method = spec.method.to_method();

  SweepResult out;
  out.tau = tau;
  out.series.experiment = std::string(problem_name(spec.problem)) + "/stability";
  out.series.method = spec.method.label();
  out.series.c = spec.method.c;
  out.series.tau = tau;
  out.series.variables = inst.variables;
  out.series.reference = "analytic";

  std::vector<double> times;
  std::vector<double> errs;
  auto record = [&](double t, std::size_t step, const Vector& u) {
    ErrorRow row;
    row.tau = tau;
    row.t = t;
    row.step = step;
    row.errors = relative_errors(exact_at(inst, t), u);
    times.push_back(t);
    errs.push_back(*std::max_element(row.errors.begin(), row.errors.end()));
    out.series.rows.push_back(std::move(row));
  };

  if (spec.sample_times.empty()) {
    // Every step is a sample.
    const auto traj = integrate_instance(inst, inst.u0, inst.t0, spec.horizon, tau, method);
    for (std::size_t k = 1; k < traj.states.size(); ++k) {
      record(traj.states[k].t(), k, traj.states[k].u());
    }
    out.blew_up = traj.blew_up;
    if (traj.blew_up) {
      out.series.rows.push_back(
          divergent_row(tau, *traj.blow_up_time, inst.variables.size()));
      times.push_back(*traj.blow_up_time);
      errs.push_back(kInf);
    }
  } else {
    std::vector<std::optional<Vector>> at;
    std::vector<std::size_t> steps;
    const auto traj = integrate_through(inst, method, tau, spec.sample_times, at, steps);
    for (std::size_t i = 0; i < at.size(); ++i) {
      if (!at[i]) {
        out.series.rows.push_back(divergent_row(tau, spec.sample_times[i], inst.variables.size()));
        times.push_back(spec.sample_times[i]);
        errs.push_back(kInf);
        continue;
      }
      record(spec.sample_times[i], steps[i], *at[i]);
    }
    out.blew_up = traj.blew_up;
  }
  out.verdict = classify_growth(times, errs);
  return out;
}

std::vector<SweepResult> run_stability_sweep(const ExperimentSpec& spec,
                                             const std::vector<double>& taus) {
  std::vector<SweepResult> out;
  out.reserve(taus.size());
  for (double tau : taus) out.push_back(run_stability_cell(spec, tau));
  return out;
}

double sup_abs_lu(const ExperimentSpec& spec, std::size_t samples) {
  const ProblemInstance inst = make_problem(spec.problem, spec.params);
  if (!inst.scalar || !inst.scalar->exact) {
    throw ContractViolation("sup |L_u| needs a scalar problem with an exact solution");
  }
  if (samples < 2) throw ContractViolation("need at least two samples");
  double sup = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const double t =
        inst.t0 + (spec.horizon - inst.t0) * static_cast<double>(k) / static_cast<double>(samples - 1);
    sup = std::max(sup, std::fabs(inst.scalar->rhs_u(t, inst.scalar->exact(t))));
  }
  return sup;
}

double predicted_stability_threshold(const ExperimentSpec& spec) {
  const double left = stability_interval(spec.method.stability_c()).left();
  return -left / sup_abs_lu(spec);
}

double empirical_divergence_onset(const ExperimentSpec& spec, double tau_lo, double tau_hi,
                                  double rel_tol) {
  if (!(tau_lo > 0.0) || !(tau_hi > tau_lo)) throw ContractViolation("need 0 < tau_lo < tau_hi");
  if (run_stability_cell(spec, tau_lo).verdict.divergent) {
    throw ContractViolation("tau_lo is already divergent");
  }
  if (!run_stability_cell(spec, tau_hi).verdict.divergent) {
    throw ContractViolation("tau_hi is not divergent");
  }
  while ((tau_hi - tau_lo) > rel_tol * tau_hi) {
    const double mid = 0.5 * (tau_lo + tau_hi);
    if (run_stability_cell(spec, mid).verdict.divergent) {
      tau_hi = mid;
    } else {
      tau_lo = mid;
    }
  }
  return tau_hi;
}

double biggest_inside_product(double c) {
  return std::floor(-stability_interval(c).left() * 1000.0) / 1000.0;
}

double smallest_outside_product(double c) {
  return std::ceil(-stability_interval(c).left() * 1000.0) / 1000.0;
}

// ---------------------------------------------------------------------------

double spring_stiffness_norm(const ProblemParams& params) {
  return spring_matrix(params.mass, params.damping, params.stiffness)
      .cwiseAbs()
      .rowwise()
      .sum()
      .maxCoeff();
}

double spring_lambda1(const ProblemParams& params) {
  Eigen::EigenSolver<Matrix> es(spring_matrix(params.mass, params.damping, params.stiffness));
  return es.eigenvalues().real().minCoeff();
}

ErrorReport run_spring(const MethodConfig& method, double tau,
                       const std::vector<double>& output_times, const ProblemParams& params) {
  const ProblemInstance inst = make_problem(ProblemId::SpringOscillator, params);
  if (!has_exact(inst)) throw ContractViolation("spring parameters have no closed-form solution");

  ErrorReport report;
  report.experiment = "spring";
  report.method = method.label();
  report.c = method.c;
  report.tau = tau;
  report.variables = inst.variables;
  report.reference = "analytic";

  std::vector<std::optional<Vector>> at;
  std::vector<std::size_t> steps;
  integrate_through(inst, method.to_method(), tau, output_times, at, steps);
  for (std::size_t i = 0; i < output_times.size(); ++i) {
    if (!at[i]) {
      report.rows.push_back(divergent_row(tau, output_times[i], 2));
      continue;
    }
    ErrorRow row;
    row.tau = tau;
    row.t = output_times[i];
    row.step = steps[i];
    row.errors = relative_errors(exact_at(inst, output_times[i]), *at[i]);
    report.rows.push_back(std::move(row));
  }
  return report;
}

// ---------------------------------------------------------------------------

ReferenceCache::ReferenceCache(std::optional<std::filesystem::path> dir) : dir_(std::move(dir)) {}

ReferenceCache& ReferenceCache::global() {
  static ReferenceCache cache = [] {
    const char* env = std::getenv("TWOSTAGE_CACHE_DIR");
    if (env != nullptr && *env != '\0') return ReferenceCache(std::filesystem::path(env));
    return ReferenceCache();
  }();
  return cache;
}

std::string ReferenceCache::key(ProblemId id, const ProblemParams& params, double tau,
                                const std::vector<double>& times) {
  std::string k = std::string(problem_name(id)) + "|rk4|tau=" + fmt(tau);
  for (double v : {params.lambda, params.mu1, params.mu2, params.mass, params.damping,
                   params.stiffness, params.lorenz_a, params.lorenz_b, params.lorenz_c}) {
    k += "|" + fmt(v);
  }
  k += "|t";
  for (double t : times) k += "," + fmt(t);
  return k;
}

std::vector<Vector> ReferenceCache::reference(ProblemId id, const ProblemParams& params, double tau,
                                              const std::vector<double>& times) {
  const std::string k = key(id, params, tau, times);
  std::lock_guard<std::mutex> lock(mutex_);
  if (auto it = memory_.find(k); it != memory_.end()) return it->second;

  std::optional<std::filesystem::path> file;
  if (dir_) {
    std::ostringstream name;
    name << problem_name(id) << "-" << std::hex << fnv1a(k) << ".json";
    file = *dir_ / name.str();
    std::ifstream in(*file);
    if (in) {
      try {
        const auto j = nlohmann::json::parse(in);
        if (j.at("key").get<std::string>() == k) {
          std::vector<Vector> states;
          for (const auto& row : j.at("states")) {
            const auto vals = row.get<std::vector<double>>();
            states.push_back(Eigen::Map<const Vector>(vals.data(), static_cast<Eigen::Index>(vals.size())));
          }
          if (states.size() == times.size()) {
            memory_[k] = states;
            return states;
          }
        }
      } catch (const nlohmann::json::exception&) {
        // Unreadable cache entry: recompute and overwrite.
      }
    }
  }

  const ProblemInstance inst = make_problem(id, params);
  std::vector<std::optional<Vector>> at;
  std::vector<std::size_t> steps;
  integrate_through(inst, Rk4{}, tau, times, at, steps);
  std::vector<Vector> states;
  for (const auto& s : at) {
    if (!s) throw InternalConsistencyError("reference run blew up");
    states.push_back(*s);
  }
  ++computed_;
  memory_[k] = states;

  if (file) {
    nlohmann::json j;
    j["key"] = k;
    j["tau"] = tau;
    j["times"] = times;
    j["states"] = nlohmann::json::array();
    for (const auto& s : states) j["states"].push_back(std::vector<double>(s.data(), s.data() + s.size()));
    std::error_code ec;
    std::filesystem::create_directories(*dir_, ec);
    const auto tmp = std::filesystem::path(file->string() + ".tmp");
    {
      std::ofstream out(tmp);
      out << j.dump() << '\n';
    }
    std::filesystem::rename(tmp, *file, ec);
  }
  return states;
}

LorenzRun run_lorenz(const MethodConfig& method, double tau, double horizon, ReferenceCache* cache,
                     const ProblemParams& params) {
  if (!(horizon >= 1.0)) throw ContractViolation("Lorenz horizon must be at least 1");
  std::vector<double> times;
  for (int k = 1; k <= static_cast<int>(std::floor(horizon)); ++k) times.push_back(k);

  ReferenceCache& ref_cache = cache != nullptr ? *cache : ReferenceCache::global();
  const auto ref = ref_cache.reference(ProblemId::Lorenz, params, kLorenzReferenceTau, times);

  const ProblemInstance inst = make_problem(ProblemId::Lorenz, params);
  LorenzRun run;
  std::vector<std::optional<Vector>> at;
  std::vector<std::size_t> steps;
  run.trajectory = integrate_through(inst, method.to_method(), tau, times, at, steps);
  run.blew_up = run.trajectory.blew_up;

  run.report.experiment = "lorenz";
  run.report.method = method.label();
  run.report.c = method.c;
  run.report.tau = tau;
  run.report.variables = inst.variables;
  run.report.reference = "rk4(tau=" + fmt(kLorenzReferenceTau) + ")";
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!at[i]) {
      run.report.rows.push_back(divergent_row(tau, times[i], 3));
      continue;
    }
    ErrorRow row;
    row.tau = tau;
    row.t = times[i];
    row.step = steps[i];
    row.errors = relative_errors(ref[i], *at[i]);
    run.report.rows.push_back(std::move(row));
  }
  return run;
}

}  // namespace twostage
