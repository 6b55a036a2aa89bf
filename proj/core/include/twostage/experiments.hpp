#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "twostage/integrators.hpp"
#include "twostage/ode.hpp"

namespace twostage {

// ---------------------------------------------------------------------------
// Benchmark problems

enum class ProblemId { ExpDecay, StiffLinear, StiffNonlinear, SpringOscillator, Lorenz };

std::string_view problem_name(ProblemId id) noexcept;
std::optional<ProblemId> parse_problem(std::string_view name) noexcept;
bool is_system(ProblemId id) noexcept;

/// Physical parameters of the five problems, defaulting to the published setup.
struct ProblemParams {
  double lambda = -2100.0;  // stiff linear
  double mu1 = -2100.0;     // stiff nonlinear
  double mu2 = 10.0;
  double mass = 1.0;  // spring
  double damping = 1001.0;
  double stiffness = 1000.0;
  double lorenz_a = 61.8;
  double lorenz_b = 8.0 / 3.0;
  double lorenz_c = 28.0;
};

/// u' = -u, u(0) = 1, exact e^{-t}.
ScalarProblem exp_decay_problem();
/// u' = lambda (u - cos t) - sin t, exact cos t.
ScalarProblem stiff_linear_problem(double lambda = -2100.0);
/// u' = mu1 (u - cos t) + mu2 (u^2 - cos^2 t) - sin t, exact cos t.
ScalarProblem stiff_nonlinear_problem(double mu1 = -2100.0, double mu2 = 10.0);
/// (p, q)' = [[-c/m, -k], [1/m, 0]] (p, q), exact e^{-t}(-1, 1) for the default parameters.
SystemProblem spring_problem(double mass = 1.0, double damping = 1001.0, double stiffness = 1000.0);
/// Lorenz system x' = a(y - x), y' = c x - y - x z, z' = x y - b z. No exact solution.
SystemProblem lorenz_problem(double a = 61.8, double b = 8.0 / 3.0, double c = 28.0);

/// Problem instance with its initial data and state labels.
struct ProblemInstance {
  ProblemId id;
  std::optional<ScalarProblem> scalar;
  std::optional<SystemProblem> system;
  double t0 = 0.0;
  Vector u0;
  std::vector<std::string> variables;
};

ProblemInstance make_problem(ProblemId id, const ProblemParams& params = {});

/// The spring matrix A; its eigenvalues are -1000 and -1 for the default parameters.
Matrix spring_matrix(double mass = 1.0, double damping = 1001.0, double stiffness = 1000.0);

// ---------------------------------------------------------------------------
// Specs and reports

struct MethodConfig {
  enum class Kind { TwoStage, Rk4 };
  Kind kind = Kind::TwoStage;
  double c = 0.0;
  WeightMode mode = WeightMode::AlphaShift;

  static MethodConfig two_stage(double c, WeightMode mode = WeightMode::AlphaShift) {
    return {Kind::TwoStage, c, mode};
  }
  static MethodConfig rk4() { return {Kind::Rk4, 0.0, WeightMode::AlphaShift}; }

  Method to_method() const;
  /// C value whose f(z, C) governs linear stability (0 for RK4).
  double stability_c() const noexcept { return kind == Kind::Rk4 ? 0.0 : c; }
  std::string label() const;
};

enum class ErrorMetric {
  AnalyticRelative,   ///< |u(T) - u_tau(T)| / |u(T)| against the exact solution
  ReferenceRelative,  ///< same against an RK4 reference run
};

struct ExperimentSpec {
  ProblemId problem = ProblemId::ExpDecay;
  ProblemParams params;
  MethodConfig method;
  std::vector<double> taus;
  double horizon = 4.0;
  std::vector<double> sample_times;  ///< empty: horizon only
  ErrorMetric metric = ErrorMetric::AnalyticRelative;
};

/// Published setup for each example (ExpDecay T = 4, Lorenz T = 10, ...).
ExperimentSpec default_spec(ProblemId id);

struct ErrorRow {
  double tau = 0.0;
  double t = 0.0;
  std::size_t step = 0;
  std::vector<double> errors;  ///< per variable; +inf when divergent
  std::optional<double> order;
  bool divergent = false;
  std::vector<double> published;  ///< published errors for comparison, empty if none
  std::optional<double> published_order;
};

struct ErrorReport {
  std::string experiment;
  std::string method;
  double c = 0.0;
  double tau = 0.0;
  std::vector<std::string> variables;
  std::string reference;  ///< "analytic" or e.g. "rk4(tau=0.001)"
  std::vector<ErrorRow> rows;
};

/// Relative error |exact - approx| / |exact|.
double relative_error(double exact, double approx) noexcept;

/// log(e_prev / e_cur) / log(tau_prev / tau_cur), log2 of the ratio when halving.
std::optional<double> observed_order(double tau_prev, double err_prev, double tau_cur,
                                     double err_cur) noexcept;

// ---------------------------------------------------------------------------
// Convergence tables

/// tau0 / 2^k for k = 0..levels-1.
std::vector<double> halving_schedule(double tau0, std::size_t levels);

/// Step-size schedule matching the published ExpDecay table for C in {0, 0.5, 1}:
/// tau0 = 2.7, 5.8, 3.2.
ExperimentSpec table1_spec(double c, WeightMode mode = WeightMode::AlphaShift,
                           std::size_t levels = 6);

/// Error at the horizon for every tau, with observed orders. Needs an exact solution.
ErrorReport run_convergence(const ExperimentSpec& spec);

// ---------------------------------------------------------------------------
// Stability sweeps

/// A fitted slope must exceed this many standard errors to count as growth.
inline constexpr double kGrowthSignificance = 3.0;
/// ...and the fitted trend must rise by at least this factor across the window.
inline constexpr double kGrowthFactor = 2.0;
/// A relative error this large means the solution has been lost.
inline constexpr double kLostAccuracy = 1.0;

struct GrowthVerdict {
  bool divergent = false;
  double slope = 0.0;          ///< d log(err) / dt over the final quarter of samples
  double t_stat = 0.0;         ///< slope / standard error of the slope
  double window_growth = 0.0;  ///< slope times window length (log units)
};

/// Least-squares slope of log-error over the final 25% of samples.
/// Divergent when the slope is significant (t_stat > kGrowthSignificance)
/// and the trend at least doubles the error across the window, so stationary
/// error with jitter or slow drift is not flagged. Any non-finite error or
/// relative error >= kLostAccuracy is divergent outright.
GrowthVerdict classify_growth(const std::vector<double>& times, const std::vector<double>& errors);

struct SweepResult {
  double tau = 0.0;
  ErrorReport series;
  GrowthVerdict verdict;
  bool blew_up = false;
};

/// Uniform sample grid dt, 2dt, ..., horizon.
std::vector<double> uniform_samples(double horizon, double dt);

/// For each tau, integrates and records the relative error time series at
/// spec.sample_times, then classifies growth.
std::vector<SweepResult> run_stability_sweep(const ExperimentSpec& spec,
                                             const std::vector<double>& taus);
SweepResult run_stability_cell(const ExperimentSpec& spec, double tau);

/// sup |L_u| along the exact solution on [t0, horizon] (scalar problems).
double sup_abs_lu(const ExperimentSpec& spec, std::size_t samples = 20001);

/// |left endpoint of I(C)| / sup |L_u|: the largest stable step predicted
/// by the linear theory.
double predicted_stability_threshold(const ExperimentSpec& spec);

/// Smallest divergent tau in [tau_lo, tau_hi] by bisection on the growth
/// classifier, to relative width rel_tol. Requires tau_lo stable, tau_hi divergent.
double empirical_divergence_onset(const ExperimentSpec& spec, double tau_lo, double tau_hi,
                                  double rel_tol = 1e-4);

/// Largest -lambda tau inside I(C) written with three decimals (2.785 for C = 0).
double biggest_inside_product(double c);
/// Smallest -lambda tau outside I(C) written with three decimals (2.786 for C = 0).
double smallest_outside_product(double c);

// ---------------------------------------------------------------------------
// Spring oscillator

/// ||A||_inf = c/m + k (for m >= 1); the scale the published step counts use.
double spring_stiffness_norm(const ProblemParams& params = {});
/// Most negative eigenvalue of A.
double spring_lambda1(const ProblemParams& params = {});

/// Integrates the spring system with tau and reports err(p), err(q) at the
/// output times, continuing from one output time to the next.
ErrorReport run_spring(const MethodConfig& method, double tau,
                       const std::vector<double>& output_times = {2, 4, 6, 8, 10, 12, 14, 16},
                       const ProblemParams& params = {});

// ---------------------------------------------------------------------------
// Lorenz

inline constexpr double kLorenzReferenceTau = 0.001;

/// Caches RK4 reference samples in memory and, if a directory is set, on disk.
class ReferenceCache {
 public:
  explicit ReferenceCache(std::optional<std::filesystem::path> dir = std::nullopt);

  /// Directory from TWOSTAGE_CACHE_DIR, memory-only when unset.
  static ReferenceCache& global();

  /// RK4 states at the sample times, from t0 with the given step.
  std::vector<Vector> reference(ProblemId id, const ProblemParams& params, double tau,
                                const std::vector<double>& times);

  const std::optional<std::filesystem::path>& directory() const noexcept { return dir_; }
  std::size_t computed_count() const noexcept { return computed_; }

  static std::string key(ProblemId id, const ProblemParams& params, double tau,
                         const std::vector<double>& times);

 private:
  std::optional<std::filesystem::path> dir_;
  std::mutex mutex_;
  std::map<std::string, std::vector<Vector>> memory_;
  std::size_t computed_ = 0;
};

struct LorenzRun {
  ErrorReport report;
  Trajectory<Vector> trajectory;
  bool blew_up = false;
};

/// Relative errors of x, y, z at t = 1..horizon against RK4 with tau = 0.001.
LorenzRun run_lorenz(const MethodConfig& method, double tau, double horizon = 10.0,
                     ReferenceCache* cache = nullptr, const ProblemParams& params = {});

// ---------------------------------------------------------------------------
// Helpers shared by runners

/// Integrates a problem instance, dispatching on scalar/system form.
Trajectory<Vector> integrate_instance(const ProblemInstance& inst, const Vector& u0, double t0,
                                      double t_end, double tau, const Method& method);

}  // namespace twostage
