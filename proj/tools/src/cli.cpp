#include "twostage_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "twostage/errors.hpp"
#include "twostage/experiments.hpp"
#include "twostage/io.hpp"
#include "twostage/reference_tables.hpp"
#include "twostage/stability.hpp"

namespace twostage::cli {
namespace {

// Config errors carry the flag they are about.
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& flag, const std::string& msg)
      : std::runtime_error(flag + ": " + msg) {}
};

struct MethodOpts {
  std::string method = "two-stage";
  double c = 0.0;
  std::string mode = "alpha";

  MethodConfig config() const {
    if (!std::isfinite(c)) throw ConfigError("--C", "C must be finite");
    if (method == "rk4") return MethodConfig::rk4();
    return MethodConfig::two_stage(c, mode == "beta" ? WeightMode::BetaShift : WeightMode::AlphaShift);
  }
};

void add_method_opts(CLI::App* sub, MethodOpts& m) {
  sub->add_option("--method", m.method, "two-stage or rk4")
      ->check(CLI::IsMember({"two-stage", "rk4"}))
      ->capture_default_str();
  sub->add_option("--C", m.c, "weight constant C")->capture_default_str();
  sub->add_option("--mode", m.mode, "weight receiving the cubic correction")
      ->check(CLI::IsMember({"alpha", "beta"}))
      ->capture_default_str();
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("--out", "cannot open " + path + " for writing");
  f << text;
}

void write_report(const ErrorReport& report, const std::string& prefix, std::ostream& out) {
  if (prefix.empty() || prefix == "-") {
    out << write_csv(report_csv(report));
    return;
  }
  write_text(prefix + ".csv", write_csv(report_csv(report)), out);
  write_text(prefix + ".json", report_json(report), out);
}

std::string trajectory_json(const Trajectory<Vector>& traj, ProblemId id,
                            const std::vector<std::string>& vars, const MethodConfig& m) {
  std::ostringstream os;
  os << "{\n  \"experiment\": \"integrate/" << problem_name(id) << "\",\n"
     << "  \"method\": \"" << m.label() << "\",\n"
     << "  \"C\": " << format_double(m.c) << ",\n"
     << "  \"tau\": " << format_double(traj.step_size) << ",\n"
     << "  \"variables\": [";
  for (std::size_t i = 0; i < vars.size(); ++i) os << (i ? ", " : "") << '"' << vars[i] << '"';
  os << "],\n  \"rows\": [";
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const auto& s = traj.states[k];
    os << (k ? "," : "") << "\n    {\"t\": " << format_double(s.t()) << ", \"u\": [";
    for (Eigen::Index i = 0; i < s.u().size(); ++i) os << (i ? ", " : "") << format_double(s.u()(i));
    os << "]}";
  }
  os << "\n  ],\n  \"blew_up\": " << (traj.blew_up ? "true" : "false");
  if (traj.blow_up_time) os << ",\n  \"blow_up_time\": " << format_double(*traj.blow_up_time);
  os << "\n}\n";
  return canonicalize_json(os.str());
}

// --------------------------------------------------------------------------

struct IntegrateOpts {
  std::string problem;
  MethodOpts method;
  double tau = 0.0;
  std::optional<double> horizon;
  std::string out;
  std::string format = "csv";
};

int cmd_integrate(const IntegrateOpts& o, std::ostream& out, std::ostream& err) {
  const auto id = parse_problem(o.problem);
  if (!id) throw ConfigError("--problem", "unknown problem " + o.problem);
  if (!(o.tau > 0.0) || !std::isfinite(o.tau)) throw ConfigError("--tau", "tau must be positive");
  const MethodConfig m = o.method.config();
  if (is_system(*id) && m.kind == MethodConfig::Kind::TwoStage && m.mode == WeightMode::BetaShift) {
    throw ConfigError("--mode", "beta-shift weights are not available for system problems");
  }
  const double horizon = o.horizon.value_or(default_spec(*id).horizon);
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
    throw ConfigError("--T", "T must be finite and non-negative");
  }

  const ProblemInstance inst = make_problem(*id);
  Trajectory<Vector> traj;
  try {
    traj = integrate_instance(inst, inst.u0, inst.t0, horizon, o.tau, m.to_method());
  } catch (const WeightDegeneracyError& e) {
    throw ConfigError("--C", e.what());
  }

  const std::string text = o.format == "json" ? trajectory_json(traj, *id, inst.variables, m)
                                              : write_csv(trajectory_csv(traj, inst.variables));
  write_text(o.out, text, out);
  if (traj.blew_up) {
    err << "blow-up at t = " << format_double(*traj.blow_up_time) << "\n";
    return kExitBlowUp;
  }
  return kExitOk;
}

// --------------------------------------------------------------------------

struct StabilityOpts {
  double c = 0.0;
  std::string grid = "1401x1001";
  std::vector<double> bounds{-7.0, 2.0, -5.0, 5.0};
  bool clip = false;
  std::string out;
};

void check_c(double c) {
  if (!std::isfinite(c)) throw ConfigError("--C", "C must be finite");
}

int cmd_interval(const StabilityOpts& o, std::ostream& out) {
  check_c(o.c);
  write_text(o.out, interval_json(o.c, stability_interval(o.c)), out);
  return kExitOk;
}

int cmd_imag(const StabilityOpts& o, std::ostream& out) {
  check_c(o.c);
  write_text(o.out, imag_json(o.c, imag_axis_intersection(o.c)), out);
  return kExitOk;
}

int cmd_locus(const StabilityOpts& o, std::ostream& out) {
  check_c(o.c);
  GridSpec g;
  const auto x = o.grid.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument("no separator");
    g.nx = std::stoul(o.grid.substr(0, x));
    g.ny = std::stoul(o.grid.substr(x + 1));
  } catch (const std::exception&) {
    throw ConfigError("--grid", "expected NXxNY, e.g. 1401x1001");
  }
  if (g.nx < 2 || g.ny < 2) throw ConfigError("--grid", "need at least 2x2 nodes");
  if (o.bounds.size() != 4) throw ConfigError("--bounds", "expected re_min re_max im_min im_max");
  g.re_min = o.bounds[0];
  g.re_max = o.bounds[1];
  g.im_min = o.bounds[2];
  g.im_max = o.bounds[3];
  if (g.re_min > -7.0 || g.re_max < 2.0 || g.im_min > -5.0 || g.im_max < 5.0) {
    throw ConfigError("--bounds", "box must cover [-7, 2] x [-5, 5]");
  }
  const BoundaryLocus locus = boundary_locus(o.c, g);
  write_text(o.out, write_csv(locus_csv(o.clip ? locus.left_half_points() : locus.points)), out);
  return kExitOk;
}

// --------------------------------------------------------------------------

struct ConvergeOpts {
  int table = 1;
  MethodOpts method;
  std::size_t levels = 6;
  std::string out;
};

int cmd_converge(const ConvergeOpts& o, std::ostream& out) {
  if (o.table != 1) {
    throw ConfigError("--table", "only table 1 is a convergence table; use bench for the others");
  }
  if (o.levels < 1) throw ConfigError("--levels", "levels must be at least 1");
  if (o.method.method == "rk4") throw ConfigError("--method", "table 1 is for the two-stage method");
  const MethodConfig m = o.method.config();
  ErrorReport report = run_convergence(table1_spec(m.c, m.mode, o.levels));
  attach_table1(report, m.c);
  write_report(report, o.out, out);
  return kExitOk;
}

// --------------------------------------------------------------------------

struct BenchOpts {
  std::string example;
  MethodOpts method;
  std::vector<double> taus;
  std::string scale = "norm";
  unsigned jobs = 1;
  std::string out;
};

template <class Fn>
auto run_cells(const std::vector<double>& taus, unsigned jobs, Fn fn) {
  using R = decltype(fn(0.0));
  std::vector<R> results(taus.size());
  if (jobs <= 1) {
    for (std::size_t i = 0; i < taus.size(); ++i) results[i] = fn(taus[i]);
    return results;
  }
  for (std::size_t start = 0; start < taus.size(); start += jobs) {
    std::vector<std::future<R>> batch;
    const std::size_t end = std::min<std::size_t>(taus.size(), start + jobs);
    for (std::size_t i = start; i < end; ++i) {
      batch.push_back(std::async(std::launch::async, fn, taus[i]));
    }
    for (std::size_t i = start; i < end; ++i) results[i] = batch[i - start].get();
  }
  return results;
}

ErrorReport merge(std::vector<ErrorReport> parts) {
  ErrorReport all = parts.front();
  all.rows.clear();
  for (auto& p : parts) all.rows.insert(all.rows.end(), p.rows.begin(), p.rows.end());
  return all;
}

int cmd_bench(const BenchOpts& o, std::ostream& out, std::ostream& err) {
  const MethodConfig m = o.method.config();
  for (double tau : o.taus) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("--tau", "tau must be positive");
  }
  if (o.jobs < 1) throw ConfigError("--jobs", "jobs must be at least 1");

  if (o.example == "4.2" || o.example == "4.3") {
    ExperimentSpec spec =
        default_spec(o.example == "4.2" ? ProblemId::StiffLinear : ProblemId::StiffNonlinear);
    spec.method = m;
    std::vector<double> taus = o.taus;
    if (taus.empty()) {
      // Growth just past the endpoint is too slow to register by T; probe 2% out.
      const double sup = sup_abs_lu(spec);
      taus = {biggest_inside_product(m.stability_c()) / sup, 1.02 * predicted_stability_threshold(spec)};
    }
    auto cells = run_cells(taus, o.jobs, [&spec](double tau) { return run_stability_cell(spec, tau); });
    std::vector<ErrorReport> parts;
    for (const auto& cell : cells) {
      err << "tau=" << format_double(cell.tau) << " slope=" << format_double(cell.verdict.slope)
          << " t_stat=" << format_double(cell.verdict.t_stat)
          << (cell.verdict.divergent ? " divergent" : " stable") << "\n";
      parts.push_back(cell.series);
    }
    write_report(merge(std::move(parts)), o.out, out);
    return kExitOk;
  }

  if (o.example == "4.4") {
    if (o.scale != "norm" && o.scale != "lambda1") {
      throw ConfigError("--scale", "expected norm or lambda1");
    }
    const double stiff = o.scale == "norm" ? spring_stiffness_norm() : -spring_lambda1();
    std::vector<double> taus = o.taus;
    if (taus.empty()) taus = {2.785 / stiff};
    if (m.kind == MethodConfig::Kind::TwoStage && m.mode == WeightMode::BetaShift) {
      throw ConfigError("--mode", "beta-shift weights are not available for system problems");
    }
    auto parts = run_cells(taus, o.jobs, [&m](double tau) { return run_spring(m, tau); });
    if (o.taus.empty()) attach_table2(parts.front(), m.c);
    write_report(merge(std::move(parts)), o.out, out);
    return kExitOk;
  }

  if (o.example == "4.5") {
    if (m.kind == MethodConfig::Kind::TwoStage && m.mode == WeightMode::BetaShift) {
      throw ConfigError("--mode", "beta-shift weights are not available for system problems");
    }
    std::vector<double> taus = o.taus;
    if (taus.empty()) {
      const bool wide = m.kind == MethodConfig::Kind::TwoStage && m.c == 0.5;
      taus = {wide ? 0.0625 : 0.04, 0.01};
    }
    // Warm the shared reference before fanning out.
    ReferenceCache::global();
    auto runs = run_cells(taus, o.jobs, [&m](double tau) { return run_lorenz(m, tau); });
    std::vector<ErrorReport> parts;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      attach_lorenz(runs[i].report, m, taus[i]);
      if (runs[i].blew_up) {
        err << "tau=" << format_double(taus[i]) << " blow-up at t = "
            << format_double(*runs[i].trajectory.blow_up_time) << "\n";
      }
      parts.push_back(std::move(runs[i].report));
    }
    write_report(merge(std::move(parts)), o.out, out);
    return kExitOk;
  }
  throw ConfigError("--example", "expected 4.2, 4.3, 4.4 or 4.5");
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-stage fourth-order time integration: integration, stability analysis and experiments"};
  app.require_subcommand(1);

  IntegrateOpts integ;
  auto* s_int = app.add_subcommand("integrate", "integrate one of the built-in problems");
  s_int->add_option("--problem", integ.problem, "exp-decay|stiff-linear|stiff-nonlinear|spring|lorenz")
      ->required();
  add_method_opts(s_int, integ.method);
  s_int->add_option("--tau", integ.tau, "step size")->required();
  s_int->add_option("--T", integ.horizon, "final time (default: the problem's horizon)");
  s_int->add_option("--out", integ.out, "output file (default stdout)");
  s_int->add_option("--format", integ.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  StabilityOpts stab;
  auto* s_stab = app.add_subcommand("stability", "stability interval, imaginary axis, boundary locus");
  s_stab->require_subcommand(1);
  auto* s_interval = s_stab->add_subcommand("interval", "real stability interval I(C) as JSON");
  auto* s_imag = s_stab->add_subcommand("imag", "imaginary-axis intersection as JSON");
  auto* s_locus = s_stab->add_subcommand("locus", "boundary |f(z,C)| = 1 as CSV (re, im)");
  for (auto* s : {s_interval, s_imag, s_locus}) {
    s->add_option("--C", stab.c, "weight constant C")->required();
    s->add_option("--out", stab.out, "output file (default stdout)");
  }
  s_locus->add_option("--grid", stab.grid, "grid nodes NXxNY")->capture_default_str();
  s_locus->add_option("--bounds", stab.bounds, "re_min re_max im_min im_max")->expected(4);
  s_locus->add_flag("--clip", stab.clip, "keep only points with Re z <= 0");

  ConvergeOpts conv;
  auto* s_conv = app.add_subcommand("converge", "convergence table on the exponential decay problem");
  s_conv->add_option("--table", conv.table, "table number")->capture_default_str();
  add_method_opts(s_conv, conv.method);
  s_conv->add_option("--levels", conv.levels, "number of halvings of tau0")->capture_default_str();
  s_conv->add_option("--out", conv.out, "output prefix; writes PREFIX.csv and PREFIX.json");

  BenchOpts bench;
  auto* s_bench = app.add_subcommand("bench", "reproduce an experiment table");
  s_bench->add_option("--example", bench.example, "4.2, 4.3, 4.4 or 4.5")->required();
  add_method_opts(s_bench, bench.method);
  s_bench->add_option("--tau", bench.taus, "step sizes (default: the published ones)");
  s_bench->add_option("--scale", bench.scale, "spring stiffness scale: norm (||A||_inf) or lambda1")
      ->capture_default_str();
  s_bench->add_option("--jobs", bench.jobs, "worker threads")->capture_default_str();
  s_bench->add_option("--out", bench.out, "output prefix; writes PREFIX.csv and PREFIX.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (*s_int) return cmd_integrate(integ, out, err);
    if (*s_interval) return cmd_interval(stab, out);
    if (*s_imag) return cmd_imag(stab, out);
    if (*s_locus) return cmd_locus(stab, out);
    if (*s_conv) return cmd_converge(conv, out);
    if (*s_bench) return cmd_bench(bench, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UnsupportedModeError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("twostage");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  argv.push_back(nullptr);
  return run(static_cast<int>(storage.size()), argv.data(), out, err);
}

}  // namespace twostage::cli
