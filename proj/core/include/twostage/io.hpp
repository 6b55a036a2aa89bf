#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "twostage/experiments.hpp"
#include "twostage/integrators.hpp"
#include "twostage/stability.hpp"

namespace twostage {

/// Shortest decimal that parses back to the same double; "inf", "-inf", "nan".
std::string format_double(double v);
/// Whole-string parse of format_double output.
std::optional<double> parse_double(std::string_view s);
/// Scientific notation with 4 significant digits, e.g. 1.329e+01.
std::string format_sci4(double v);

/// Comma-separated table with a header row; rows may be shorter than the header.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// LF line endings, no quoting (cells never contain commas).
std::string write_csv(const CsvTable& table);
CsvTable parse_csv(std::string_view text);

/// Parse and re-emit with canonical number formatting.
std::string canonicalize_csv(std::string_view text);
std::string canonicalize_json(std::string_view text);

/// Columns t, <variables...>; a blow-up appends the row "blowup,<t>".
CsvTable trajectory_csv(const Trajectory<Vector>& traj, const std::vector<std::string>& variables);

/// Columns tau, t, step, err_<v>..., order, divergent; with published values
/// present, also published_<v>, rel_dev_<v>, published_order in 4-digit scientific form.
CsvTable report_csv(const ErrorReport& report);
/// Keys experiment, method, C, tau, reference, variables, rows[].
std::string report_json(const ErrorReport& report);

std::string interval_json(double c, const IntervalSet& set);
std::string imag_json(double c, const ImagIntersection& imag);
/// Columns re, im.
CsvTable locus_csv(const std::vector<Complex>& points);

}  // namespace twostage
