#include "twostage/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <system_error>

#include <nlohmann/json.hpp>

#include "twostage/errors.hpp"

namespace twostage {

namespace {

using nlohmann::json;

const char* case_name(IntervalCase c) {
  switch (c) {
    case IntervalCase::Convex: return "convex";
    case IntervalCase::Split: return "split";
    case IntervalCase::BoundedMax: return "bounded-max";
    case IntervalCase::Monotone: return "monotone";
  }
  return "unknown";
}

const char* imag_kind_name(ImagIntersection::Kind k) {
  switch (k) {
    case ImagIntersection::Kind::SymmetricInterval: return "symmetric-interval";
    case ImagIntersection::Kind::TwoBandsPlusOrigin: return "two-bands-plus-origin";
    case ImagIntersection::Kind::ThreePoints: return "three-points";
    case ImagIntersection::Kind::OriginOnly: return "origin-only";
  }
  return "unknown";
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string format_sci4(double v) {
  if (!std::isfinite(v)) return format_double(v);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string write_csv(const CsvTable& table) {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
  return out;
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  bool first = true;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    if (nl == std::string_view::npos) throw ContractViolation("CSV must end with a newline");
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl + 1);
    if (!line.empty() && line.back() == '\r') throw ContractViolation("CSV must use LF line endings");
    std::vector<std::string> cells;
    std::size_t pos = 0;
    while (true) {
      const auto comma = line.find(',', pos);
      cells.emplace_back(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      if (cells.size() > table.header.size()) throw ContractViolation("CSV row wider than header");
      table.rows.push_back(std::move(cells));
    }
  }
  if (first) throw ContractViolation("CSV has no header row");
  return table;
}

std::string canonicalize_csv(std::string_view text) {
  CsvTable table = parse_csv(text);
  for (auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      const std::string& name = table.header[i];
      const bool sci = name.rfind("published_", 0) == 0 || name.rfind("rel_dev_", 0) == 0;
      if (auto v = parse_double(row[i])) row[i] = sci ? format_sci4(*v) : format_double(*v);
    }
  }
  return write_csv(table);
}

std::string canonicalize_json(std::string_view text) { return json::parse(text).dump(2) + "\n"; }

CsvTable trajectory_csv(const Trajectory<Vector>& traj, const std::vector<std::string>& variables) {
  CsvTable table;
  table.header.push_back("t");
  table.header.insert(table.header.end(), variables.begin(), variables.end());
  for (const auto& s : traj.states) {
    std::vector<std::string> row{format_double(s.t())};
    for (Eigen::Index i = 0; i < s.u().size(); ++i) row.push_back(format_double(s.u()(i)));
    table.rows.push_back(std::move(row));
  }
  if (traj.blew_up) {
    table.rows.push_back({"blowup", format_double(traj.blow_up_time.value_or(traj.back().t()))});
  }
  return table;
}

CsvTable report_csv(const ErrorReport& report) {
  bool with_published = false;
  for (const auto& r : report.rows) with_published = with_published || !r.published.empty();

  CsvTable table;
  table.header = {"tau", "t", "step"};
  for (const auto& v : report.variables) table.header.push_back("err_" + v);
  table.header.push_back("order");
  table.header.push_back("divergent");
  if (with_published) {
    for (const auto& v : report.variables) table.header.push_back("published_" + v);
    for (const auto& v : report.variables) table.header.push_back("rel_dev_" + v);
    table.header.push_back("published_order");
  }
  for (const auto& r : report.rows) {
    std::vector<std::string> row{format_double(r.tau), format_double(r.t), std::to_string(r.step)};
    for (double e : r.errors) row.push_back(format_double(e));
    row.push_back(r.order ? format_double(*r.order) : "");
    row.push_back(r.divergent ? "1" : "0");
    if (with_published) {
      const std::size_t n = report.variables.size();
      for (std::size_t i = 0; i < n; ++i) {
        row.push_back(i < r.published.size() ? format_sci4(r.published[i]) : "");
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (i < r.published.size() && i < r.errors.size()) {
          row.push_back(format_sci4((r.errors[i] - r.published[i]) / r.published[i]));
        } else {
          row.push_back("");
        }
      }
      row.push_back(r.published_order ? format_sci4(*r.published_order) : "");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string report_json(const ErrorReport& report) {
  json j;
  j["experiment"] = report.experiment;
  j["method"] = report.method;
  j["C"] = report.c;
  j["tau"] = report.tau;
  j["reference"] = report.reference;
  j["variables"] = report.variables;
  j["rows"] = json::array();
  for (const auto& r : report.rows) {
    json row;
    row["tau"] = r.tau;
    row["t"] = r.t;
    row["step"] = r.step;
    json errs = json::object();
    for (std::size_t i = 0; i < r.errors.size() && i < report.variables.size(); ++i) {
      errs[report.variables[i]] = number_or_null(r.errors[i]);
    }
    row["errors"] = errs;
    row["order"] = r.order ? json(*r.order) : json(nullptr);
    row["divergent"] = r.divergent;
    if (!r.published.empty()) {
      json published = json::object();
      json dev = json::object();
      for (std::size_t i = 0; i < r.published.size() && i < report.variables.size(); ++i) {
        published[report.variables[i]] = format_sci4(r.published[i]);
        if (i < r.errors.size()) {
          dev[report.variables[i]] = format_sci4((r.errors[i] - r.published[i]) / r.published[i]);
        }
      }
      row["published"] = published;
      row["rel_dev"] = dev;
    }
    if (r.published_order) row["published_order"] = format_sci4(*r.published_order);
    j["rows"].push_back(row);
  }
  return j.dump(2) + "\n";
}

std::string interval_json(double c, const IntervalSet& set) {
  json j;
  j["C"] = c;
  j["case"] = case_name(classify_interval_case(c));
  j["intervals"] = json::array();
  for (const auto& iv : set.intervals) j["intervals"].push_back({iv.lo, iv.hi});
  return j.dump(2) + "\n";
}

std::string imag_json(double c, const ImagIntersection& imag) {
  json j;
  j["C"] = c;
  j["kind"] = imag_kind_name(imag.kind);
  j["pieces"] = json::array();
  for (const auto& iv : imag.pieces()) j["pieces"].push_back({iv.lo, iv.hi});
  return j.dump(2) + "\n";
}

CsvTable locus_csv(const std::vector<Complex>& points) {
  CsvTable table;
  table.header = {"re", "im"};
  for (const auto& z : points) table.rows.push_back({format_double(z.real()), format_double(z.imag())});
  return table;
}

}  // namespace twostage
