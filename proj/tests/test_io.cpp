#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include <nlohmann/json.hpp>

#include "twostage/errors.hpp"
#include "twostage/io.hpp"
#include "twostage/reference_tables.hpp"

using namespace twostage;

TEST(Format, ShortestRoundTrip) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> d(-30.0, 30.0);
  for (int i = 0; i < 10000; ++i) {
    const double v = std::pow(10.0, d(rng)) * (i % 2 ? -1.0 : 1.0);
    const auto back = parse_double(format_double(v));
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(*back, v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(format_double(std::nan("")), "nan");
  EXPECT_TRUE(std::isnan(*parse_double("nan")));
}

TEST(Format, ParseRejectsJunk) {
  EXPECT_FALSE(parse_double("").has_value());
  EXPECT_FALSE(parse_double("1.0x").has_value());
  EXPECT_FALSE(parse_double(" 1").has_value());
}

TEST(Format, Sci4) {
  EXPECT_EQ(format_sci4(13.2876), "1.329e+01");
  EXPECT_EQ(format_sci4(2.571e-14), "2.571e-14");
}

TEST(Csv, WriteParseRoundTrip) {
  CsvTable t{{"a", "b", "c"}, {{"1", "2", "3"}, {"x", ""}, {"4", "5", "6"}}};
  const std::string text = write_csv(t);
  EXPECT_EQ(text, "a,b,c\n1,2,3\nx,\n4,5,6\n");
  const auto back = parse_csv(text);
  EXPECT_EQ(back.header, t.header);
  EXPECT_EQ(back.rows, t.rows);
}

TEST(Csv, RejectsMalformedInput) {
  EXPECT_THROW(parse_csv("a,b\n1,2"), ContractViolation);
  EXPECT_THROW(parse_csv("a,b\r\n1,2\r\n"), ContractViolation);
  EXPECT_THROW(parse_csv("a\n1,2\n"), ContractViolation);
  EXPECT_THROW(parse_csv(""), ContractViolation);
}

TEST(Csv, CanonicalFormIsAFixedPoint) {
  const std::string messy = "tau,err_u,published_u\n0.100,1.50e-3,0.0002571\n";
  const std::string once = canonicalize_csv(messy);
  EXPECT_EQ(once, "tau,err_u,published_u\n0.1,0.0015,2.571e-04\n");
  EXPECT_EQ(canonicalize_csv(once), once);
}

TEST(Report, CsvAndJsonRoundTripByteIdentical) {
  auto r = run_convergence(table1_spec(0.0));
  attach_table1(r, 0.0);
  r.rows[5].divergent = true;
  r.rows[5].errors[0] = std::numeric_limits<double>::infinity();

  const std::string csv = write_csv(report_csv(r));
  EXPECT_EQ(canonicalize_csv(csv), csv);
  const auto table = parse_csv(csv);
  EXPECT_EQ(table.header,
            (std::vector<std::string>{"tau", "t", "step", "err_u", "order", "divergent", "published_u",
                                      "rel_dev_u", "published_order"}));
  EXPECT_EQ(table.rows[0][4], "");
  EXPECT_EQ(table.rows[5][3], "inf");
  EXPECT_EQ(table.rows[0][6], "1.329e+01");
  EXPECT_EQ(*parse_double(table.rows[1][3]), r.rows[1].errors[0]);

  const std::string js = report_json(r);
  EXPECT_EQ(canonicalize_json(js), js);
  const auto j = nlohmann::json::parse(js);
  for (const char* key : {"experiment", "method", "C", "tau", "rows"}) EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_TRUE(j["rows"][5]["errors"]["u"].is_null());
  EXPECT_TRUE(j["rows"][0]["order"].is_null());
  EXPECT_EQ(j["rows"][1]["errors"]["u"].get<double>(), r.rows[1].errors[0]);
}

TEST(Report, ReportWithoutPublishedValuesHasNoPublishedColumns) {
  const auto r = run_convergence(table1_spec(0.5, WeightMode::AlphaShift, 2));
  const auto table = report_csv(r);
  EXPECT_EQ(table.header.size(), 6u);
}

TEST(Trajectory, CsvMarksBlowUp) {
  const auto inst = make_problem(ProblemId::Lorenz);
  const auto traj = integrate_instance(inst, inst.u0, 0.0, 10.0, 0.0625, TwoStage{{0.0}});
  const auto table = trajectory_csv(traj, inst.variables);
  EXPECT_EQ(table.header, (std::vector<std::string>{"t", "x", "y", "z"}));
  EXPECT_EQ(table.rows.back()[0], "blowup");
  EXPECT_EQ(*parse_double(table.rows.back()[1]), *traj.blow_up_time);
  const std::string csv = write_csv(table);
  EXPECT_EQ(canonicalize_csv(csv), csv);
}

TEST(Stability, JsonShapes) {
  const auto j = nlohmann::json::parse(interval_json(0.4, stability_interval(0.4)));
  EXPECT_EQ(j["case"], "split");
  EXPECT_EQ(j["intervals"].size(), 2u);
  const auto k = nlohmann::json::parse(imag_json(1.25, imag_axis_intersection(1.25)));
  EXPECT_EQ(k["kind"], "three-points");
  EXPECT_EQ(k["pieces"].size(), 3u);
  const std::string js = interval_json(0.0, stability_interval(0.0));
  EXPECT_EQ(canonicalize_json(js), js);
}

TEST(Stability, LocusCsvRoundTrip) {
  const std::vector<Complex> pts{{-2.5, 0.25}, {0.1, -3.0}};
  const std::string csv = write_csv(locus_csv(pts));
  EXPECT_EQ(csv, "re,im\n-2.5,0.25\n0.1,-3\n");
  EXPECT_EQ(canonicalize_csv(csv), csv);
}
