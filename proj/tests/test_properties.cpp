#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "twostage/experiments.hpp"
#include "twostage/integrators.hpp"
#include "twostage/stability.hpp"

using namespace twostage;

namespace {

ScalarProblem linear(double lambda) {
  ScalarProblem p;
  p.rhs = [lambda](double, double u) { return lambda * u; };
  p.rhs_t = [](double, double) { return 0.0; };
  p.rhs_u = [lambda](double, double) { return lambda; };
  return p;
}

double ulps(double a, double b) {
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return std::fabs(a - b) / (std::nextafter(scale, INFINITY) - scale);
}

}  // namespace

// |tau lambda| <= 0.5 keeps f well away from its zeros, where ulp distance is meaningful.
TEST(Property, LinearStepIsStabilityPolynomial) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> z_d(-0.5, -1e-6), c_d(-2.0, 2.0), lam_d(0.1, 3000.0),
      u_d(0.1, 10.0);
  for (int i = 0; i < 20000; ++i) {
    const double lambda = -lam_d(rng);
    const double tau = z_d(rng) / lambda;
    const double c = c_d(rng), u = u_d(rng);
    const double expect = eval_f(c, tau * lambda) * u;
    for (auto mode : {WeightMode::AlphaShift, WeightMode::BetaShift}) {
      const double got = step_two_stage_scalar(linear(lambda), ScalarState(0.0, u), tau, {c, mode}).u_to;
      ASSERT_LE(ulps(got, expect), 4.0) << "lambda=" << lambda << " tau=" << tau << " C=" << c;
    }
  }
}

TEST(Property, WeightSumMatchesFamily) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double c = 2 * d(rng), tau = std::fabs(d(rng)), lu = 3 * d(rng);
    const double x = tau * lu;
    const double target = 1.0 + (c / 60.0) * x * x * x;
    for (auto mode : {WeightMode::AlphaShift, WeightMode::BetaShift}) {
      const auto w = WeightPolicy{c, mode}.evaluate(tau, lu);
      EXPECT_LE(std::fabs(w.alpha + w.beta - target), 4 * std::numeric_limits<double>::epsilon());
      EXPECT_LE(std::fabs(w.beta - 2.0 / 3.0), std::fabs(c) / 60.0 * std::fabs(x * x * x) + 1e-16);
    }
  }
}

TEST(Property, BothModesAgreeOnLinearProblems) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> z_d(-5.0, 0.0), c_d(-1.0, 1.5);
  for (int i = 0; i < 5000; ++i) {
    const double tau = 0.01, lambda = z_d(rng) / tau, c = c_d(rng);
    const double a = step_two_stage_scalar(linear(lambda), ScalarState(0.0, 1.0), tau, {c}).u_to;
    const double b = step_two_stage_scalar(linear(lambda), ScalarState(0.0, 1.0), tau,
                                           {c, WeightMode::BetaShift})
                         .u_to;
    EXPECT_NEAR(a, b, 1e-12 * (1.0 + std::fabs(a)));
  }
}

TEST(Property, StableStepsDoNotGrow) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> c_d(-2.0, 2.0), s_d(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double c = c_d(rng);
    const auto set = stability_interval(c);
    const auto& iv = set.intervals[std::uniform_int_distribution<std::size_t>(0, set.intervals.size() - 1)(rng)];
    const double z = iv.lo + s_d(rng) * iv.width();
    EXPECT_LE(std::fabs(eval_f(c, z)), 1.0 + 1e-9) << c << " " << z;
  }
}

TEST(Property, SystemOfDecoupledModesMatchesScalarSteps) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> d(-3.0, -0.1);
  for (int i = 0; i < 200; ++i) {
    const double l1 = d(rng), l2 = 10 * d(rng), tau = 0.05, c = 0.5;
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = l1;
    a(1, 1) = l2;
    SystemProblem p;
    p.dim = 2;
    p.rhs = [a](double, const Vector& u) -> Vector { return a * u; };
    p.rhs_t = [](double, const Vector&) -> Vector { return Vector::Zero(2); };
    p.jacobian = [a](double, const Vector&) -> Matrix { return a; };
    const Vector u = (Vector(2) << 1.0, -2.0).finished();
    const Vector got = step_two_stage_system(p, SystemState(0.0, u), tau, c).u_to;
    EXPECT_NEAR(got(0), eval_f(c, tau * l1) * 1.0, 1e-14);
    EXPECT_NEAR(got(1), eval_f(c, tau * l2) * -2.0, 1e-13);
  }
}
