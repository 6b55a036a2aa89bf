#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "twostage/experiments.hpp"

namespace twostage {

/// Published ExpDecay errors at T = 4 for tau0 / 2^k, k = 0..5.
/// orders[0] is NaN (no ratio for the first row).
struct ConvergenceReference {
  double c;
  double tau0;
  std::array<double, 6> errors;
  std::array<double, 6> orders;
};

struct SpringReferenceRow {
  double t;
  std::size_t step;
  double err_p;
  double err_q;
};

/// Published spring errors at t = 2, 4, ..., 16 with -lambda_1 tau = 2.785.
struct SpringReference {
  double c;
  double neg_lambda_tau;
  std::vector<SpringReferenceRow> rows;
};

/// Published Lorenz errors of (x, y, z) at t = 1..10.
struct LorenzReference {
  MethodConfig method;
  double tau;
  std::array<std::array<double, 3>, 10> errors;
};

const std::vector<ConvergenceReference>& table1_reference();
const std::vector<SpringReference>& table2_reference();
const std::vector<LorenzReference>& lorenz_reference();

/// Block for a given C, or nullptr.
const ConvergenceReference* table1_block(double c);
const SpringReference* table2_block(double c);
const LorenzReference* lorenz_block(const MethodConfig& method, double tau);

/// Copy the matching published values into report rows (matched by row
/// position for tables 1 and by t otherwise). Returns false if no block matches.
bool attach_table1(ErrorReport& report, double c);
bool attach_table2(ErrorReport& report, double c);
bool attach_lorenz(ErrorReport& report, const MethodConfig& method, double tau);

/// |computed - published| <= half a unit in the n-th significant digit of published.
bool agrees_to_digits(double computed, double published, int digits);

}  // namespace twostage
