#include "twostage/stability.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "twostage/errors.hpp"

namespace twostage {

namespace {

template <class T>
T horner_f(double c, T z) {
  return 1.0 + z * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z * (c / 120.0)))));
}

template <class T>
Derivatives<T> horner_derivatives(double c, T z) {
  return {
      horner_f(c, z),
      1.0 + z * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (c / 24.0)))),
      1.0 + z * (1.0 + z * (0.5 + z * (c / 6.0))),
      1.0 + z * (1.0 + z * (c / 2.0)),
  };
}

// Walks left from z = -1 by doubling until pred(z) holds.
double left_bound(const std::function<bool(double)>& pred, const char* what) {
  for (double z = -1.0; z > -1e8; z *= 2.0) {
    if (pred(z)) return z;
  }
  throw CaseClassificationError(std::string("no left bracket found for ") + what);
}

}  // namespace

double StabilityFunction::operator()(double z) const noexcept { return horner_f(c_, z); }
Complex StabilityFunction::operator()(Complex z) const noexcept { return horner_f(c_, z); }

Derivatives<double> StabilityFunction::derivatives(double z) const noexcept {
  return horner_derivatives(c_, z);
}
Derivatives<Complex> StabilityFunction::derivatives(Complex z) const noexcept {
  return horner_derivatives(c_, z);
}

bool StabilityFunction::is_abs_stable(Complex z) const noexcept {
  return z.real() <= 0.0 && std::abs((*this)(z)) <= 1.0;
}

Complex eval_f(double c, Complex z) noexcept { return horner_f(c, z); }
double eval_f(double c, double z) noexcept { return horner_f(c, z); }
Derivatives<double> eval_f_derivatives(double c, double z) noexcept {
  return horner_derivatives(c, z);
}
Derivatives<Complex> eval_f_derivatives(double c, Complex z) noexcept {
  return horner_derivatives(c, z);
}
bool is_abs_stable(double c, Complex z) noexcept { return StabilityFunction(c).is_abs_stable(z); }

double lemma_g(double z) noexcept {
  return 1.0 + z * (0.8 + z * (0.3 + z * (1.0 / 15.0 + z / 120.0)));
}

double imag_g(double eta, double c) noexcept {
  return c * c * eta * eta + 5.0 * (5.0 - 8.0 * c) * eta + 40.0 * (6.0 * c - 5.0);
}

const CriticalConstants& critical_constants() {
  static const CriticalConstants constants = [] {
    const double r1 = std::cbrt(64.0 + 9.0 * std::sqrt(67.0));
    const double z1 = -2.0 * r1 / 3.0 + 22.0 / (3.0 * r1) - 8.0 / 3.0;
    const double z1_2 = z1 * z1;
    const double c1 = (-24.0 - 24.0 * z1 - 12.0 * z1_2 - 4.0 * z1_2 * z1) / (z1_2 * z1_2);

    const double r2 = std::cbrt(2.0 + 2.0 * std::sqrt(3.0));
    const double z2 = -r2 + 2.0 / r2 - 2.0;
    const double c2 = (-6.0 - 6.0 * z2 - 3.0 * z2 * z2) / (z2 * z2 * z2);

    const auto d1 = horner_derivatives(c1, z1);
    const auto d2 = horner_derivatives(c2, z2);
    constexpr double tol = 1e-12;
    if (std::abs(d1.f_z) > tol || std::abs(d1.f - 1.0) > tol) {
      throw InternalConsistencyError("(z1, C1) does not satisfy f_z = 0, f = 1");
    }
    if (std::abs(d2.f_z) > tol || std::abs(d2.f_zz) > tol) {
      throw InternalConsistencyError("(z2, C2) does not satisfy f_z = 0, f_zz = 0");
    }
    return CriticalConstants{z1, c1, z2, c2};
  }();
  return constants;
}

double bisect(const std::function<double(double)>& fn, double lo, double hi, double tol) {
  double f_lo = fn(lo);
  const double f_hi = fn(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo < 0.0) == (f_hi < 0.0)) {
    throw CaseClassificationError("bisection bracket [" + std::to_string(lo) + ", " +
                                  std::to_string(hi) + "] has no sign change");
  }
  for (int iter = 0; iter < 200 && hi - lo > tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = fn(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

bool IntervalSet::contains(double z) const noexcept {
  for (const auto& iv : intervals) {
    if (iv.contains(z)) return true;
  }
  return false;
}

IntervalCase classify_interval_case(double c) {
  const auto& cc = critical_constants();
  if (c <= 0.0) return IntervalCase::Convex;
  if (c < cc.c1) return IntervalCase::Split;
  if (c < cc.c2) return IntervalCase::BoundedMax;
  return IntervalCase::Monotone;
}

ShapeRoots shape_roots(double c) {
  const auto& cc = critical_constants();
  if (!(c > 0.0 && c < cc.c2)) {
    throw ContractViolation("f has two negative critical points only for 0 < C < C2");
  }
  const StabilityFunction f(c);
  const auto fzz = [&](double z) { return f.derivatives(z).f_zz; };
  const auto fz = [&](double z) { return f.derivatives(z).f_z; };

  const double zzz_lo = left_bound([&](double z) { return fzz(z) < 0.0; }, "f_zz");
  const double z_fzz = bisect(fzz, zzz_lo, 0.0);
  if (!(fz(z_fzz) < 0.0)) {
    throw CaseClassificationError("f_z at the f_zz root is not negative");
  }
  const double zz_lo = left_bound([&](double z) { return z < z_fzz && fz(z) > 0.0; }, "f_z");
  return {z_fzz, bisect(fz, zz_lo, z_fzz), bisect(fz, z_fzz, 0.0)};
}

IntervalSet stability_interval(double c) {
  const StabilityFunction f(c);
  const auto f_minus_one = [&](double z) { return f(z) - 1.0; };
  const auto f_plus_one = [&](double z) { return f(z) + 1.0; };

  switch (classify_interval_case(c)) {
    case IntervalCase::Convex: {
      // Strictly convex on z < 0 with a single minimum in (0, 1).
      const auto fz = [&](double z) { return f.derivatives(z).f_z; };
      const double min_lo = left_bound([&](double z) { return fz(z) < 0.0; }, "f_z");
      const double z_min = bisect(fz, min_lo, 0.0);
      const double lo = left_bound([&](double z) { return z < z_min && f(z) > 1.0; }, "f = 1");
      return {{{bisect(f_minus_one, lo, z_min), 0.0}}};
    }
    case IntervalCase::Split: {
      // 1 > local min > 0, local max > 1: f = 1 twice and f = -1 once.
      const ShapeRoots roots = shape_roots(c);
      const double lo = left_bound([&](double z) { return f(z) < -1.0; }, "f = -1");
      const double z3 = bisect(f_minus_one, roots.f_z_root_max, roots.f_z_root_min);
      const double z2 = bisect(f_minus_one, lo, roots.f_z_root_max);
      const double z1 = bisect(f_plus_one, lo, z2);
      return {{{z1, z2}, {z3, 0.0}}};
    }
    case IntervalCase::BoundedMax:
    case IntervalCase::Monotone: {
      // f > -1 on the whole right of the f = -1 root.
      const double lo = left_bound([&](double z) { return f(z) < -1.0; }, "f = -1");
      return {{{bisect(f_plus_one, lo, 0.0), 0.0}}};
    }
  }
  throw CaseClassificationError("unreachable interval case");
}

std::pair<double, double> imag_g_roots(double c) {
  if (c == 0.0 || c > 1.25) throw ContractViolation("imag_g has two real roots only for C != 0, C <= 5/4");
  const double a = c * c;
  const double b = 5.0 * (5.0 - 8.0 * c);
  const double k = 40.0 * (6.0 * c - 5.0);
  const double disc = std::max(0.0, 5.0 * (5.0 - 4.0 * c) * (48.0 * c * c - 60.0 * c + 25.0));
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  double r1 = q / a;
  double r2 = k / q;
  if (r1 > r2) std::swap(r1, r2);
  return {r1, r2};
}

bool ImagIntersection::contains(double zeta) const noexcept {
  const double a = std::abs(zeta);
  switch (kind) {
    case Kind::SymmetricInterval:
      return a <= outer;
    case Kind::TwoBandsPlusOrigin:
      return a == 0.0 || (inner <= a && a <= outer);
    case Kind::ThreePoints:
      return a == 0.0 || a == outer;
    case Kind::OriginOnly:
      return a == 0.0;
  }
  return false;
}

std::vector<Interval> ImagIntersection::pieces() const {
  switch (kind) {
    case Kind::SymmetricInterval:
      return {{-outer, outer}};
    case Kind::TwoBandsPlusOrigin:
      return {{-outer, -inner}, {0.0, 0.0}, {inner, outer}};
    case Kind::ThreePoints:
      return {{-outer, -outer}, {0.0, 0.0}, {outer, outer}};
    case Kind::OriginOnly:
      return {{0.0, 0.0}};
  }
  return {};
}

ImagIntersection imag_axis_intersection(double c) {
  using Kind = ImagIntersection::Kind;
  ImagIntersection out;
  if (c == 0.0) {
    out.kind = Kind::SymmetricInterval;
    out.eta_plus = 8.0;
    out.outer = 2.0 * std::sqrt(2.0);
    return out;
  }
  if (c > 1.25) {
    out.kind = Kind::OriginOnly;
    return out;
  }
  if (c == 1.25) {
    // Double root eta = 8.
    out.kind = Kind::ThreePoints;
    out.eta_plus = out.eta_minus = 8.0;
    out.outer = 2.0 * std::sqrt(2.0);
    return out;
  }
  const auto [eta_minus, eta_plus] = imag_g_roots(c);
  out.eta_minus = eta_minus;
  out.eta_plus = eta_plus;
  out.outer = std::sqrt(eta_plus);
  if (c <= 5.0 / 6.0) {
    out.kind = Kind::SymmetricInterval;
  } else {
    out.kind = Kind::TwoBandsPlusOrigin;
    out.inner = std::sqrt(eta_minus);
  }
  return out;
}

}  // namespace twostage
