#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace twostage {

using Complex = std::complex<double>;

/// f and its first three z-derivatives at one point.
template <class T>
struct Derivatives {
  T f;
  T f_z;
  T f_zz;
  T f_zzz;
};

/// Increment polynomial of the two-stage scheme on u' = lambda u:
///   f(z, C) = 1 + z + z^2/2 + z^3/6 + z^4/24 + C z^5/120.
/// C = 0 gives the RK4 quartic, C = 1 the degree-5 Taylor polynomial of e^z.
class StabilityFunction {
 public:
  explicit StabilityFunction(double c) noexcept : c_(c) {}

  double c() const noexcept { return c_; }

  double operator()(double z) const noexcept;
  Complex operator()(Complex z) const noexcept;

  Derivatives<double> derivatives(double z) const noexcept;
  Derivatives<Complex> derivatives(Complex z) const noexcept;

  /// |f(z)| <= 1 and Re z <= 0.
  bool is_abs_stable(Complex z) const noexcept;

 private:
  double c_;
};

Complex eval_f(double c, Complex z) noexcept;
double eval_f(double c, double z) noexcept;
Derivatives<double> eval_f_derivatives(double c, double z) noexcept;
Derivatives<Complex> eval_f_derivatives(double c, Complex z) noexcept;
bool is_abs_stable(double c, Complex z) noexcept;

/// f(z, C) - (z/5) f_z(z, C); independent of C and positive for z <= 0.
double lemma_g(double z) noexcept;

/// C^2 eta^2 + 5(5 - 8C) eta + 40(6C - 5); |f(i zeta)| <= 1 iff eta = zeta^2 satisfies <= 0.
double imag_g(double eta, double c) noexcept;

/// Critical weight constants where the real stability interval changes shape.
///   (z1, C1): f_z = 0 and f = 1, tangency of the local maximum with 1.
///   (z2, C2): f_z = 0 and f_zz = 0, coalescence of the two f_z roots.
struct CriticalConstants {
  double z1;
  double c1;
  double z2;
  double c2;
};

/// Closed-form radicals, verified against their defining identities to 1e-12.
/// Throws InternalConsistencyError if the verification fails.
const CriticalConstants& critical_constants();

/// Bisection with a sign-change bracket; returns the midpoint once the
/// bracket is no wider than tol. Throws CaseClassificationError when
/// fn(lo) and fn(hi) have the same strict sign.
double bisect(const std::function<double(double)>& fn, double lo, double hi, double tol = 1e-12);

struct Interval {
  double lo;
  double hi;

  bool contains(double z) const noexcept { return lo <= z && z <= hi; }
  double width() const noexcept { return hi - lo; }
};

/// Disjoint, sorted closed intervals.
struct IntervalSet {
  std::vector<Interval> intervals;

  bool contains(double z) const noexcept;
  /// Leftmost point of the set.
  double left() const { return intervals.front().lo; }
};

/// Regime of C for the real stability interval.
enum class IntervalCase {
  Convex,       ///< C <= 0: [z*, 0], f(z*) = 1
  Split,        ///< 0 < C < C1: [z1*, z2*] U [z3*, 0]
  BoundedMax,   ///< C1 <= C < C2: [z*, 0], f(z*) = -1
  Monotone,     ///< C >= C2: [z*, 0], f(z*) = -1
};

IntervalCase classify_interval_case(double c);

/// I(C) = { z <= 0 : -1 <= f(z, C) <= 1 }, endpoints to 1e-12.
IntervalSet stability_interval(double c);

/// Helper roots from the case analysis, exposed for verification.
struct ShapeRoots {
  double f_zz_root;     ///< unique negative root of f_zz (C > 0)
  double f_z_root_max;  ///< local maximum of f (C in (0, C2))
  double f_z_root_min;  ///< local minimum of f (C in (0, C2))
};
ShapeRoots shape_roots(double c);

/// Intersection of the region |f| <= 1 with the imaginary axis, in zeta where z = i zeta.
struct ImagIntersection {
  enum class Kind {
    SymmetricInterval,   ///< [-outer, outer]
    TwoBandsPlusOrigin,  ///< [-outer, -inner] U [inner, outer] U {0}
    ThreePoints,         ///< {-outer, 0, outer}
    OriginOnly,          ///< {0}
  };

  Kind kind = Kind::OriginOnly;
  double outer = 0.0;  ///< sqrt(eta+)
  double inner = 0.0;  ///< sqrt(eta-), only for TwoBandsPlusOrigin
  double eta_plus = 0.0;
  double eta_minus = 0.0;

  bool contains(double zeta) const noexcept;
  /// Closed pieces in increasing order; points are degenerate intervals.
  std::vector<Interval> pieces() const;
};

/// Roots of imag_g(., C) = 0 by the cancellation-free quadratic formula,
/// ordered eta_minus <= eta_plus. Requires C != 0 and C <= 5/4.
std::pair<double, double> imag_g_roots(double c);

ImagIntersection imag_axis_intersection(double c);

/// Rectangular sampling grid in the complex plane, nx x ny nodes.
struct GridSpec {
  double re_min = -7.0;
  double re_max = 2.0;
  double im_min = -5.0;
  double im_max = 5.0;
  std::size_t nx = 1401;
  std::size_t ny = 1001;
};

/// Points of the curve |f(z, C)| = 1 extracted by marching squares.
struct BoundaryLocus {
  struct Segment {
    std::size_t a;
    std::size_t b;
  };

  double c = 0.0;
  GridSpec grid;
  std::vector<Complex> points;    ///< one per crossed grid edge, row-major edge order
  std::vector<Segment> segments;  ///< cell-wise contour pieces, indices into points

  /// Points with Re z <= 0, i.e. the boundary of R_A(C) proper.
  std::vector<Complex> left_half_points() const;
};

inline constexpr double kLocusTolerance = 1e-9;

/// Marching squares on |f| - 1 with each edge crossing polished by a
/// safeguarded Newton iteration along the edge to ||f| - 1| <= 1e-9.
BoundaryLocus boundary_locus(double c, const GridSpec& grid = {});

}  // namespace twostage
