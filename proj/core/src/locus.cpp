#include <cmath>
#include <cstdint>
#include <limits>

#include "twostage/errors.hpp"
#include "twostage/stability.hpp"

namespace twostage {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// Finds s in [0, 1] with |f(a + s (b - a))| = 1, given that the level
// function changes sign across the edge. Newton on s, falling back to
// bisection whenever the Newton iterate leaves the current bracket.
Complex polish_edge(const StabilityFunction& f, Complex a, Complex b, double h_a, double h_b) {
  const Complex dir = b - a;
  const auto level = [&](double s, double* slope) {
    const Complex z = a + s * dir;
    const auto d = f.derivatives(z);
    const double mag = std::abs(d.f);
    if (slope) *slope = mag > 0.0 ? std::real(std::conj(d.f) * d.f_z * dir) / mag : 0.0;
    return mag - 1.0;
  };

  double lo = 0.0, hi = 1.0;
  const bool lo_negative = h_a < 0.0;
  double s = h_a / (h_a - h_b);
  double best_s = s;
  double best_h = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < 100; ++iter) {
    double slope = 0.0;
    const double h = level(s, &slope);
    if (std::abs(h) < std::abs(best_h)) {
      best_h = h;
      best_s = s;
    }
    if (std::abs(h) <= 1e-15) break;
    if ((h < 0.0) == lo_negative) {
      lo = s;
    } else {
      hi = s;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon()) break;
    double next = slope != 0.0 ? s - h / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    s = next;
  }
  if (!(std::abs(best_h) <= kLocusTolerance)) {
    throw InternalConsistencyError("locus point could not be polished to tolerance");
  }
  return a + best_s * dir;
}

}  // namespace

std::vector<Complex> BoundaryLocus::left_half_points() const {
  std::vector<Complex> out;
  for (const auto& z : points) {
    if (z.real() <= 0.0) out.push_back(z);
  }
  return out;
}

BoundaryLocus boundary_locus(double c, const GridSpec& grid) {
  if (grid.nx < 2 || grid.ny < 2 || !(grid.re_max > grid.re_min) || !(grid.im_max > grid.im_min)) {
    throw ContractViolation("locus grid needs at least 2x2 nodes and a non-empty box");
  }
  if (grid.re_min > -7.0 || grid.re_max < 2.0 || grid.im_min > -5.0 || grid.im_max < 5.0) {
    throw ContractViolation("locus grid must cover [-7, 2] x [-5, 5]");
  }
  const std::size_t nx = grid.nx;
  const std::size_t ny = grid.ny;
  const double dx = (grid.re_max - grid.re_min) / static_cast<double>(nx - 1);
  const double dy = (grid.im_max - grid.im_min) / static_cast<double>(ny - 1);
  const auto node = [&](std::size_t i, std::size_t j) {
    return Complex(grid.re_min + static_cast<double>(i) * dx,
                   grid.im_min + static_cast<double>(j) * dy);
  };

  const StabilityFunction f(c);
  std::vector<double> level(nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) level[j * nx + i] = std::abs(f(node(i, j))) - 1.0;
  }
  const auto inside = [&](std::size_t i, std::size_t j) { return level[j * nx + i] < 0.0; };

  BoundaryLocus locus;
  locus.c = c;
  locus.grid = grid;
  std::vector<std::size_t> h_edge((nx - 1) * ny, kNone);  // (i,j)-(i+1,j)
  std::vector<std::size_t> v_edge(nx * (ny - 1), kNone);  // (i,j)-(i,j+1)

  const auto add_point = [&](std::size_t i0, std::size_t j0, std::size_t i1, std::size_t j1) {
    locus.points.push_back(polish_edge(f, node(i0, j0), node(i1, j1), level[j0 * nx + i0],
                                       level[j1 * nx + i1]));
    return locus.points.size() - 1;
  };

  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      if (inside(i, j) != inside(i + 1, j)) h_edge[j * (nx - 1) + i] = add_point(i, j, i + 1, j);
    }
    if (j + 1 == ny) break;
    for (std::size_t i = 0; i < nx; ++i) {
      if (inside(i, j) != inside(i, j + 1)) v_edge[j * nx + i] = add_point(i, j, i, j + 1);
    }
  }

  for (std::size_t j = 0; j + 1 < ny; ++j) {
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      const std::size_t bottom = h_edge[j * (nx - 1) + i];
      const std::size_t top = h_edge[(j + 1) * (nx - 1) + i];
      const std::size_t left = v_edge[j * nx + i];
      const std::size_t right = v_edge[j * nx + i + 1];
      std::size_t crossed[4];
      std::size_t n = 0;
      for (std::size_t e : {bottom, right, top, left}) {
        if (e != kNone) crossed[n++] = e;
      }
      if (n == 2) {
        locus.segments.push_back({crossed[0], crossed[1]});
      } else if (n == 4) {
        // Saddle: resolve with the cell centre.
        const Complex centre = node(i, j) + Complex(0.5 * dx, 0.5 * dy);
        const bool centre_inside = std::abs(f(centre)) < 1.0;
        if (centre_inside == inside(i, j)) {
          locus.segments.push_back({bottom, right});
          locus.segments.push_back({top, left});
        } else {
          locus.segments.push_back({left, bottom});
          locus.segments.push_back({right, top});
        }
      }
    }
  }

  if (locus.points.empty()) {
    throw InternalConsistencyError("empty stability boundary locus (z = 0 is always on it)");
  }
  return locus;
}

}  // namespace twostage
