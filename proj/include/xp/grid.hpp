#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "xp/error.hpp"
#include "xp/testfn.hpp"

namespace xp {

struct Box {
  Point lo{0.0, 0.0, 0.0};
  Point hi{0.0, 0.0, 0.0};
};

/// Tensor grid over an axis-aligned box; points are ordered with the last
/// active axis varying fastest.
struct GridSpec {
  int n = 1;
  Box box;
  int points_per_axis = 201;
  int refinement_levels = 3;

  double spacing(int axis) const { return (box.hi[axis] - box.lo[axis]) / (points_per_axis - 1); }

  std::size_t total_points() const {
    std::size_t t = 1;
    for (int i = 0; i < n; ++i) t *= static_cast<std::size_t>(points_per_axis);
    return t;
  }

  Point point(std::size_t flat) const {
    Point x{0.0, 0.0, 0.0};
    const std::size_t N = static_cast<std::size_t>(points_per_axis);
    for (int axis = n - 1; axis >= 0; --axis) {
      std::size_t i = flat % N;
      flat /= N;
      x[axis] = coordinate(axis, i);
    }
    return x;
  }

  double coordinate(int axis, std::size_t i) const {
    if (static_cast<int>(i) == points_per_axis - 1) return box.hi[axis];
    return box.lo[axis] + static_cast<double>(i) * spacing(axis);
  }
};

inline int default_points_per_axis(int n) {
  switch (n) {
    case 1: return 201;
    case 2: return 61;
    default: return 17;
  }
}

/// Ratio of the grid half-width to the support radius.
inline constexpr double kGridMargin = 1.05;

/// Box centred on the support ball with half-width 1.05 R. Dilating or
/// translating u maps this grid exactly onto the transformed one.
inline GridSpec default_grid(const TestFunction& u, int points_per_axis = 0, int refinement_levels = 3) {
  GridSpec g;
  g.n = u.dim();
  g.points_per_axis = points_per_axis > 0 ? points_per_axis : default_points_per_axis(u.dim());
  g.refinement_levels = refinement_levels;
  const double half = kGridMargin * u.support_radius();
  for (int i = 0; i < g.n; ++i) {
    g.box.lo[i] = u.support_center()[i] - half;
    g.box.hi[i] = u.support_center()[i] + half;
  }
  return g;
}

/// Throws BadParams unless the grid is usable for u.
inline void validate_grid(const GridSpec& g, const TestFunction& u) {
  if (g.n != u.dim()) throw Error(ErrorCode::BadParams, "grid dimension does not match function");
  if (g.points_per_axis < 3) throw Error(ErrorCode::BadParams, "points_per_axis must be >= 3");
  if (g.refinement_levels < 0) throw Error(ErrorCode::BadParams, "refinement_levels must be >= 0");
  for (int i = 0; i < g.n; ++i) {
    const double c = u.support_center()[i];
    const double r = u.support_radius();
    if (!(g.box.lo[i] < c - r) || !(g.box.hi[i] > c + r))
      throw Error(ErrorCode::BadParams, "grid box must strictly contain the support ball");
  }
}

inline std::vector<Point> grid_points(const GridSpec& g) {
  std::vector<Point> pts(g.total_points());
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = g.point(i);
  return pts;
}

}  // namespace xp
