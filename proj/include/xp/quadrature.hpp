#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "xp/grid.hpp"
#include "xp/parallel.hpp"

namespace xp {

struct Integral {
  double value = 0.0;
  double error = 0.0;
};

namespace detail {

inline std::vector<double> simpson_weights(int points, double h) {
  std::vector<double> w(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    double c = (i == 0 || i == points - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    w[i] = c * h / 3.0;
  }
  return w;
}

// Sums f over a tensor grid with product weights. Values are computed in
// parallel into per-point slots and summed serially in grid order.
template <class F>
double tensor_sum(F&& f, const GridSpec& g, const std::vector<std::vector<double>>& weights) {
  const std::size_t total = g.total_points();
  std::vector<double> terms(total);
  const std::size_t N = static_cast<std::size_t>(g.points_per_axis);
  parallel_for(total, [&](std::size_t flat) {
    double w = 1.0;
    std::size_t rest = flat;
    for (int axis = g.n - 1; axis >= 0; --axis) {
      w *= weights[axis][rest % N];
      rest /= N;
    }
    terms[flat] = w == 0.0 ? 0.0 : w * f(g.point(flat));
  });
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

}  // namespace detail

/// Composite tensor-product Simpson rule over g.box with an odd number of
/// points per axis (an even count is bumped by one).
template <class F>
double simpson(F&& f, GridSpec g) {
  if (g.points_per_axis % 2 == 0) ++g.points_per_axis;
  std::vector<std::vector<double>> w;
  for (int axis = 0; axis < g.n; ++axis) w.push_back(detail::simpson_weights(g.points_per_axis, g.spacing(axis)));
  return detail::tensor_sum(f, g, w);
}

/// Simpson on the base grid and on the grid with halved spacing. The value is
/// the fine-grid result; the error is the difference between the two levels
/// plus a summation rounding floor.
template <class F>
Integral simpson_two_level(F&& f, GridSpec g) {
  if (g.points_per_axis % 2 == 0) ++g.points_per_axis;
  const double coarse = simpson(f, g);
  GridSpec fine = g;
  fine.points_per_axis = 2 * g.points_per_axis - 1;
  const double fine_value = simpson(f, fine);
  const double terms = std::pow(static_cast<double>(fine.points_per_axis), g.n);
  const double rounding = terms * std::numeric_limits<double>::epsilon() * std::abs(fine_value);
  return {fine_value, std::abs(fine_value - coarse) + rounding};
}

/// Composite midpoint rule with `cells` cells per axis.
template <class F>
double midpoint(F&& f, const Box& box, int n, int cells) {
  GridSpec g;
  g.n = n;
  g.points_per_axis = cells;
  std::vector<std::vector<double>> w;
  for (int axis = 0; axis < n; ++axis) {
    const double h = (box.hi[axis] - box.lo[axis]) / cells;
    g.box.lo[axis] = box.lo[axis] + 0.5 * h;
    g.box.hi[axis] = box.hi[axis] - 0.5 * h;
    w.emplace_back(static_cast<std::size_t>(cells), h);
  }
  return detail::tensor_sum(f, g, w);
}

/// Midpoint with `cells` and `cells / 2` cells, Richardson-extrapolated for a
/// second-order rule.
template <class F>
Integral midpoint_richardson(F&& f, const Box& box, int n, int cells) {
  const double fine = midpoint(f, box, n, cells);
  const double coarse = midpoint(f, box, n, cells / 2);
  return {(4.0 * fine - coarse) / 3.0, std::abs(fine - coarse) / 3.0};
}

}  // namespace xp
