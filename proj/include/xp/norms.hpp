#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "xp/error.hpp"
#include "xp/grid.hpp"
#include "xp/indices.hpp"
#include "xp/parallel.hpp"
#include "xp/quadrature.hpp"
#include "xp/rational.hpp"
#include "xp/testfn.hpp"

namespace xp {

enum class Method { Quadrature, GridSup, PairSup, Oracle };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::Quadrature: return "quadrature";
    case Method::GridSup: return "grid_sup";
    case Method::PairSup: return "pair_sup";
    case Method::Oracle: return "oracle";
  }
  return "?";
}

struct NormValue {
  double value = 0.0;
  double error = 0.0;
  Method method = Method::Quadrature;
};

/// Pairs closer than this are skipped by the Hölder search.
inline constexpr double kMinPairDistance = 1e-9;

/// Relative growth in the last refinement round above which an estimate is
/// considered unconverged.
inline constexpr double kStabilityTolerance = 0.1;

// ---------------------------------------------------------------------------
// Generic engines over scalar fields. They are used both for test functions
// (through their jets) and directly for reference integrands in tests.

struct SupResult {
  double value = 0.0;
  double error = 0.0;
  Point argmax{0, 0, 0};
  std::vector<double> history;  // running max after the base grid and each round
};

struct PairResult {
  double value = 0.0;
  double error = 0.0;
  Point x{0, 0, 0};
  Point y{0, 0, 0};
  std::vector<double> history;
};

namespace detail {

inline double distance(const Point& a, const Point& b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

inline double holder_quotient(double fa, double fb, double d, double p2) {
  return std::abs(fa - fb) / (p2 == 1.0 ? d : std::pow(d, p2));
}

// 9^n points x + t * h / 4^round, t in {-4..4} per axis.
inline std::vector<Point> local_points(const Point& x, const GridSpec& g, int round) {
  double shrink = std::pow(4.0, -round);
  std::vector<Point> pts;
  std::size_t count = 1;
  for (int i = 0; i < g.n; ++i) count *= 9;
  pts.reserve(count);
  for (std::size_t flat = 0; flat < count; ++flat) {
    Point p = x;
    std::size_t rest = flat;
    for (int axis = g.n - 1; axis >= 0; --axis) {
      int t = static_cast<int>(rest % 9) - 4;
      rest /= 9;
      p[axis] = x[axis] + t * g.spacing(axis) * shrink;
    }
    pts.push_back(p);
  }
  return pts;
}

struct BestPair {
  double q = -1.0;
  std::size_t i = 0, j = 0;
};

// Exhaustive maximum of the Hölder quotient over all pairs i < j. Rows run in
// parallel; ties keep the lexicographically smallest (i, j).
inline BestPair all_pairs(const std::vector<Point>& pts, const std::vector<double>& f, int n, double p2) {
  const std::size_t m = pts.size();
  std::vector<BestPair> rows(m);
  parallel_for(m, [&](std::size_t i) {
    BestPair b;
    b.i = i;
    for (std::size_t j = i + 1; j < m; ++j) {
      double d = distance(pts[i], pts[j], n);
      if (d < kMinPairDistance) continue;
      double q = holder_quotient(f[i], f[j], d, p2);
      if (q > b.q) {
        b.q = q;
        b.j = j;
      }
    }
    rows[i] = b;
  }, 8);
  BestPair best;
  for (const auto& r : rows)
    if (r.q > best.q) best = r;
  return best;
}

template <class Field>
std::vector<double> sample(Field&& f, const std::vector<Point>& pts) {
  std::vector<double> v(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { v[i] = f(pts[i]); });
  return v;
}

inline double last_growth(const std::vector<double>& history) {
  if (history.size() < 2) return 0.0;
  return history.back() - history[history.size() - 2];
}

}  // namespace detail

/// Grid maximum of |f| followed by g.refinement_levels rounds of local
/// refinement around the running maximizer.
template <class Field>
SupResult grid_sup(Field&& f, const GridSpec& g) {
  const auto pts = grid_points(g);
  const auto v = detail::sample(f, pts);
  SupResult r;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > r.value) {
      r.value = std::abs(v[i]);
      r.argmax = pts[i];
    }
  if (r.value == 0.0 && !pts.empty()) r.argmax = pts[0];
  r.history.push_back(r.value);
  for (int round = 1; round <= g.refinement_levels; ++round) {
    const auto local = detail::local_points(r.argmax, g, round);
    const auto lv = detail::sample(f, local);
    for (std::size_t i = 0; i < lv.size(); ++i)
      if (std::abs(lv[i]) > r.value) {
        r.value = std::abs(lv[i]);
        r.argmax = local[i];
      }
    r.history.push_back(r.value);
  }
  r.error = detail::last_growth(r.history);
  return r;
}

/// sup over pairs of |f(x) - f(y)| / |x - y|^p2: all pairs of the grid, then
/// g.refinement_levels rounds over the union of local neighbourhoods of the
/// best pair. The running value never decreases.
template <class Field>
PairResult pair_sup(Field&& f, const GridSpec& g, double p2) {
  const auto pts = grid_points(g);
  const auto v = detail::sample(f, pts);
  PairResult r;
  auto best = detail::all_pairs(pts, v, g.n, p2);
  if (best.q < 0.0) throw Error(ErrorCode::BadParams, "grid has no admissible pairs");
  r.value = best.q;
  r.x = pts[best.i];
  r.y = pts[best.j];
  r.history.push_back(r.value);
  for (int round = 1; round <= g.refinement_levels; ++round) {
    auto local = detail::local_points(r.x, g, round);
    auto around_y = detail::local_points(r.y, g, round);
    local.insert(local.end(), around_y.begin(), around_y.end());
    const auto lv = detail::sample(f, local);
    auto lb = detail::all_pairs(local, lv, g.n, p2);
    if (lb.q > r.value) {
      r.value = lb.q;
      r.x = local[lb.i];
      r.y = local[lb.j];
    }
    r.history.push_back(r.value);
  }
  r.error = detail::last_growth(r.history);
  return r;
}

/// Exhaustive pair maximum with no refinement; errors are bounded from the
/// grid spacing only.
template <class Field>
NormValue brute_force_pairs(Field&& f, GridSpec g, double p2) {
  if (g.total_points() > 100000) throw Error(ErrorCode::OracleTooLarge, "brute-force oracle limited to 1e5 points");
  g.refinement_levels = 0;
  auto r = pair_sup(f, g, p2);
  double h = 0.0;
  for (int i = 0; i < g.n; ++i) h = std::max(h, g.spacing(i));
  double width = 0.0;
  for (int i = 0; i < g.n; ++i) width = std::max(width, g.box.hi[i] - g.box.lo[i]);
  return {r.value, r.value * h / width, Method::Oracle};
}

// ---------------------------------------------------------------------------
// Norms of test functions.

namespace detail {

inline void require_order(int order) {
  if (order < 0 || order > kDefaultMaxJetOrder)
    throw Error(ErrorCode::JetOrderExceeded,
                "derivative order " + std::to_string(order) + " exceeds maximum " + std::to_string(kDefaultMaxJetOrder));
}

/// |D^l u|_inf(x) = max over |a| = l of |D^a u(x)|.
inline auto top_order_field(const TestFunction& u, int l) {
  return [&u, l](const Point& x) { return u.jet(x, l).max_abs(l); };
}

}  // namespace detail

inline NormValue lp_norm(const TestFunction& u, double p, int l, const GridSpec& grid) {
  if (!(p >= 1.0) || std::isinf(p)) throw Error(ErrorCode::BadParams, "lp_norm needs finite p >= 1");
  detail::require_order(l);
  validate_grid(grid, u);
  auto field = detail::top_order_field(u, l);
  auto integrand = [&](const Point& x) {
    double a = field(x);
    return p == 1.0 ? a : std::pow(a, p);
  };
  Integral I = simpson_two_level(integrand, grid);
  const double value = std::pow(std::max(I.value, 0.0), 1.0 / p);
  const double lo = std::pow(std::max(I.value - I.error, 0.0), 1.0 / p);
  const double hi = std::pow(I.value + I.error, 1.0 / p);
  const double error = std::max(value - lo, hi - value);
  if (error > kStabilityTolerance * value)
    throw Error(ErrorCode::GridTooCoarse, "quadrature levels disagree by more than 10%");
  return {value, error, Method::Quadrature};
}

inline NormValue sup_norm(const TestFunction& u, int l, const GridSpec& grid) {
  detail::require_order(l);
  validate_grid(grid, u);
  auto r = grid_sup(detail::top_order_field(u, l), grid);
  return {r.value, r.error, Method::GridSup};
}

/// Pair search for one multi-index; exposed for convergence studies.
inline PairResult holder_pair_search(const TestFunction& u, const MultiIndex& alpha, double p2, const GridSpec& grid) {
  const int order = total_order(alpha);
  detail::require_order(order);
  validate_grid(grid, u);
  return pair_sup([&](const Point& x) { return u.jet(x, order)[alpha]; }, grid, p2);
}

/// sum over |a| = l + p1 of sup_{x != y} |D^a u(x) - D^a u(y)| / |x - y|^p2.
inline NormValue holder_seminorm(const TestFunction& u, int l, const HolderSignature& sig, const GridSpec& grid) {
  const int order = l + sig.p1;
  detail::require_order(order);
  validate_grid(grid, u);
  const double p2 = sig.p2.to_double();
  const auto& basis = MonomialBasis::get(u.dim(), order);
  NormValue total{0.0, 0.0, Method::PairSup};
  for (int i = basis.first_of_order(order); i < basis.first_of_order(order) + basis.count_of_order(order); ++i) {
    auto r = holder_pair_search(u, basis[i], p2, grid);
    if (grid.refinement_levels > 0 && r.error > kStabilityTolerance * r.value)
      throw Error(ErrorCode::GridTooCoarse, "Hölder pair search did not stabilise");
    total.value += r.value;
    total.error += r.error;
  }
  return total;
}

/// Exhaustive all-pairs Hölder quotient maximum of D^a u summed over
/// |a| = order, on the exact grid.
inline NormValue brute_force_holder(const TestFunction& u, int order, const Rational& p2, const GridSpec& grid) {
  detail::require_order(order);
  validate_grid(grid, u);
  if (grid.total_points() > 100000) throw Error(ErrorCode::OracleTooLarge, "brute-force oracle limited to 1e5 points");
  const auto& basis = MonomialBasis::get(u.dim(), order);
  NormValue total{0.0, 0.0, Method::Oracle};
  for (int i = basis.first_of_order(order); i < basis.first_of_order(order) + basis.count_of_order(order); ++i) {
    const MultiIndex alpha = basis[i];
    auto r = brute_force_pairs([&](const Point& x) { return u.jet(x, order)[alpha]; }, grid, p2.to_double());
    total.value += r.value;
    total.error += r.error;
  }
  return total;
}

struct NormRequest {
  TestFunction u;
  Rational s;
  int l = 0;
  GridSpec grid;
  bool seminorm_only = false;
};

inline NormValue xnorm(const NormRequest& req) {
  const int n = req.u.dim();
  if (req.s > Rational(1)) throw Error(ErrorCode::BadParams, "index s must be <= 1");
  if (req.s.sign() > 0) return lp_norm(req.u, req.s.reciprocal().to_double(), req.l, req.grid);
  if (req.s.is_zero()) return sup_norm(req.u, req.l, req.grid);
  const auto sig = holder_signature(req.s, n);
  detail::require_order(req.l + sig.p1);
  NormValue semi = holder_seminorm(req.u, req.l, sig, req.grid);
  if (req.seminorm_only) return semi;
  NormValue top{0.0, 0.0, Method::PairSup};
  for (int j = 0; j <= sig.p1; ++j) {
    NormValue s = sup_norm(req.u, req.l + j, req.grid);
    top.value = std::max(top.value, s.value);
    top.error += s.error;
  }
  return {top.value + semi.value, top.error + semi.error, Method::PairSup};
}

/// rhs = ||Du||_{X^s}; lhs = order >= 1 part of ||u||_{X^{s - 1/n}}.
inline std::pair<NormValue, NormValue> check_holder_equality(const TestFunction& u, const Rational& s, int n,
                                                              const GridSpec& grid) {
  if (s.sign() >= 0) throw Error(ErrorCode::NonHolderIndex, "Hölder equality needs s < 0");
  if (u.dim() != n) throw Error(ErrorCode::BadParams, "dimension mismatch");
  NormValue rhs = xnorm({u, s, 1, grid, false});
  const auto star = holder_signature(sobolev_sharp(s, n), n);
  NormValue top{0.0, 0.0, Method::PairSup};
  for (int j = 1; j <= star.p1; ++j) {
    NormValue v = sup_norm(u, j, grid);
    top.value = std::max(top.value, v.value);
    top.error += v.error;
  }
  NormValue semi = holder_seminorm(u, 0, star, grid);
  NormValue lhs{top.value + semi.value, top.error + semi.error, Method::PairSup};
  return {lhs, rhs};
}

// ---------------------------------------------------------------------------
// Independent reference evaluations (dense, no refinement).

/// L^p norm of |D^l u|_inf by a Richardson-extrapolated midpoint rule with
/// `cells` cells per axis.
inline NormValue lp_norm_oracle(const TestFunction& u, double p, int l, const Box& box, int cells) {
  detail::require_order(l);
  auto field = detail::top_order_field(u, l);
  auto integrand = [&](const Point& x) { return std::pow(field(x), p); };
  Integral I = midpoint_richardson(integrand, box, u.dim(), cells);
  const double value = std::pow(std::max(I.value, 0.0), 1.0 / p);
  const double lo = std::pow(std::max(I.value - I.error, 0.0), 1.0 / p);
  const double hi = std::pow(I.value + I.error, 1.0 / p);
  return {value, std::max(value - lo, hi - value), Method::Oracle};
}

/// Dense-grid maximum of |D^l u|_inf without refinement.
inline NormValue sup_norm_oracle(const TestFunction& u, int l, GridSpec grid) {
  detail::require_order(l);
  grid.refinement_levels = 0;
  auto r = grid_sup(detail::top_order_field(u, l), grid);
  double h = 0.0;
  for (int i = 0; i < grid.n; ++i) h = std::max(h, grid.spacing(i));
  double width = 0.0;
  for (int i = 0; i < grid.n; ++i) width = std::max(width, grid.box.hi[i] - grid.box.lo[i]);
  return {r.value, r.value * (h / width) * (h / width), Method::Oracle};
}

inline std::string csv_header_norm() { return "function,dsl,s,l,value,error,method"; }

inline std::string csv_row(const std::string& function, const std::string& dsl, const Rational& s, int l,
                           const NormValue& v) {
  std::ostringstream os;
  os.precision(17);
  os << function << ",\"" << dsl << "\"," << s.str() << ',' << l << ',' << v.value << ',' << v.error << ','
     << to_string(v.method);
  return os.str();
}

}  // namespace xp
