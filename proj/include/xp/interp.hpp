#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "xp/error.hpp"
#include "xp/grid.hpp"
#include "xp/indices.hpp"
#include "xp/norms.hpp"
#include "xp/parallel.hpp"
#include "xp/rational.hpp"
#include "xp/testfn.hpp"

namespace xp {

/// lambda < mu < nu on the 1/p scale, mu = eta lambda + (1 - eta) nu.
struct InterpolationTriple {
  Rational lambda, mu, nu, eta;
  int n = 1;
};

inline InterpolationTriple make_triple(const Rational& lambda, const Rational& mu, const Rational& nu, int n) {
  require_dimension(n);
  if (!(lambda < mu && mu < nu)) throw Error(ErrorCode::BadParams, "triple needs lambda < mu < nu");
  if (nu > Rational(1)) throw Error(ErrorCode::BadParams, "indices must be <= 1");
  return {lambda, mu, nu, (nu - mu) / (nu - lambda), n};
}

enum class CaseTag { Lebesgue, HolderSame, HolderStep, CkStep, Mixed, Composite, Degenerate };

inline const char* to_string(CaseTag t) {
  switch (t) {
    case CaseTag::Lebesgue: return "Lebesgue";
    case CaseTag::HolderSame: return "HolderSame";
    case CaseTag::HolderStep: return "HolderStep";
    case CaseTag::CkStep: return "CkStep";
    case CaseTag::Mixed: return "Mixed";
    case CaseTag::Composite: return "Composite";
    case CaseTag::Degenerate: return "Degenerate";
  }
  return "?";
}

namespace detail {
// On the Hölder side the index 0 means C^{0,0} = L^inf, not C^{-1,1}.
inline HolderSignature case_signature(const Rational& s, int n) {
  if (s.is_zero()) return {0, Rational(0)};
  return holder_signature(s, n);
}

inline bool all_integer_multiples(const InterpolationTriple& t) {
  const Rational n(t.n);
  return (t.lambda * n).is_integer() && (t.mu * n).is_integer() && (t.nu * n).is_integer();
}
}  // namespace detail

inline CaseTag classify_triple(const InterpolationTriple& t) {
  if (t.lambda == t.mu && t.mu == t.nu) return CaseTag::Degenerate;
  if (t.lambda.sign() >= 0) return CaseTag::Lebesgue;
  if (t.nu.sign() <= 0) {
    const auto l = detail::case_signature(t.lambda, t.n);
    const auto m = detail::case_signature(t.mu, t.n);
    const auto v = detail::case_signature(t.nu, t.n);
    if (l.p1 == v.p1) return CaseTag::HolderSame;
    if (l.p1 - v.p1 == 1 && m.p1 == v.p1 && m.p2 == Rational(1)) return CaseTag::HolderStep;
    if (detail::all_integer_multiples(t)) return CaseTag::CkStep;
    return CaseTag::Composite;
  }
  if (t.mu.is_zero() && t.lambda >= Rational(-1, t.n) && t.nu <= Rational(1)) return CaseTag::Mixed;
  return CaseTag::Composite;
}

/// theta_1 with mu_1 = theta_1 mu_0 + (1 - theta_1) mu_3, given
/// mu_1 = eta_1 mu_0 + (1 - eta_1) mu_2 and mu_2 = eta_2 mu_1 + (1 - eta_2) mu_3.
inline Rational reiteration_theta(const Rational& eta1, const Rational& eta2) {
  if (eta1.sign() <= 0 || eta1 > Rational(1) || eta2.sign() <= 0 || eta2 > Rational(1))
    throw Error(ErrorCode::BadParams, "reiteration weights must lie in (0, 1]");
  return eta1 / (Rational(1) - eta2 + eta1 * eta2);
}

/// a^eta b^(1-eta) + c^eta d^(1-eta) <= (a + c)^eta (b + d)^(1-eta).
inline bool sum_interpolation_check(double a, double b, double c, double d, double eta) {
  if (!(a > 0 && b > 0 && c > 0 && d > 0)) throw Error(ErrorCode::BadParams, "sum interpolation needs positive inputs");
  if (!(eta > 0 && eta < 1)) throw Error(ErrorCode::BadParams, "eta must lie in (0, 1)");
  const double lhs = std::pow(a, eta) * std::pow(b, 1 - eta) + std::pow(c, eta) * std::pow(d, 1 - eta);
  const double rhs = std::pow(a + c, eta) * std::pow(b + d, 1 - eta);
  // Absolute slack, widened by rounding for large magnitudes.
  return lhs <= rhs + 1e-14 * std::max(1.0, rhs);
}

inline double holder_step_constant(const Rational& lambda2, const Rational& eta) {
  if (lambda2.sign() <= 0 || lambda2 > Rational(1)) throw Error(ErrorCode::BadParams, "lambda2 must lie in (0, 1]");
  if (eta.sign() <= 0 || eta >= Rational(1)) throw Error(ErrorCode::BadParams, "eta must lie in (0, 1)");
  return std::pow(1.0 + 1.0 / lambda2.to_double(), 1.0 - eta.to_double());
}

/// (1/lambda2) * int_0^1 (1 - s)^p s^(n/lambda2 - 1) ds, lambda2 = -n lambda, p = 1/nu.
inline double mixed_case_integral(const Rational& lambda, const Rational& nu, int n) {
  require_dimension(n);
  if (lambda.sign() >= 0 || nu.sign() <= 0 || nu > Rational(1))
    throw Error(ErrorCode::BadParams, "mixed case needs lambda < 0 < nu <= 1");
  const double lambda2 = -(Rational(n) * lambda).to_double();
  const double a = n / lambda2;
  if (!(a > 0)) throw Error(ErrorCode::IntegralDiverges, "exponent n/lambda2 must be positive");
  const double p = nu.reciprocal().to_double();
  boost::math::quadrature::tanh_sinh<double> q;
  const double I = q.integrate([&](double s) { return std::pow(1.0 - s, p) * std::pow(s, a - 1.0); }, 0.0, 1.0);
  return I / lambda2;
}

/// Surface measure of the unit sphere in R^n.
inline double sphere_measure(int n) {
  switch (n) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
  }
  throw Error(ErrorCode::BadParams, "dimension must be 1, 2 or 3");
}

/// Explicit constant of the mixed case: from ||u||_p^p >= sigma_n J a^(p + n/lambda2) b^(-n/lambda2)
/// one gets sup|u| <= (sigma_n J)^(-nu (1 - eta)) [u]^eta ||u||_p^(1 - eta).
inline double mixed_case_constant(const InterpolationTriple& t) {
  const double J = mixed_case_integral(t.lambda, t.nu, t.n);
  return std::pow(sphere_measure(t.n) * J, -t.nu.to_double() * (1.0 - t.eta.to_double()));
}

/// Constant of a directly checkable case, or nullopt when only an empirical
/// constant is available. `order_shift` is the number of derivatives already
/// applied to u (the step case sums over more components then).
inline std::optional<double> case_constant(const InterpolationTriple& t, bool seminorm_only, int order_shift = 0) {
  switch (classify_triple(t)) {
    case CaseTag::Lebesgue: return 1.0;
    case CaseTag::HolderSame:
      if (t.nu.is_zero()) return std::nullopt;
      return 1.0;
    case CaseTag::HolderStep: {
      if (t.nu.is_zero()) return std::nullopt;
      const auto l = detail::case_signature(t.lambda, t.n);
      const auto v = detail::case_signature(t.nu, t.n);
      double k = holder_step_constant(l.p2, t.eta);
      const int order = v.p1 + order_shift;
      if (order > 0) k *= std::pow(std::min(t.n, order + 1), t.eta.to_double());
      (void)seminorm_only;  // K >= 1, so the sum lemma carries it to the full norm
      return k;
    }
    case CaseTag::Mixed: return mixed_case_constant(t);
    default: return std::nullopt;
  }
}

struct InterpCheck {
  CaseTag tag = CaseTag::Composite;
  double ratio = 0.0;
  std::optional<double> bound;
  double mu_norm = 0.0, lambda_norm = 0.0, nu_norm = 0.0;
  double relative_error = 0.0;  // combined first-order error of the ratio
};

/// Norm of u at index s, where index 0 is L^inf in both modes.
inline NormValue index_norm(const TestFunction& u, const Rational& s, int l, const GridSpec& grid, bool seminorm_only) {
  return xnorm({u, s, l, grid, seminorm_only});
}

inline InterpCheck check_interpolation(const InterpolationTriple& t, const TestFunction& u, const GridSpec& grid,
                                       bool seminorm_only, int l = 0) {
  InterpCheck r;
  r.tag = classify_triple(t);
  const NormValue m = index_norm(u, t.mu, l, grid, seminorm_only);
  const NormValue a = index_norm(u, t.lambda, l, grid, seminorm_only);
  const NormValue b = index_norm(u, t.nu, l, grid, seminorm_only);
  if (m.value == 0.0 || a.value == 0.0 || b.value == 0.0)
    throw Error(ErrorCode::ZeroFunction, "interpolation ratio needs nonzero norms");
  const double eta = t.eta.to_double();
  r.mu_norm = m.value;
  r.lambda_norm = a.value;
  r.nu_norm = b.value;
  r.ratio = m.value / (std::pow(a.value, eta) * std::pow(b.value, 1.0 - eta));
  r.relative_error = m.error / m.value + eta * a.error / a.value + (1.0 - eta) * b.error / b.value;
  r.bound = case_constant(t, seminorm_only, l);
  return r;
}

/// sup of the ratio over a seeded sweep of the standard family.
inline double empirical_constant(const InterpolationTriple& t, bool seminorm_only, int count = 100,
                                 std::uint64_t seed = 1, int points_per_axis = 0) {
  const auto family = sample_family(t.n, count, seed);
  double best = 0.0;
  for (const auto& u : family) {
    auto r = check_interpolation(t, u, default_grid(u, points_per_axis), seminorm_only);
    best = std::max(best, r.ratio);
  }
  return best;
}

/// Nodes lambda = x_0 < ... < x_m = nu (containing mu) such that consecutive
/// triples are mostly direct cases; reiteration composes them.
inline std::vector<InterpolationTriple> decompose(const InterpolationTriple& t) {
  std::set<Rational> nodes{t.lambda, t.mu, t.nu};
  std::vector<Rational> breaks;
  for (int j = 1;; ++j) {
    Rational b(-j, t.n);
    if (b <= t.lambda) break;
    if (b < t.nu) breaks.push_back(b);
  }
  if (t.lambda.sign() < 0 && t.nu.sign() > 0) breaks.push_back(Rational(0));
  for (const auto& b : breaks) nodes.insert(b);
  // A midpoint right after each breakpoint makes the link centred on the
  // breakpoint a step case.
  for (const auto& b : breaks) {
    auto it = nodes.upper_bound(b);
    if (it != nodes.end()) nodes.insert((b + *it) / Rational(2));
  }
  std::vector<Rational> x(nodes.begin(), nodes.end());
  std::vector<InterpolationTriple> links;
  for (std::size_t i = 1; i + 1 < x.size(); ++i) links.push_back(make_triple(x[i - 1], x[i], x[i + 1], t.n));
  return links;
}

struct CkCheck {
  double lhs = 0.0, rhs = 0.0;
  Rational eta;
  double one_step_lhs = 0.0, one_step_rhs = 0.0;
};

/// C_k(u) = max over j <= k of sup |D^j u|_inf.
inline double ck_norm(const TestFunction& u, int k, const GridSpec& grid) {
  double c = 0.0;
  for (int j = 0; j <= k; ++j) c = std::max(c, sup_norm(u, j, grid).value);
  return c;
}

inline CkCheck ck_interpolation_check(const TestFunction& u, int k1, int k2, int k3, const GridSpec& grid) {
  if (!(0 <= k1 && k1 < k2 && k2 < k3)) throw Error(ErrorCode::BadParams, "need 0 <= k1 < k2 < k3");
  if (k3 > kDefaultMaxJetOrder) throw Error(ErrorCode::JetOrderExceeded, "k3 exceeds maximum jet order");
  CkCheck r;
  r.eta = Rational(k3 - k2, k3 - k1);
  const double eta = r.eta.to_double();
  r.lhs = ck_norm(u, k2, grid);
  r.rhs = std::pow(ck_norm(u, k1, grid), eta) * std::pow(ck_norm(u, k3, grid), 1.0 - eta);
  r.one_step_lhs = sup_norm(u, k1 + 1, grid).value;
  r.one_step_rhs = 2.0 * std::sqrt(sup_norm(u, k1, grid).value * sup_norm(u, k1 + 2, grid).value);
  return r;
}

}  // namespace xp
