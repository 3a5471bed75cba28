#pragma once

#include <optional>
#include <string>
#include <vector>

#include "xp/error.hpp"
#include "xp/rational.hpp"

// Exact parameter arithmetic on the unified integrability scale.
//
// An index is carried as its reciprocal s = 1/p. The scale is s <= 1:
//   0 < s <= 1   Lebesgue L^p, p = 1/s
//   s == 0       L^infinity
//   s < 0        Hölder C^{p1,p2} with p1 = -floor(n s + 1), p2 = -n s - p1

namespace xp {

enum class Regime { Lebesgue, Sup, Holder };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::Lebesgue: return "Lebesgue";
    case Regime::Sup: return "Sup";
    case Regime::Holder: return "Holder";
  }
  return "?";
}

inline Regime regime(const Rational& s) {
  if (s.sign() > 0) return Regime::Lebesgue;
  if (s.sign() == 0) return Regime::Sup;
  return Regime::Holder;
}

struct SpaceIndex {
  Rational s;
  int n = 1;

  Regime regime() const { return xp::regime(s); }
};

struct HolderSignature {
  int p1 = 0;    // derivative order
  Rational p2;   // Hölder exponent in (0, 1]

  friend bool operator==(const HolderSignature&, const HolderSignature&) = default;
};

inline void require_dimension(int n) {
  if (n < 1) throw Error(ErrorCode::BadParams, "dimension must be positive");
}

inline HolderSignature holder_signature(const Rational& s, int n) {
  require_dimension(n);
  if (s.sign() >= 0) throw Error(ErrorCode::NonHolderIndex, "s=" + s.str() + " is not negative");
  Rational ns = Rational(n) * s;
  std::int64_t p1 = -(ns + Rational(1)).floor();
  return {static_cast<int>(p1), -ns - Rational(p1)};
}

/// s* = s - 1/n.
inline Rational sobolev_sharp(const Rational& s, int n) {
  require_dimension(n);
  if (s > Rational(1)) throw Error(ErrorCode::ScaleOverflow, "s=" + s.str() + " exceeds 1");
  if (s == Rational(1, n)) throw Error(ErrorCode::BorderlineIndex, "s=1/n (p=n) has no conjugate");
  return s - Rational(1, n);
}

/// s_* = s + 1/n, the converse conjugate.
inline Rational sobolev_flat(const Rational& s, int n) {
  require_dimension(n);
  Rational r = s + Rational(1, n);
  if (r > Rational(1)) throw Error(ErrorCode::ScaleOverflow, "s + 1/n = " + r.str() + " exceeds 1");
  return r;
}

/// theta = (sq - l/n - sr) / (sp - k/n - sr).
inline Rational solve_theta(int n, int k, int l, const Rational& sp, const Rational& sq,
                            const Rational& sr) {
  require_dimension(n);
  Rational num = sq - Rational(l, n) - sr;
  Rational den = sp - Rational(k, n) - sr;
  if (den.is_zero()) {
    if (num.is_zero()) throw Error(ErrorCode::IndeterminateTheta, "every theta balances");
    throw Error(ErrorCode::DegenerateCondition, "no theta balances (zero denominator)");
  }
  return num / den;
}

/// sq = l/n + theta (sp - k/n) + (1 - theta) sr.
inline Rational solve_q(int n, int k, int l, const Rational& sp, const Rational& sr,
                        const Rational& theta) {
  require_dimension(n);
  if (k <= 0 || theta < Rational(l, k) || theta > Rational(1))
    throw Error(ErrorCode::ThetaOutOfRange, "theta=" + theta.str() + " outside [l/k, 1]");
  return Rational(l, n) + theta * (sp - Rational(k, n)) + (Rational(1) - theta) * sr;
}

/// One Gagliardo–Nirenberg parameter tuple. `sr` may be absent when theta = 1
/// (the r-norm carries exponent zero).
struct InequalityInstance {
  int n = 1;
  int k = 2;
  int l = 1;
  Rational sp;
  Rational sq;
  std::optional<Rational> sr;
  Rational theta;

  Rational r_or(const Rational& fallback) const { return sr.value_or(fallback); }
  friend bool operator==(const InequalityInstance&, const InequalityInstance&) = default;
};

enum class ViolationKind { Range, Balance, Exclusion, Borderline, ThetaRange };

inline const char* to_string(ViolationKind v) {
  switch (v) {
    case ViolationKind::Range: return "range";
    case ViolationKind::Balance: return "balance";
    case ViolationKind::Exclusion: return "exclusion";
    case ViolationKind::Borderline: return "borderline";
    case ViolationKind::ThetaRange: return "theta range";
  }
  return "?";
}

struct Violation {
  ViolationKind kind;
  std::string reason;
};

struct ValidityReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(ViolationKind kind) const {
    for (const auto& v : violations)
      if (v.kind == kind) return true;
    return false;
  }
};

/// Checks every hypothesis of the main inequality and lists all failures.
///
/// Ranges: sp and sr must lie in (-inf, 0) u (0, 1]; p = infinity is excluded
/// for the hypothesis spaces. sq may additionally be 0 (an L^infinity left side).
inline ValidityReport validate_instance(const InequalityInstance& inst) {
  ValidityReport rep;
  auto add = [&](ViolationKind kind, std::string why) { rep.violations.push_back({kind, std::move(why)}); };

  if (inst.n < 1) {
    add(ViolationKind::Range, "n must be positive");
    return rep;
  }
  if (inst.l < 0 || inst.k <= inst.l) add(ViolationKind::Range, "need k > l >= 0");

  const Rational one(1);
  auto check_scale = [&](const char* name, const Rational& s, bool allow_sup) {
    if (s > one) add(ViolationKind::Range, std::string(name) + ": s=" + s.str() + " > 1 (0 < p < 1)");
    if (s.is_zero() && !allow_sup)
      add(ViolationKind::Borderline, std::string(name) + "=infinity is outside the hypothesis range");
  };
  check_scale("p", inst.sp, false);
  check_scale("q", inst.sq, true);
  const bool r_needed = inst.theta != one;
  if (inst.sr) {
    check_scale("r", *inst.sr, false);
  } else if (r_needed) {
    add(ViolationKind::Range, "r is required when theta < 1");
  }

  if (inst.k > inst.l && inst.k > 0 &&
      (inst.theta < Rational(inst.l, inst.k) || inst.theta > one)) {
    add(ViolationKind::ThetaRange,
        "theta=" + inst.theta.str() + " outside [" + Rational(inst.l, inst.k).str() + ", 1]");
  }

  {
    Rational sr = inst.r_or(Rational(0));
    Rational lhs = inst.sq - Rational(inst.l, inst.n);
    Rational rhs = inst.theta * (inst.sp - Rational(inst.k, inst.n)) + (one - inst.theta) * sr;
    if (lhs != rhs)
      add(ViolationKind::Balance, "1/q - l/n = " + lhs.str() + " but theta(1/p - k/n) + (1-theta)/r = " + rhs.str());
  }

  Rational np = Rational(inst.n) * inst.sp;
  if (np.is_integer() && np.num() >= 1 && np.num() <= inst.k - inst.l)
    add(ViolationKind::Exclusion, "exclusion n/p=" + np.str());

  return rep;
}

/// p = 1/s in printable form ("inf" for s = 0).
inline std::string p_form(const Rational& s) {
  if (s.is_zero()) return "inf";
  return s.reciprocal().str();
}

/// Parses a p-form value ("2", "-3", "inf", "-7/2") into s = 1/p.
inline Rational parse_p(std::string_view text) {
  if (text == "inf" || text == "infinity" || text == "+inf") return Rational(0);
  Rational p = Rational::parse(text);
  if (p.is_zero()) throw Error(ErrorCode::ParseError, "p=0 is not an index");
  return p.reciprocal();
}

/// e.g. "s=-1/2 (p=-2, C^{1,1/2})".
inline std::string describe_index(const Rational& s, int n) {
  std::string out = "s=" + s.str() + " (p=" + p_form(s) + ", ";
  switch (regime(s)) {
    case Regime::Lebesgue: out += "L^" + p_form(s); break;
    case Regime::Sup: out += "L^inf"; break;
    case Regime::Holder: {
      auto sig = holder_signature(s, n);
      out += "C^{" + std::to_string(sig.p1) + "," + sig.p2.str() + "}";
      break;
    }
  }
  return out + ")";
}

}  // namespace xp
