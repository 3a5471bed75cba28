#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "xp/error.hpp"
#include "xp/grid.hpp"
#include "xp/indices.hpp"
#include "xp/interp.hpp"
#include "xp/norms.hpp"
#include "xp/rational.hpp"
#include "xp/testfn.hpp"

// Proof certificates for the main inequality. A chain is a tree of steps
// flattened in post-order: every composite step lists the indices of its
// children, which precede it.

namespace xp {

enum class Rule { SobolevStep, HolderIdentity, BaseLemma, InductK, InductDiag, EndpointInterp, Lemma31 };

inline const char* to_string(Rule r) {
  switch (r) {
    case Rule::SobolevStep: return "SOBOLEV_STEP";
    case Rule::HolderIdentity: return "HOLDER_IDENTITY";
    case Rule::BaseLemma: return "BASE_LEMMA";
    case Rule::InductK: return "INDUCT_K";
    case Rule::InductDiag: return "INDUCT_DIAG";
    case Rule::EndpointInterp: return "ENDPOINT_INTERP";
    case Rule::Lemma31: return "LEMMA31";
  }
  return "?";
}

inline Rule parse_rule(std::string_view s) {
  for (Rule r : {Rule::SobolevStep, Rule::HolderIdentity, Rule::BaseLemma, Rule::InductK, Rule::InductDiag,
                 Rule::EndpointInterp, Rule::Lemma31})
    if (s == to_string(r)) return r;
  throw Error(ErrorCode::InvalidCertificate, "unknown rule '" + std::string(s) + "'");
}

/// ||D^order u|| measured at index s.
struct Slot {
  int order = 0;
  Rational s;
  friend bool operator==(const Slot&, const Slot&) = default;
};

/// ||output|| <= C * prod ||inputs[i]||^exponents[i]. A missing constant means
/// the step only has an empirical constant.
struct Step {
  Rule rule = Rule::SobolevStep;
  std::vector<Slot> inputs;
  Slot output;
  std::vector<Rational> exponents;
  std::optional<double> constant;
  int depth = 0;
  std::vector<int> children;
};

struct ProofChain {
  InequalityInstance instance;
  std::vector<Step> steps;
  std::optional<double> final_constant;
};

namespace detail {

inline std::optional<double> mul(std::optional<double> a, std::optional<double> b) {
  if (!a || !b) return std::nullopt;
  return *a * *b;
}

inline std::optional<double> power(std::optional<double> a, double e) {
  if (!a) return std::nullopt;
  return std::pow(*a, e);
}

class ChainBuilder {
 public:
  explicit ChainBuilder(int n) : n_(n) {}

  std::vector<Step> take() { return std::move(steps_); }
  const Step& at(int i) const { return steps_[i]; }

  /// (j + 1, s) -> (j, s - 1/n).
  int sobolev(int j, const Rational& s, int depth, ErrorCode borderline = ErrorCode::InternalBorderline) {
    if (s == Rational(1, n_))
      throw Error(borderline, "Sobolev step from s=1/n=" + s.str() + " (p=n) at order " + std::to_string(j + 1));
    Step st;
    st.rule = s.sign() < 0 ? Rule::HolderIdentity : Rule::SobolevStep;
    st.inputs = {{j + 1, s}};
    st.output = {j, s - Rational(1, n_)};
    st.exponents = {Rational(1)};
    if (st.rule == Rule::HolderIdentity) st.constant = 1.0;
    st.depth = depth;
    return push(std::move(st));
  }

  /// ||D^{j+1} u||_{s + 1/n} <= ||D^j u||_s for s + 1/n <= 0.
  int holder_up(int j, const Rational& s, int depth) {
    Step st;
    st.rule = Rule::HolderIdentity;
    st.inputs = {{j, s}};
    st.output = {j + 1, s + Rational(1, n_)};
    st.exponents = {Rational(1)};
    st.constant = 1.0;
    st.depth = depth;
    return push(std::move(st));
  }

  /// ||D^j u||_mu <= C ||D^j u||_a^w ||D^j u||_b^(1-w).
  int lemma31(int j, const Rational& a, const Rational& b, const Rational& w, int depth) {
    Step st;
    st.rule = Rule::Lemma31;
    st.inputs = {{j, a}, {j, b}};
    const Rational mu = w * a + (Rational(1) - w) * b;
    st.output = {j, mu};
    st.exponents = {w, Rational(1) - w};
    st.depth = depth;
    if (a == b || w.is_zero() || w == Rational(1)) {
      st.constant = 1.0;
    } else {
      st.constant = case_constant(make_triple(min(a, b), mu, max(a, b), n_), true, j);
    }
    return push(std::move(st));
  }

  /// ||D^{m+1} u||_sq <= C ||D^{m+2} u||_sp^(1/2) ||D^m u||_sr^(1/2), 2 sq = sp + sr.
  int base(int m, const Rational& sp, const Rational& sr, int depth) {
    const Rational one(1);
    if (sp > one || sr > one) throw Error(ErrorCode::InvalidBase, "base lemma needs sp, sr <= 1");
    const Rational sq = (sp + sr) / Rational(2);
    const Rational inv_n(1, n_);
    const bool r_regime = sr <= -inv_n;
    const bool q_regime = sq.sign() <= 0;
    const bool r_blocked = sp == inv_n;
    const bool q_blocked = sp == inv_n || sp - inv_n == inv_n;
    std::vector<int> kids;
    std::optional<double> c;
    if (r_regime && !r_blocked) {
      // Du at p* and at r_*, then interpolate between them.
      int a = sobolev(m + 1, sp, depth + 1);
      int b = holder_up(m, sr, depth + 1);
      int l = lemma31(m + 1, sp - inv_n, sr + inv_n, Rational(1, 2), depth + 1);
      kids = {a, b, l};
      c = mul(at(l).constant, power(mul(at(a).constant, at(b).constant), 0.5));
    } else if (q_regime && !q_blocked) {
      // u at p** and r, interpolate to q*, then the Hölder identity to Du at q.
      int a = sobolev(m + 1, sp, depth + 1);
      int b = sobolev(m, sp - inv_n, depth + 1);
      int l = lemma31(m, sp - Rational(2) * inv_n, sr, Rational(1, 2), depth + 1);
      int h = holder_up(m, sq - inv_n, depth + 1);
      kids = {a, b, l, h};
      c = mul(mul(at(h).constant, at(l).constant), power(mul(at(a).constant, at(b).constant), 0.5));
    } else if (r_regime || q_regime) {
      throw Error(ErrorCode::InternalBorderline,
                  "base lemma at sp=" + sp.str() + ", sr=" + sr.str() + ": every route crosses s=1/n");
    }
    Step st;
    st.rule = Rule::BaseLemma;
    st.inputs = {{m + 2, sp}, {m, sr}};
    st.output = {m + 1, sq};
    st.exponents = {Rational(1, 2), Rational(1, 2)};
    st.constant = c;
    st.depth = depth;
    st.children = std::move(kids);
    return push(std::move(st));
  }

  /// ||D^{m+l} u||_sq <= C ||D^{m+k} u||_sp^(l/k) ||D^m u||_sr^(1-l/k).
  int general(int l, int k, int m, const Rational& sp, const Rational& sr, int depth) {
    if (l == 1 && k == 2) return base(m, sp, sr, depth);
    const Rational sq = Rational(l, k) * sp + Rational(k - l, k) * sr;
    Step st;
    st.inputs = {{m + k, sp}, {m, sr}};
    st.output = {m + l, sq};
    st.exponents = {Rational(l, k), Rational(k - l, k)};
    st.depth = depth;
    if (l == 1) {
      const int kt = k - 1;
      const Rational s_mid = Rational(2) * sq - sr;
      int b = base(m, s_mid, sr, depth + 1);
      int g = general(1, kt, m + 1, sp, sq, depth + 1);
      if (!(at(g).output == Slot{m + 2, s_mid})) throw Error(ErrorCode::InvalidCertificate, "k-induction mismatch");
      st.rule = Rule::InductK;
      st.children = {b, g};
      st.constant = power(mul(at(b).constant, power(at(g).constant, 0.5)), 2.0 * kt / (kt + 1));
    } else {
      const int lt = l - 1, kt = k - 1;
      const Rational t = sq / Rational(l) + Rational(lt, l) * sr;
      int g1 = general(lt, kt, m + 1, sp, t, depth + 1);
      int g2 = general(1, l, m, sq, sr, depth + 1);
      if (!(at(g1).output == Slot{m + l, sq}) || !(at(g2).output == Slot{m + 1, t}))
        throw Error(ErrorCode::InvalidCertificate, "diagonal induction mismatch");
      st.rule = Rule::InductDiag;
      st.children = {g1, g2};
      const double b = static_cast<double>(kt - lt) / kt;
      const double e = static_cast<double>(lt) * (kt + 1) / (static_cast<double>(kt) * l);
      st.constant = power(mul(at(g1).constant, power(at(g2).constant, b)), 1.0 / e);
    }
    return push(std::move(st));
  }

  /// k - l steps from (k, sp) down to (l, sp - (k - l)/n); returns their indices.
  std::vector<int> chain(int k, int l, const Rational& sp, int depth, ErrorCode borderline) {
    std::vector<int> ids;
    Rational s = sp;
    for (int j = k - 1; j >= l; --j) {
      ids.push_back(sobolev(j, s, depth, borderline));
      s = s - Rational(1, n_);
    }
    return ids;
  }

  int push(Step st) {
    steps_.push_back(std::move(st));
    return static_cast<int>(steps_.size()) - 1;
  }

 private:
  int n_;
  std::vector<Step> steps_;
};

inline std::optional<double> product_of(const std::vector<Step>& steps, const std::vector<int>& ids) {
  std::optional<double> c = 1.0;
  for (int i : ids) c = mul(c, steps[i].constant);
  return c;
}

}  // namespace detail

/// Theorem-2.3 chain: k - l single-derivative steps s -> s - 1/n.
inline ProofChain sobolev_chain(int n, int k, int l, const Rational& sp) {
  require_dimension(n);
  if (!(k > l && l >= 0)) throw Error(ErrorCode::BadParams, "need k > l >= 0");
  Rational np = Rational(n) * sp;
  if (np.is_integer() && np.num() >= 1 && np.num() <= k - l)
    throw Error(ErrorCode::BorderlineIndex, "exclusion n/p=" + np.str());
  detail::ChainBuilder b(n);
  auto ids = b.chain(k, l, sp, 0, ErrorCode::BorderlineIndex);
  ProofChain pc;
  pc.instance = {n, k, l, sp, sp - Rational(k - l, n), std::nullopt, Rational(1)};
  pc.steps = b.take();
  pc.final_constant = detail::product_of(pc.steps, ids);
  return pc;
}

/// The base lemma as a stand-alone step with its inlined sub-derivation.
inline ProofChain base_lemma_chain(int n, const Rational& sp, const Rational& sr) {
  require_dimension(n);
  detail::ChainBuilder b(n);
  int root = b.base(0, sp, sr, 0);
  ProofChain pc;
  pc.steps = b.take();
  pc.instance = {n, 2, 1, sp, pc.steps[root].output.s, sr, Rational(1, 2)};
  pc.final_constant = pc.steps[root].constant;
  return pc;
}

inline Step base_lemma_step(int n, const Rational& sp, const Rational& sr) {
  return base_lemma_chain(n, sp, sr).steps.back();
}

inline ProofChain derive_chain(const InequalityInstance& inst) {
  auto rep = validate_instance(inst);
  if (!rep.ok()) {
    std::string why;
    for (const auto& v : rep.violations) why += (why.empty() ? "" : "; ") + v.reason;
    throw Error(ErrorCode::InvalidInstance, why);
  }
  const int n = inst.n, k = inst.k, l = inst.l;
  const Rational one(1), lk(l, k);
  detail::ChainBuilder b(n);
  ProofChain pc;
  pc.instance = inst;
  if (inst.theta == one) {
    auto ids = b.chain(k, l, inst.sp, 0, ErrorCode::InternalBorderline);
    pc.steps = b.take();
    pc.final_constant = detail::product_of(pc.steps, ids);
    return pc;
  }
  const Rational sr = *inst.sr;
  if (inst.theta == lk) {
    if (l == 0) {  // q = r: nothing to prove
      pc.final_constant = 1.0;
      return pc;
    }
    int root = b.general(l, k, 0, inst.sp, sr, 0);
    pc.steps = b.take();
    pc.final_constant = pc.steps[root].constant;
    return pc;
  }
  // Interpolate between the theta = 1 and theta = l/k endpoints.
  const Rational eta = (inst.theta - lk) / (one - lk);
  const Rational sq1 = inst.sp - Rational(k - l, n);
  const Rational sq2 = lk * inst.sp + Rational(k - l, k) * sr;
  if (eta * sq1 + (one - eta) * sq2 != inst.sq)
    throw Error(ErrorCode::InvalidCertificate, "endpoint interpolation does not reproduce sq");
  auto ids = b.chain(k, l, inst.sp, 1, ErrorCode::InternalBorderline);
  std::optional<double> c_chain = 1.0;
  Step root;
  for (int i : ids) {
    c_chain = detail::mul(c_chain, b.at(i).constant);
    root.children.push_back(i);
  }
  std::optional<double> c_g = 1.0;
  if (l > 0) {
    int g = b.general(l, k, 0, inst.sp, sr, 1);
    c_g = b.at(g).constant;
    root.children.push_back(g);
  }
  int mix = b.lemma31(l, sq1, sq2, eta, 1);
  root.children.push_back(mix);
  root.rule = Rule::EndpointInterp;
  root.inputs = {{k, inst.sp}, {0, sr}};
  root.output = {l, inst.sq};
  root.exponents = {inst.theta, one - inst.theta};
  root.constant = detail::mul(b.at(mix).constant,
                              detail::mul(detail::power(c_chain, eta.to_double()),
                                          detail::power(c_g, (one - eta).to_double())));
  root.depth = 0;
  int r = b.push(std::move(root));
  pc.steps = b.take();
  pc.final_constant = pc.steps[r].constant;
  return pc;
}

// ---------------------------------------------------------------------------
// Verification.

namespace detail {

[[noreturn]] inline void reject(std::size_t i, const std::string& why) {
  throw Error(ErrorCode::InvalidCertificate, "step " + std::to_string(i) + ": " + why);
}

inline void verify_step(const ProofChain& pc, std::size_t i) {
  const int n = pc.instance.n;
  const Rational inv_n(1, n), one(1);
  const Step& st = pc.steps[i];
  if (st.inputs.size() != st.exponents.size() || st.inputs.empty()) reject(i, "inputs and exponents differ in count");
  Rational wsum(0), balance(0);
  for (std::size_t a = 0; a < st.inputs.size(); ++a) {
    if (st.exponents[a].sign() < 0) reject(i, "negative exponent");
    wsum += st.exponents[a];
    balance += st.exponents[a] * (Rational(st.inputs[a].order) - Rational(n) * st.inputs[a].s);
  }
  if (wsum != one) reject(i, "exponents sum to " + wsum.str());
  if (Rational(st.output.order) - Rational(n) * st.output.s != balance) reject(i, "dimensional balance fails");
  for (const auto& s : st.inputs)
    if (s.s > one || s.order < 0) reject(i, "input slot out of range");
  if (st.output.s > one || st.output.order < 0) reject(i, "output slot out of range");
  for (int c : st.children)
    if (c < 0 || static_cast<std::size_t>(c) >= i || pc.steps[c].depth != st.depth + 1)
      reject(i, "children must precede their parent one level deeper");

  auto child = [&](std::size_t c) -> const Step& {
    if (st.children.size() <= c) reject(i, "missing child");
    return pc.steps[st.children[c]];
  };

  switch (st.rule) {
    case Rule::SobolevStep:
    case Rule::HolderIdentity: {
      if (st.inputs.size() != 1 || !st.children.empty()) reject(i, "single-input leaf expected");
      const Slot& in = st.inputs[0];
      const Slot& out = st.output;
      if (st.rule == Rule::SobolevStep) {
        if (in.order != out.order + 1 || out.s != in.s - inv_n) reject(i, "Sobolev step must be (j+1,s)->(j,s-1/n)");
        if (in.s == inv_n) reject(i, "Sobolev step from the borderline s=1/n");
        if (in.s.sign() < 0) reject(i, "Sobolev step with s<0 must be a Hölder identity");
      } else {
        if (std::abs(in.order - out.order) != 1) reject(i, "Hölder identity changes the order by one");
        const Slot& hi = in.order > out.order ? in : out;
        const Slot& lo = in.order > out.order ? out : in;
        if (hi.s.sign() > 0 || lo.s.sign() >= 0) reject(i, "Hölder identity outside the Hölder scale");
        if (hi.s.is_zero() && in.order > out.order) reject(i, "L^inf to Lipschitz is not an identity");
      }
      break;
    }
    case Rule::Lemma31: {
      if (st.inputs.size() != 2 || !st.children.empty()) reject(i, "two-input leaf expected");
      if (st.inputs[0].order != st.output.order || st.inputs[1].order != st.output.order)
        reject(i, "interpolation keeps the derivative order");
      break;
    }
    case Rule::BaseLemma: {
      if (st.inputs.size() != 2) reject(i, "two inputs expected");
      const int m = st.inputs[1].order;
      if (st.inputs[0].order != m + 2 || st.output.order != m + 1) reject(i, "base lemma slots are (m+2, m) -> m+1");
      if (st.exponents[0] != Rational(1, 2)) reject(i, "base lemma exponents are (1/2, 1/2)");
      if (Rational(2) * st.output.s != st.inputs[0].s + st.inputs[1].s) reject(i, "2 sq = sp + sr fails");
      break;
    }
    case Rule::InductK:
    case Rule::InductDiag:
    case Rule::EndpointInterp: {
      if (st.inputs.size() != 2) reject(i, "two inputs expected");
      const int m = st.inputs[1].order;
      const int k = st.inputs[0].order - m, l = st.output.order - m;
      const Rational sp = st.inputs[0].s, sr = st.inputs[1].s, sq = st.output.s;
      if (!(k > l && l >= 0)) reject(i, "need k > l");
      if (st.rule == Rule::EndpointInterp) {
        const Rational theta = st.exponents[0], lk(l, k);
        if (theta <= lk || theta >= one) reject(i, "theta must lie strictly between l/k and 1");
        const Rational eta = (theta - lk) / (one - lk);
        const Rational sq1 = sp - Rational(k - l, n);
        const Rational sq2 = lk * sp + Rational(k - l, k) * sr;
        if (eta * sq1 + (one - eta) * sq2 != sq) reject(i, "1/q = eta/q1 + (1-eta)/q2 fails");
        const Step& mix = pc.steps[st.children.back()];
        if (mix.rule != Rule::Lemma31 || !(mix.output == st.output)) reject(i, "last child must interpolate to (l, sq)");
        break;
      }
      if (st.exponents[0] != Rational(l, k)) reject(i, "exponents must be (l/k, 1 - l/k)");
      if (sq != Rational(l, k) * sp + Rational(k - l, k) * sr) reject(i, "sq = (l/k) sp + ((k-l)/k) sr fails");
      if (st.rule == Rule::InductK) {
        if (l != 1 || k < 3) reject(i, "k-induction needs l = 1, k >= 3");
        const int kt = k - 1;
        const Step& bs = child(0);
        const Step& g = child(1);
        if (bs.rule != Rule::BaseLemma || !(bs.output == st.output)) reject(i, "first child must be the base lemma");
        const Rational s = bs.inputs[0].s;
        if (Rational(2) * sq != s + sr) reject(i, "2/q = 1/s + 1/r fails");
        if (s != Rational(1, kt) * sp + Rational(kt - 1, kt) * sq) reject(i, "1/s = (1/k~)/p + ((k~-1)/k~)/q fails");
        if (!(g.output == Slot{m + 2, s})) reject(i, "second child must produce (m+2, s)");
      } else {
        if (l < 2) reject(i, "diagonal induction needs l >= 2");
        const int lt = l - 1, kt = k - 1;
        const Step& g1 = child(0);
        const Step& g2 = child(1);
        const Rational t = g1.inputs[1].s;
        if (sq != Rational(lt, kt) * sp + Rational(kt - lt, kt) * t) reject(i, "1/q = (l~/k~)/p + ((k~-l~)/k~)/t fails");
        if (t != Rational(1, lt + 1) * sq + Rational(lt, lt + 1) * sr) reject(i, "1/t = 1/(l~+1)/q + l~/(l~+1)/r fails");
        if (!(g1.output == st.output) || !(g2.output == Slot{m + 1, t})) reject(i, "children do not compose");
      }
      break;
    }
  }
}

}  // namespace detail

/// The instance implied by the chain's top-level steps.
inline InequalityInstance reconstruct_instance(const ProofChain& pc) {
  InequalityInstance inst;
  inst.n = pc.instance.n;
  std::vector<const Step*> top;
  for (const auto& s : pc.steps)
    if (s.depth == 0) top.push_back(&s);
  if (top.empty()) return pc.instance;
  const Step& last = *top.back();
  inst.l = last.output.order;
  inst.sq = last.output.s;
  if (last.inputs.size() == 1) {  // pure Sobolev chain
    inst.k = top.front()->inputs[0].order;
    inst.sp = top.front()->inputs[0].s;
    inst.theta = Rational(1);
    inst.sr = pc.instance.sr;
  } else {
    inst.k = last.inputs[0].order;
    inst.sp = last.inputs[0].s;
    inst.sr = last.inputs[1].s;
    inst.theta = last.exponents[0];
  }
  return inst;
}

/// Exact check of every recurrence and of the chain's end slots; throws
/// InvalidCertificate on the first failure.
inline void verify_chain(const ProofChain& pc) {
  const auto& inst = pc.instance;
  for (std::size_t i = 0; i < pc.steps.size(); ++i) detail::verify_step(pc, i);
  if (pc.steps.empty()) {
    if (!(inst.l == 0 && inst.sr && *inst.sr == inst.sq))
      throw Error(ErrorCode::InvalidCertificate, "empty chain needs q = r at l = 0");
    return;
  }
  // Top-level steps may only consume the hypotheses or earlier top-level outputs.
  std::vector<Slot> available{{inst.k, inst.sp}};
  if (inst.sr) available.push_back({0, *inst.sr});
  const Step* last = nullptr;
  for (const auto& st : pc.steps) {
    if (st.depth != 0) continue;
    for (const auto& in : st.inputs)
      if (std::find(available.begin(), available.end(), in) == available.end())
        throw Error(ErrorCode::InvalidCertificate, "top-level input (" + std::to_string(in.order) + ", " +
                                                       in.s.str() + ") is neither a hypothesis nor derived");
    available.push_back(st.output);
    last = &st;
  }
  if (!last || !(last->output == Slot{inst.l, inst.sq}))
    throw Error(ErrorCode::InvalidCertificate, "chain does not end at (l, sq)");
  auto back = reconstruct_instance(pc);
  if (back.k != inst.k || back.l != inst.l || back.sp != inst.sp || back.sq != inst.sq || back.theta != inst.theta ||
      (inst.theta != Rational(1) && back.sr != inst.sr))
    throw Error(ErrorCode::InvalidCertificate, "chain does not reproduce its instance");
}

// ---------------------------------------------------------------------------
// Serialization.

inline constexpr std::string_view kCertificateHeader = "# xp-certificate v1";

namespace detail {

inline std::string format_constant(const std::optional<double>& c) {
  if (!c) return "empirical";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", *c);
  return buf;
}

inline std::string format_slots(const std::vector<Slot>& slots) {
  std::string out;
  for (const auto& s : slots) out += (out.empty() ? "" : ";") + std::to_string(s.order) + ":" + s.s.str();
  return out;
}

inline Slot parse_slot(std::string_view t) {
  auto colon = t.find(':');
  if (colon == std::string_view::npos) throw Error(ErrorCode::InvalidCertificate, "bad slot");
  return {std::stoi(std::string(t.substr(0, colon))), Rational::parse(t.substr(colon + 1))};
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto p = s.find(sep, start);
    out.push_back(s.substr(start, p - start));
    if (p == std::string_view::npos) return out;
    start = p + 1;
  }
}

inline std::map<std::string, std::string, std::less<>> fields(const std::vector<std::string_view>& words, std::size_t from) {
  std::map<std::string, std::string, std::less<>> kv;
  for (std::size_t i = from; i < words.size(); ++i) {
    auto eq = words[i].find('=');
    if (eq == std::string_view::npos) throw Error(ErrorCode::InvalidCertificate, "expected key=value");
    kv[std::string(words[i].substr(0, eq))] = std::string(words[i].substr(eq + 1));
  }
  return kv;
}

inline const std::string& need(const std::map<std::string, std::string, std::less<>>& kv, const char* key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw Error(ErrorCode::InvalidCertificate, std::string("missing field ") + key);
  return it->second;
}

inline std::optional<double> parse_constant(const std::string& s) {
  if (s == "empirical") return std::nullopt;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw Error(ErrorCode::InvalidCertificate, "bad constant '" + s + "'");
  return v;
}

}  // namespace detail

inline std::string serialize_chain(const ProofChain& pc) {
  std::ostringstream os;
  const auto& in = pc.instance;
  os << kCertificateHeader << '\n';
  os << "instance n=" << in.n << " k=" << in.k << " l=" << in.l << " sp=" << in.sp << " sq=" << in.sq
     << " sr=" << (in.sr ? in.sr->str() : "none") << " theta=" << in.theta << '\n';
  for (std::size_t i = 0; i < pc.steps.size(); ++i) {
    const Step& st = pc.steps[i];
    std::string w, kids;
    for (const auto& e : st.exponents) w += (w.empty() ? "" : ";") + e.str();
    for (int c : st.children) kids += (kids.empty() ? "" : ";") + std::to_string(c);
    os << "step " << i << ' ' << to_string(st.rule) << " depth=" << st.depth << " in=" << detail::format_slots(st.inputs)
       << " out=" << detail::format_slots({st.output}) << " w=" << w
       << " const=" << detail::format_constant(st.constant) << " children=" << (kids.empty() ? "-" : kids) << '\n';
  }
  os << "final const=" << detail::format_constant(pc.final_constant) << '\n';
  return os.str();
}

inline ProofChain parse_chain(std::string_view text) {
  ProofChain pc;
  bool header = false, instance = false, final = false;
  for (auto line : detail::split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header) {
      if (line != kCertificateHeader) throw Error(ErrorCode::InvalidCertificate, "missing or unsupported header");
      header = true;
      continue;
    }
    auto words = detail::split(line, ' ');
    try {
      if (words[0] == "instance") {
        auto kv = detail::fields(words, 1);
        auto& I = pc.instance;
        I.n = std::stoi(detail::need(kv, "n"));
        I.k = std::stoi(detail::need(kv, "k"));
        I.l = std::stoi(detail::need(kv, "l"));
        I.sp = Rational::parse(detail::need(kv, "sp"));
        I.sq = Rational::parse(detail::need(kv, "sq"));
        const auto& sr = detail::need(kv, "sr");
        I.sr = sr == "none" ? std::nullopt : std::optional<Rational>(Rational::parse(sr));
        I.theta = Rational::parse(detail::need(kv, "theta"));
        instance = true;
      } else if (words[0] == "step") {
        if (words.size() < 3 || std::stoul(std::string(words[1])) != pc.steps.size())
          throw Error(ErrorCode::InvalidCertificate, "steps must be numbered consecutively");
        Step st;
        st.rule = parse_rule(words[2]);
        auto kv = detail::fields(words, 3);
        st.depth = std::stoi(detail::need(kv, "depth"));
        for (auto s : detail::split(detail::need(kv, "in"), ';')) st.inputs.push_back(detail::parse_slot(s));
        st.output = detail::parse_slot(detail::need(kv, "out"));
        for (auto s : detail::split(detail::need(kv, "w"), ';')) st.exponents.push_back(Rational::parse(s));
        st.constant = detail::parse_constant(detail::need(kv, "const"));
        const auto& kids = detail::need(kv, "children");
        if (kids != "-")
          for (auto s : detail::split(kids, ';')) st.children.push_back(std::stoi(std::string(s)));
        pc.steps.push_back(std::move(st));
      } else if (words[0] == "final") {
        pc.final_constant = detail::parse_constant(detail::need(detail::fields(words, 1), "const"));
        final = true;
      } else if (words[0][0] != '#') {
        throw Error(ErrorCode::InvalidCertificate, "unknown record '" + std::string(words[0]) + "'");
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidCertificate) throw;
      throw Error(ErrorCode::InvalidCertificate, e.what());
    } catch (const std::logic_error& e) {
      throw Error(ErrorCode::InvalidCertificate, std::string("malformed number: ") + e.what());
    }
  }
  if (!header || !instance || !final) throw Error(ErrorCode::InvalidCertificate, "incomplete certificate");
  return pc;
}

/// Indented human-readable listing, one step per line.
inline std::string render_chain(const ProofChain& pc) {
  std::ostringstream os;
  const auto& in = pc.instance;
  os << "instance n=" << in.n << " k=" << in.k << " l=" << in.l << " sp=" << in.sp << " sq=" << in.sq
     << " sr=" << (in.sr ? in.sr->str() : "none") << " theta=" << in.theta << '\n';
  auto slot = [](const Slot& s) { return "|D^" + std::to_string(s.order) + " u|_{s=" + s.s.str() + "}"; };
  for (std::size_t i = 0; i < pc.steps.size(); ++i) {
    const Step& st = pc.steps[i];
    os << '[' << i << "] " << std::string(2 * st.depth, ' ') << to_string(st.rule) << ": " << slot(st.output)
       << " <= C";
    for (std::size_t a = 0; a < st.inputs.size(); ++a) os << " * " << slot(st.inputs[a]) << "^" << st.exponents[a];
    os << "   C=" << detail::format_constant(st.constant) << '\n';
  }
  os << "final C=" << detail::format_constant(pc.final_constant) << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Numeric evaluation.

struct StepEval {
  double lhs = 0.0;
  double rhs = 0.0;  // product of input norms raised to their exponents
  double ratio = 0.0;
  double relative_error = 0.0;
  std::optional<double> bound;
  bool violation = false;
};

struct ChainReport {
  std::vector<StepEval> steps;
  double end_to_end = 0.0;
  double end_to_end_error = 0.0;
  std::optional<double> final_constant;
  int violations = 0;
};

/// Relative slack added on top of 3x the combined error estimates before a
/// step is flagged; it covers the pair-search estimators' bias.
inline constexpr double kViolationFloor = 1e-3;

/// Bound used for flagging. In seminorm form every explicit constant applies.
/// For full norms only interpolation steps and order-raising Hölder steps keep
/// their constants; the rest lose scale invariance (lower-order sup terms).
inline std::optional<double> step_bound(const Step& st, bool seminorm_only) {
  if (seminorm_only) return st.constant;
  if (st.rule == Rule::Lemma31) return st.constant;
  if (st.rule == Rule::HolderIdentity && st.output.order > st.inputs[0].order) return st.constant;
  return std::nullopt;
}

class SlotNorms {
 public:
  SlotNorms(const TestFunction& u, GridSpec grid, bool seminorm_only)
      : u_(u), grid_(std::move(grid)), seminorm_only_(seminorm_only) {}

  const NormValue& get(const Slot& s) {
    auto key = std::make_pair(s.order, s.s);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(key, xnorm({u_, s.s, s.order, grid_, seminorm_only_})).first->second;
  }

 private:
  const TestFunction& u_;
  GridSpec grid_;
  bool seminorm_only_;
  std::map<std::pair<int, Rational>, NormValue> cache_;
};

namespace detail {
inline std::pair<double, double> instance_ratio(const InequalityInstance& inst, SlotNorms& norms) {
  const NormValue& q = norms.get({inst.l, inst.sq});
  const NormValue& p = norms.get({inst.k, inst.sp});
  const double theta = inst.theta.to_double();
  double den = std::pow(p.value, theta);
  double rel = q.error / q.value + theta * p.error / p.value;
  if (inst.theta != Rational(1)) {
    const NormValue& r = norms.get({0, *inst.sr});
    den *= std::pow(r.value, 1.0 - theta);
    rel += (1.0 - theta) * r.error / r.value;
  }
  if (!(den > 0.0) || !(q.value > 0.0)) throw Error(ErrorCode::ZeroFunction, "end-to-end ratio needs nonzero norms");
  return {q.value / den, rel};
}
}  // namespace detail

/// ||D^l u||_q / (||D^k u||_p^theta ||u||_r^(1-theta)) on the default grid.
inline double end_to_end_ratio(const InequalityInstance& inst, const TestFunction& u, const GridSpec& grid,
                               bool seminorm_only) {
  SlotNorms norms(u, grid, seminorm_only);
  return detail::instance_ratio(inst, norms).first;
}

inline ChainReport evaluate_chain(const ProofChain& pc, const TestFunction& u, const GridSpec& grid,
                                  bool seminorm_only) {
  if (u.dim() != pc.instance.n) throw Error(ErrorCode::BadParams, "function dimension differs from the instance");
  SlotNorms norms(u, grid, seminorm_only);
  ChainReport rep;
  for (const auto& st : pc.steps) {
    StepEval ev;
    const NormValue& out = norms.get(st.output);
    ev.lhs = out.value;
    ev.rhs = 1.0;
    ev.relative_error = out.value > 0 ? out.error / out.value : 0.0;
    for (std::size_t a = 0; a < st.inputs.size(); ++a) {
      const NormValue& v = norms.get(st.inputs[a]);
      const double w = st.exponents[a].to_double();
      if (w == 0.0) continue;
      ev.rhs *= std::pow(v.value, w);
      if (v.value > 0) ev.relative_error += w * v.error / v.value;
    }
    if (!(ev.rhs > 0.0)) throw Error(ErrorCode::ZeroFunction, "step input norm vanished");
    ev.ratio = ev.lhs / ev.rhs;
    ev.bound = step_bound(st, seminorm_only);
    if (ev.bound && ev.ratio > *ev.bound * (1.0 + 3.0 * ev.relative_error + kViolationFloor)) {
      ev.violation = true;
      ++rep.violations;
    }
    rep.steps.push_back(ev);
  }
  if (pc.steps.empty()) {
    rep.end_to_end = 1.0;
  } else {
    auto [ratio, rel] = detail::instance_ratio(pc.instance, norms);
    rep.end_to_end = ratio;
    rep.end_to_end_error = ratio * rel;
  }
  rep.final_constant = seminorm_only ? pc.final_constant : std::nullopt;
  return rep;
}

/// Per-step sup of the ratio over a seeded sample of the standard family: the
/// empirical constants of the chain.
inline std::vector<double> empirical_step_constants(const ProofChain& pc, bool seminorm_only, int count = 100,
                                                    std::uint64_t seed = 1, int points_per_axis = 0) {
  std::vector<double> best(pc.steps.size(), 0.0);
  for (const auto& u : sample_family(pc.instance.n, count, seed)) {
    auto rep = evaluate_chain(pc, u, default_grid(u, points_per_axis), seminorm_only);
    for (std::size_t i = 0; i < best.size(); ++i) best[i] = std::max(best[i], rep.steps[i].ratio);
  }
  return best;
}

/// (l - n sq) - theta (k - n sp) - (1 - theta)(-n sr): the log-log slope of the
/// end-to-end seminorm ratio under dilation. Zero exactly when balanced.
inline Rational balance_defect(const InequalityInstance& inst) {
  const Rational n(inst.n);
  Rational d = Rational(inst.l) - n * inst.sq - inst.theta * (Rational(inst.k) - n * inst.sp);
  if (inst.theta != Rational(1)) d -= (Rational(1) - inst.theta) * (-n * *inst.sr);
  return d;
}

/// End-to-end seminorm ratios of dilate(u, lambda). The instance is not
/// validated, so deliberately unbalanced tuples can be swept.
inline std::vector<double> dilation_sweep(const InequalityInstance& inst, const TestFunction& u,
                                          const std::vector<double>& lambdas, int points_per_axis = 0) {
  if (inst.theta != Rational(1) && !inst.sr) throw Error(ErrorCode::InvalidInstance, "r is required when theta < 1");
  std::vector<double> out;
  for (double lam : lambdas) {
    if (!(lam > 0.0)) throw Error(ErrorCode::BadParams, "dilation factors must be positive");
    TestFunction v = lam == 1.0 ? u : dilate(u, lam);
    out.push_back(end_to_end_ratio(inst, v, default_grid(v, points_per_axis), true));
  }
  return out;
}

}  // namespace xp
