#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "xp/derivation.hpp"

using namespace xp;

namespace {

Rational R(std::int64_t a, std::int64_t b = 1) { return Rational(a, b); }

InequalityInstance make(int n, int k, int l, Rational sp, std::optional<Rational> sr, Rational theta) {
  InequalityInstance inst{n, k, l, sp, R(0), sr, theta};
  inst.sq = solve_q(n, k, l, sp, sr.value_or(R(0)), theta);
  return inst;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::Overflow;
}

std::vector<const Step*> top_level(const ProofChain& pc) {
  std::vector<const Step*> out;
  for (const auto& st : pc.steps)
    if (st.depth == 0) out.push_back(&st);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TestFunction fn(const char* dsl, int n = 1) { return parse_function(dsl, n); }

}  // namespace

TEST(Rules, NamesRoundTrip) {
  for (Rule r : {Rule::SobolevStep, Rule::HolderIdentity, Rule::BaseLemma, Rule::InductK, Rule::InductDiag,
                 Rule::EndpointInterp, Rule::Lemma31})
    EXPECT_EQ(parse_rule(to_string(r)), r);
  EXPECT_THROW(parse_rule("MAGIC"), Error);
}

TEST(SobolevChain, Examples) {
  auto pc = sobolev_chain(3, 2, 0, R(1));
  ASSERT_EQ(pc.steps.size(), 2u);
  EXPECT_EQ(pc.steps[0].inputs[0], (Slot{2, R(1)}));
  EXPECT_EQ(pc.steps[0].output, (Slot{1, R(2, 3)}));
  EXPECT_EQ(pc.steps[1].output, (Slot{0, R(1, 3)}));
  EXPECT_EQ(pc.instance.sq, R(1, 3));
  EXPECT_NO_THROW(verify_chain(pc));

  EXPECT_EQ(code_of([] { sobolev_chain(2, 2, 0, R(1, 2)); }), ErrorCode::BorderlineIndex);

  auto h = sobolev_chain(1, 2, 1, R(-1, 2));
  ASSERT_EQ(h.steps.size(), 1u);
  EXPECT_EQ(h.steps[0].rule, Rule::HolderIdentity);
  EXPECT_EQ(h.steps[0].output.s, R(-3, 2));
  auto a = holder_signature(R(-1, 2), 1), b = holder_signature(R(-3, 2), 1);
  EXPECT_EQ(b.p1, a.p1 + 1);
  EXPECT_EQ(b.p2, a.p2);
  EXPECT_EQ(h.final_constant, 1.0);
}

TEST(BaseLemma, Examples) {
  auto st = base_lemma_step(3, R(1, 2), R(-1, 3));
  EXPECT_EQ(st.rule, Rule::BaseLemma);
  EXPECT_EQ(st.output.s, R(1, 12));
  EXPECT_EQ(st.exponents, (std::vector<Rational>{R(1, 2), R(1, 2)}));

  auto eq = base_lemma_step(1, R(1), R(1));
  EXPECT_EQ(eq.output, (Slot{1, R(1)}));

  // 2/q = 1/p + 1/r gives q = infinity; both routes would step off s = 1/n.
  EXPECT_EQ((R(1, 2) + R(-1, 2)) / R(2), R(0));
  EXPECT_EQ(classify_triple(make_triple(R(-1, 2), R(0), R(1, 2), 2)), CaseTag::Mixed);
  EXPECT_EQ(code_of([] { base_lemma_step(2, R(1, 2), R(-1, 2)); }), ErrorCode::InternalBorderline);
}

TEST(BaseLemma, PrefersTheRRoute) {
  // sr <= -1/n and sq <= 0: both routes apply; the r route has three children.
  auto pc = base_lemma_chain(1, R(1, 2), R(-1));
  const Step& root = pc.steps.back();
  ASSERT_EQ(root.children.size(), 3u);
  EXPECT_EQ(pc.steps[root.children[0]].rule, Rule::SobolevStep);
  EXPECT_EQ(pc.steps[root.children[1]].rule, Rule::HolderIdentity);
  EXPECT_EQ(pc.steps[root.children[2]].rule, Rule::Lemma31);
  EXPECT_NO_THROW(verify_chain(pc));
}

TEST(Derive, ExcludedExampleIsRejected) {
  // n/p = 1 lies in {1, ..., k - l}: the exclusion applies also for n = 1.
  auto inst = make(1, 2, 1, R(1), R(-1), R(1, 2));
  EXPECT_EQ(inst.sq, R(0));
  EXPECT_EQ(code_of([&] { derive_chain(inst); }), ErrorCode::InvalidInstance);
}

TEST(Derive, BaseLemmaOnly) {
  auto pc = derive_chain(make(1, 2, 1, R(1, 2), R(-1), R(1, 2)));
  auto top = top_level(pc);
  ASSERT_EQ(top.size(), 1u);
  EXPECT_EQ(top[0]->rule, Rule::BaseLemma);
  EXPECT_EQ(top[0]->output, (Slot{1, R(-1, 4)}));
  EXPECT_NO_THROW(verify_chain(pc));
}

TEST(Derive, InductionOnK) {
  auto inst = make(3, 3, 1, R(1), R(-1, 3), R(1, 3));
  auto pc = derive_chain(inst);
  const Step& root = pc.steps.back();
  ASSERT_EQ(root.rule, Rule::InductK);
  ASSERT_EQ(root.children.size(), 2u);
  const Step& b = pc.steps[root.children[0]];
  const Step& g = pc.steps[root.children[1]];
  EXPECT_EQ(b.rule, Rule::BaseLemma);
  EXPECT_EQ(g.rule, Rule::BaseLemma);
  // 2/q = 1/s + 1/r and 1/s = (1/k~)(1/p) + ((k~-1)/k~)(1/q)
  const Rational s = b.inputs[0].s;
  EXPECT_EQ(R(2) * inst.sq, s + *inst.sr);
  EXPECT_EQ(s, R(1, 2) * inst.sp + R(1, 2) * inst.sq);
  EXPECT_EQ(inst.sq, R(1, 3) * inst.sp + R(2, 3) * *inst.sr);
  EXPECT_NO_THROW(verify_chain(pc));
}

TEST(Derive, ThetaOneIsTheSobolevChain) {
  auto pc = derive_chain(make(3, 2, 0, R(1), std::nullopt, R(1)));
  auto ref = sobolev_chain(3, 2, 0, R(1));
  EXPECT_EQ(serialize_chain(pc), serialize_chain(ref));
}

TEST(Derive, EmptyChainAtLZero) {
  auto pc = derive_chain(make(2, 2, 0, R(1, 3), R(-1, 2), R(0)));
  EXPECT_TRUE(pc.steps.empty());
  EXPECT_NO_THROW(verify_chain(pc));
}

TEST(Derive, EndpointInterpolation) {
  auto inst = make(1, 3, 2, R(-1, 2), R(-1), R(5, 6));
  auto pc = derive_chain(inst);
  const Step& root = pc.steps.back();
  ASSERT_EQ(root.rule, Rule::EndpointInterp);
  const Step& mix = pc.steps[root.children.back()];
  ASSERT_EQ(mix.rule, Rule::Lemma31);
  const Rational eta = mix.exponents[0];
  EXPECT_EQ(eta + R(2, 3) * (R(1) - eta), inst.theta);
  EXPECT_GE(eta, R(0));
  EXPECT_LE(eta, R(1));
  EXPECT_EQ(eta * mix.inputs[0].s + (R(1) - eta) * mix.inputs[1].s, inst.sq);
  EXPECT_NO_THROW(verify_chain(pc));
}

TEST(Derive, InternalBorderlineIsReported) {
  auto inst = make(2, 3, 2, R(1), R(-1, 2), R(2, 3));
  ASSERT_TRUE(validate_instance(inst).ok());
  try {
    derive_chain(inst);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InternalBorderline);
    EXPECT_NE(std::string(e.what()).find("sp=1/2"), std::string::npos);
  }
}

TEST(Derive, InvalidInstance) {
  EXPECT_EQ(code_of([] { derive_chain({1, 2, 1, R(1, 2), R(1), R(-1), R(1, 2)}); }), ErrorCode::InvalidInstance);
}

// Every valid instance with n <= 2, k <= 3 and denominators <= 4 derives and
// re-verifies, or reports InternalBorderline.
TEST(Soundness, SmallEnumeration) {
  std::set<Rational> vals;
  for (int d = 1; d <= 4; ++d)
    for (int a = -2 * d; a <= d; ++a) vals.insert(R(a, d));
  int derived = 0, borderline = 0;
  for (int n = 1; n <= 2; ++n)
    for (int k = 1; k <= 3; ++k)
      for (int l = 0; l < k; ++l)
        for (const auto& sp : vals)
          for (const auto& sr : vals)
            for (int td = 1; td <= 4; ++td)
              for (int tn = 0; tn <= td; ++tn) {
                Rational th(tn, td);
                if (th.den() != td || th < R(l, k)) continue;
                auto inst = make(n, k, l, sp, sr, th);
                if (!validate_instance(inst).ok()) continue;
                try {
                  auto pc = derive_chain(inst);
                  verify_chain(pc);
                  ASSERT_EQ(reconstruct_instance(pc).sq, inst.sq);
                  ++derived;
                } catch (const Error& e) {
                  ASSERT_EQ(e.code(), ErrorCode::InternalBorderline) << e.what();
                  ++borderline;
                }
              }
  EXPECT_GT(derived, 1000);
  EXPECT_LT(borderline, derived / 100 + 1);
}

TEST(Soundness, RecurrenceCrossCheck) {
  int inductions = 0;
  for (auto inst : {make(1, 4, 1, R(1, 3), R(-1, 2), R(1, 4)), make(2, 4, 2, R(1, 3), R(-1), R(1, 2)),
                    make(3, 4, 3, R(1, 2), R(-1, 2), R(3, 4))}) {
    auto pc = derive_chain(inst);
    for (const auto& st : pc.steps) {
      if (st.rule != Rule::InductK && st.rule != Rule::InductDiag) continue;
      ++inductions;
      const int m = st.inputs[1].order;
      const int k = st.inputs[0].order - m, l = st.output.order - m;
      // 1/q = (l/k)(1/p) + ((k-l)/k)(1/r) after eliminating the middle index
      EXPECT_EQ(st.output.s, R(l, k) * st.inputs[0].s + R(k - l, k) * st.inputs[1].s);
      if (st.rule == Rule::InductDiag) {
        const Step& g2 = pc.steps[st.children[1]];
        const Rational t = g2.output.s;
        EXPECT_EQ(t, R(1, l) * st.output.s + R(l - 1, l) * st.inputs[1].s);
      }
    }
  }
  EXPECT_GE(inductions, 5);
}

TEST(Verify, TamperingIsDetected) {
  auto pc = derive_chain(make(3, 3, 1, R(1), R(-1, 3), R(1, 3)));
  auto bad = pc;
  bad.steps[0].exponents[0] = R(2);
  EXPECT_EQ(code_of([&] { verify_chain(bad); }), ErrorCode::InvalidCertificate);
  bad = pc;
  bad.steps.back().output.s = bad.steps.back().output.s + R(1, 7);
  EXPECT_EQ(code_of([&] { verify_chain(bad); }), ErrorCode::InvalidCertificate);
  bad = pc;
  bad.steps.pop_back();
  EXPECT_EQ(code_of([&] { verify_chain(bad); }), ErrorCode::InvalidCertificate);
  bad = pc;
  std::swap(bad.steps.back().children[0], bad.steps.back().children[1]);
  EXPECT_EQ(code_of([&] { verify_chain(bad); }), ErrorCode::InvalidCertificate);
  bad = pc;
  bad.instance.theta = R(1, 2);
  EXPECT_EQ(code_of([&] { verify_chain(bad); }), ErrorCode::InvalidCertificate);
}

TEST(Certificate, RoundTrip) {
  for (auto inst : {make(3, 3, 1, R(1), R(-1, 3), R(1, 3)), make(1, 3, 2, R(-1, 2), R(-1), R(5, 6)),
                    make(3, 2, 0, R(1), std::nullopt, R(1))}) {
    auto pc = derive_chain(inst);
    const auto text = serialize_chain(pc);
    EXPECT_EQ(text.rfind(std::string(kCertificateHeader), 0), 0u);
    auto back = parse_chain(text);
    EXPECT_EQ(back.instance, pc.instance);
    EXPECT_EQ(serialize_chain(back), text);
    EXPECT_NO_THROW(verify_chain(back));
  }
  EXPECT_THROW(parse_chain("instance n=1"), Error);
  EXPECT_THROW(parse_chain(std::string(kCertificateHeader) + "\nstep 0 NOPE\n"), Error);
}

TEST(Certificate, GoldenFiles) {
  struct Golden {
    const char* file;
    InequalityInstance inst;
  };
  const Golden cases[] = {
      {"base_n1.cert", make(1, 2, 1, R(1, 2), R(-1), R(1, 2))},
      {"induct_k_n3.cert", make(3, 3, 1, R(1), R(-1, 3), R(1, 3))},
      {"endpoint_n1.cert", make(1, 3, 2, R(-1, 2), R(-1), R(5, 6))},
      {"diag_n2.cert", make(2, 3, 2, R(1, 3), R(-1, 3), R(2, 3))},
      {"sobolev_n3.cert", make(3, 2, 0, R(1), std::nullopt, R(1))},
  };
  for (const auto& g : cases) {
    const auto expected = read_file(std::string(XP_GOLDEN_DIR) + "/" + g.file);
    ASSERT_FALSE(expected.empty()) << g.file;
    EXPECT_EQ(serialize_chain(derive_chain(g.inst)), expected) << g.file;
    EXPECT_EQ(serialize_chain(derive_chain(g.inst)), serialize_chain(derive_chain(g.inst)));
    EXPECT_NO_THROW(verify_chain(parse_chain(expected)));
  }
}

TEST(Evaluate, HolderIdentityStepsHaveRatioOne) {
  auto pc = sobolev_chain(1, 3, 0, R(-1, 2));
  auto u = fn("bump(R=1)");
  auto rep = evaluate_chain(pc, u, default_grid(u), true);
  ASSERT_EQ(rep.steps.size(), 3u);
  for (const auto& s : rep.steps) EXPECT_NEAR(s.ratio, 1.0, 1e-10);
  EXPECT_EQ(rep.violations, 0);
}

TEST(Evaluate, BaseLemmaChain) {
  auto pc = derive_chain(make(1, 2, 1, R(1, 2), R(-1), R(1, 2)));
  auto u = fn("bump(R=1)");
  auto rep = evaluate_chain(pc, u, default_grid(u), true);
  EXPECT_EQ(rep.violations, 0);
  EXPECT_TRUE(std::isfinite(rep.end_to_end));
  EXPECT_NEAR(rep.end_to_end, 0.8884924, 1e-6);  // pinned regression value
  auto amp = evaluate_chain(pc, scale_amplitude(u, 10), default_grid(u), true);
  EXPECT_NEAR(amp.end_to_end / rep.end_to_end, 1.0, 1e-12);
}

TEST(Evaluate, NoViolationsOnFamily) {
  for (auto inst : {make(1, 3, 2, R(-1, 2), R(-1), R(5, 6)), make(2, 3, 2, R(1, 3), R(-1, 3), R(2, 3))}) {
    auto pc = derive_chain(inst);
    for (const auto& u : sample_family(inst.n, 3, 17)) {
      auto rep = evaluate_chain(pc, u, default_grid(u), true);
      EXPECT_EQ(rep.violations, 0) << u.dsl();
    }
  }
}

TEST(Evaluate, StepBoundModes) {
  Step lemma;
  lemma.rule = Rule::Lemma31;
  lemma.constant = 1.5;
  Step sob;
  sob.rule = Rule::HolderIdentity;
  sob.inputs = {{2, R(-1, 2)}};
  sob.output = {1, R(-3, 2)};
  sob.constant = 1.0;
  EXPECT_EQ(step_bound(lemma, false), 1.5);
  EXPECT_EQ(step_bound(sob, true), 1.0);
  EXPECT_FALSE(step_bound(sob, false).has_value());
}

TEST(Sweep, ValidInstanceIsDilationInvariant) {
  auto inst = make(1, 3, 2, R(-1, 2), R(-1), R(5, 6));
  auto u = fn("bump_wave(R=1,omega=3)");
  auto r = dilation_sweep(inst, u, {0.5, 1, 2});
  const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
  EXPECT_LE(*hi / *lo, 1.01);
  auto rep = evaluate_chain(derive_chain(inst), u, default_grid(u), true);
  EXPECT_EQ(r[1], rep.end_to_end);
}

TEST(Sweep, PerturbedBalanceHasTheAnalyticSlope) {
  auto inst = make(1, 2, 1, R(1, 2), R(-1), R(1, 2));
  inst.sq = inst.sq + R(1, 10);
  const double defect = balance_defect(inst).to_double();
  EXPECT_EQ(balance_defect(inst), R(-1, 10));
  auto u = fn("bump(R=1)");
  auto r = dilation_sweep(inst, u, {1, 2});
  const double slope = std::log(r[1] / r[0]) / std::log(2.0);
  EXPECT_NEAR(slope, defect, 0.05 * std::abs(defect));
}

TEST(Empirical, StepConstantsCoverTheSample) {
  auto pc = derive_chain(make(1, 2, 1, R(1, 2), R(-1), R(1, 2)));
  auto c = empirical_step_constants(pc, true, 6, 1);
  ASSERT_EQ(c.size(), pc.steps.size());
  for (double v : c) EXPECT_GT(v, 0.0);
  for (const auto& u : sample_family(1, 6, 1)) {
    auto rep = evaluate_chain(pc, u, default_grid(u), true);
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_LE(rep.steps[i].ratio, c[i]);
  }
}
