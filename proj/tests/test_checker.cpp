#include <gtest/gtest.h>

#include "support.hpp"

using namespace pqcv;
using namespace pqcv::testing;

namespace {

const char* kRzPair = "qubits 2; param phi, theta; rz(phi) 0; cx 0 1; x 0; rz(theta) 0;";
const char* kRzDiff = "qubits 2; param theta, phi; cx 0 1; x 0; rz(theta - phi) 0;";
const char* kRzPairZ = "qubits 2; param phi, theta; rz(phi) 0; cx 0 1; z 0; x 0; rz(theta) 0;";

CheckConfig with(Strategy s) {
  CheckConfig c;
  c.strategy = s;
  return c;
}

/// Equivalent partner: rewritten, sometimes with a phase-only change or an
/// injected error.
PQC partner(Rng& rng, const PQC& c, int mode) {
  PQC r = rewrite_equivalent(c, rng.next(), 1 + static_cast<int>(rng.below(6)));
  if (mode == 1 && !r.gates.empty()) r = inject_errors(r, 0.2, rng.bernoulli(0.5) ? ErrorKind::BitFlip : ErrorKind::PhaseFlip, rng.next());
  if (mode == 2) r = convert_rz_to_phase(r);
  return r;
}

}  // namespace

TEST(Checker, RzPairVersusRzDiff) {
  const PQC a = parse_pqc(kRzPair);
  const PQC b = parse_pqc(kRzDiff);
  for (auto s : {Strategy::Construct, Strategy::Alternate, Strategy::Auto}) {
    const auto r = check(a, b, with(s));
    EXPECT_EQ(r.verdict, Verdict::Equivalent) << to_string(s);
    EXPECT_TRUE(r.phase_is_constant);
    EXPECT_FALSE(r.aborted_at_param);
  }
  EXPECT_EQ(check(a, b).strategy, Strategy::Construct);  // not compatible
  EXPECT_TRUE(confirm_by_sampling(a, b, 20, 11));
}

TEST(Checker, SelfIsEquivalent) {
  const PQC a = parse_pqc(kRzPair);
  const auto r = check_alternate(a, a);
  EXPECT_EQ(r.verdict, Verdict::Equivalent);
  EXPECT_EQ(check(a, a).strategy, Strategy::Alternate);
  // identity plus at most one two-qubit gate worth of growth
  EXPECT_LE(r.stats.node_max, 3U * 2 + 1 + 8);
  EXPECT_TRUE(confirm_by_sampling(a, a, 1, 0));
}

TEST(Checker, ExtraZIsDetected) {
  const PQC a = parse_pqc(kRzPair);
  const PQC z = parse_pqc(kRzPairZ);
  EXPECT_EQ(check_construct(a, z).verdict, Verdict::NotEquivalent);
  const auto alt = check_alternate(a, z);
  EXPECT_EQ(alt.verdict, Verdict::NotEquivalent);
  EXPECT_FALSE(confirm_by_sampling(a, z, 20, 12));
}

TEST(Checker, ParameterDependentPhase) {
  const PQC a = parse_pqc(kRzPair);
  const PQC p = convert_rz_to_phase(a);
  for (auto s : {Strategy::Construct, Strategy::Alternate}) {
    const auto r = check(a, p, with(s));
    EXPECT_EQ(r.verdict, Verdict::EquivalentUpToGlobalPhase) << to_string(s);
    EXPECT_FALSE(r.phase_is_constant);
    EXPECT_TRUE(r.phase_modulus_one);
    const TrigPoly w = r.phase_poly();
    const TrigPoly mod = w * poly_conj(w);
    ASSERT_TRUE(mod.is_constant());
    EXPECT_NEAR(std::abs(mod.constant_term() - Complex(1.0)), 0.0, 1e-10);
  }
}

TEST(Checker, ConstantPhaseIsUpToPhase) {
  const PQC a = parse_pqc("qubits 1; param a; rz(a) 0; x 0; z 0;");
  const PQC b = parse_pqc("qubits 1; param a; rz(a) 0; y 0;");  // zx = iy
  const auto r = check(a, b);
  EXPECT_EQ(r.verdict, Verdict::EquivalentUpToGlobalPhase);
  EXPECT_TRUE(r.phase_is_constant);
}

TEST(Checker, EarlyAbortOnInjectedX) {
  BenchSpec s;
  s.family = Family::RealAmplitudes;
  s.n_qubits = 4;
  s.reps = 2;
  const PQC c = generate(s).circuit;
  PQC bad = rewrite_equivalent(c, 3, 10);
  // X right after the first rotation
  bad.gates.insert(bad.gates.begin() + 1, Gate{GateKind::X, {bad.gates[0].qubits[0]}, std::nullopt});
  ASSERT_TRUE(pair_compatible(c, bad));
  const auto r = check_alternate(c, bad);
  EXPECT_EQ(r.verdict, Verdict::NotEquivalent);
  ASSERT_TRUE(r.aborted_at_param.has_value());
  EXPECT_LT(r.gates_consumed, r.gates_total);
  EXPECT_EQ(check_construct(c, bad).verdict, Verdict::NotEquivalent);
  EXPECT_FALSE(confirm_by_sampling(c, bad, 20, 5));
}

TEST(Checker, AbortImpliesNotEquivalent) {
  Rng rng(19);
  BenchSpec s;
  s.n_qubits = 3;
  s.reps = 2;
  s.family = Family::EfficientSU2;
  const PQC c = generate(s).circuit;
  for (int t = 0; t < 20; ++t) {
    const PQC bad = inject_errors(rewrite_equivalent(c, rng.next(), 10), 0.05, ErrorKind::BitFlip, rng.next());
    const auto r = check_alternate(c, bad);
    if (r.aborted_at_param) EXPECT_EQ(r.verdict, Verdict::NotEquivalent);
    EXPECT_LE(r.gates_consumed, r.gates_total);
  }
}

TEST(Checker, RejectsMismatchedCircuits) {
  const PQC a = parse_pqc(kRzPair);
  EXPECT_THROW(check(a, parse_pqc("qubits 3; param phi, theta; rz(phi) 0; rz(theta) 0;")), std::invalid_argument);
  EXPECT_THROW(check(a, parse_pqc("qubits 2; param phi; rz(phi) 0;")), std::invalid_argument);
}

TEST(Checker, TimeoutIsRaised) {
  BenchSpec s;
  s.family = Family::EfficientSU2;
  s.n_qubits = 6;
  s.reps = 3;
  const PQC c = generate(s).circuit;
  CheckConfig cfg = with(Strategy::Construct);
  cfg.timeout_s = 0.01;
  EXPECT_THROW(check(c, c, cfg), Timeout);
}

TEST(Checker, MonomialOnlyNormalisation) {
  const PQC a = parse_pqc(kRzPair);
  CheckConfig cfg;
  cfg.scalar_extraction = false;
  EXPECT_EQ(check(a, parse_pqc(kRzDiff), cfg).verdict, Verdict::Equivalent);
  EXPECT_EQ(check(a, parse_pqc(kRzPairZ), cfg).verdict, Verdict::NotEquivalent);
  // without the proportional rule a parameter-dependent phase stays spread
  // over the node weights, so the root never reaches the identity node
  EXPECT_EQ(check(a, convert_rz_to_phase(a), cfg).verdict, Verdict::NotEquivalent);
  EXPECT_EQ(check(a, convert_rz_to_phase(a)).verdict, Verdict::EquivalentUpToGlobalPhase);
}

TEST(Checker, StrategyNames) {
  EXPECT_EQ(strategy_from_string("auto"), Strategy::Auto);
  EXPECT_EQ(verdict_from_string("EquivalentUpToGlobalPhase"), Verdict::EquivalentUpToGlobalPhase);
  EXPECT_THROW(strategy_from_string("fast"), std::invalid_argument);
  EXPECT_THROW(confirm_by_sampling(parse_pqc(kRzPair), parse_pqc(kRzPair), 0, 0), std::invalid_argument);
}

// ---- properties ----

TEST(CheckerProperty, StrategiesAgreeAndMatchSampling) {
  Rng rng(97);
  CircuitShape shape;
  shape.max_qubits = 6;
  shape.max_gates = 14;
  shape.max_params = 4;
  int seen[3] = {0, 0, 0};
  for (int trial = 0; trial < 210; ++trial) {
    const PQC c = random_circuit(rng, shape);
    const int mode = static_cast<int>(rng.below(3));
    const PQC d = partner(rng, c, mode);
    const auto rc = check_construct(c, d);
    const auto ra = check_alternate(c, d);
    EXPECT_EQ(rc.verdict, ra.verdict) << print_pqc(c) << "---\n" << print_pqc(d);
    const bool same = confirm_by_sampling(c, d, 20, rng.next());
    EXPECT_EQ(same, rc.verdict != Verdict::NotEquivalent) << print_pqc(c) << "---\n" << print_pqc(d);
    if (rc.verdict == Verdict::Equivalent) {
      ASSERT_TRUE(rc.phase_is_constant);
      EXPECT_NEAR(std::abs(rc.phase.weight - Complex(1.0)), 0.0, 1e-10);
    }
    if (rc.verdict == Verdict::EquivalentUpToGlobalPhase) EXPECT_TRUE(rc.phase_modulus_one);
    if (ra.aborted_at_param) EXPECT_EQ(rc.verdict, Verdict::NotEquivalent);
    ++seen[static_cast<int>(rc.verdict)];
  }
  // the generator must exercise every verdict
  for (int v : seen) EXPECT_GT(v, 10);
}
