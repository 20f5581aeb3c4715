#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "support.hpp"

using namespace pqcv;
using namespace pqcv::testing;

namespace {

const Complex kI(0.0, 1.0);

struct Fixture {
  TrddManager tr;
  StddManager dd;
  explicit Fixture(int n) : dd(tr, IndexOrder::for_circuit(n)) {}
};

/// Random tensor over `levels` with its table of polynomial entries.
struct Tensor {
  std::vector<std::uint32_t> levels;
  std::vector<TrigPoly> table;
  STDD dd;
};

Tensor random_tensor(Rng& rng, StddManager& m, std::vector<std::uint32_t> levels) {
  Tensor t;
  t.levels = std::move(levels);
  t.table.resize(std::size_t{1} << t.levels.size());
  for (auto& p : t.table) p = rng.bernoulli(0.25) ? TrigPoly() : random_poly(rng, 2, 2, 1);
  t.dd = m.from_function(t.levels, [&](std::uint64_t bits) { return m.weights().from_poly(t.table[bits]); });
  return t;
}

std::vector<std::uint32_t> random_levels(Rng& rng, std::uint32_t universe, std::size_t max_size) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t l = 0; l < universe; ++l) {
    if (out.size() < max_size && rng.bernoulli(0.5)) out.push_back(l);
  }
  return out;
}

/// Value of a tensor at a full assignment (bit per level), numerically.
Complex value_at(const Tensor& t, const std::vector<int>& assign, std::span<const double> half) {
  std::uint64_t bits = 0;
  for (auto l : t.levels) bits = (bits << 1) | static_cast<std::uint64_t>(assign[l]);
  return poly_eval(t.table[bits], half);
}

Complex value_at(const std::vector<Complex>& dense, const std::vector<std::uint32_t>& levels, const std::vector<int>& assign) {
  std::uint64_t bits = 0;
  for (auto l : levels) bits = (bits << 1) | static_cast<std::uint64_t>(assign[l]);
  return dense[bits];
}

std::size_t non_terminal(const StddManager& m, const STDD& f) { return m.node_count(f) - 1; }

}  // namespace

TEST(Stdd, RedundantNodeRemoved) {
  Fixture f(1);
  const STDD a = f.dd.leaf(f.tr.from_poly(TrigPoly::cos_of(0)));
  const STDD r = f.dd.make_node(0, a, a);
  EXPECT_TRUE(r.root->is_terminal());
  EXPECT_EQ(r.weight, a.weight);
  EXPECT_TRUE(f.dd.make_node(0, f.dd.zero(), f.dd.zero()).is_zero());
}

TEST(Stdd, FactorPushedToIncomingEdge) {
  Fixture f(1);
  const TrigPoly sc = TrigPoly::sin_of(0) * TrigPoly::cos_of(1);
  const STDD r = f.dd.make_node(0, f.dd.leaf(f.tr.from_poly(sc)), f.dd.leaf(f.tr.from_poly(TrigPoly::sin_of(0))));
  ASSERT_FALSE(r.root->is_terminal());
  EXPECT_TRUE(f.tr.to_poly(r.weight).approx_equal(TrigPoly::sin_of(0)));
  EXPECT_TRUE(f.tr.to_poly(r.root->wlow).approx_equal(TrigPoly::cos_of(1)));
  EXPECT_EQ(r.root->whigh, f.tr.one());
  Rng rng(3);
  const std::uint32_t lv[] = {0};
  for (int k = 0; k < 5; ++k) {
    const auto h = random_halves(rng, 2);
    const auto e = f.dd.eval(r, h, lv);
    EXPECT_NEAR(std::abs(e[0] - std::sin(h[0]) * std::cos(h[1])), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(e[1] - std::sin(h[0])), 0.0, 1e-12);
  }
}

TEST(Stdd, AddIdentitiesAndDoubling) {
  Fixture f(2);
  Rng rng(5);
  const Tensor t = random_tensor(rng, f.dd, {0, 2, 3});
  const STDD& F = t.dd;
  EXPECT_EQ(f.dd.equal(f.dd.add(F, f.dd.zero()), F), StddEquality::Identical);
  const STDD twice = f.dd.add(F, F);
  if (!F.is_zero()) {
    EXPECT_EQ(twice.root, F.root);
    EXPECT_TRUE(f.tr.to_poly(twice.weight).approx_equal(Complex(2.0) * f.tr.to_poly(F.weight)));
  }
}

TEST(Stdd, EqualityClasses) {
  Fixture f(2);
  const STDD id = f.dd.identity(2);
  EXPECT_EQ(f.dd.equal(id, id), StddEquality::Identical);
  EXPECT_EQ(f.dd.equal(id, f.dd.scale(id, f.tr.constant(2.0))), StddEquality::SameStructureDifferentWeight);
  const STDD x = circuit_unitary(f.dd, parse_pqc("qubits 2; x 0;"));
  EXPECT_EQ(f.dd.equal(id, x), StddEquality::Different);
}

TEST(Stdd, IdentityShapeAndValue) {
  for (int n = 1; n <= 6; ++n) {
    Fixture f(n);
    const STDD id = f.dd.identity(n);
    // one output node and two input nodes per qubit
    EXPECT_EQ(non_terminal(f.dd, id), static_cast<std::size_t>(3 * n));
    EXPECT_TRUE(f.dd.validate(id).empty());
  }
  Fixture f(2);
  const auto e = f.dd.eval(f.dd.identity(2), {}, unitary_levels(2));
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(e[r * 4 + c], Complex(r == c ? 1.0 : 0.0));
  }
}

TEST(Stdd, RotationTimesInverseIsIdentity) {
  Fixture f(1);
  const PQC c = parse_pqc("qubits 1; param a; rz(a) 0; rz(-a) 0;");
  const STDD u = circuit_unitary(f.dd, c);
  EXPECT_EQ(f.dd.equal(u, f.dd.identity(1)), StddEquality::Identical);
}

TEST(Stdd, IdentityGateContractionRelabelsState) {
  Fixture f(1);
  Rng rng(9);
  // state on the bond level, identity from bond to out
  const Tensor s = random_tensor(rng, f.dd, {IndexOrder::bond(0)});
  const std::uint32_t rows[] = {IndexOrder::out(0)};
  const std::uint32_t cols[] = {IndexOrder::bond(0)};
  const STDD i = lower_gate(f.dd, Gate{GateKind::RZ, {0}, AngleExpr{}}, rows, cols);
  const STDD r = f.dd.contract(i, s.dd, {IndexOrder::bond(0)});
  const STDD expect = f.dd.rename(s.dd, {{IndexOrder::bond(0), IndexOrder::out(0)}});
  EXPECT_EQ(f.dd.equal(r, expect), StddEquality::Identical);
}

TEST(Stdd, HCxXMatrix) {
  Fixture f(2);
  const STDD u = circuit_unitary(f.dd, parse_pqc("qubits 2; h 0; cx 0 1; x 0;"));
  const auto e = f.dd.eval(u, {}, unitary_levels(2));
  const double k = 1 / std::sqrt(2.0);
  const double expect[4][4] = {{0, k, 0, -k}, {k, 0, -k, 0}, {k, 0, k, 0}, {0, k, 0, k}};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) EXPECT_NEAR(std::abs(e[r * 4 + c] - expect[r][c]), 0.0, 1e-12);
  }
}

TEST(Stdd, RzPairAtZeroIsPermutation) {
  Fixture f(2);
  const STDD u = circuit_unitary(f.dd, parse_pqc("qubits 2; param phi, theta; rz(phi) 0; cx 0 1; x 0; rz(theta) 0;"));
  const double zero[] = {0.0, 0.0};
  const auto e = f.dd.eval(u, zero, unitary_levels(2));
  // nonzero pattern of the symbolic matrix: (0,3), (1,2), (2,0), (3,1)
  const int col_of_row[] = {3, 2, 0, 1};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) EXPECT_NEAR(std::abs(e[r * 4 + c] - Complex(c == col_of_row[r] ? 1.0 : 0.0)), 0.0, 1e-12);
  }
}

TEST(Stdd, DependenceQueries) {
  Fixture f(2);
  EXPECT_FALSE(f.dd.depends_on(f.dd.identity(2), 0, false));
  const STDD u = circuit_unitary(f.dd, parse_pqc("qubits 2; param phi, theta; rz(phi) 0; cx 0 1; x 0; rz(theta) 0;"));
  EXPECT_TRUE(f.dd.depends_on(u, 0, false));
  // rz(t) p(t)^dagger = exp(-it/2) I: the parameter sits in the root weight only
  STDD d = circuit_unitary(f.dd, parse_pqc("qubits 2; param a; rz(a) 0;"));
  d = apply_right(f.dd, d, Gate{GateKind::P, {0}, AngleExpr::param(0)});
  EXPECT_EQ(d.root, f.dd.identity(2).root);
  EXPECT_FALSE(f.dd.depends_on(d, 0, true));
  EXPECT_TRUE(f.dd.depends_on(d, 0, false));
}

TEST(Stdd, DumpListsRoot) {
  Fixture f(1);
  const std::string d = f.dd.dump(f.dd.identity(1));
  EXPECT_NE(d.find("root"), std::string::npos);
  EXPECT_EQ(d, f.dd.dump(f.dd.identity(1)));
}

TEST(Stdd, EvalRejectsUnlistedLevel) {
  Fixture f(1);
  const std::uint32_t only_out[] = {IndexOrder::out(0)};
  EXPECT_THROW((void)f.dd.eval(f.dd.identity(1), {}, only_out), std::invalid_argument);
}

TEST(Stdd, StatsAreMonotone) {
  const PQC c = parse_pqc("qubits 3; param a, b; ry(a) 0; cx 0 1; rz(b) 2; cz 1 2; h 0;");
  const auto r = check_construct(c, c);
  EXPECT_LE(r.stats.node_final, r.stats.node_max);
  EXPECT_LE(r.stats.node_max, r.stats.nodes_tdd_total);
  EXPECT_GE(r.stats.nodes_trdd_total, 1U);
}

// ---- properties ----

TEST(StddProperty, AddAndContractMatchDenseTensors) {
  Rng rng(61);
  for (int trial = 0; trial < 150; ++trial) {
    Fixture f(3);
    const Tensor a = random_tensor(rng, f.dd, random_levels(rng, 9, 4));
    const Tensor b = random_tensor(rng, f.dd, random_levels(rng, 9, 4));
    std::vector<std::uint32_t> both;
    std::set_intersection(a.levels.begin(), a.levels.end(), b.levels.begin(), b.levels.end(), std::back_inserter(both));
    std::vector<std::uint32_t> shared;
    for (auto l : both) {
      if (rng.bernoulli(0.7)) shared.push_back(l);
    }
    std::vector<std::uint32_t> all;
    std::set_union(a.levels.begin(), a.levels.end(), b.levels.begin(), b.levels.end(), std::back_inserter(all));
    std::vector<std::uint32_t> free_levels;
    std::set_difference(all.begin(), all.end(), shared.begin(), shared.end(), std::back_inserter(free_levels));

    const STDD sum = f.dd.add(a.dd, b.dd);
    const STDD con = f.dd.contract(a.dd, b.dd, shared);
    ASSERT_TRUE(f.dd.validate(sum).empty()) << f.dd.validate(sum);
    ASSERT_TRUE(f.dd.validate(con).empty()) << f.dd.validate(con);

    const auto half = random_halves(rng, 2);
    const auto dsum = f.dd.eval(sum, half, all);
    const auto dcon = f.dd.eval(con, half, free_levels);
    std::vector<int> assign(9, 0);
    for (std::uint64_t e = 0; e < (std::uint64_t{1} << all.size()); ++e) {
      for (std::size_t k = 0; k < all.size(); ++k) assign[all[k]] = static_cast<int>((e >> (all.size() - 1 - k)) & 1U);
      EXPECT_NEAR(std::abs(value_at(dsum, all, assign) - (value_at(a, assign, half) + value_at(b, assign, half))), 0.0, 1e-8);
    }
    for (std::uint64_t e = 0; e < (std::uint64_t{1} << free_levels.size()); ++e) {
      for (std::size_t k = 0; k < free_levels.size(); ++k) {
        assign[free_levels[k]] = static_cast<int>((e >> (free_levels.size() - 1 - k)) & 1U);
      }
      Complex acc = 0.0;
      for (std::uint64_t s = 0; s < (std::uint64_t{1} << shared.size()); ++s) {
        for (std::size_t k = 0; k < shared.size(); ++k) assign[shared[k]] = static_cast<int>((s >> (shared.size() - 1 - k)) & 1U);
        acc += value_at(a, assign, half) * value_at(b, assign, half);
      }
      EXPECT_NEAR(std::abs(value_at(dcon, free_levels, assign) - acc), 0.0, 1e-8);
    }
  }
}

TEST(StddProperty, ContractionIsBilinear) {
  Rng rng(67);
  for (int trial = 0; trial < 100; ++trial) {
    Fixture f(2);
    const Tensor a = random_tensor(rng, f.dd, {0, 1, 2});
    const Tensor b = random_tensor(rng, f.dd, {0, 1, 2});
    const Tensor h = random_tensor(rng, f.dd, {1, 2, 3});
    const std::vector<std::uint32_t> shared{1, 2};
    const STDD lhs = f.dd.contract(f.dd.add(a.dd, b.dd), h.dd, shared);
    const STDD rhs = f.dd.add(f.dd.contract(a.dd, h.dd, shared), f.dd.contract(b.dd, h.dd, shared));
    EXPECT_EQ(f.dd.equal(lhs, rhs), StddEquality::Identical);
  }
}

TEST(StddProperty, RebuildIsFixedPointAndNodesStayNormalised) {
  Rng rng(71);
  CircuitShape shape;
  for (int trial = 0; trial < 100; ++trial) {
    const PQC c = random_circuit(rng, shape);
    Fixture f(c.n_qubits);
    const STDD u = circuit_unitary(f.dd, c);
    ASSERT_TRUE(f.dd.validate(u).empty()) << f.dd.validate(u);
    const STDD again = f.dd.rebuild(u);
    EXPECT_EQ(again.root, u.root);
    EXPECT_EQ(again.weight, u.weight);
  }
}

TEST(StddProperty, MonomialOnlyNormalisationStillEvaluatesCorrectly) {
  Rng rng(73);
  CircuitShape shape;
  shape.max_qubits = 3;
  for (int trial = 0; trial < 40; ++trial) {
    const PQC c = random_circuit(rng, shape);
    TrddManager tr;
    StddManager dd(tr, IndexOrder::for_circuit(c.n_qubits), StddManager::Options{false});
    const STDD u = circuit_unitary(dd, c);
    const auto angles = random_angles(rng, c.params.size());
    const auto e = dd.eval(u, halves(angles), unitary_levels(c.n_qubits));
    EXPECT_LE(max_deviation(e, simulate(c, angles)), 1e-8);
  }
}
