#pragma once

// Shared helpers for the test binaries: random inputs and reference
// computations that avoid the decision-diagram code paths.

#include <cmath>
#include <string>
#include <vector>

#include "pqcv/checker.hpp"
#include "pqcv/circuit.hpp"
#include "pqcv/oracle.hpp"
#include "pqcv/stdd.hpp"
#include "pqcv/trdd.hpp"
#include "pqcv/trigpoly.hpp"

namespace pqcv::testing {

struct CircuitShape {
  int max_qubits = 4;
  int max_gates = 12;
  int max_params = 3;
  int max_coeff = 2;            // |integer multiplier| in angle expressions
  bool constant_offsets = true;  // add a random constant to some angles
};

inline Gate random_gate(Rng& rng, int n, int n_params, const CircuitShape& s) {
  constexpr GateKind kinds[] = {GateKind::X,  GateKind::Y,  GateKind::Z,   GateKind::H,  GateKind::S,
                                GateKind::Sdg, GateKind::T, GateKind::Tdg, GateKind::CX, GateKind::CZ,
                                GateKind::Swap, GateKind::RX, GateKind::RY, GateKind::RZ, GateKind::P};
  GateKind k = kinds[rng.below(std::size(kinds))];
  if (gate_arity(k) == 2 && n < 2) k = GateKind::RY;
  Gate g{k, {}, std::nullopt};
  const int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
  g.qubits.push_back(a);
  if (gate_arity(k) == 2) {
    int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
    if (b >= a) ++b;
    g.qubits.push_back(b);
  }
  if (is_rotation(k)) {
    AngleExpr e;
    if (n_params > 0) {
      const auto terms = 1 + rng.below(2);
      for (std::uint64_t t = 0; t < terms; ++t) {
        auto c = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(2 * s.max_coeff + 1))) - s.max_coeff;
        if (c == 0) c = 1;
        e = e + AngleExpr::param(static_cast<ParamId>(rng.below(static_cast<std::uint64_t>(n_params))), c);
      }
    }
    if (s.constant_offsets && (n_params == 0 || rng.bernoulli(0.3))) {
      e = e + AngleExpr::constant_angle(rng.uniform(-3.0, 3.0));
    }
    g.angle = e;
  }
  return g;
}

inline PQC random_circuit(Rng& rng, const CircuitShape& s) {
  PQC c;
  c.n_qubits = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(s.max_qubits)));
  const int m = static_cast<int>(rng.below(static_cast<std::uint64_t>(s.max_params + 1)));
  for (int p = 0; p < m; ++p) c.params.declare("a" + std::to_string(p));
  const auto ng = rng.below(static_cast<std::uint64_t>(s.max_gates + 1));
  for (std::uint64_t i = 0; i < ng; ++i) c.gates.push_back(random_gate(rng, c.n_qubits, m, s));
  return c;
}

inline std::vector<double> halves(const std::vector<double>& full) {
  std::vector<double> h;
  for (double x : full) h.push_back(x / 2.0);
  return h;
}

/// out(0..n-1) then in(0..n-1): row bits then column bits, qubit 0 first.
inline std::vector<std::uint32_t> unitary_levels(int n) {
  std::vector<std::uint32_t> lv;
  for (int q = 0; q < n; ++q) lv.push_back(IndexOrder::out(q));
  for (int q = 0; q < n; ++q) lv.push_back(IndexOrder::in(q));
  return lv;
}

/// max |a_rc - b_rc| with `a` row-major and `b` a DenseUnitary.
inline double max_deviation(const std::vector<Complex>& row_major, const DenseUnitary& u) {
  double err = 0.0;
  const std::size_t d = u.dim();
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) err = std::max(err, std::abs(row_major[r * d + c] - u.at(r, c)));
  }
  return err;
}

/// Symbolic unitary by explicit matrix products of TrigPoly entries (row-major).
inline std::vector<TrigPoly> symbolic_unitary(const PQC& c) {
  const std::size_t d = std::size_t{1} << c.n_qubits;
  std::vector<TrigPoly> u(d * d);
  for (std::size_t i = 0; i < d; ++i) u[i * d + i] = TrigPoly::constant(1.0);
  for (const auto& g : c.gates) {
    const auto gm = gate_matrix(g);
    const std::size_t k = g.qubits.size();
    const std::size_t gd = std::size_t{1} << k;
    auto sub = [&](std::size_t idx) {
      std::size_t s = 0;
      for (std::size_t j = 0; j < k; ++j) {
        const int q = g.qubits[j];
        s = (s << 1) | ((idx >> (c.n_qubits - 1 - q)) & 1U);
      }
      return s;
    };
    std::size_t mask = 0;
    for (int q : g.qubits) mask |= std::size_t{1} << (c.n_qubits - 1 - q);
    std::vector<TrigPoly> next(d * d);
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t m = 0; m < d; ++m) {
        if ((r & ~mask) != (m & ~mask)) continue;
        const TrigPoly& gv = gm[sub(r) * gd + sub(m)];
        if (gv.is_zero()) continue;
        for (std::size_t col = 0; col < d; ++col) {
          if (u[m * d + col].is_zero()) continue;
          next[r * d + col] += gv * u[m * d + col];
        }
      }
    }
    u = std::move(next);
  }
  return u;
}

/// Reference diagram of a row-major symbolic matrix over out/in levels.
inline STDD stdd_from_matrix(StddManager& m, const std::vector<TrigPoly>& u, int n) {
  std::vector<std::uint32_t> levels;
  for (int q = 0; q < n; ++q) {
    levels.push_back(IndexOrder::out(q));
    levels.push_back(IndexOrder::in(q));
  }
  const std::size_t d = std::size_t{1} << n;
  return m.from_function(levels, [&](std::uint64_t bits) {
    std::size_t r = 0;
    std::size_t c = 0;
    for (int q = 0; q < n; ++q) {
      const auto shift = static_cast<unsigned>(2 * (n - 1 - q));
      r = (r << 1) | ((bits >> (shift + 1)) & 1U);
      c = (c << 1) | ((bits >> shift) & 1U);
    }
    return m.weights().from_poly(u[r * d + c]);
  });
}

inline TrigPoly random_poly(Rng& rng, int n_vars, int max_terms, int max_cos) {
  std::vector<Term> terms;
  const auto nt = rng.below(static_cast<std::uint64_t>(max_terms + 1));
  for (std::uint64_t t = 0; t < nt; ++t) {
    std::vector<Factor> fs;
    for (int v = 0; v < n_vars; ++v) {
      if (rng.bernoulli(0.4)) continue;
      Factor f{static_cast<ParamId>(v), static_cast<std::uint8_t>(rng.below(2)),
               static_cast<std::uint32_t>(rng.below(static_cast<std::uint64_t>(max_cos + 1)))};
      if (f.sin_exp == 0 && f.cos_exp == 0) continue;
      fs.push_back(f);
    }
    // small integers and halves keep independent routes bit-comparable
    const Complex coeff(static_cast<double>(static_cast<int>(rng.below(7)) - 3) / 2.0,
                        static_cast<double>(static_cast<int>(rng.below(7)) - 3) / 2.0);
    terms.push_back(Term{Monomial(fs), coeff});
  }
  return TrigPoly(terms);
}

inline std::vector<double> random_halves(Rng& rng, std::size_t n) {
  std::vector<double> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(rng.uniform(-3.2, 3.2));
  return v;
}

}  // namespace pqcv::testing
