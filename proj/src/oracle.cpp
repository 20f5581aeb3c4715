#include "pqcv/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace pqcv {

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below(0)");
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - (max % n + 1) % n;  // largest multiple of n, minus one
  std::uint64_t x;
  do {
    x = next();
  } while (x > limit);
  return x % n;
}

std::vector<double> random_angles(Rng& rng, std::size_t count) {
  std::vector<double> v(count);
  for (auto& x : v) x = rng.uniform(0.0, 2 * std::numbers::pi);
  return v;
}

// ------------------------------------------------------------- simulation

std::vector<Complex> numeric_gate_matrix(const Gate& g, std::span<const double> full_angles) {
  const Complex i(0.0, 1.0);
  const double r = 1.0 / std::sqrt(2.0);
  switch (g.kind) {
    case GateKind::X: return {0, 1, 1, 0};
    case GateKind::Y: return {0, -i, i, 0};
    case GateKind::Z: return {1, 0, 0, -1};
    case GateKind::H: return {r, r, r, -r};
    case GateKind::S: return {1, 0, 0, i};
    case GateKind::Sdg: return {1, 0, 0, -i};
    case GateKind::T: return {1, 0, 0, std::exp(i * (std::numbers::pi / 4))};
    case GateKind::Tdg: return {1, 0, 0, std::exp(-i * (std::numbers::pi / 4))};
    case GateKind::CX: return {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0};
    case GateKind::CZ: return {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, -1};
    case GateKind::Swap: return {1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1};
    default: break;
  }
  const double t = g.angle->evaluate(full_angles);
  const double c = std::cos(t / 2);
  const double s = std::sin(t / 2);
  switch (g.kind) {
    case GateKind::RX: return {c, -i * s, -i * s, c};
    case GateKind::RY: return {c, -s, s, c};
    case GateKind::RZ: return {std::exp(-i * (t / 2)), 0, 0, std::exp(i * (t / 2))};
    case GateKind::P: return {1, 0, 0, std::exp(i * t)};
    default: break;
  }
  throw std::logic_error("numeric_gate_matrix: unhandled gate kind");
}

namespace {

void apply_matrix(std::span<Complex> v, int n, const std::vector<int>& qubits, const std::vector<Complex>& m) {
  const std::size_t dim = v.size();
  if (qubits.size() == 1) {
    const std::size_t stride = std::size_t{1} << (n - 1 - qubits[0]);
    for (std::size_t i = 0; i < dim; ++i) {
      if (i & stride) continue;
      const Complex a = v[i];
      const Complex b = v[i | stride];
      v[i] = m[0] * a + m[1] * b;
      v[i | stride] = m[2] * a + m[3] * b;
    }
    return;
  }
  const std::size_t sa = std::size_t{1} << (n - 1 - qubits[0]);
  const std::size_t sb = std::size_t{1} << (n - 1 - qubits[1]);
  for (std::size_t i = 0; i < dim; ++i) {
    if ((i & sa) || (i & sb)) continue;
    const std::size_t idx[4] = {i, i | sb, i | sa, i | sa | sb};
    Complex in[4];
    for (int k = 0; k < 4; ++k) in[k] = v[idx[k]];
    for (int r = 0; r < 4; ++r) {
      Complex acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += m[r * 4 + k] * in[k];
      v[idx[r]] = acc;
    }
  }
}

DenseUnitary identity_matrix(int n) {
  if (n > kMaxDenseQubits) throw std::invalid_argument("dense simulation limited to 12 qubits");
  DenseUnitary u;
  u.n_qubits = n;
  u.data.assign(u.dim() * u.dim(), Complex(0.0));
  for (std::size_t k = 0; k < u.dim(); ++k) u.at(k, k) = 1.0;
  return u;
}

}  // namespace

void apply_gate(std::span<Complex> state, int n_qubits, const Gate& g, std::span<const double> full_angles) {
  apply_matrix(state, n_qubits, g.qubits, numeric_gate_matrix(g, full_angles));
}

DenseUnitary simulate_serial(const PQC& c, std::span<const double> full_angles) {
  DenseUnitary u = identity_matrix(c.n_qubits);
  const std::size_t dim = u.dim();
  for (const auto& g : c.gates) {
    const auto m = numeric_gate_matrix(g, full_angles);
    for (std::size_t col = 0; col < dim; ++col) {
      apply_matrix(std::span(u.data).subspan(col * dim, dim), c.n_qubits, g.qubits, m);
    }
  }
  return u;
}

DenseUnitary simulate(const PQC& c, std::span<const double> full_angles) {
  DenseUnitary u = identity_matrix(c.n_qubits);
  const auto dim = static_cast<std::int64_t>(u.dim());
  std::vector<std::vector<Complex>> mats;
  mats.reserve(c.gates.size());
  for (const auto& g : c.gates) mats.push_back(numeric_gate_matrix(g, full_angles));
  // columns evolve independently, so each thread carries whole columns through the circuit
#pragma omp parallel for schedule(static)
  for (std::int64_t col = 0; col < dim; ++col) {
    auto column = std::span(u.data).subspan(static_cast<std::size_t>(col * dim), static_cast<std::size_t>(dim));
    for (std::size_t k = 0; k < c.gates.size(); ++k) apply_matrix(column, c.n_qubits, c.gates[k].qubits, mats[k]);
  }
  return u;
}

std::vector<Complex> simulate_state(const PQC& c, std::span<const double> full_angles,
                                    std::vector<Complex> state) {
  if (state.size() != (std::size_t{1} << c.n_qubits)) throw std::invalid_argument("state size mismatch");
  for (const auto& g : c.gates) apply_gate(state, c.n_qubits, g, full_angles);
  return state;
}

bool equal_up_to_phase(std::span<const Complex> a, std::span<const Complex> b, double tol) {
  if (a.size() != b.size()) return false;
  std::size_t pivot = a.size();
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a[k]) > 1e-6) {
      pivot = k;
      break;
    }
  }
  if (pivot == a.size()) {
    return std::all_of(b.begin(), b.end(), [&](Complex x) { return std::abs(x) <= tol; });
  }
  if (std::abs(b[pivot]) <= 1e-12) return false;
  const Complex phase = a[pivot] / b[pivot];
  if (std::abs(std::abs(phase) - 1.0) > tol) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a[k] - phase * b[k]) > tol) return false;
  }
  return true;
}

bool is_unitary(const DenseUnitary& u, double tol) {
  const std::size_t d = u.dim();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += u.data[i * d + k] * std::conj(u.data[j * d + k]);
      if (std::abs(acc - (i == j ? 1.0 : 0.0)) > tol) return false;
    }
  }
  return true;
}

// -------------------------------------------------------------- generators

std::string family_name(Family f) {
  switch (f) {
    case Family::EfficientSU2: return "EfficientSU2";
    case Family::RealAmplitudes: return "RealAmplitudes";
    case Family::TwoLocal: return "TwoLocal";
  }
  return "?";
}

Family family_from_name(const std::string& s) {
  for (auto f : {Family::EfficientSU2, Family::RealAmplitudes, Family::TwoLocal}) {
    if (s == family_name(f)) return f;
  }
  throw std::invalid_argument("unknown family '" + s + "'");
}

std::string BenchSpec::name() const {
  return family_name(family) + "_" + std::to_string(n_qubits) + "_" + std::to_string(reps);
}

Generated generate(const BenchSpec& spec) {
  if (spec.reps < 1) throw std::invalid_argument("reps must be at least 1");
  if (spec.n_qubits < 1) throw std::invalid_argument("need at least one qubit");
  std::vector<GateKind> rotations;
  GateKind entangler = GateKind::CX;
  std::string recipe;
  switch (spec.family) {
    case Family::RealAmplitudes:
      rotations = {GateKind::RY};
      recipe = "reps x (ry layer, cx entangler) + final ry layer";
      break;
    case Family::EfficientSU2:
      rotations = {GateKind::RY, GateKind::RZ};
      recipe = "reps x (ry layer, rz layer, cx entangler) + final ry and rz layers";
      break;
    case Family::TwoLocal: {
      rotations = spec.rotations;
      entangler = spec.entangler;
      if (rotations.empty()) throw std::invalid_argument("TwoLocal needs at least one rotation kind");
      std::string rot;
      for (auto k : rotations) rot += std::string(rot.empty() ? "" : ", ") + std::string(gate_name(k)) + " layer";
      recipe = "reps x (" + rot + ", " + std::string(gate_name(entangler)) + " entangler) + final rotation layers";
      break;
    }
  }
  for (auto k : rotations) {
    if (!is_rotation(k)) throw std::invalid_argument("rotation block must use rotation gates");
  }
  if (gate_arity(entangler) != 2) throw std::invalid_argument("entangler must be a two-qubit gate");

  PQC c;
  c.n_qubits = spec.n_qubits;
  auto rotation_layer = [&](GateKind k) {
    for (int q = 0; q < spec.n_qubits; ++q) {
      const ParamId id = c.params.declare("p" + std::to_string(c.params.size()));
      c.gates.push_back(Gate{k, {q}, AngleExpr::param(id)});
    }
  };
  auto entangle = [&] {
    for (int a = 0; a < spec.n_qubits; ++a) {
      if (spec.entanglement == Entanglement::Linear) {
        if (a + 1 < spec.n_qubits) c.gates.push_back(Gate{entangler, {a, a + 1}, std::nullopt});
      } else {
        for (int b = a + 1; b < spec.n_qubits; ++b) c.gates.push_back(Gate{entangler, {a, b}, std::nullopt});
      }
    }
  };
  for (int r = 0; r < spec.reps; ++r) {
    for (auto k : rotations) rotation_layer(k);
    entangle();
  }
  for (auto k : rotations) rotation_layer(k);

  std::ostringstream h;
  h << spec.name() << '\n'
    << "family " << family_name(spec.family) << "-like, " << spec.n_qubits << " qubits, " << spec.reps
    << " reps, " << (spec.entanglement == Entanglement::Linear ? "linear" : "full") << " entanglement\n"
    << "layers: " << recipe << '\n'
    << "parameters " << c.params.size() << ", gates " << c.gates.size();
  return Generated{std::move(c), h.str()};
}

// ---------------------------------------------------------------- rewriter

namespace {

bool disjoint(const Gate& a, const Gate& b) {
  for (int q : a.qubits) {
    if (std::find(b.qubits.begin(), b.qubits.end(), q) != b.qubits.end()) return false;
  }
  return true;
}

Gate random_constant_gate(Rng& rng, int n) {
  static constexpr GateKind one_q[] = {GateKind::X, GateKind::Y, GateKind::Z, GateKind::H,
                                       GateKind::S, GateKind::Sdg, GateKind::T, GateKind::Tdg};
  static constexpr GateKind two_q[] = {GateKind::CX, GateKind::CZ, GateKind::Swap};
  if (n >= 2 && rng.below(4) == 0) {
    const int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
    if (b >= a) ++b;
    return Gate{two_q[rng.below(3)], {a, b}, std::nullopt};
  }
  const int q = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
  if (rng.below(5) == 0) {
    // constant-angle rotation; not parameterised
    static constexpr GateKind rot[] = {GateKind::RX, GateKind::RY, GateKind::RZ};
    const double a = rng.uniform(-std::numbers::pi, std::numbers::pi);
    return Gate{rot[rng.below(3)], {q}, AngleExpr::constant_angle(a)};
  }
  return Gate{one_q[rng.below(8)], {q}, std::nullopt};
}

}  // namespace

PQC rewrite_equivalent(const PQC& c, std::uint64_t seed, int n_rewrites) {
  Rng rng(seed);
  PQC r = c;
  auto& gs = r.gates;
  const Gate x_gate{GateKind::X, {0}, std::nullopt};
  for (int done = 0, attempts = 0; done < n_rewrites && attempts < 100 * (n_rewrites + 1); ++attempts) {
    switch (rng.below(4)) {
      case 0: {  // cx a b -> h b; cz a b; h b
        std::vector<std::size_t> cand;
        for (std::size_t i = 0; i < gs.size(); ++i) {
          if (gs[i].kind == GateKind::CX) cand.push_back(i);
        }
        if (cand.empty()) continue;
        const auto i = cand[rng.below(cand.size())];
        const int a = gs[i].qubits[0];
        const int b = gs[i].qubits[1];
        const Gate h{GateKind::H, {b}, std::nullopt};
        gs[i] = Gate{GateKind::CZ, {a, b}, std::nullopt};
        gs.insert(gs.begin() + static_cast<std::ptrdiff_t>(i) + 1, h);
        gs.insert(gs.begin() + static_cast<std::ptrdiff_t>(i), h);
        break;
      }
      case 1: {  // insert g; g^dagger
        const auto pos = static_cast<std::ptrdiff_t>(rng.below(gs.size() + 1));
        const Gate g = random_constant_gate(rng, r.n_qubits);
        gs.insert(gs.begin() + pos, {g, adjoint_gate(g)});
        break;
      }
      case 2: {  // commute neighbours on disjoint qubits
        std::vector<std::size_t> cand;
        for (std::size_t i = 0; i + 1 < gs.size(); ++i) {
          if (disjoint(gs[i], gs[i + 1]) && !(gs[i].is_parameterised() && gs[i + 1].is_parameterised())) {
            cand.push_back(i);
          }
        }
        if (cand.empty()) continue;
        const auto i = cand[rng.below(cand.size())];
        std::swap(gs[i], gs[i + 1]);
        break;
      }
      default: {  // x; rz(a); x <-> rz(-a)
        std::vector<std::size_t> cand;
        for (std::size_t i = 0; i < gs.size(); ++i) {
          if (gs[i].kind == GateKind::RZ) cand.push_back(i);
        }
        if (cand.empty()) continue;
        const auto i = cand[rng.below(cand.size())];
        const int q = gs[i].qubits[0];
        Gate flipped = gs[i];
        flipped.angle = -*flipped.angle;
        const bool wrapped = i > 0 && i + 1 < gs.size() && gs[i - 1].kind == GateKind::X &&
                             gs[i - 1].qubits[0] == q && gs[i + 1].kind == GateKind::X && gs[i + 1].qubits[0] == q;
        if (wrapped) {
          gs[i] = flipped;
          gs.erase(gs.begin() + static_cast<std::ptrdiff_t>(i) + 1);
          gs.erase(gs.begin() + static_cast<std::ptrdiff_t>(i) - 1);
        } else {
          Gate x = x_gate;
          x.qubits = {q};
          gs[i] = flipped;
          gs.insert(gs.begin() + static_cast<std::ptrdiff_t>(i) + 1, x);
          gs.insert(gs.begin() + static_cast<std::ptrdiff_t>(i), x);
        }
        break;
      }
    }
    ++done;
  }
  return r;
}

PQC inject_errors(const PQC& c, double rate, ErrorKind kind, std::uint64_t seed, int* inserted) {
  if (!(rate > 0.0 && rate <= 1.0)) throw std::invalid_argument("error rate must lie in (0, 1]");
  if (c.gates.empty()) throw std::invalid_argument("cannot inject errors into an empty circuit");
  const GateKind err = kind == ErrorKind::BitFlip ? GateKind::X : GateKind::Z;
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(seed + attempt);
    PQC r = c;
    r.gates.clear();
    int count = 0;
    for (const auto& g : c.gates) {
      r.gates.push_back(g);
      if (rng.bernoulli(rate)) {
        const int q = g.qubits[rng.below(g.qubits.size())];
        r.gates.push_back(Gate{err, {q}, std::nullopt});
        ++count;
      }
    }
    if (count > 0) {
      if (inserted) *inserted = count;
      return r;
    }
  }
}

PQC convert_rz_to_phase(const PQC& c) {
  PQC r = c;
  for (auto& g : r.gates) {
    if (g.kind == GateKind::RZ) g.kind = GateKind::P;
  }
  return r;
}

}  // namespace pqcv
