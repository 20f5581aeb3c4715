#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "pqcv/circuit.hpp"

namespace pqcv {

/// mt19937_64 with fixed output mappings, so streams are reproducible across
/// standard libraries: uniform() = (x >> 11) * 2^-53, below(n) rejects the
/// top partial block and reduces modulo n.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 eng_;
};

/// Full gate angles drawn uniformly from [0, 2pi).
std::vector<double> random_angles(Rng& rng, std::size_t count);

/// Column-major 2^n x 2^n matrix; qubit 0 is the most significant bit.
struct DenseUnitary {
  int n_qubits = 0;
  std::vector<Complex> data;

  [[nodiscard]] std::size_t dim() const { return std::size_t{1} << n_qubits; }
  Complex& at(std::size_t r, std::size_t c) { return data[c * dim() + r]; }
  [[nodiscard]] Complex at(std::size_t r, std::size_t c) const { return data[c * dim() + r]; }
};

inline constexpr int kMaxDenseQubits = 12;

/// Textbook numeric matrix of a gate (row-major), independent of the
/// symbolic machinery. Angles are full parameter values indexed by ParamId.
std::vector<Complex> numeric_gate_matrix(const Gate& g, std::span<const double> full_angles);

/// Applies a gate in place to a state vector of n qubits.
void apply_gate(std::span<Complex> state, int n_qubits, const Gate& g, std::span<const double> full_angles);

DenseUnitary simulate(const PQC& c, std::span<const double> full_angles);
DenseUnitary simulate_serial(const PQC& c, std::span<const double> full_angles);
std::vector<Complex> simulate_state(const PQC& c, std::span<const double> full_angles,
                                    std::vector<Complex> state);

/// Compares up to a global phase, fixed by the first entry of `a` whose
/// modulus exceeds 1e-6.
bool equal_up_to_phase(std::span<const Complex> a, std::span<const Complex> b, double tol);
bool is_unitary(const DenseUnitary& u, double tol);

enum class Family { EfficientSU2, RealAmplitudes, TwoLocal };
enum class Entanglement { Linear, Full };

struct BenchSpec {
  Family family = Family::RealAmplitudes;
  int n_qubits = 2;
  int reps = 1;
  Entanglement entanglement = Entanglement::Linear;
  std::uint64_t seed = 0;
  /// TwoLocal-like only.
  std::vector<GateKind> rotations{GateKind::RY, GateKind::RZ};
  GateKind entangler = GateKind::CZ;

  [[nodiscard]] std::string name() const;
};

std::string family_name(Family f);
Family family_from_name(const std::string& s);

struct Generated {
  PQC circuit;
  std::string header;
};

/// Layered ansatz; parameters are p0, p1, ... in order of use.
Generated generate(const BenchSpec& spec);

/// Applies n_rewrites randomly chosen unitary-preserving rules. Parameterised
/// gates keep their relative order and each parameter keeps its occurrence count.
PQC rewrite_equivalent(const PQC& c, std::uint64_t seed, int n_rewrites);

enum class ErrorKind { BitFlip, PhaseFlip };

/// Inserts X (or Z) gates after gates with probability `rate`, on a qubit of
/// the preceding gate; at least one insertion is guaranteed.
PQC inject_errors(const PQC& c, double rate, ErrorKind kind, std::uint64_t seed, int* inserted = nullptr);

/// Replaces every rz by p with the same angle; rz(a) = e^{-ia/2} p(a), so the
/// result differs from the input by a parameter-dependent global phase.
PQC convert_rz_to_phase(const PQC& c);

}  // namespace pqcv
