#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pqcv/stdd.hpp"
#include "pqcv/trigpoly.hpp"

namespace pqcv {

enum class GateKind : std::uint8_t { X, Y, Z, H, S, Sdg, T, Tdg, CX, CZ, Swap, RX, RY, RZ, P };

std::string_view gate_name(GateKind k);
std::optional<GateKind> gate_from_name(std::string_view name);
int gate_arity(GateKind k);
bool is_rotation(GateKind k);

struct Gate {
  GateKind kind = GateKind::X;
  std::vector<int> qubits;
  std::optional<AngleExpr> angle;

  /// True if the angle mentions at least one parameter.
  [[nodiscard]] bool is_parameterised() const { return angle && !angle->is_constant(); }
  bool operator==(const Gate&) const = default;
};

struct PQC {
  int n_qubits = 1;
  ParamTable params;
  std::vector<Gate> gates;

  /// Throws std::invalid_argument describing the first broken invariant.
  void validate() const;
};

bool operator==(const PQC& a, const PQC& b);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, int column);
  [[nodiscard]] int line() const { return line_; }
  [[nodiscard]] int column() const { return column_; }

 private:
  int line_;
  int column_;
};

PQC parse_pqc(std::string_view text);
PQC load_pqc(const std::string& path);

std::string format_angle(const AngleExpr& a, const ParamTable& params);
/// Serialises in the text format; `header` lines are emitted as `#` comments.
std::string print_pqc(const PQC& c, std::string_view header = {});
void save_pqc(const PQC& c, const std::string& path, std::string_view header = {});

Gate adjoint_gate(const Gate& g);

struct ParamProfile {
  std::vector<std::vector<std::size_t>> positions;  // per ParamId, ascending gate positions
  std::vector<ParamId> sequence;                    // parameters in order of their first use
  bool each_once = false;
  /// Every parameterised gate mentions exactly one parameter.
  bool single_param_gates = false;

  [[nodiscard]] bool same_order(const ParamProfile& other, const ParamTable& mine,
                                const ParamTable& theirs) const;
};

ParamProfile param_profile(const PQC& c);
bool pair_compatible(const PQC& c1, const PQC& c2);

/// Re-expresses c over `target` (matching parameters by name). Throws
/// std::invalid_argument unless the name sets agree.
PQC align_params(const PQC& c, const ParamTable& target);

/// Row-major symbolic unitary of a gate (2x2 or 4x4); the first listed qubit
/// is the most significant.
std::vector<TrigPoly> gate_matrix(const Gate& g);

/// Gate tensor with row bits on `row_levels` and column bits on `col_levels`,
/// listed in gate-qubit order.
STDD lower_gate(StddManager& m, const Gate& g, std::span<const std::uint32_t> row_levels,
                std::span<const std::uint32_t> col_levels);
/// Rows on the outputs and columns on the inputs of the gate's qubits.
STDD lower_gate(StddManager& m, const Gate& g);

/// d <- G d, over the out/bond/in levels of IndexOrder::for_circuit.
STDD apply_left(StddManager& m, const STDD& d, const Gate& g);
/// d <- d H^dagger.
STDD apply_right(StddManager& m, const STDD& d, const Gate& h);
/// Unitary of the whole circuit, gates applied left to right from the identity.
STDD circuit_unitary(StddManager& m, const PQC& c);

}  // namespace pqcv
