#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "pqcv/circuit.hpp"
#include "pqcv/stdd.hpp"

namespace pqcv {

enum class Verdict { Equivalent, EquivalentUpToGlobalPhase, NotEquivalent };
enum class Strategy { Construct, Alternate, Auto };

std::string_view to_string(Verdict v);
std::string_view to_string(Strategy s);
Verdict verdict_from_string(std::string_view s);
Strategy strategy_from_string(std::string_view s);

struct CheckConfig {
  Strategy strategy = Strategy::Auto;
  double timeout_s = 1200.0;
  bool scalar_extraction = true;
  bool mul_via_poly = false;
};

class Timeout : public std::runtime_error {
 public:
  explicit Timeout(double limit_s)
      : std::runtime_error("check exceeded " + std::to_string(limit_s) + " s") {}
};

struct CheckReport {
  Verdict verdict = Verdict::NotEquivalent;
  Strategy strategy = Strategy::Construct;
  /// Weight w of the final diagram relating the circuits (1 for identical
  /// diagrams). Owned by `weights`.
  TrRef phase;
  std::shared_ptr<TrddManager> weights;
  bool phase_is_constant = false;
  /// w * conj(w) reduces to the constant 1.
  bool phase_modulus_one = false;
  std::optional<std::string> aborted_at_param;
  StddStats stats;
  double wall_time = 0.0;
  std::size_t gates_consumed = 0;
  std::size_t gates_total = 0;

  [[nodiscard]] TrigPoly phase_poly() const { return weights ? weights->to_poly(phase) : TrigPoly(); }
};

CheckReport check_construct(const PQC& c1, const PQC& c2, const CheckConfig& cfg = {});
CheckReport check_alternate(const PQC& c1, const PQC& c2, const CheckConfig& cfg = {});
/// Dispatches on cfg.strategy; Auto picks alternate for compatible pairs.
CheckReport check(const PQC& c1, const PQC& c2, const CheckConfig& cfg = {});

/// Compares dense unitaries (two random state probes above 6 qubits) up to a
/// global phase at k uniform parameter draws from [0, 2pi).
bool confirm_by_sampling(const PQC& c1, const PQC& c2, int k, std::uint64_t seed);

}  // namespace pqcv
