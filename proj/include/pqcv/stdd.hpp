#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pqcv/trdd.hpp"

namespace pqcv {

enum class IndexRole : std::uint8_t { Output, Bond, Input };

struct TensorIndex {
  IndexRole role = IndexRole::Output;
  int qubit = 0;
  int slice = 0;  // time position, meaningful for bonds only
  bool operator==(const TensorIndex&) const = default;
};

std::string to_string(const TensorIndex& x);

/// Total order on the indices of a job. Diagrams store levels (positions in
/// this order); smaller levels sit closer to the root.
class IndexOrder {
 public:
  IndexOrder() = default;
  explicit IndexOrder(std::vector<TensorIndex> indices);

  /// Per qubit: output, bond, input. Bonds sit between the two open indices
  /// of the same qubit so renaming either of them onto the bond keeps order.
  static IndexOrder for_circuit(int n_qubits);

  [[nodiscard]] std::uint32_t level(const TensorIndex& x) const;
  [[nodiscard]] const TensorIndex& index(std::uint32_t level) const { return indices_.at(level); }
  [[nodiscard]] std::size_t size() const { return indices_.size(); }

  static std::uint32_t out(int q) { return 3 * static_cast<std::uint32_t>(q); }
  static std::uint32_t bond(int q) { return 3 * static_cast<std::uint32_t>(q) + 1; }
  static std::uint32_t in(int q) { return 3 * static_cast<std::uint32_t>(q) + 2; }

 private:
  std::vector<TensorIndex> indices_;
};

inline constexpr std::uint32_t kTerminalLevel = std::numeric_limits<std::uint32_t>::max();

struct SNode {
  std::uint32_t level = kTerminalLevel;
  const SNode* low = nullptr;
  const SNode* high = nullptr;
  TrRef wlow;
  TrRef whigh;
  std::size_t id = 0;

  [[nodiscard]] bool is_terminal() const { return level == kTerminalLevel; }
};

/// weight * phi(root). The zero tensor is the terminal with zero weight.
struct STDD {
  TrRef weight;
  const SNode* root = nullptr;

  [[nodiscard]] bool is_zero() const { return weight.is_zero(); }
};

enum class StddEquality { Identical, SameStructureDifferentWeight, Different };

struct StddStats {
  std::size_t node_max = 0;
  std::size_t node_final = 0;
  std::size_t nodes_tdd_total = 0;
  std::size_t nodes_trdd_total = 0;
};

/// Unique table and operation caches for S-TDDs over one IndexOrder. Weights
/// live in the supplied TrddManager, which must outlive this object. Single
/// owner, like TrddManager.
class StddManager {
 public:
  struct Options {
    /// Extract the leading scalar (and proportional factors) in loc_norm, not
    /// only the common monomial.
    bool scalar_extraction = true;
  };

  StddManager(TrddManager& weights, IndexOrder order) : StddManager(weights, std::move(order), Options{}) {}
  StddManager(TrddManager& weights, IndexOrder order, Options opts);
  StddManager(const StddManager&) = delete;
  StddManager& operator=(const StddManager&) = delete;

  TrddManager& weights() { return tr_; }
  [[nodiscard]] const IndexOrder& order() const { return order_; }
  [[nodiscard]] const SNode* terminal() const { return terminal_; }

  [[nodiscard]] STDD zero() const { return STDD{tr_.zero(), terminal_}; }
  STDD leaf(const TrRef& w) { return STDD{w, terminal_}; }
  STDD make_node(std::uint32_t level, const STDD& low, const STDD& high);
  STDD make_node(const TensorIndex& x, const STDD& low, const STDD& high) {
    return make_node(order_.level(x), low, high);
  }

  STDD scale(const STDD& f, const TrRef& w);
  STDD add(const STDD& f, const STDD& g);
  /// Sums f*g over every assignment of the `shared` levels.
  STDD contract(const STDD& f, const STDD& g, std::vector<std::uint32_t> shared);
  /// Relabels levels; the map must keep every node above its children.
  STDD rename(const STDD& f, const std::map<std::uint32_t, std::uint32_t>& mapping);
  /// Builds the diagram of fn over `levels` (strictly ascending); bit k of the
  /// argument, counted from the most significant, is the value of levels[k].
  STDD from_function(std::span<const std::uint32_t> levels,
                     const std::function<TrRef(std::uint64_t)>& fn);
  /// Rebuilds every node through make_node; a reduced diagram is a fixed point.
  STDD rebuild(const STDD& f);

  /// Identity on n qubits over the out/in levels of IndexOrder::for_circuit.
  STDD identity(int n_qubits);

  /// Dense tensor over `levels`; entry bits are ordered as in from_function.
  /// Throws if the diagram mentions a level not listed.
  std::vector<Complex> eval(const STDD& f, std::span<const double> half_angles,
                            std::span<const std::uint32_t> levels) const;

  [[nodiscard]] StddEquality equal(const STDD& f, const STDD& g) const;
  [[nodiscard]] bool depends_on(const STDD& f, ParamId x, bool ignore_root_weight) const;
  /// Distinct reachable nodes, terminal included.
  [[nodiscard]] std::size_t node_count(const STDD& f) const;
  /// First violated structural or normalisation invariant, or empty.
  std::string validate(const STDD& f);
  void dump(std::ostream& os, const STDD& f) const;
  [[nodiscard]] std::string dump(const STDD& f) const;

  /// Number of nodes ever interned, terminal included.
  [[nodiscard]] std::size_t nodes_created() const { return nodes_.size(); }
  void clear_caches();

  /// Called every few thousand node constructions; may throw to abandon the
  /// current operation.
  void set_interrupt(std::function<void()> poll) { poll_ = std::move(poll); }

 private:
  const SNode* intern(std::uint32_t level, const SNode* low, const SNode* high, const TrRef& wl,
                      const TrRef& wh);
  STDD cofactor(const STDD& f, std::uint32_t level, bool bit);
  STDD contract_nodes(const SNode* a, const SNode* b, std::size_t sig);
  std::size_t shared_between(std::size_t sig, std::uint32_t lo, std::uint32_t hi) const;

  using WeightKey = std::tuple<std::size_t, double, double>;
  static WeightKey weight_key(const TrRef& w) {
    return {w.node->id, w.weight.real() + 0.0, w.weight.imag() + 0.0};
  }
  struct NodeKey {
    std::uint32_t level;
    std::size_t low;
    std::size_t high;
    WeightKey wl;
    WeightKey wh;
    bool operator==(const NodeKey&) const = default;
  };
  struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const noexcept;
  };
  struct AddKey {
    WeightKey wf;
    std::size_t f;
    WeightKey wg;
    std::size_t g;
    bool operator==(const AddKey&) const = default;
  };
  struct AddKeyHash {
    std::size_t operator()(const AddKey& k) const noexcept;
  };
  struct ContKey {
    std::size_t a;
    std::size_t b;
    std::size_t sig;
    bool operator==(const ContKey&) const = default;
  };
  struct ContKeyHash {
    std::size_t operator()(const ContKey& k) const noexcept;
  };

  TrddManager& tr_;
  IndexOrder order_;
  Options opts_;
  std::deque<SNode> nodes_;
  const SNode* terminal_ = nullptr;
  std::unordered_map<NodeKey, const SNode*, NodeKeyHash> unique_;
  std::unordered_map<AddKey, STDD, AddKeyHash> add_cache_;
  std::unordered_map<ContKey, STDD, ContKeyHash> cont_cache_;
  std::vector<std::vector<std::uint32_t>> signatures_;
  std::map<std::vector<std::uint32_t>, std::size_t> signature_ids_;
  std::function<void()> poll_;
  std::uint32_t poll_counter_ = 0;
};

}  // namespace pqcv
