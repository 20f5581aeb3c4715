#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pqcv/trigpoly.hpp"

namespace pqcv {

/// Snaps doubles to canonical representatives so that values computed along
/// different routes hash identically. Two values within `tolerance` of an
/// existing representative collapse onto it. Small exact values are seeded
/// first so that e.g. 1 - 1e-16 snaps to 1 and not the other way round.
class ComplexTable {
 public:
  explicit ComplexTable(double tolerance = kEpsilon);

  double canonical(double v);
  Complex canonical(Complex c) { return {canonical(c.real()), canonical(c.imag())}; }
  [[nodiscard]] double tolerance() const { return tol_; }
  [[nodiscard]] std::size_t size() const { return count_; }

 private:
  double tol_;
  std::size_t count_ = 0;
  std::unordered_map<std::int64_t, std::vector<double>> buckets_;
};

/// sin(x_var) or cos(x_var); the key 2*var + is_cos realises the order
/// sin(x0) < cos(x0) < sin(x1) < ...
struct TrLabel {
  ParamId var = 0;
  bool is_cos = false;

  [[nodiscard]] std::uint32_t key() const { return 2 * var + (is_cos ? 1U : 0U); }
  static TrLabel from_key(std::uint32_t key) { return TrLabel{key / 2, (key & 1U) != 0}; }
};

inline constexpr std::uint32_t kTerminalKey = std::numeric_limits<std::uint32_t>::max();

struct TrNode;

struct TrEdge {
  std::uint32_t degree = 0;
  Complex weight;
  const TrNode* child = nullptr;
};

struct TrNode {
  std::uint32_t key = kTerminalKey;  // label key, kTerminalKey for the terminal "1"
  std::vector<TrEdge> edges;         // degrees strictly ascending, edges[0].weight == 1
  std::size_t id = 0;                // interning order

  [[nodiscard]] bool is_terminal() const { return key == kTerminalKey; }
  [[nodiscard]] TrLabel label() const { return TrLabel::from_key(key); }
};

/// A weighted reference into a TrddManager: the polynomial weight * T(node).
/// Zero is the terminal with weight 0.
struct TrRef {
  Complex weight;
  const TrNode* node = nullptr;

  [[nodiscard]] bool is_zero() const { return weight == Complex(0.0); }
  [[nodiscard]] bool is_constant() const { return node->is_terminal(); }
  bool operator==(const TrRef& o) const { return node == o.node && weight == o.weight; }
};

struct TrRefHash {
  std::size_t operator()(const TrRef& r) const noexcept;
};

/// Owns the unique table and apply caches for TrDDs. Single owner: calls
/// that create nodes must not run concurrently on one manager.
class TrddManager {
 public:
  struct Options {
    /// Multiply through polynomial round-trips instead of the recursive apply.
    bool mul_via_poly = false;
    double tolerance = kEpsilon;
  };

  TrddManager() : TrddManager(Options{}) {}
  explicit TrddManager(Options opts);
  TrddManager(const TrddManager&) = delete;
  TrddManager& operator=(const TrddManager&) = delete;

  [[nodiscard]] const TrNode* terminal() const { return terminal_; }
  [[nodiscard]] TrRef zero() const { return TrRef{0.0, terminal_}; }
  [[nodiscard]] TrRef one() const { return TrRef{1.0, terminal_}; }
  TrRef constant(Complex c);

  TrRef from_poly(const TrigPoly& f);
  TrigPoly to_poly(const TrRef& t);

  TrRef add(const TrRef& a, const TrRef& b);
  TrRef mul(const TrRef& a, const TrRef& b);
  TrRef scale(const TrRef& a, Complex c);
  TrRef conj(const TrRef& a);

  [[nodiscard]] bool depends_on(const TrRef& a, ParamId x) const;
  /// Half-angle values indexed by ParamId; throws MissingParameter.
  [[nodiscard]] Complex eval(const TrRef& a, std::span<const double> half_angles) const;
  /// Distinct reachable nodes, terminal included.
  [[nodiscard]] std::size_t node_count(const TrRef& a) const;

  /// Result of extracting monomial * scalar from a pair of weights.
  struct Factored {
    TrRef h;
    TrRef f;
    TrRef g;
  };
  /// TrDD counterpart of common_factor(), computed without expanding to
  /// polynomials. Pairs whose non-zero members differ only by a scalar
  /// (same node) factor as (f, 1, g/f).
  Factored common_factor(const TrRef& f, const TrRef& g, bool extract_scalar = true,
                         bool proportional = true);

  /// Walks every reachable node and checks the structural invariants;
  /// returns a description of the first violation, or empty.
  [[nodiscard]] std::string validate(const TrRef& a) const;

  /// Textual DAG: one line per reachable node in post-order,
  /// `n<id> <label> <deg>:(<re>,<im>):n<child> ...`, then `root (<re>,<im>) n<id>`.
  void dump(std::ostream& os, const TrRef& a, const ParamTable* names = nullptr) const;
  [[nodiscard]] std::string dump(const TrRef& a, const ParamTable* names = nullptr) const;

  /// Number of nodes ever interned, terminal included.
  [[nodiscard]] std::size_t nodes_created() const { return nodes_.size(); }
  void clear_caches();
  ComplexTable& numbers() { return numbers_; }

  /// Called every few thousand node constructions; may throw to abandon the
  /// current operation.
  void set_interrupt(std::function<void()> poll) { poll_ = std::move(poll); }

 private:
  using Exponents = std::vector<std::pair<std::uint32_t, std::uint32_t>>;  // (label key, degree)
  struct Branch {
    std::uint32_t degree;
    TrRef ref;
  };

  TrRef make(std::uint32_t key, std::vector<Branch> branches);
  const TrNode* intern(std::uint32_t key, std::vector<TrEdge> edges);
  std::vector<Branch> cofactors(const TrRef& a, std::uint32_t key);
  TrRef add_nodes(const TrNode* a, const TrRef& b);
  TrRef mul_nodes(const TrNode* a, const TrNode* b);
  TrRef conj_node(const TrNode* a);
  TrRef one_minus_cos2(ParamId var);
  const TrigPoly& node_poly(const TrNode* a);
  const Exponents& node_gcd(const TrNode* a);
  Complex rightmost_product(const TrNode* a) const;
  TrRef divide_monomial(const TrRef& a, const Exponents& m);
  TrRef from_monomial(const Exponents& m, Complex c);
  Complex canon(Complex c);

  struct NodeKey {
    std::uint32_t key;
    std::vector<std::tuple<std::uint32_t, double, double, std::size_t>> edges;
    bool operator==(const NodeKey&) const = default;
  };
  struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const noexcept;
  };
  struct PairHash {
    std::size_t operator()(const std::pair<const TrNode*, const TrNode*>& p) const noexcept;
  };
  struct AddKey {
    const TrNode* a;
    const TrNode* b;
    Complex ratio;
    bool operator==(const AddKey&) const = default;
  };
  struct AddKeyHash {
    std::size_t operator()(const AddKey& k) const noexcept;
  };

  Options opts_;
  ComplexTable numbers_;
  std::deque<TrNode> nodes_;
  const TrNode* terminal_ = nullptr;
  std::unordered_map<NodeKey, const TrNode*, NodeKeyHash> unique_;
  std::unordered_map<AddKey, TrRef, AddKeyHash> add_cache_;
  std::unordered_map<std::pair<const TrNode*, const TrNode*>, TrRef, PairHash> mul_cache_;
  std::unordered_map<const TrNode*, TrRef> conj_cache_;
  std::unordered_map<const TrNode*, TrigPoly> poly_cache_;
  std::unordered_map<const TrNode*, Exponents> gcd_cache_;
  std::map<std::pair<const TrNode*, Exponents>, TrRef> div_cache_;
  std::unordered_map<ParamId, TrRef> pythagoras_;
  std::function<void()> poll_;
  std::uint32_t poll_counter_ = 0;
};

}  // namespace pqcv
