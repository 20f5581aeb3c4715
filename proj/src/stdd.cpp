#include "pqcv/stdd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace pqcv {

namespace {

inline void hash_combine(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

template <class T>
void hash_weight(std::size_t& h, const T& w) {
  hash_combine(h, std::get<0>(w));
  hash_combine(h, std::hash<double>{}(std::get<1>(w)));
  hash_combine(h, std::hash<double>{}(std::get<2>(w)));
}

}  // namespace

std::string to_string(const TensorIndex& x) {
  switch (x.role) {
    case IndexRole::Output:
      return "out" + std::to_string(x.qubit);
    case IndexRole::Input:
      return "in" + std::to_string(x.qubit);
    case IndexRole::Bond:
      return "bond" + std::to_string(x.qubit) + "." + std::to_string(x.slice);
  }
  return "?";
}

IndexOrder::IndexOrder(std::vector<TensorIndex> indices) : indices_(std::move(indices)) {
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    for (std::size_t j = i + 1; j < indices_.size(); ++j) {
      if (indices_[i] == indices_[j]) throw std::invalid_argument("duplicate index " + to_string(indices_[i]));
    }
  }
}

IndexOrder IndexOrder::for_circuit(int n_qubits) {
  std::vector<TensorIndex> v;
  for (int q = 0; q < n_qubits; ++q) {
    v.push_back({IndexRole::Output, q, 0});
    v.push_back({IndexRole::Bond, q, 0});
    v.push_back({IndexRole::Input, q, 0});
  }
  IndexOrder order;
  order.indices_ = std::move(v);
  return order;
}

std::uint32_t IndexOrder::level(const TensorIndex& x) const {
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i] == x) return static_cast<std::uint32_t>(i);
  }
  throw std::out_of_range("unknown index " + to_string(x));
}

std::size_t StddManager::NodeKeyHash::operator()(const NodeKey& k) const noexcept {
  std::size_t h = k.level;
  hash_combine(h, k.low);
  hash_combine(h, k.high);
  hash_weight(h, k.wl);
  hash_weight(h, k.wh);
  return h;
}

std::size_t StddManager::AddKeyHash::operator()(const AddKey& k) const noexcept {
  std::size_t h = k.f;
  hash_combine(h, k.g);
  hash_weight(h, k.wf);
  hash_weight(h, k.wg);
  return h;
}

std::size_t StddManager::ContKeyHash::operator()(const ContKey& k) const noexcept {
  std::size_t h = k.a;
  hash_combine(h, k.b);
  hash_combine(h, k.sig);
  return h;
}

StddManager::StddManager(TrddManager& weights, IndexOrder order, Options opts)
    : tr_(weights), order_(std::move(order)), opts_(opts) {
  auto& t = nodes_.emplace_back();
  t.wlow = tr_.zero();
  t.whigh = tr_.zero();
  terminal_ = &t;
}

const SNode* StddManager::intern(std::uint32_t level, const SNode* low, const SNode* high,
                                 const TrRef& wl, const TrRef& wh) {
  NodeKey key{level, low->id, high->id, weight_key(wl), weight_key(wh)};
  if (auto it = unique_.find(key); it != unique_.end()) return it->second;
  auto& n = nodes_.emplace_back();
  n.level = level;
  n.low = low;
  n.high = high;
  n.wlow = wl;
  n.whigh = wh;
  n.id = nodes_.size() - 1;
  unique_.emplace(key, &n);
  return &n;
}

STDD StddManager::make_node(std::uint32_t level, const STDD& low, const STDD& high) {
  if (low.is_zero() && high.is_zero()) return zero();
  if (level >= low.root->level || level >= high.root->level) {
    throw std::invalid_argument("make_node: child level not below parent");
  }
  if (low.root == high.root && low.weight == high.weight) return low;
  if (poll_ && (++poll_counter_ & 0xfffU) == 0) poll_();
  const bool ext = opts_.scalar_extraction;
  auto [h, wl, wh] = tr_.common_factor(low.weight, high.weight, ext, ext);
  const SNode* lc = wl.is_zero() ? terminal_ : low.root;
  const SNode* hc = wh.is_zero() ? terminal_ : high.root;
  return STDD{h, intern(level, lc, hc, wl, wh)};
}

STDD StddManager::scale(const STDD& f, const TrRef& w) {
  const auto nw = tr_.mul(f.weight, w);
  if (nw.is_zero()) return zero();
  return STDD{nw, f.root};
}

STDD StddManager::cofactor(const STDD& f, std::uint32_t level, bool bit) {
  if (f.root->level != level) return f;
  const auto& w = bit ? f.root->whigh : f.root->wlow;
  if (w.is_zero()) return zero();
  return scale(STDD{w, bit ? f.root->high : f.root->low}, f.weight);
}

STDD StddManager::add(const STDD& f, const STDD& g) {
  if (f.is_zero()) return g;
  if (g.is_zero()) return f;
  if (f.root == g.root) {
    const auto w = tr_.add(f.weight, g.weight);
    if (w.is_zero()) return zero();
    return STDD{w, f.root};
  }
  const STDD& a = f.root->id < g.root->id ? f : g;
  const STDD& b = f.root->id < g.root->id ? g : f;
  const AddKey key{weight_key(a.weight), a.root->id, weight_key(b.weight), b.root->id};
  if (auto it = add_cache_.find(key); it != add_cache_.end()) return it->second;

  const std::uint32_t x = std::min(a.root->level, b.root->level);
  const STDD lo = add(cofactor(a, x, false), cofactor(b, x, false));
  const STDD hi = add(cofactor(a, x, true), cofactor(b, x, true));
  const STDD res = make_node(x, lo, hi);
  add_cache_.emplace(key, res);
  return res;
}

std::size_t StddManager::shared_between(std::size_t sig, std::uint32_t lo, std::uint32_t hi) const {
  const auto& s = signatures_[sig];
  const auto first = std::upper_bound(s.begin(), s.end(), lo);
  const auto last = std::lower_bound(s.begin(), s.end(), hi);
  return first < last ? static_cast<std::size_t>(last - first) : 0;
}

STDD StddManager::contract(const STDD& f, const STDD& g, std::vector<std::uint32_t> shared) {
  std::sort(shared.begin(), shared.end());
  shared.erase(std::unique(shared.begin(), shared.end()), shared.end());
  for (auto l : shared) {
    if (l >= order_.size()) throw std::out_of_range("contract: unknown index level " + std::to_string(l));
  }
  if (f.is_zero() || g.is_zero()) return zero();
  auto [it, inserted] = signature_ids_.try_emplace(shared, signatures_.size());
  if (inserted) signatures_.push_back(shared);
  const std::size_t sig = it->second;

  const std::uint32_t top = std::min(f.root->level, g.root->level);
  const auto below = static_cast<std::size_t>(std::lower_bound(shared.begin(), shared.end(), top) - shared.begin());
  const STDD r = contract_nodes(f.root, g.root, sig);
  const double mult = std::ldexp(1.0, static_cast<int>(below));
  return scale(r, tr_.scale(tr_.mul(f.weight, g.weight), mult));
}

STDD StddManager::contract_nodes(const SNode* a, const SNode* b, std::size_t sig) {
  if (a->is_terminal() && b->is_terminal()) return leaf(tr_.one());
  if (b->id < a->id) std::swap(a, b);
  const ContKey key{a->id, b->id, sig};
  if (auto it = cont_cache_.find(key); it != cont_cache_.end()) return it->second;

  const std::uint32_t x = std::min(a->level, b->level);
  STDD parts[2];
  for (int bit = 0; bit < 2; ++bit) {
    TrRef wa = tr_.one();
    TrRef wb = tr_.one();
    const SNode* ca = a;
    const SNode* cb = b;
    if (a->level == x) {
      wa = bit ? a->whigh : a->wlow;
      ca = bit ? a->high : a->low;
    }
    if (b->level == x) {
      wb = bit ? b->whigh : b->wlow;
      cb = bit ? b->high : b->low;
    }
    if (wa.is_zero() || wb.is_zero()) {
      parts[bit] = zero();
      continue;
    }
    const STDD sub = contract_nodes(ca, cb, sig);
    const auto skipped = shared_between(sig, x, std::min(ca->level, cb->level));
    auto w = tr_.mul(wa, wb);
    if (skipped) w = tr_.scale(w, std::ldexp(1.0, static_cast<int>(skipped)));
    parts[bit] = scale(sub, w);
  }
  const auto& s = signatures_[sig];
  const STDD res = std::binary_search(s.begin(), s.end(), x) ? add(parts[0], parts[1])
                                                             : make_node(x, parts[0], parts[1]);
  cont_cache_.emplace(key, res);
  return res;
}

STDD StddManager::rename(const STDD& f, const std::map<std::uint32_t, std::uint32_t>& mapping) {
  std::unordered_map<const SNode*, STDD> memo;
  std::function<STDD(const SNode*)> go = [&](const SNode* n) -> STDD {
    if (n->is_terminal()) return leaf(tr_.one());
    if (auto it = memo.find(n); it != memo.end()) return it->second;
    auto lvl = n->level;
    if (auto m = mapping.find(lvl); m != mapping.end()) lvl = m->second;
    const STDD lo = n->wlow.is_zero() ? zero() : scale(go(n->low), n->wlow);
    const STDD hi = n->whigh.is_zero() ? zero() : scale(go(n->high), n->whigh);
    const STDD r = make_node(lvl, lo, hi);
    memo.emplace(n, r);
    return r;
  };
  if (f.is_zero()) return zero();
  return scale(go(f.root), f.weight);
}

STDD StddManager::rebuild(const STDD& f) {
  return rename(f, {});
}

STDD StddManager::from_function(std::span<const std::uint32_t> levels,
                                const std::function<TrRef(std::uint64_t)>& fn) {
  const std::size_t k = levels.size();
  std::function<STDD(std::size_t, std::uint64_t)> go = [&](std::size_t depth, std::uint64_t prefix) -> STDD {
    if (depth == k) return leaf(fn(prefix));
    const STDD lo = go(depth + 1, prefix << 1);
    const STDD hi = go(depth + 1, (prefix << 1) | 1U);
    return make_node(levels[depth], lo, hi);
  };
  return go(0, 0);
}

STDD StddManager::identity(int n_qubits) {
  STDD below = leaf(tr_.one());
  for (int q = n_qubits - 1; q >= 0; --q) {
    const STDD in0 = make_node(IndexOrder::in(q), below, zero());
    const STDD in1 = make_node(IndexOrder::in(q), zero(), below);
    below = make_node(IndexOrder::out(q), in0, in1);
  }
  return below;
}

std::vector<Complex> StddManager::eval(const STDD& f, std::span<const double> half_angles,
                                       std::span<const std::uint32_t> levels) const {
  const std::size_t k = levels.size();
  std::unordered_map<std::uint32_t, std::size_t> pos;
  for (std::size_t i = 0; i < k; ++i) pos[levels[i]] = i;
  std::unordered_map<TrRef, Complex, TrRefHash> values;
  auto value = [&](const TrRef& w) {
    auto it = values.find(w);
    if (it == values.end()) it = values.emplace(w, tr_.eval(w, half_angles)).first;
    return it->second;
  };

  std::vector<Complex> out(std::size_t{1} << k, Complex(0.0));
  if (f.is_zero()) return out;
  const Complex root = value(f.weight);
  for (std::size_t e = 0; e < out.size(); ++e) {
    Complex acc = root;
    const SNode* n = f.root;
    while (!n->is_terminal()) {
      auto p = pos.find(n->level);
      if (p == pos.end()) throw std::invalid_argument("eval: diagram depends on an unlisted level");
      const bool bit = ((e >> (k - 1 - p->second)) & 1U) != 0;
      const TrRef& w = bit ? n->whigh : n->wlow;
      if (w.is_zero()) {
        acc = 0.0;
        break;
      }
      acc *= value(w);
      n = bit ? n->high : n->low;
    }
    out[e] = acc;
  }
  return out;
}

StddEquality StddManager::equal(const STDD& f, const STDD& g) const {
  if (f.root != g.root) return StddEquality::Different;
  return f.weight == g.weight ? StddEquality::Identical : StddEquality::SameStructureDifferentWeight;
}

bool StddManager::depends_on(const STDD& f, ParamId x, bool ignore_root_weight) const {
  if (!ignore_root_weight && tr_.depends_on(f.weight, x)) return true;
  std::unordered_set<const SNode*> seen;
  std::vector<const SNode*> stack{f.root};
  while (!stack.empty()) {
    const SNode* n = stack.back();
    stack.pop_back();
    if (n->is_terminal() || !seen.insert(n).second) continue;
    if (tr_.depends_on(n->wlow, x) || tr_.depends_on(n->whigh, x)) return true;
    stack.push_back(n->low);
    stack.push_back(n->high);
  }
  return false;
}

std::size_t StddManager::node_count(const STDD& f) const {
  std::unordered_set<const SNode*> seen;
  std::vector<const SNode*> stack{f.root};
  while (!stack.empty()) {
    const SNode* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second || n->is_terminal()) continue;
    stack.push_back(n->low);
    stack.push_back(n->high);
  }
  return seen.size();
}

std::string StddManager::validate(const STDD& f) {
  if (f.is_zero() && !f.root->is_terminal()) return "zero weight on a non-terminal root";
  if (auto msg = tr_.validate(f.weight); !msg.empty()) return "root weight: " + msg;
  std::unordered_set<const SNode*> seen;
  std::vector<const SNode*> stack{f.root};
  const bool ext = opts_.scalar_extraction;
  while (!stack.empty()) {
    const SNode* n = stack.back();
    stack.pop_back();
    if (n->is_terminal() || !seen.insert(n).second) continue;
    const auto id = "node s" + std::to_string(n->id);
    if (n->wlow.is_zero() && n->whigh.is_zero()) return id + " has two zero edges";
    if (n->low == n->high && n->wlow == n->whigh) return id + " is redundant";
    if (n->level >= n->low->level || n->level >= n->high->level) return id + " child level out of order";
    if (n->wlow.is_zero() && !n->low->is_terminal()) return id + " zero low edge to a non-terminal";
    if (n->whigh.is_zero() && !n->high->is_terminal()) return id + " zero high edge to a non-terminal";
    for (const auto* w : {&n->wlow, &n->whigh}) {
      if (auto msg = tr_.validate(*w); !msg.empty()) return id + " weight: " + msg;
    }
    const auto cf = tr_.common_factor(n->wlow, n->whigh, ext, ext);
    if (!(cf.h == tr_.one()) || !(cf.f == n->wlow) || !(cf.g == n->whigh)) {
      return id + " is not locally normalised";
    }
    stack.push_back(n->low);
    stack.push_back(n->high);
  }
  return "";
}

void StddManager::dump(std::ostream& os, const STDD& f) const {
  std::unordered_set<const SNode*> seen;
  char buf[160];
  auto weight = [&](const TrRef& w) {
    std::snprintf(buf, sizeof buf, "(%.12g,%.12g)*t%zu", w.weight.real(), w.weight.imag(), w.node->id);
    return std::string(buf);
  };
  std::function<void(const SNode*)> go = [&](const SNode* n) {
    if (n->is_terminal() || !seen.insert(n).second) return;
    go(n->low);
    go(n->high);
    os << 's' << n->id << ' ' << to_string(order_.index(n->level)) << " low:" << weight(n->wlow)
       << ":s" << n->low->id << " high:" << weight(n->whigh) << ":s" << n->high->id << '\n';
  };
  go(f.root);
  os << "root " << weight(f.weight) << " s" << f.root->id << '\n';
}

std::string StddManager::dump(const STDD& f) const {
  std::ostringstream os;
  dump(os, f);
  return os.str();
}

void StddManager::clear_caches() {
  add_cache_.clear();
  cont_cache_.clear();
}

}  // namespace pqcv
