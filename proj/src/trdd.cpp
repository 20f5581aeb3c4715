#include "pqcv/trdd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace pqcv {

namespace {

inline void hash_combine(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

inline std::size_t hash_double(double d) { return std::hash<double>{}(d == 0.0 ? 0.0 : d); }

std::string label_name(std::uint32_t key, const ParamTable* names) {
  if (key == kTerminalKey) return "1";
  const auto l = TrLabel::from_key(key);
  const std::string var =
      names && l.var < names->size() ? names->name(l.var) : "s" + std::to_string(l.var);
  return std::string(l.is_cos ? "cos(" : "sin(") + var + ")";
}

}  // namespace

ComplexTable::ComplexTable(double tolerance) : tol_(tolerance) {
  for (double v : {1.0, 0.5, 0.25, 2.0, std::numbers::sqrt2 / 2, std::numbers::sqrt2}) {
    canonical(v);
    canonical(-v);
  }
}

double ComplexTable::canonical(double v) {
  if (std::abs(v) <= tol_) return 0.0;
  const auto bucket = static_cast<std::int64_t>(std::llround(v / tol_));
  for (std::int64_t b = bucket - 1; b <= bucket + 1; ++b) {
    auto it = buckets_.find(b);
    if (it == buckets_.end()) continue;
    for (double rep : it->second) {
      if (std::abs(rep - v) <= tol_) return rep;
    }
  }
  buckets_[bucket].push_back(v);
  ++count_;
  return v;
}

std::size_t TrRefHash::operator()(const TrRef& r) const noexcept {
  std::size_t h = std::hash<const void*>{}(r.node);
  hash_combine(h, hash_double(r.weight.real()));
  hash_combine(h, hash_double(r.weight.imag()));
  return h;
}

std::size_t TrddManager::NodeKeyHash::operator()(const NodeKey& k) const noexcept {
  std::size_t h = k.key;
  for (const auto& [d, re, im, child] : k.edges) {
    hash_combine(h, d);
    hash_combine(h, hash_double(re));
    hash_combine(h, hash_double(im));
    hash_combine(h, child);
  }
  return h;
}

std::size_t TrddManager::PairHash::operator()(
    const std::pair<const TrNode*, const TrNode*>& p) const noexcept {
  std::size_t h = std::hash<const void*>{}(p.first);
  hash_combine(h, std::hash<const void*>{}(p.second));
  return h;
}

std::size_t TrddManager::AddKeyHash::operator()(const AddKey& k) const noexcept {
  std::size_t h = std::hash<const void*>{}(k.a);
  hash_combine(h, std::hash<const void*>{}(k.b));
  hash_combine(h, hash_double(k.ratio.real()));
  hash_combine(h, hash_double(k.ratio.imag()));
  return h;
}

TrddManager::TrddManager(Options opts) : opts_(opts), numbers_(opts.tolerance) {
  auto& t = nodes_.emplace_back();
  t.key = kTerminalKey;
  t.id = 0;
  terminal_ = &t;
}

Complex TrddManager::canon(Complex c) { return numbers_.canonical(c); }

TrRef TrddManager::constant(Complex c) {
  const auto w = canon(c);
  return TrRef{w, terminal_};
}

TrRef TrddManager::scale(const TrRef& a, Complex c) {
  const auto w = canon(a.weight * c);
  if (w == Complex(0.0)) return zero();
  return TrRef{w, a.node};
}

const TrNode* TrddManager::intern(std::uint32_t key, std::vector<TrEdge> edges) {
  NodeKey k{key, {}};
  k.edges.reserve(edges.size());
  for (const auto& e : edges) {
    k.edges.emplace_back(e.degree, e.weight.real() == 0.0 ? 0.0 : e.weight.real(),
                         e.weight.imag() == 0.0 ? 0.0 : e.weight.imag(), e.child->id);
  }
  if (auto it = unique_.find(k); it != unique_.end()) return it->second;
  auto& n = nodes_.emplace_back();
  n.key = key;
  n.edges = std::move(edges);
  n.id = nodes_.size() - 1;
  unique_.emplace(std::move(k), &n);
  return &n;
}

TrRef TrddManager::make(std::uint32_t key, std::vector<Branch> branches) {
  std::erase_if(branches, [](const Branch& b) { return b.ref.is_zero(); });
  if (branches.empty()) return zero();
  std::sort(branches.begin(), branches.end(),
            [](const Branch& x, const Branch& y) { return x.degree < y.degree; });
  if (branches.size() == 1 && branches.front().degree == 0) return branches.front().ref;
  if (poll_ && (++poll_counter_ & 0xfffU) == 0) poll_();

  const Complex lead = branches.front().ref.weight;
  std::vector<TrEdge> edges;
  edges.reserve(branches.size());
  for (std::size_t k = 0; k < branches.size(); ++k) {
    const Complex w = k == 0 ? Complex(1.0) : canon(branches[k].ref.weight / lead);
    if (w == Complex(0.0)) continue;
    edges.push_back(TrEdge{branches[k].degree, w, branches[k].ref.node});
  }
  if (edges.size() == 1 && edges.front().degree == 0) return TrRef{canon(lead), edges.front().child};
  return TrRef{canon(lead), intern(key, std::move(edges))};
}

std::vector<TrddManager::Branch> TrddManager::cofactors(const TrRef& a, std::uint32_t key) {
  if (a.node->key != key) return {Branch{0, a}};
  std::vector<Branch> out;
  out.reserve(a.node->edges.size());
  for (const auto& e : a.node->edges) {
    out.push_back(Branch{e.degree, TrRef{a.weight * e.weight, e.child}});
  }
  return out;
}

// ------------------------------------------------------------ conversions

TrRef TrddManager::from_poly(const TrigPoly& f) {
  if (f.is_zero()) return zero();
  if (f.is_constant()) return constant(f.constant_term());

  std::uint32_t key = kTerminalKey;
  for (const auto& t : f.terms()) {
    if (t.mono.is_one()) continue;
    // factors are sorted by variable, so the first one carries the smallest label
    const auto& fac = t.mono.factors().front();
    key = std::min(key, fac.sin_exp ? 2 * fac.var : 2 * fac.var + 1);
  }
  const auto label = TrLabel::from_key(key);

  // group the terms by the degree of the smallest label
  std::map<std::uint32_t, std::vector<Term>> groups;
  for (const auto& t : f.terms()) {
    const auto ex = t.mono.exponents(label.var);
    std::uint32_t degree = label.is_cos ? ex.cos_exp : ex.sin_exp;
    std::vector<Factor> rest;
    for (const auto& fac : t.mono.factors()) {
      if (fac.var != label.var) {
        rest.push_back(fac);
      } else if (label.is_cos) {
        // no term mentions sin(var) when cos(var) is the smallest label
        rest.push_back(Factor{fac.var, fac.sin_exp, 0});
      } else {
        rest.push_back(Factor{fac.var, 0, fac.cos_exp});
      }
    }
    groups[degree].push_back(Term{Monomial(std::move(rest)), t.coeff});
  }

  std::vector<Branch> branches;
  for (auto& [degree, terms] : groups) {
    branches.push_back(Branch{degree, from_poly(TrigPoly(std::move(terms)))});
  }
  return make(key, std::move(branches));
}

const TrigPoly& TrddManager::node_poly(const TrNode* a) {
  if (auto it = poly_cache_.find(a); it != poly_cache_.end()) return it->second;
  TrigPoly acc;
  if (a->is_terminal()) {
    acc = TrigPoly::constant(1.0);
  } else {
    const auto label = a->label();
    for (const auto& e : a->edges) {
      Monomial m;
      if (e.degree > 0) {
        m = label.is_cos ? Monomial::cos_of(label.var, e.degree) : Monomial::sin_of(label.var);
      }
      acc = poly_add(acc, poly_mul(TrigPoly::monomial(m, e.weight), node_poly(e.child)));
    }
  }
  return poly_cache_.emplace(a, std::move(acc)).first->second;
}

TrigPoly TrddManager::to_poly(const TrRef& t) {
  if (t.is_zero()) return TrigPoly();
  return poly_scale(node_poly(t.node), t.weight);
}

// ------------------------------------------------------------- arithmetic

TrRef TrddManager::add(const TrRef& a, const TrRef& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.node == b.node) {
    const auto w = canon(a.weight + b.weight);
    if (w == Complex(0.0)) return zero();
    return TrRef{w, a.node};
  }
  const TrRef& x = a.node->id < b.node->id ? a : b;
  const TrRef& y = a.node->id < b.node->id ? b : a;
  const Complex ratio = canon(y.weight / x.weight);
  const AddKey key{x.node, y.node, ratio};
  TrRef res;
  if (auto it = add_cache_.find(key); it != add_cache_.end()) {
    res = it->second;
  } else {
    res = add_nodes(x.node, TrRef{ratio, y.node});
    add_cache_.emplace(key, res);
  }
  return scale(res, x.weight);
}

TrRef TrddManager::add_nodes(const TrNode* a, const TrRef& b) {
  const std::uint32_t key = std::min(a->key, b.node->key);
  const auto xs = cofactors(TrRef{1.0, a}, key);
  const auto ys = cofactors(b, key);
  std::vector<Branch> merged;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < xs.size() || j < ys.size()) {
    if (j == ys.size() || (i < xs.size() && xs[i].degree < ys[j].degree)) {
      merged.push_back(xs[i++]);
    } else if (i == xs.size() || ys[j].degree < xs[i].degree) {
      merged.push_back(ys[j++]);
    } else {
      merged.push_back(Branch{xs[i].degree, add(xs[i].ref, ys[j].ref)});
      ++i;
      ++j;
    }
  }
  return make(key, std::move(merged));
}

TrRef TrddManager::one_minus_cos2(ParamId var) {
  if (auto it = pythagoras_.find(var); it != pythagoras_.end()) return it->second;
  const auto c = TrigPoly::cos_of(var);
  auto r = from_poly(TrigPoly::constant(1.0) - c * c);
  pythagoras_.emplace(var, r);
  return r;
}

TrRef TrddManager::mul(const TrRef& a, const TrRef& b) {
  if (a.is_zero() || b.is_zero()) return zero();
  if (opts_.mul_via_poly && !(a.is_constant() || b.is_constant())) {
    return from_poly(poly_mul(to_poly(a), to_poly(b)));
  }
  return scale(mul_nodes(a.node, b.node), a.weight * b.weight);
}

TrRef TrddManager::mul_nodes(const TrNode* a, const TrNode* b) {
  if (a->is_terminal()) return TrRef{1.0, b};
  if (b->is_terminal()) return TrRef{1.0, a};
  if (b->id < a->id) std::swap(a, b);
  const auto cache_key = std::make_pair(a, b);
  if (auto it = mul_cache_.find(cache_key); it != mul_cache_.end()) return it->second;

  const std::uint32_t key = std::min(a->key, b->key);
  const auto label = TrLabel::from_key(key);
  const auto xs = cofactors(TrRef{1.0, a}, key);
  const auto ys = cofactors(TrRef{1.0, b}, key);
  TrRef res;
  if (!label.is_cos) {
    auto part = [&](const std::vector<Branch>& v, std::uint32_t d) {
      for (const auto& br : v) {
        if (br.degree == d) return br.ref;
      }
      return zero();
    };
    const TrRef x0 = part(xs, 0);
    const TrRef x1 = part(xs, 1);
    const TrRef y0 = part(ys, 0);
    const TrRef y1 = part(ys, 1);
    // (x0 + s x1)(y0 + s y1) with s^2 = 1 - cos^2
    const TrRef low = add(mul(x0, y0), mul(mul(x1, y1), one_minus_cos2(label.var)));
    const TrRef high = add(mul(x0, y1), mul(x1, y0));
    res = make(key, {Branch{0, low}, Branch{1, high}});
  } else {
    std::map<std::uint32_t, TrRef> acc;
    for (const auto& x : xs) {
      for (const auto& y : ys) {
        const auto d = x.degree + y.degree;
        const auto prod = mul(x.ref, y.ref);
        auto it = acc.find(d);
        if (it == acc.end()) {
          acc.emplace(d, prod);
        } else {
          it->second = add(it->second, prod);
        }
      }
    }
    std::vector<Branch> branches;
    for (const auto& [d, r] : acc) branches.push_back(Branch{d, r});
    res = make(key, std::move(branches));
  }
  mul_cache_.emplace(cache_key, res);
  return res;
}

TrRef TrddManager::conj(const TrRef& a) {
  if (a.is_zero()) return zero();
  return scale(conj_node(a.node), std::conj(a.weight));
}

TrRef TrddManager::conj_node(const TrNode* a) {
  if (a->is_terminal()) return one();
  if (auto it = conj_cache_.find(a); it != conj_cache_.end()) return it->second;
  std::vector<Branch> branches;
  branches.reserve(a->edges.size());
  for (const auto& e : a->edges) {
    branches.push_back(Branch{e.degree, scale(conj_node(e.child), std::conj(e.weight))});
  }
  auto res = make(a->key, std::move(branches));
  conj_cache_.emplace(a, res);
  return res;
}

// ---------------------------------------------------------------- queries

bool TrddManager::depends_on(const TrRef& a, ParamId x) const {
  if (a.is_zero()) return false;
  std::unordered_set<const TrNode*> seen;
  std::vector<const TrNode*> stack{a.node};
  while (!stack.empty()) {
    const auto* n = stack.back();
    stack.pop_back();
    if (n->is_terminal() || !seen.insert(n).second) continue;
    if (n->label().var == x) return true;
    for (const auto& e : n->edges) stack.push_back(e.child);
  }
  return false;
}

Complex TrddManager::eval(const TrRef& a, std::span<const double> half_angles) const {
  if (a.is_zero()) return 0.0;
  std::unordered_map<const TrNode*, Complex> memo;
  std::function<Complex(const TrNode*)> go = [&](const TrNode* n) -> Complex {
    if (n->is_terminal()) return 1.0;
    if (auto it = memo.find(n); it != memo.end()) return it->second;
    const auto l = n->label();
    if (l.var >= half_angles.size() || std::isnan(half_angles[l.var])) throw MissingParameter(l.var);
    const double base = l.is_cos ? std::cos(half_angles[l.var]) : std::sin(half_angles[l.var]);
    Complex v = 0.0;
    for (const auto& e : n->edges) {
      v += e.weight * std::pow(base, static_cast<double>(e.degree)) * go(e.child);
    }
    memo.emplace(n, v);
    return v;
  };
  return a.weight * go(a.node);
}

std::size_t TrddManager::node_count(const TrRef& a) const {
  std::unordered_set<const TrNode*> seen;
  std::vector<const TrNode*> stack{a.node};
  while (!stack.empty()) {
    const auto* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    for (const auto& e : n->edges) stack.push_back(e.child);
  }
  return seen.size();
}

// -------------------------------------------------------- common factors

const TrddManager::Exponents& TrddManager::node_gcd(const TrNode* a) {
  if (auto it = gcd_cache_.find(a); it != gcd_cache_.end()) return it->second;
  Exponents result;
  if (!a->is_terminal()) {
    bool first = true;
    for (const auto& e : a->edges) {
      Exponents path;
      if (e.degree > 0) path.emplace_back(a->key, e.degree);
      const auto& below = node_gcd(e.child);
      path.insert(path.end(), below.begin(), below.end());
      if (first) {
        result = std::move(path);
        first = false;
        continue;
      }
      Exponents next;
      std::size_t i = 0;
      std::size_t j = 0;
      while (i < result.size() && j < path.size()) {
        if (result[i].first < path[j].first) {
          ++i;
        } else if (path[j].first < result[i].first) {
          ++j;
        } else {
          next.emplace_back(result[i].first, std::min(result[i].second, path[j].second));
          ++i;
          ++j;
        }
      }
      result = std::move(next);
      if (result.empty()) break;
    }
  }
  return gcd_cache_.emplace(a, std::move(result)).first->second;
}

Complex TrddManager::rightmost_product(const TrNode* a) const {
  Complex c = 1.0;
  while (!a->is_terminal()) {
    c *= a->edges.back().weight;
    a = a->edges.back().child;
  }
  return c;
}

TrRef TrddManager::divide_monomial(const TrRef& a, const Exponents& m) {
  if (m.empty() || a.is_zero()) return a;
  const TrNode* n = a.node;
  if (n->is_terminal() || m.front().first < n->key) {
    throw std::logic_error("divide_monomial: monomial does not divide the diagram");
  }
  const auto cache_key = std::make_pair(n, m);
  if (auto it = div_cache_.find(cache_key); it != div_cache_.end()) {
    return scale(it->second, a.weight);
  }
  std::vector<Branch> branches;
  branches.reserve(n->edges.size());
  if (m.front().first == n->key) {
    const auto d = m.front().second;
    const Exponents rest(m.begin() + 1, m.end());
    for (const auto& e : n->edges) {
      branches.push_back(Branch{e.degree - d, divide_monomial(TrRef{e.weight, e.child}, rest)});
    }
  } else {
    for (const auto& e : n->edges) {
      branches.push_back(Branch{e.degree, divide_monomial(TrRef{e.weight, e.child}, m)});
    }
  }
  auto res = make(n->key, std::move(branches));
  div_cache_.emplace(cache_key, res);
  return scale(res, a.weight);
}

TrRef TrddManager::from_monomial(const Exponents& m, Complex c) {
  TrRef acc = one();
  for (auto it = m.rbegin(); it != m.rend(); ++it) acc = make(it->first, {Branch{it->second, acc}});
  return scale(acc, c);
}

TrddManager::Factored TrddManager::common_factor(const TrRef& f, const TrRef& g,
                                                 bool extract_scalar, bool proportional) {
  if (f.is_zero() && g.is_zero()) return Factored{one(), zero(), zero()};
  if (extract_scalar && proportional) {
    if (f.is_zero()) return Factored{g, zero(), one()};
    if (g.is_zero()) return Factored{f, one(), zero()};
    if (f.node == g.node) return Factored{f, one(), constant(g.weight / f.weight)};
  }

  Exponents m;
  bool first = true;
  for (const auto* r : {&f, &g}) {
    if (r->is_zero()) continue;
    const auto& e = node_gcd(r->node);
    if (first) {
      m = e;
      first = false;
      continue;
    }
    Exponents next;
    for (const auto& [k, d] : m) {
      auto it = std::find_if(e.begin(), e.end(), [k = k](const auto& p) { return p.first == k; });
      if (it != e.end()) next.emplace_back(k, std::min(d, it->second));
    }
    m = std::move(next);
  }

  const TrRef fd = divide_monomial(f, m);
  const TrRef gd = divide_monomial(g, m);
  Complex c = 1.0;
  if (extract_scalar) {
    const TrRef& lead = f.is_zero() ? gd : fd;
    c = lead.weight * rightmost_product(lead.node);
  }
  const Complex inv = 1.0 / c;
  return Factored{from_monomial(m, c), scale(fd, inv), scale(gd, inv)};
}

// ------------------------------------------------------------ diagnostics

std::string TrddManager::validate(const TrRef& a) const {
  if (a.is_zero()) {
    return a.node->is_terminal() ? "" : "zero weight on a non-terminal root";
  }
  std::unordered_set<const TrNode*> seen;
  std::vector<const TrNode*> stack{a.node};
  while (!stack.empty()) {
    const auto* n = stack.back();
    stack.pop_back();
    if (n->is_terminal() || !seen.insert(n).second) continue;
    const auto id = "node n" + std::to_string(n->id);
    if (n->edges.empty()) return id + " has no edges";
    if (n->edges.front().weight != Complex(1.0)) return id + " leftmost weight is not 1";
    if (n->edges.size() == 1 && n->edges.front().degree == 0) return id + " is redundant";
    for (std::size_t k = 0; k < n->edges.size(); ++k) {
      const auto& e = n->edges[k];
      if (k > 0 && e.degree <= n->edges[k - 1].degree) return id + " degrees not ascending";
      if (!n->label().is_cos && e.degree >= 2) return id + " sin degree >= 2";
      if (std::abs(e.weight) <= numbers_.tolerance()) return id + " has a zero edge";
      if (e.child->key <= n->key) return id + " child label out of order";
      stack.push_back(e.child);
    }
  }
  return "";
}

void TrddManager::dump(std::ostream& os, const TrRef& a, const ParamTable* names) const {
  std::unordered_set<const TrNode*> seen;
  char buf[96];
  std::function<void(const TrNode*)> go = [&](const TrNode* n) {
    if (!seen.insert(n).second) return;
    for (const auto& e : n->edges) go(e.child);
    os << 'n' << n->id << ' ' << label_name(n->key, names);
    for (const auto& e : n->edges) {
      std::snprintf(buf, sizeof buf, " %u:(%.12g,%.12g):n%zu", e.degree, e.weight.real(),
                    e.weight.imag(), e.child->id);
      os << buf;
    }
    os << '\n';
  };
  go(a.node);
  std::snprintf(buf, sizeof buf, "root (%.12g,%.12g) n%zu\n", a.weight.real(), a.weight.imag(),
                a.node->id);
  os << buf;
}

std::string TrddManager::dump(const TrRef& a, const ParamTable* names) const {
  std::ostringstream os;
  dump(os, a, names);
  return os.str();
}

void TrddManager::clear_caches() {
  add_cache_.clear();
  mul_cache_.clear();
  conj_cache_.clear();
  poly_cache_.clear();
  gcd_cache_.clear();
  div_cache_.clear();
}

}  // namespace pqcv
