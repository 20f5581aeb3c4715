#include "pqcv/trigpoly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace pqcv {

// ---------------------------------------------------------------- ParamTable

ParamTable::ParamTable(std::span<const std::string> names) {
  for (const auto& n : names) {
    if (contains(n)) throw std::invalid_argument("duplicate parameter '" + n + "'");
    declare(n);
  }
}

ParamId ParamTable::declare(const std::string& name) {
  if (auto it = ids_.find(name); it != ids_.end()) return it->second;
  const auto id = static_cast<ParamId>(names_.size());
  names_.push_back(name);
  ids_.emplace(name, id);
  return id;
}

bool ParamTable::contains(const std::string& name) const { return ids_.count(name) != 0; }

ParamId ParamTable::id(const std::string& name) const {
  auto it = ids_.find(name);
  if (it == ids_.end()) throw std::out_of_range("unknown parameter '" + name + "'");
  return it->second;
}

// ----------------------------------------------------------------- AngleExpr

AngleExpr AngleExpr::param(ParamId id, std::int64_t mult) {
  AngleExpr a;
  if (mult != 0) a.coeffs[id] = mult;
  return a;
}

AngleExpr AngleExpr::constant_angle(double radians) {
  AngleExpr a;
  a.constant = radians;
  return a;
}

AngleExpr AngleExpr::operator-() const {
  AngleExpr r;
  for (auto [id, c] : coeffs) r.coeffs[id] = -c;
  // avoid producing -0.0 so printed forms round-trip
  r.constant = constant == 0.0 ? 0.0 : -constant;
  return r;
}

AngleExpr AngleExpr::operator+(const AngleExpr& other) const {
  AngleExpr r = *this;
  for (auto [id, c] : other.coeffs) {
    auto& slot = r.coeffs[id];
    slot += c;
    if (slot == 0) r.coeffs.erase(id);
  }
  r.constant += other.constant;
  return r;
}

AngleExpr AngleExpr::operator-(const AngleExpr& other) const { return *this + (-other); }

double AngleExpr::evaluate(std::span<const double> full_angles) const {
  double v = constant;
  for (auto [id, c] : coeffs) {
    if (id >= full_angles.size()) throw MissingParameter(id);
    v += static_cast<double>(c) * full_angles[id];
  }
  return v;
}

// ------------------------------------------------------------------ Monomial

Monomial::Monomial(std::vector<Factor> factors) {
  std::sort(factors.begin(), factors.end(),
            [](const Factor& a, const Factor& b) { return a.var < b.var; });
  for (const auto& f : factors) {
    if (!factors_.empty() && factors_.back().var == f.var) {
      factors_.back().sin_exp = static_cast<std::uint8_t>(factors_.back().sin_exp + f.sin_exp);
      factors_.back().cos_exp += f.cos_exp;
    } else {
      factors_.push_back(f);
    }
  }
  std::erase_if(factors_, [](const Factor& f) { return f.sin_exp == 0 && f.cos_exp == 0; });
  for (const auto& f : factors_) {
    if (f.sin_exp > 1) throw std::invalid_argument("monomial sin exponent must be 0 or 1");
  }
}

Monomial Monomial::sin_of(ParamId var) { return Monomial({Factor{var, 1, 0}}); }

Monomial Monomial::cos_of(ParamId var, std::uint32_t power) {
  return Monomial({Factor{var, 0, power}});
}

Factor Monomial::exponents(ParamId var) const {
  auto it = std::lower_bound(factors_.begin(), factors_.end(), var,
                             [](const Factor& f, ParamId v) { return f.var < v; });
  if (it != factors_.end() && it->var == var) return *it;
  return Factor{var, 0, 0};
}

bool Monomial::mentions(ParamId var) const {
  const auto f = exponents(var);
  return f.sin_exp != 0 || f.cos_exp != 0;
}

bool Monomial::divides(const Monomial& other) const {
  for (const auto& f : factors_) {
    const auto o = other.exponents(f.var);
    if (o.sin_exp < f.sin_exp || o.cos_exp < f.cos_exp) return false;
  }
  return true;
}

Monomial Monomial::quotient(const Monomial& divisor) const {
  std::vector<Factor> out;
  out.reserve(factors_.size());
  for (const auto& f : factors_) {
    const auto d = divisor.exponents(f.var);
    if (d.sin_exp > f.sin_exp || d.cos_exp > f.cos_exp) {
      throw std::invalid_argument("monomial quotient: divisor does not divide");
    }
    out.push_back(Factor{f.var, static_cast<std::uint8_t>(f.sin_exp - d.sin_exp),
                         f.cos_exp - d.cos_exp});
  }
  return Monomial(std::move(out));
}

Monomial Monomial::gcd(const Monomial& a, const Monomial& b) {
  std::vector<Factor> out;
  for (const auto& f : a.factors_) {
    const auto o = b.exponents(f.var);
    out.push_back(Factor{f.var, std::min(f.sin_exp, o.sin_exp), std::min(f.cos_exp, o.cos_exp)});
  }
  return Monomial(std::move(out));
}

double Monomial::evaluate(std::span<const double> half_angles) const {
  double v = 1.0;
  for (const auto& f : factors_) {
    if (f.var >= half_angles.size() || std::isnan(half_angles[f.var])) throw MissingParameter(f.var);
    const double s = half_angles[f.var];
    if (f.sin_exp) v *= std::sin(s);
    if (f.cos_exp) v *= std::pow(std::cos(s), static_cast<double>(f.cos_exp));
  }
  return v;
}

std::strong_ordering cmp_monomial(const Monomial& m1, const Monomial& m2) {
  auto a = m1.factors();
  auto b = m2.factors();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    Factor fa{};
    Factor fb{};
    if (j == b.size() || (i < a.size() && a[i].var < b[j].var)) {
      fa = a[i];
      fb = Factor{fa.var, 0, 0};
      ++i;
    } else if (i == a.size() || b[j].var < a[i].var) {
      fb = b[j];
      fa = Factor{fb.var, 0, 0};
      ++j;
    } else {
      fa = a[i++];
      fb = b[j++];
    }
    if (fa.sin_exp != fb.sin_exp) {
      return fa.sin_exp > fb.sin_exp ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    if (fa.cos_exp != fb.cos_exp) {
      return fa.cos_exp > fb.cos_exp ? std::strong_ordering::less : std::strong_ordering::greater;
    }
  }
  return std::strong_ordering::equal;
}

// ------------------------------------------------------------------ TrigPoly

TrigPoly::TrigPoly(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& x, const Term& y) { return cmp_monomial(x.mono, y.mono) < 0; });
  for (auto& t : terms) {
    if (!terms_.empty() && terms_.back().mono == t.mono) {
      terms_.back().coeff += t.coeff;
    } else {
      terms_.push_back(std::move(t));
    }
  }
  std::erase_if(terms_, [](const Term& t) { return std::abs(t.coeff) <= kEpsilon; });
}

TrigPoly TrigPoly::constant(Complex c) {
  return TrigPoly(std::vector<Term>{Term{Monomial(), c}});
}

TrigPoly TrigPoly::monomial(Monomial m, Complex c) {
  return TrigPoly(std::vector<Term>{Term{std::move(m), c}});
}

bool TrigPoly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.front().mono.is_one());
}

Complex TrigPoly::constant_term() const {
  // the constant monomial sorts last
  if (!terms_.empty() && terms_.back().mono.is_one()) return terms_.back().coeff;
  return 0.0;
}

bool TrigPoly::approx_equal(const TrigPoly& other, double tol) const {
  if (terms_.size() != other.terms_.size()) return false;
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    if (!(terms_[k].mono == other.terms_[k].mono)) return false;
    if (std::abs(terms_[k].coeff - other.terms_[k].coeff) > tol) return false;
  }
  return true;
}

TrigPoly& TrigPoly::operator+=(const TrigPoly& other) {
  *this = poly_add(*this, other);
  return *this;
}

TrigPoly& TrigPoly::operator*=(Complex scalar) {
  *this = poly_scale(*this, scalar);
  return *this;
}

TrigPoly mono_mul(const Monomial& m1, const Monomial& m2) {
  // Multiply exponents, then expand every sin^2 = 1 - cos^2.
  std::vector<Factor> plain;
  std::vector<Factor> squared;  // vars whose sin exponent reached 2 (cos part kept)
  auto a = m1.factors();
  auto b = m2.factors();
  std::size_t i = 0;
  std::size_t j = 0;
  auto push = [&](Factor f) {
    if (f.sin_exp >= 2) {
      squared.push_back(Factor{f.var, 0, f.cos_exp});
    } else {
      plain.push_back(f);
    }
  };
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].var < b[j].var)) {
      push(a[i++]);
    } else if (i == a.size() || b[j].var < a[i].var) {
      push(b[j++]);
    } else {
      push(Factor{a[i].var, static_cast<std::uint8_t>(a[i].sin_exp + b[j].sin_exp),
                  a[i].cos_exp + b[j].cos_exp});
      ++i;
      ++j;
    }
  }
  std::vector<Term> terms{Term{Monomial(plain), 1.0}};
  for (const auto& sq : squared) {
    std::vector<Term> next;
    next.reserve(terms.size() * 2);
    for (const auto& t : terms) {
      // t * cos^b * (1 - cos^2)
      next.push_back(Term{mono_mul(t.mono, Monomial::cos_of(sq.var, sq.cos_exp)).terms()[0].mono,
                          t.coeff});
      next.push_back(
          Term{mono_mul(t.mono, Monomial::cos_of(sq.var, sq.cos_exp + 2)).terms()[0].mono,
               -t.coeff});
    }
    terms = std::move(next);
  }
  return TrigPoly(std::move(terms));
}

TrigPoly poly_add(const TrigPoly& f, const TrigPoly& g) {
  std::vector<Term> terms(f.terms().begin(), f.terms().end());
  terms.insert(terms.end(), g.terms().begin(), g.terms().end());
  return TrigPoly(std::move(terms));
}

TrigPoly poly_sub(const TrigPoly& f, const TrigPoly& g) { return poly_add(f, poly_scale(g, -1.0)); }

TrigPoly poly_mul(const TrigPoly& f, const TrigPoly& g) {
  std::vector<Term> terms;
  terms.reserve(f.size() * g.size());
  for (const auto& x : f.terms()) {
    for (const auto& y : g.terms()) {
      const auto prod = mono_mul(x.mono, y.mono);
      for (const auto& t : prod.terms()) terms.push_back(Term{t.mono, t.coeff * x.coeff * y.coeff});
    }
  }
  return TrigPoly(std::move(terms));
}

TrigPoly poly_scale(const TrigPoly& f, Complex c) {
  std::vector<Term> terms(f.terms().begin(), f.terms().end());
  for (auto& t : terms) t.coeff *= c;
  return TrigPoly(std::move(terms));
}

TrigPoly poly_conj(const TrigPoly& f) {
  std::vector<Term> terms(f.terms().begin(), f.terms().end());
  for (auto& t : terms) t.coeff = std::conj(t.coeff);
  return TrigPoly(std::move(terms));
}

Complex poly_eval(const TrigPoly& f, std::span<const double> half_angles) {
  Complex v = 0.0;
  for (const auto& t : f.terms()) v += t.coeff * t.mono.evaluate(half_angles);
  return v;
}

Complex poly_eval(const TrigPoly& f, const std::map<ParamId, double>& half_angles) {
  std::vector<double> dense;
  for (const auto& t : f.terms()) {
    for (const auto& fac : t.mono.factors()) {
      if (fac.var >= dense.size()) dense.resize(fac.var + 1, std::nan(""));
      auto it = half_angles.find(fac.var);
      if (it == half_angles.end()) throw MissingParameter(fac.var);
      dense[fac.var] = it->second;
    }
  }
  return poly_eval(f, dense);
}

namespace {

struct CosSin {
  TrigPoly c;
  TrigPoly s;
};

// cos/sin of (x + y) from the parts of x and y
CosSin add_angles(const CosSin& x, const CosSin& y) {
  return CosSin{x.c * y.c - x.s * y.s, x.s * y.c + x.c * y.s};
}

// cos(n*s), sin(n*s) for integer n over half-angle symbol s
CosSin multiple_of(ParamId var, std::int64_t n) {
  const CosSin unit{TrigPoly::cos_of(var), TrigPoly::sin_of(var)};
  CosSin acc{TrigPoly::constant(1.0), TrigPoly()};
  const auto count = n < 0 ? -n : n;
  for (std::int64_t k = 0; k < count; ++k) acc = add_angles(acc, unit);
  if (n < 0) acc.s = poly_scale(acc.s, -1.0);
  return acc;
}

CosSin expand_half(const AngleExpr& a) {
  const double half_const = a.constant / 2.0;
  CosSin acc{TrigPoly::constant(std::cos(half_const)), TrigPoly::constant(std::sin(half_const))};
  for (auto [var, n] : a.coeffs) acc = add_angles(acc, multiple_of(var, n));
  return acc;
}

}  // namespace

TrigPoly expand_cos(const AngleExpr& a) { return expand_half(a).c; }
TrigPoly expand_sin(const AngleExpr& a) { return expand_half(a).s; }

CommonFactor common_factor(const TrigPoly& f, const TrigPoly& g, bool extract_scalar) {
  if (f.is_zero() && g.is_zero()) return CommonFactor{TrigPoly::constant(1.0), f, g};

  bool first = true;
  Monomial m;
  for (const auto* p : {&f, &g}) {
    for (const auto& t : p->terms()) {
      m = first ? t.mono : Monomial::gcd(m, t.mono);
      first = false;
    }
  }

  auto divide = [&](const TrigPoly& p, Complex c) {
    std::vector<Term> terms;
    terms.reserve(p.size());
    for (const auto& t : p.terms()) terms.push_back(Term{t.mono.quotient(m), t.coeff / c});
    return TrigPoly(std::move(terms));
  };

  Complex c = 1.0;
  if (extract_scalar) {
    // dividing by m keeps the term order, so the smallest term stays first
    c = f.is_zero() ? g.terms().front().coeff : f.terms().front().coeff;
  }
  return CommonFactor{TrigPoly::monomial(m, c), divide(f, c), divide(g, c)};
}

bool poly_depends_on(const TrigPoly& f, ParamId x) {
  return std::any_of(f.terms().begin(), f.terms().end(),
                     [x](const Term& t) { return t.mono.mentions(x); });
}

std::string to_string(const TrigPoly& f, const ParamTable* names) {
  if (f.is_zero()) return "0";
  std::string out;
  char buf[96];
  for (const auto& t : f.terms()) {
    if (!out.empty()) out += " + ";
    std::snprintf(buf, sizeof buf, "(%.12g,%.12g)", t.coeff.real(), t.coeff.imag());
    out += buf;
    for (const auto& fac : t.mono.factors()) {
      const std::string name = names && fac.var < names->size()
                                   ? names->name(fac.var)
                                   : "s" + std::to_string(fac.var);
      if (fac.sin_exp) out += "*sin(" + name + ")^" + std::to_string(fac.sin_exp);
      if (fac.cos_exp) out += "*cos(" + name + ")^" + std::to_string(fac.cos_exp);
    }
  }
  return out;
}

}  // namespace pqcv
