#pragma once

#include <compare>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace pqcv {

using Complex = std::complex<double>;

/// Coefficients with modulus at or below this are treated as zero.
inline constexpr double kEpsilon = 1e-10;

/// Dense handle of a parameter. Symbol `id` stands for half of the
/// parameter's angle, so a gate angle theta is written as 2*s_theta.
using ParamId = std::uint32_t;

/// Bidirectional name <-> id mapping; ids follow declaration order.
class ParamTable {
 public:
  ParamTable() = default;
  explicit ParamTable(std::span<const std::string> names);

  /// Returns the id of `name`, declaring it if needed.
  ParamId declare(const std::string& name);
  [[nodiscard]] const std::string& name(ParamId id) const { return names_.at(id); }
  [[nodiscard]] bool contains(const std::string& name) const;
  [[nodiscard]] ParamId id(const std::string& name) const;
  [[nodiscard]] std::size_t size() const { return names_.size(); }
  [[nodiscard]] const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::map<std::string, ParamId> ids_;
};

/// Integer-linear combination of parameters plus a real constant, in radians.
struct AngleExpr {
  std::map<ParamId, std::int64_t> coeffs;  // no zero entries
  double constant = 0.0;

  static AngleExpr param(ParamId id, std::int64_t mult = 1);
  static AngleExpr constant_angle(double radians);

  AngleExpr operator-() const;
  AngleExpr operator+(const AngleExpr& other) const;
  AngleExpr operator-(const AngleExpr& other) const;
  bool operator==(const AngleExpr&) const = default;

  [[nodiscard]] bool is_constant() const { return coeffs.empty(); }
  [[nodiscard]] double evaluate(std::span<const double> full_angles) const;
};

/// sin(s_var)^sin_exp * cos(s_var)^cos_exp, with sin_exp in {0,1}.
struct Factor {
  ParamId var = 0;
  std::uint8_t sin_exp = 0;
  std::uint32_t cos_exp = 0;
  bool operator==(const Factor&) const = default;
};

/// Product of factors, sparse and sorted by variable; (0,0) factors are
/// never stored, so the empty monomial is the constant 1.
class Monomial {
 public:
  Monomial() = default;
  /// Builds from arbitrary factors; merges duplicates. Throws if a
  /// resulting sin exponent exceeds 1 (use mono_mul for reduction).
  explicit Monomial(std::vector<Factor> factors);

  static Monomial sin_of(ParamId var);
  static Monomial cos_of(ParamId var, std::uint32_t power = 1);

  [[nodiscard]] std::span<const Factor> factors() const { return factors_; }
  [[nodiscard]] bool is_one() const { return factors_.empty(); }
  [[nodiscard]] Factor exponents(ParamId var) const;
  [[nodiscard]] bool mentions(ParamId var) const;
  [[nodiscard]] bool divides(const Monomial& other) const;
  /// Exact syntactic quotient; requires divides(other) to hold for `divisor`.
  [[nodiscard]] Monomial quotient(const Monomial& divisor) const;
  /// Component-wise minimum of exponents.
  [[nodiscard]] static Monomial gcd(const Monomial& a, const Monomial& b);
  [[nodiscard]] double evaluate(std::span<const double> half_angles) const;

  bool operator==(const Monomial&) const = default;

 private:
  std::vector<Factor> factors_;
};

/// Total order on monomials. The single-symbol monomials are ordered
/// sin(s0) < cos(s0) < sin(s1) < cos(s1) < ...; in general m1 < m2 iff the
/// exponent vector (a0,b0,a1,b1,...) of m1 is lexicographically greater.
/// The constant monomial is the greatest.
std::strong_ordering cmp_monomial(const Monomial& m1, const Monomial& m2);

struct Term {
  Monomial mono;
  Complex coeff;
};

/// Canonical trigonometric polynomial over half-angle symbols: terms
/// strictly ascending by cmp_monomial, no zero coefficients.
class TrigPoly {
 public:
  TrigPoly() = default;
  /// Canonicalises arbitrary terms (sorts, merges, prunes).
  explicit TrigPoly(std::vector<Term> terms);

  static TrigPoly constant(Complex c);
  static TrigPoly monomial(Monomial m, Complex c = 1.0);
  static TrigPoly sin_of(ParamId var) { return monomial(Monomial::sin_of(var)); }
  static TrigPoly cos_of(ParamId var) { return monomial(Monomial::cos_of(var)); }

  [[nodiscard]] std::span<const Term> terms() const { return terms_; }
  [[nodiscard]] bool is_zero() const { return terms_.empty(); }
  [[nodiscard]] bool is_constant() const;
  /// Constant term coefficient (0 if absent).
  [[nodiscard]] Complex constant_term() const;
  [[nodiscard]] std::size_t size() const { return terms_.size(); }

  /// Structural equality: identical monomials, coefficients within `tol`.
  [[nodiscard]] bool approx_equal(const TrigPoly& other, double tol = kEpsilon) const;

  TrigPoly& operator+=(const TrigPoly& other);
  TrigPoly& operator*=(Complex scalar);

 private:
  std::vector<Term> terms_;
};

TrigPoly mono_mul(const Monomial& m1, const Monomial& m2);
TrigPoly poly_add(const TrigPoly& f, const TrigPoly& g);
TrigPoly poly_sub(const TrigPoly& f, const TrigPoly& g);
TrigPoly poly_mul(const TrigPoly& f, const TrigPoly& g);
TrigPoly poly_scale(const TrigPoly& f, Complex c);
TrigPoly poly_conj(const TrigPoly& f);

inline TrigPoly operator+(const TrigPoly& f, const TrigPoly& g) { return poly_add(f, g); }
inline TrigPoly operator-(const TrigPoly& f, const TrigPoly& g) { return poly_sub(f, g); }
inline TrigPoly operator*(const TrigPoly& f, const TrigPoly& g) { return poly_mul(f, g); }
inline TrigPoly operator*(Complex c, const TrigPoly& f) { return poly_scale(f, c); }

class MissingParameter : public std::runtime_error {
 public:
  explicit MissingParameter(ParamId id)
      : std::runtime_error("missing value for parameter symbol s" + std::to_string(id)), id_(id) {}
  [[nodiscard]] ParamId id() const { return id_; }

 private:
  ParamId id_;
};

/// Evaluates at half-angle values s_i (indexed by ParamId); throws
/// MissingParameter if a mentioned symbol has no value.
Complex poly_eval(const TrigPoly& f, std::span<const double> half_angles);
Complex poly_eval(const TrigPoly& f, const std::map<ParamId, double>& half_angles);

/// cos(a/2) and sin(a/2) expanded over half-angle symbols, for a full gate angle a.
TrigPoly expand_cos(const AngleExpr& a);
TrigPoly expand_sin(const AngleExpr& a);

struct CommonFactor {
  TrigPoly h;
  TrigPoly f;
  TrigPoly g;
};

/// Extracts h = c*m with m the greatest monomial dividing every term of both
/// inputs and c the coefficient of the smallest term of f/m (of g/m if f is
/// zero). With `extract_scalar` false, c is fixed to 1.
CommonFactor common_factor(const TrigPoly& f, const TrigPoly& g, bool extract_scalar = true);

bool poly_depends_on(const TrigPoly& f, ParamId x);

/// `(re,im)*sin(name)^a*cos(name)^b + ...`; "0" for the zero polynomial.
std::string to_string(const TrigPoly& f, const ParamTable* names = nullptr);

}  // namespace pqcv
