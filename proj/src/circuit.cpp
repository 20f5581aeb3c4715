#include "pqcv/circuit.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace pqcv {

namespace {

struct GateInfo {
  GateKind kind;
  std::string_view name;
  int arity;
  bool rotation;
};

constexpr std::array<GateInfo, 15> kGates{{
    {GateKind::X, "x", 1, false},     {GateKind::Y, "y", 1, false},     {GateKind::Z, "z", 1, false},
    {GateKind::H, "h", 1, false},     {GateKind::S, "s", 1, false},     {GateKind::Sdg, "sdg", 1, false},
    {GateKind::T, "t", 1, false},     {GateKind::Tdg, "tdg", 1, false}, {GateKind::CX, "cx", 2, false},
    {GateKind::CZ, "cz", 2, false},   {GateKind::Swap, "swap", 2, false}, {GateKind::RX, "rx", 1, true},
    {GateKind::RY, "ry", 1, true},    {GateKind::RZ, "rz", 1, true},    {GateKind::P, "p", 1, true},
}};

const GateInfo& info(GateKind k) { return kGates[static_cast<std::size_t>(k)]; }

}  // namespace

std::string_view gate_name(GateKind k) { return info(k).name; }
int gate_arity(GateKind k) { return info(k).arity; }
bool is_rotation(GateKind k) { return info(k).rotation; }

std::optional<GateKind> gate_from_name(std::string_view name) {
  for (const auto& g : kGates) {
    if (g.name == name) return g.kind;
  }
  return std::nullopt;
}

void PQC::validate() const {
  if (n_qubits < 1) throw std::invalid_argument("circuit needs at least one qubit");
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const auto& g = gates[i];
    const auto where = "gate " + std::to_string(i) + " (" + std::string(gate_name(g.kind)) + ")";
    if (static_cast<int>(g.qubits.size()) != gate_arity(g.kind)) throw std::invalid_argument(where + ": wrong arity");
    for (std::size_t a = 0; a < g.qubits.size(); ++a) {
      if (g.qubits[a] < 0 || g.qubits[a] >= n_qubits) throw std::invalid_argument(where + ": qubit out of range");
      for (std::size_t b = a + 1; b < g.qubits.size(); ++b) {
        if (g.qubits[a] == g.qubits[b]) throw std::invalid_argument(where + ": repeated qubit");
      }
    }
    if (g.angle.has_value() != is_rotation(g.kind)) throw std::invalid_argument(where + ": angle mismatch");
    if (g.angle) {
      for (auto [id, k] : g.angle->coeffs) {
        if (id >= params.size()) throw std::invalid_argument(where + ": undeclared parameter");
        if (k == 0) throw std::invalid_argument(where + ": zero coefficient stored");
      }
    }
  }
}

bool operator==(const PQC& a, const PQC& b) {
  return a.n_qubits == b.n_qubits && a.params.names() == b.params.names() && a.gates == b.gates;
}

ParseError::ParseError(const std::string& what, int line, int column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

// ------------------------------------------------------------------ parser

namespace {

enum class Tok { Ident, Number, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0.0;
  bool integral = false;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view s) : src_(s) {}

  Token next() {
    skip();
    Token t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= src_.size()) return t;
    const char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const auto start = pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) advance();
      t.kind = Tok::Ident;
      t.text = std::string(src_.substr(start, pos_ - start));
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      const auto start = pos_;
      bool integral = true;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
      if (pos_ < src_.size() && src_[pos_] == '.') {
        integral = false;
        advance();
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        auto save = pos_;
        advance();
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
        if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          integral = false;
          while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
        } else {
          col_ -= static_cast<int>(pos_ - save);
          pos_ = save;
        }
      }
      t.kind = Tok::Number;
      t.text = std::string(src_.substr(start, pos_ - start));
      t.integral = integral;
      const auto r = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
      if (r.ec != std::errc()) throw ParseError("bad number '" + t.text + "'", t.line, t.col);
      return t;
    }
    if (std::string_view("();,+-*/").find(c) != std::string_view::npos) {
      advance();
      t.kind = Tok::Punct;
      t.text = std::string(1, c);
      return t;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", t.line, t.col);
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// Intermediate angle value with real coefficients; integrality is checked at the end.
struct Linear {
  std::map<ParamId, double> coeffs;
  double constant = 0.0;

  [[nodiscard]] bool is_constant() const { return coeffs.empty(); }
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) { tok_ = lex_.next(); }

  PQC run() {
    PQC c;
    bool have_qubits = false;
    while (tok_.kind != Tok::End) {
      const Token head = expect_ident("statement");
      if (head.text == "qubits") {
        if (have_qubits) throw ParseError("duplicate 'qubits' declaration", head.line, head.col);
        const Token n = expect_integer("qubit count");
        if (n.number < 1) throw ParseError("qubit count must be at least 1", n.line, n.col);
        c.n_qubits = static_cast<int>(n.number);
        have_qubits = true;
      } else if (!have_qubits) {
        throw ParseError("expected 'qubits' declaration first", head.line, head.col);
      } else if (head.text == "param") {
        do {
          const Token name = expect_ident("parameter name");
          if (name.text == "pi" || gate_from_name(name.text) || name.text == "param" || name.text == "qubits") {
            throw ParseError("reserved word '" + name.text + "' used as parameter", name.line, name.col);
          }
          if (c.params.contains(name.text)) {
            throw ParseError("parameter '" + name.text + "' declared twice", name.line, name.col);
          }
          c.params.declare(name.text);
        } while (accept(","));
      } else {
        parse_gate(c, head);
      }
      expect(";");
    }
    if (!have_qubits) throw ParseError("missing 'qubits' declaration", tok_.line, tok_.col);
    return c;
  }

 private:
  void parse_gate(PQC& c, const Token& head) {
    const auto kind = gate_from_name(head.text);
    if (!kind) throw ParseError("unknown gate '" + head.text + "'", head.line, head.col);
    Gate g;
    g.kind = *kind;
    if (is_rotation(*kind)) {
      expect("(");
      g.angle = parse_angle(c.params);
      expect(")");
    } else if (is_punct("(")) {
      throw ParseError("gate '" + head.text + "' takes no angle", tok_.line, tok_.col);
    }
    for (int k = 0; k < gate_arity(*kind); ++k) {
      const Token q = expect_integer("qubit index");
      if (q.number >= c.n_qubits) {
        throw ParseError("qubit " + q.text + " out of range", q.line, q.col);
      }
      const int qi = static_cast<int>(q.number);
      if (std::find(g.qubits.begin(), g.qubits.end(), qi) != g.qubits.end()) {
        throw ParseError("qubit " + q.text + " repeated", q.line, q.col);
      }
      g.qubits.push_back(qi);
    }
    c.gates.push_back(std::move(g));
  }

  AngleExpr parse_angle(const ParamTable& params) {
    const Token start = tok_;
    const Linear v = expr(params);
    AngleExpr a = AngleExpr::constant_angle(v.constant == 0.0 ? 0.0 : v.constant);
    for (auto [id, k] : v.coeffs) {
      const double r = std::round(k);
      if (std::abs(k - r) > 1e-9) {
        throw ParseError("parameter coefficients must be integers", start.line, start.col);
      }
      if (r != 0.0) a.coeffs[id] = static_cast<std::int64_t>(r);
    }
    return a;
  }

  Linear expr(const ParamTable& params) {
    Linear acc = term(params);
    while (is_punct("+") || is_punct("-")) {
      const bool minus = tok_.text == "-";
      advance();
      Linear rhs = term(params);
      for (auto [id, k] : rhs.coeffs) acc.coeffs[id] += minus ? -k : k;
      acc.constant += minus ? -rhs.constant : rhs.constant;
    }
    return acc;
  }

  Linear term(const ParamTable& params) {
    Linear acc = unary(params);
    while (is_punct("*") || is_punct("/")) {
      const Token op = tok_;
      advance();
      Linear rhs = unary(params);
      if (op.text == "*") {
        if (!acc.is_constant() && !rhs.is_constant()) {
          throw ParseError("non-linear angle expression", op.line, op.col);
        }
        if (acc.is_constant()) std::swap(acc, rhs);
        for (auto& [id, k] : acc.coeffs) k *= rhs.constant;
        acc.constant *= rhs.constant;
      } else {
        if (!rhs.is_constant()) throw ParseError("non-linear angle expression", op.line, op.col);
        if (rhs.constant == 0.0) throw ParseError("division by zero", op.line, op.col);
        for (auto& [id, k] : acc.coeffs) k /= rhs.constant;
        acc.constant /= rhs.constant;
      }
    }
    return acc;
  }

  Linear unary(const ParamTable& params) {
    if (accept("-")) {
      Linear v = unary(params);
      for (auto& [id, k] : v.coeffs) k = -k;
      v.constant = -v.constant;
      return v;
    }
    if (accept("+")) return unary(params);
    return primary(params);
  }

  Linear primary(const ParamTable& params) {
    Linear v;
    if (tok_.kind == Tok::Number) {
      v.constant = tok_.number;
      advance();
      return v;
    }
    if (tok_.kind == Tok::Ident) {
      if (tok_.text == "pi") {
        v.constant = std::numbers::pi;
      } else if (params.contains(tok_.text)) {
        v.coeffs[params.id(tok_.text)] = 1.0;
      } else {
        throw ParseError("undeclared parameter '" + tok_.text + "'", tok_.line, tok_.col);
      }
      advance();
      return v;
    }
    if (accept("(")) {
      v = expr(params);
      expect(")");
      return v;
    }
    throw ParseError("expected an angle term", tok_.line, tok_.col);
  }

  void advance() { tok_ = lex_.next(); }
  [[nodiscard]] bool is_punct(std::string_view p) const { return tok_.kind == Tok::Punct && tok_.text == p; }
  bool accept(std::string_view p) {
    if (!is_punct(p)) return false;
    advance();
    return true;
  }
  void expect(std::string_view p) {
    if (!accept(p)) {
      const auto found = tok_.kind == Tok::End ? std::string("end of input") : "'" + tok_.text + "'";
      throw ParseError("expected '" + std::string(p) + "' but found " + found, tok_.line, tok_.col);
    }
  }
  Token expect_ident(const char* what) {
    if (tok_.kind != Tok::Ident) throw ParseError(std::string("expected ") + what, tok_.line, tok_.col);
    Token t = tok_;
    advance();
    return t;
  }
  Token expect_integer(const char* what) {
    if (tok_.kind != Tok::Number || !tok_.integral) {
      throw ParseError(std::string("expected ") + what, tok_.line, tok_.col);
    }
    Token t = tok_;
    advance();
    return t;
  }

  Lexer lex_;
  Token tok_;
};

}  // namespace

PQC parse_pqc(std::string_view text) {
  Parser p(text);
  PQC c = p.run();
  c.validate();
  return c;
}

PQC load_pqc(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_pqc(ss.str());
}

// ---------------------------------------------------------------- printing

std::string format_angle(const AngleExpr& a, const ParamTable& params) {
  std::string out;
  for (auto [id, k] : a.coeffs) {
    const auto mag = k < 0 ? -k : k;
    if (out.empty()) {
      if (k < 0) out += "-";
    } else {
      out += k < 0 ? " - " : " + ";
    }
    if (mag != 1) out += std::to_string(mag) + "*";
    out += params.name(id);
  }
  if (a.constant != 0.0 || out.empty()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", std::abs(a.constant));
    if (out.empty()) {
      if (a.constant < 0) out += "-";
    } else {
      out += a.constant < 0 ? " - " : " + ";
    }
    out += buf;
  }
  return out;
}

std::string print_pqc(const PQC& c, std::string_view header) {
  std::ostringstream os;
  if (!header.empty()) {
    std::istringstream lines{std::string(header)};
    for (std::string line; std::getline(lines, line);) os << "# " << line << '\n';
  }
  os << "qubits " << c.n_qubits << ";\n";
  if (c.params.size() > 0) {
    os << "param ";
    for (std::size_t i = 0; i < c.params.size(); ++i) os << (i ? ", " : "") << c.params.name(static_cast<ParamId>(i));
    os << ";\n";
  }
  for (const auto& g : c.gates) {
    os << gate_name(g.kind);
    if (g.angle) os << '(' << format_angle(*g.angle, c.params) << ')';
    for (int q : g.qubits) os << ' ' << q;
    os << ";\n";
  }
  return os.str();
}

void save_pqc(const PQC& c, const std::string& path, std::string_view header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << print_pqc(c, header);
}

// -------------------------------------------------------------- analysis

Gate adjoint_gate(const Gate& g) {
  Gate r = g;
  switch (g.kind) {
    case GateKind::S: r.kind = GateKind::Sdg; break;
    case GateKind::Sdg: r.kind = GateKind::S; break;
    case GateKind::T: r.kind = GateKind::Tdg; break;
    case GateKind::Tdg: r.kind = GateKind::T; break;
    default: break;
  }
  if (r.angle) r.angle = -*r.angle;
  return r;
}

bool ParamProfile::same_order(const ParamProfile& other, const ParamTable& mine,
                              const ParamTable& theirs) const {
  if (sequence.size() != other.sequence.size()) return false;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    if (mine.name(sequence[i]) != theirs.name(other.sequence[i])) return false;
  }
  return true;
}

ParamProfile param_profile(const PQC& c) {
  ParamProfile p;
  p.positions.resize(c.params.size());
  p.single_param_gates = true;
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const auto& g = c.gates[i];
    if (!g.is_parameterised()) continue;
    if (g.angle->coeffs.size() != 1) p.single_param_gates = false;
    for (auto [id, k] : g.angle->coeffs) {
      if (p.positions[id].empty()) p.sequence.push_back(id);
      p.positions[id].push_back(i);
    }
  }
  p.each_once = std::all_of(p.positions.begin(), p.positions.end(),
                            [](const auto& v) { return v.size() == 1; });
  return p;
}

bool pair_compatible(const PQC& c1, const PQC& c2) {
  std::set<std::string> n1(c1.params.names().begin(), c1.params.names().end());
  std::set<std::string> n2(c2.params.names().begin(), c2.params.names().end());
  if (n1 != n2) return false;
  const auto p1 = param_profile(c1);
  const auto p2 = param_profile(c2);
  return p1.each_once && p2.each_once && p1.single_param_gates && p2.single_param_gates &&
         p1.same_order(p2, c1.params, c2.params);
}

PQC align_params(const PQC& c, const ParamTable& target) {
  std::set<std::string> mine(c.params.names().begin(), c.params.names().end());
  std::set<std::string> theirs(target.names().begin(), target.names().end());
  if (mine != theirs) throw std::invalid_argument("parameter name sets differ");
  PQC r;
  r.n_qubits = c.n_qubits;
  r.params = target;
  r.gates.reserve(c.gates.size());
  for (const auto& g : c.gates) {
    Gate h = g;
    if (g.angle) {
      h.angle->coeffs.clear();
      for (auto [id, k] : g.angle->coeffs) h.angle->coeffs[target.id(c.params.name(id))] = k;
    }
    r.gates.push_back(std::move(h));
  }
  return r;
}

// ---------------------------------------------------------------- lowering

std::vector<TrigPoly> gate_matrix(const Gate& g) {
  using std::numbers::sqrt2;
  const Complex i(0.0, 1.0);
  auto k = [](Complex v) { return TrigPoly::constant(v); };
  const TrigPoly z = TrigPoly();
  const TrigPoly one = k(1.0);
  switch (g.kind) {
    case GateKind::X: return {z, one, one, z};
    case GateKind::Y: return {z, k(-i), k(i), z};
    case GateKind::Z: return {one, z, z, k(-1.0)};
    case GateKind::H: return {k(1 / sqrt2), k(1 / sqrt2), k(1 / sqrt2), k(-1 / sqrt2)};
    case GateKind::S: return {one, z, z, k(i)};
    case GateKind::Sdg: return {one, z, z, k(-i)};
    case GateKind::T: return {one, z, z, k(std::polar(1.0, std::numbers::pi / 4))};
    case GateKind::Tdg: return {one, z, z, k(std::polar(1.0, -std::numbers::pi / 4))};
    case GateKind::CX: return {one, z, z, z, z, one, z, z, z, z, z, one, z, z, one, z};
    case GateKind::CZ: return {one, z, z, z, z, one, z, z, z, z, one, z, z, z, z, k(-1.0)};
    case GateKind::Swap: return {one, z, z, z, z, z, one, z, z, one, z, z, z, z, z, one};
    default: break;
  }
  const AngleExpr& a = *g.angle;
  const TrigPoly c = expand_cos(a);
  const TrigPoly s = expand_sin(a);
  switch (g.kind) {
    case GateKind::RX: return {c, (-i) * s, (-i) * s, c};
    case GateKind::RY: return {c, Complex(-1.0) * s, s, c};
    case GateKind::RZ: return {c - i * s, z, z, c + i * s};
    case GateKind::P: {
      const AngleExpr twice = a + a;
      return {one, z, z, expand_cos(twice) + i * expand_sin(twice)};
    }
    default: break;
  }
  throw std::logic_error("gate_matrix: unhandled gate kind");
}

STDD lower_gate(StddManager& m, const Gate& g, std::span<const std::uint32_t> row_levels,
                std::span<const std::uint32_t> col_levels) {
  const auto k = g.qubits.size();
  if (row_levels.size() != k || col_levels.size() != k) throw std::invalid_argument("lower_gate: level count");
  const auto polys = gate_matrix(g);
  std::vector<TrRef> entries;
  entries.reserve(polys.size());
  for (const auto& p : polys) entries.push_back(m.weights().from_poly(p));

  // (level, is_row, gate-qubit position)
  std::vector<std::tuple<std::uint32_t, bool, std::size_t>> slots;
  for (std::size_t q = 0; q < k; ++q) {
    slots.emplace_back(row_levels[q], true, q);
    slots.emplace_back(col_levels[q], false, q);
  }
  std::sort(slots.begin(), slots.end());
  std::vector<std::uint32_t> levels;
  for (const auto& s : slots) levels.push_back(std::get<0>(s));
  if (std::adjacent_find(levels.begin(), levels.end()) != levels.end()) {
    throw std::invalid_argument("lower_gate: repeated level");
  }
  const std::size_t dim = std::size_t{1} << k;
  return m.from_function(levels, [&](std::uint64_t bits) {
    std::size_t row = 0;
    std::size_t col = 0;
    for (std::size_t j = 0; j < slots.size(); ++j) {
      const bool b = ((bits >> (slots.size() - 1 - j)) & 1U) != 0;
      const auto& [lvl, is_row, q] = slots[j];
      if (!b) continue;
      (is_row ? row : col) |= std::size_t{1} << (k - 1 - q);
    }
    return entries[row * dim + col];
  });
}

STDD lower_gate(StddManager& m, const Gate& g) {
  std::vector<std::uint32_t> rows;
  std::vector<std::uint32_t> cols;
  for (int q : g.qubits) {
    rows.push_back(IndexOrder::out(q));
    cols.push_back(IndexOrder::in(q));
  }
  return lower_gate(m, g, rows, cols);
}

STDD apply_left(StddManager& m, const STDD& d, const Gate& g) {
  std::map<std::uint32_t, std::uint32_t> ren;
  std::vector<std::uint32_t> rows;
  std::vector<std::uint32_t> bonds;
  for (int q : g.qubits) {
    ren[IndexOrder::out(q)] = IndexOrder::bond(q);
    rows.push_back(IndexOrder::out(q));
    bonds.push_back(IndexOrder::bond(q));
  }
  const STDD gt = lower_gate(m, g, rows, bonds);
  return m.contract(gt, m.rename(d, ren), bonds);
}

STDD apply_right(StddManager& m, const STDD& d, const Gate& h) {
  std::map<std::uint32_t, std::uint32_t> ren;
  std::vector<std::uint32_t> bonds;
  std::vector<std::uint32_t> cols;
  for (int q : h.qubits) {
    ren[IndexOrder::in(q)] = IndexOrder::bond(q);
    bonds.push_back(IndexOrder::bond(q));
    cols.push_back(IndexOrder::in(q));
  }
  const STDD ht = lower_gate(m, adjoint_gate(h), bonds, cols);
  return m.contract(m.rename(d, ren), ht, bonds);
}

STDD circuit_unitary(StddManager& m, const PQC& c) {
  STDD u = m.identity(c.n_qubits);
  for (const auto& g : c.gates) u = apply_left(m, u, g);
  return u;
}

}  // namespace pqcv
