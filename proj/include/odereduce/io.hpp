#pragma once

// Polynomial expressions, problem files and certificates.
//
// Expression grammar (whitespace ignored):
//   expr    := term (('+' | '-') term)*
//   term    := factor (('*' | '/') factor)*     '/' only by a nonzero constant
//   factor  := ('+' | '-') factor | power
//   power   := primary ('^' integer)?
//   primary := integer | 'x' | 'y' | '(' expr ')'

#include <odereduce/bipoly.hpp>

#include <json.hpp>

#include <cctype>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace odereduce {

struct ParseError : std::runtime_error {
  std::size_t offset;  // 1-based, relative to the parsed expression
  ParseError(const std::string& what, std::size_t off)
      : std::runtime_error(what + " at offset " + std::to_string(off)), offset(off) {}
};

// Malformed or incomplete input files.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(std::string_view s) : s_(s) {}

  BiPoly parse() {
    BiPoly p = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_ + 1); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::optional<Int> integer() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) return std::nullopt;
    return Int(std::string(s_.substr(start, pos_ - start)));
  }

  BiPoly expr() {
    BiPoly p = term();
    for (;;) {
      if (accept('+')) {
        p = p + term();
      } else if (accept('-')) {
        p = p - term();
      } else {
        return p;
      }
    }
  }

  BiPoly term() {
    BiPoly p = factor();
    for (;;) {
      if (accept('*')) {
        p = p * factor();
      } else if (accept('/')) {
        std::size_t at = pos_;
        BiPoly d = factor();
        if (!d.is_constant() || d.is_zero()) {
          pos_ = at;
          fail(d.is_zero() ? "division by zero" : "division by a non-constant");
        }
        p *= 1 / d.leading_coeff();
      } else {
        skip();
        if (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '('))
          fail("missing '*' between factors");
        return p;
      }
    }
  }

  BiPoly factor() {
    if (accept('-')) return -factor();
    if (accept('+')) return factor();
    return power();
  }

  BiPoly power() {
    BiPoly base = primary();
    if (accept('^')) {
      skip();
      auto e = integer();
      if (!e) fail("exponent must be a non-negative integer literal");
      if (!e->fits_uint_p() || *e > 100000) fail("exponent too large");
      base = pow(base, static_cast<unsigned>(e->get_ui()));
      skip();
      if (pos_ < s_.size() && s_[pos_] == '^') fail("chained '^' is not allowed; use parentheses");
    }
    return base;
  }

  BiPoly primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      BiPoly p = expr();
      if (!accept(')')) fail("expected ')'");
      return p;
    }
    if (c == 'x' || c == 'y') {
      ++pos_;
      if (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) fail("unknown identifier");
      return c == 'x' ? BiPoly::x() : BiPoly::y();
    }
    if (auto v = integer()) return BiPoly(Rat(*v));
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

inline std::string render_monomial(unsigned dx, unsigned dy) {
  std::string s;
  if (dx > 0) s += dx == 1 ? "x" : "x^" + std::to_string(dx);
  if (dy > 0) {
    if (!s.empty()) s += "*";
    s += dy == 1 ? "y" : "y^" + std::to_string(dy);
  }
  return s;
}

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

}  // namespace detail

inline BiPoly parse_poly(std::string_view text) { return detail::ExprParser(text).parse(); }

// ASCII rendering in canonical term order, e.g. "x^2*y - 3/2*x + 1".
inline std::string render_poly(const BiPoly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : p.terms()) {
    const bool neg = t.coef < 0;
    const Rat mag = abs(t.coef);
    if (first) {
      if (neg) out += "-";
    } else {
      out += neg ? " - " : " + ";
    }
    first = false;
    const std::string mono = detail::render_monomial(t.mono.dx, t.mono.dy);
    if (mono.empty()) {
      out += to_string(mag);
    } else if (mag == 1) {
      out += mono;
    } else {
      out += to_string(mag) + "*" + mono;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Structured (JSON) polynomial form: [[dx, dy, num, den], ...] in canonical
// order. num and den are JSON integers when they fit in 64 bits and decimal
// strings otherwise.

inline nlohmann::json int_to_json(const Int& v) {
  if (fits_int64(v)) return v.get_si();
  return v.get_str();
}

inline Int int_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return Int(std::to_string(j.get<std::int64_t>()));
  if (j.is_number_unsigned()) return Int(std::to_string(j.get<std::uint64_t>()));
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    Int v;
    if (s.empty() || v.set_str(s, 10) != 0) throw InputError("invalid integer string \"" + s + "\"");
    return v;
  }
  throw InputError("expected an integer, got " + j.dump());
}

inline nlohmann::json poly_to_json(const BiPoly& p) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : p.terms())
    arr.push_back({t.mono.dx, t.mono.dy, int_to_json(t.coef.get_num()), int_to_json(t.coef.get_den())});
  return arr;
}

inline BiPoly poly_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InputError("polynomial must be an array of [dx, dy, num, den]");
  std::map<std::pair<unsigned, unsigned>, Rat> acc;
  for (const auto& q : j) {
    if (!q.is_array() || q.size() != 4 || !q[0].is_number_unsigned() || !q[1].is_number_unsigned())
      throw InputError("bad term " + q.dump());
    Int num = int_from_json(q[2]), den = int_from_json(q[3]);
    if (den == 0) throw InputError("zero denominator in term " + q.dump());
    auto key = std::make_pair(q[0].get<unsigned>(), q[1].get<unsigned>());
    if (acc.count(key)) throw InputError("duplicate exponent pair in term " + q.dump());
    acc[key] = make_rat(num, den);
  }
  std::vector<Term> terms;
  for (auto& [k, v] : acc)
    if (v != 0) terms.push_back({{k.first, k.second}, v});
  return BiPoly::from_terms(std::move(terms));
}

// ---------------------------------------------------------------------------
// Problems

struct ProblemOptions {
  bool print_candidates = false;
  std::optional<int> max_seconds;
};

struct OdeProblem {
  BiPoly M, N;
  int degreeA = 0;  // 0 when the file does not state it
  ProblemOptions options;
};

enum class Format { text, structured, detect };

namespace detail {

// key = value lines; '#' starts a comment line.
inline std::vector<std::pair<std::string, std::string>> read_assignments(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    auto eq = s.find('=');
    if (eq == std::string::npos) throw InputError("line " + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    if (key.empty()) throw InputError("line " + std::to_string(lineno) + ": empty key");
    for (const auto& kv : out)
      if (kv.first == key) throw InputError("line " + std::to_string(lineno) + ": duplicate key " + key);
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

inline BiPoly parse_field(const std::string& key, const std::string& value) {
  try {
    return parse_poly(value);
  } catch (const ParseError& e) {
    throw ParseError(key + ": " + e.what(), e.offset);
  }
}

inline long parse_long(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) throw InputError(key + " must be an integer");
  return v;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw InputError(key + " must be true or false");
}

inline std::string slurp(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void validate(const OdeProblem& p, bool require_degree) {
  if (p.N.is_zero()) throw InputError("N must be nonzero");
  if (require_degree && p.degreeA < 1) throw InputError("degreeA must be >= 1");
  if (p.options.max_seconds && *p.options.max_seconds < 1) throw InputError("max_seconds must be >= 1");
}

inline OdeProblem problem_from_text(std::istream& in, bool require_degree) {
  OdeProblem p;
  bool haveM = false, haveN = false, haveD = false;
  for (const auto& [k, v] : read_assignments(in)) {
    if (k == "M") {
      p.M = parse_field(k, v);
      haveM = true;
    } else if (k == "N") {
      p.N = parse_field(k, v);
      haveN = true;
    } else if (k == "degreeA") {
      long d = parse_long(k, v);
      if (d < 1) throw InputError("degreeA must be >= 1");
      p.degreeA = static_cast<int>(d);
      haveD = true;
    } else if (k == "print_candidates") {
      p.options.print_candidates = parse_bool(k, v);
    } else if (k == "max_seconds") {
      p.options.max_seconds = static_cast<int>(parse_long(k, v));
    } else {
      throw InputError("unknown key " + k);
    }
  }
  if (!haveM) throw InputError("missing M");
  if (!haveN) throw InputError("missing N");
  if (!haveD && require_degree) throw InputError("missing degreeA");
  validate(p, require_degree);
  return p;
}

inline OdeProblem problem_from_json(const nlohmann::json& j, bool require_degree) {
  if (!j.is_object()) throw InputError("problem must be a JSON object");
  OdeProblem p;
  if (!j.contains("M")) throw InputError("missing M");
  if (!j.contains("N")) throw InputError("missing N");
  p.M = poly_from_json(j["M"]);
  p.N = poly_from_json(j["N"]);
  if (j.contains("degreeA")) {
    if (!j["degreeA"].is_number_integer()) throw InputError("degreeA must be an integer");
    long d = j["degreeA"].get<long>();
    if (d < 1) throw InputError("degreeA must be >= 1");
    p.degreeA = static_cast<int>(d);
  } else if (require_degree) {
    throw InputError("missing degreeA");
  }
  if (j.contains("options")) {
    const auto& o = j["options"];
    if (o.contains("print_candidates")) p.options.print_candidates = o["print_candidates"].get<bool>();
    if (o.contains("max_seconds") && !o["max_seconds"].is_null()) p.options.max_seconds = o["max_seconds"].get<int>();
  }
  validate(p, require_degree);
  return p;
}

}  // namespace detail

// Reads a problem. With require_degree = false a missing degreeA is allowed
// (the caller supplies it, e.g. from a command-line flag).
inline OdeProblem read_problem(std::istream& in, Format format = Format::detect, bool require_degree = true) {
  std::string all = detail::slurp(in);
  if (format == Format::detect) {
    auto first = all.find_first_not_of(" \t\r\n");
    format = first != std::string::npos && all[first] == '{' ? Format::structured : Format::text;
  }
  if (format == Format::structured) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(all);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(std::string("invalid JSON: ") + e.what());
    }
    try {
      return detail::problem_from_json(j, require_degree);
    } catch (const nlohmann::json::exception& e) {
      throw InputError(std::string("invalid problem JSON: ") + e.what());
    }
  }
  std::istringstream ss(all);
  return detail::problem_from_text(ss, require_degree);
}

inline std::string write_problem_text(const OdeProblem& p) {
  std::string s = "M = " + render_poly(p.M) + "\nN = " + render_poly(p.N) + "\n";
  if (p.degreeA > 0) s += "degreeA = " + std::to_string(p.degreeA) + "\n";
  return s;
}

inline nlohmann::json problem_to_json(const OdeProblem& p) {
  nlohmann::json j{{"M", poly_to_json(p.M)}, {"N", poly_to_json(p.N)}};
  if (p.degreeA > 0) j["degreeA"] = p.degreeA;
  nlohmann::json o{{"print_candidates", p.options.print_candidates}};
  if (p.options.max_seconds) o["max_seconds"] = *p.options.max_seconds;
  j["options"] = o;
  return j;
}

// ---------------------------------------------------------------------------
// Reductions (certificates)

struct Reduction {
  int n = 0;
  BiPoly A, B, c, t;
  std::vector<BiPoly> f;  // f[0..n], polynomials in x

  friend bool operator==(const Reduction&, const Reduction&) = default;
};

// "(t)*y' = (fn)*y^n + ... + (f0)" with zero coefficients omitted.
inline std::string render_ode(const BiPoly& t, const std::vector<BiPoly>& f) {
  std::string rhs;
  for (std::size_t i = f.size(); i-- > 0;) {
    if (f[i].is_zero()) continue;
    if (!rhs.empty()) rhs += " + ";
    rhs += "(" + render_poly(f[i]) + ")";
    if (i == 1) rhs += "*y";
    if (i > 1) rhs += "*y^" + std::to_string(i);
  }
  if (rhs.empty()) rhs = "0";
  return "(" + render_poly(t) + ")*y' = " + rhs;
}

inline std::string write_reduction_text(const Reduction& r) {
  std::string s = "n = " + std::to_string(r.n) + "\n";
  s += "A = " + render_poly(r.A) + "\n";
  s += "B = " + render_poly(r.B) + "\n";
  s += "c = " + render_poly(r.c) + "\n";
  s += "t = " + render_poly(r.t) + "\n";
  for (std::size_t i = 0; i < r.f.size(); ++i) s += "f" + std::to_string(i) + " = " + render_poly(r.f[i]) + "\n";
  return s;
}

inline nlohmann::json reduction_to_json(const Reduction& r) {
  nlohmann::json f = nlohmann::json::array();
  for (const auto& fi : r.f) f.push_back(poly_to_json(fi));
  return {{"n", r.n},
          {"A", poly_to_json(r.A)},
          {"B", poly_to_json(r.B)},
          {"c", poly_to_json(r.c)},
          {"t", poly_to_json(r.t)},
          {"f", f},
          {"ode", render_ode(r.t, r.f)}};
}

inline Reduction reduction_from_json(const nlohmann::json& j) {
  try {
    Reduction r;
    r.n = j.at("n").get<int>();
    r.A = poly_from_json(j.at("A"));
    r.B = poly_from_json(j.at("B"));
    r.c = poly_from_json(j.at("c"));
    r.t = poly_from_json(j.at("t"));
    for (const auto& fi : j.at("f")) r.f.push_back(poly_from_json(fi));
    if (r.n < 1 || r.f.size() != static_cast<std::size_t>(r.n) + 1)
      throw InputError("certificate needs f0..fn for its n");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid certificate JSON: ") + e.what());
  }
}

namespace detail {

// Lines n, A, B, t, f0..fn and any of the extra keys.
struct TransformFields {
  int n = 0;
  BiPoly A, B, t;
  std::vector<BiPoly> f;
  std::map<std::string, std::string> extra;
};

inline TransformFields read_transform_fields(std::istream& in, const std::vector<std::string>& extra_keys) {
  TransformFields out;
  std::map<std::string, std::string> kv;
  for (auto& [k, v] : read_assignments(in)) kv[k] = v;
  auto need = [&](const std::string& k) -> const std::string& {
    auto it = kv.find(k);
    if (it == kv.end()) throw InputError("missing " + k);
    return it->second;
  };
  long n = parse_long("n", need("n"));
  if (n < 1 || n > 1000) throw InputError("n out of range");
  out.n = static_cast<int>(n);
  out.A = parse_field("A", need("A"));
  out.B = parse_field("B", need("B"));
  out.t = kv.count("t") ? parse_field("t", kv["t"]) : BiPoly(1L);
  out.f.resize(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    const std::string k = "f" + std::to_string(i);
    if (kv.count(k)) out.f[i] = parse_field(k, kv[k]);
  }
  for (const auto& [k, v] : kv) {
    bool known = k == "n" || k == "A" || k == "B" || k == "t";
    if (k.size() > 1 && k[0] == 'f' && std::all_of(k.begin() + 1, k.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
      known = std::stol(k.substr(1)) <= n;
    for (const auto& e : extra_keys)
      if (k == e) {
        known = true;
        out.extra[k] = v;
      }
    if (!known) throw InputError("unknown key " + k);
  }
  for (const auto& fi : out.f)
    if (fi.max_degree(Var::y) > 0) throw InputError("f_i must not depend on y");
  if (out.t.max_degree(Var::y) > 0) throw InputError("t must not depend on y");
  return out;
}

}  // namespace detail

// Certificate: text (lines n, A, B, c, t, f0..fn) or JSON.
inline Reduction read_reduction(std::istream& in) {
  std::string all = detail::slurp(in);
  auto first = all.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && all[first] == '{') {
    try {
      return reduction_from_json(nlohmann::json::parse(all));
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(std::string("invalid JSON: ") + e.what());
    }
  }
  std::istringstream ss(all);
  auto tf = detail::read_transform_fields(ss, {"c"});
  if (!tf.extra.count("c")) throw InputError("missing c");
  return {tf.n, tf.A, tf.B, detail::parse_field("c", tf.extra["c"]), tf.t, tf.f};
}

}  // namespace odereduce
