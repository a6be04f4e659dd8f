#pragma once

#include <odereduce/rational.hpp>
#include <odereduce/upoly.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace odereduce {

enum class Var { x, y, total };

struct Monomial {
  unsigned dx = 0;
  unsigned dy = 0;

  unsigned total() const { return dx + dy; }
  friend bool operator==(Monomial a, Monomial b) { return a.dx == b.dx && a.dy == b.dy; }
  friend bool operator!=(Monomial a, Monomial b) { return !(a == b); }
};

// Canonical term order: higher total degree first, then higher x-degree.
// Within a total degree the x-degree determines the monomial, so this is a
// total order. It drives normalization ("leading coefficient") and printing.
inline bool precedes(Monomial a, Monomial b) {
  if (a.total() != b.total()) return a.total() > b.total();
  return a.dx > b.dx;
}

struct Term {
  Monomial mono;
  Rat coef;
};

// Sparse bivariate polynomial in x, y over Q. Terms are kept sorted in
// canonical order with no zero coefficients and no repeated monomials.
class BiPoly {
 public:
  BiPoly() = default;
  explicit BiPoly(const Rat& c) {
    if (c != 0) terms_.push_back({{0, 0}, c});
  }
  explicit BiPoly(long c) : BiPoly(Rat(c)) {}

  static BiPoly x() { return monomial(1, 0); }
  static BiPoly y() { return monomial(0, 1); }
  static BiPoly monomial(unsigned dx, unsigned dy, const Rat& c = Rat(1)) {
    BiPoly p;
    if (c != 0) p.terms_.push_back({{dx, dy}, c});
    return p;
  }

  // Accepts terms in any order; merges duplicates and drops zeros.
  static BiPoly from_terms(std::vector<Term> terms) {
    std::sort(terms.begin(), terms.end(),
              [](const Term& a, const Term& b) { return precedes(a.mono, b.mono); });
    BiPoly p;
    for (auto& t : terms) {
      if (!p.terms_.empty() && p.terms_.back().mono == t.mono) {
        p.terms_.back().coef += t.coef;
      } else {
        p.terms_.push_back(std::move(t));
      }
    }
    std::erase_if(p.terms_, [](const Term& t) { return t.coef == 0; });
    return p;
  }

  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.total() == 0); }

  const Rat& leading_coeff() const {
    if (terms_.empty()) throw std::domain_error("leading coefficient of zero polynomial");
    return terms_.front().coef;
  }
  Monomial leading_monomial() const {
    if (terms_.empty()) throw std::domain_error("leading monomial of zero polynomial");
    return terms_.front().mono;
  }

  Rat coeff(unsigned dx, unsigned dy) const {
    Monomial m{dx, dy};
    auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                               [](const Term& t, Monomial k) { return precedes(t.mono, k); });
    if (it != terms_.end() && it->mono == m) return it->coef;
    return Rat(0);
  }

  // -1 for the zero polynomial.
  int max_degree(Var v) const {
    int d = -1;
    for (const auto& t : terms_) {
      int e = v == Var::x ? static_cast<int>(t.mono.dx)
              : v == Var::y ? static_cast<int>(t.mono.dy)
                            : static_cast<int>(t.mono.total());
      d = std::max(d, e);
    }
    return d;
  }

  int degree(Var v) const {
    if (terms_.empty()) throw std::domain_error("degree of zero polynomial");
    return max_degree(v);
  }

  bool has_integer_coeffs() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return is_integer(t.coef); });
  }

  // Multiplication by x^dx * y^dy preserves the canonical order.
  BiPoly shifted(unsigned dx, unsigned dy) const {
    BiPoly r(*this);
    for (auto& t : r.terms_) {
      t.mono.dx += dx;
      t.mono.dy += dy;
    }
    return r;
  }

  BiPoly operator-() const {
    BiPoly r(*this);
    for (auto& t : r.terms_) t.coef = -t.coef;
    return r;
  }

  BiPoly& operator*=(const Rat& c) {
    if (c == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& t : terms_) t.coef *= c;
    return *this;
  }

  friend BiPoly operator*(BiPoly p, const Rat& c) { return p *= c; }
  friend BiPoly operator*(const Rat& c, BiPoly p) { return p *= c; }

  friend BiPoly operator+(const BiPoly& a, const BiPoly& b) { return merge(a, b, false); }
  friend BiPoly operator-(const BiPoly& a, const BiPoly& b) { return merge(a, b, true); }
  BiPoly& operator+=(const BiPoly& b) { return *this = merge(*this, b, false); }
  BiPoly& operator-=(const BiPoly& b) { return *this = merge(*this, b, true); }

  friend BiPoly operator*(const BiPoly& a, const BiPoly& b);
  BiPoly& operator*=(const BiPoly& b);

  friend bool operator==(const BiPoly& a, const BiPoly& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i) {
      if (a.terms_[i].mono != b.terms_[i].mono || a.terms_[i].coef != b.terms_[i].coef) return false;
    }
    return true;
  }
  friend bool operator!=(const BiPoly& a, const BiPoly& b) { return !(a == b); }

 private:
  static BiPoly merge(const BiPoly& a, const BiPoly& b, bool subtract) {
    BiPoly r;
    r.terms_.reserve(a.terms_.size() + b.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < a.terms_.size() || j < b.terms_.size()) {
      if (j == b.terms_.size() || (i < a.terms_.size() && precedes(a.terms_[i].mono, b.terms_[j].mono))) {
        r.terms_.push_back(a.terms_[i++]);
      } else if (i == a.terms_.size() || precedes(b.terms_[j].mono, a.terms_[i].mono)) {
        r.terms_.push_back({b.terms_[j].mono, subtract ? Rat(-b.terms_[j].coef) : b.terms_[j].coef});
        ++j;
      } else {
        Rat c = subtract ? Rat(a.terms_[i].coef - b.terms_[j].coef) : Rat(a.terms_[i].coef + b.terms_[j].coef);
        if (c != 0) r.terms_.push_back({a.terms_[i].mono, std::move(c)});
        ++i;
        ++j;
      }
    }
    return r;
  }

  std::vector<Term> terms_;
};

inline Int denominator_lcm(const BiPoly& p) {
  Int d = 1;
  for (const auto& t : p.terms()) d = lcm(d, t.coef.get_den());
  return d;
}

inline BiPoly operator*(const BiPoly& a, const BiPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  if (a.size() == 1 && a.terms()[0].mono.total() == 0) return b * a.terms()[0].coef;
  if (b.size() == 1 && b.terms()[0].mono.total() == 0) return a * b.terms()[0].coef;

  // Multiply integer images and divide the common denominator out once.
  const Int da = denominator_lcm(a), db = denominator_lcm(b);
  auto ints = [](const BiPoly& p, const Int& d) {
    std::vector<Int> v;
    v.reserve(p.size());
    for (const auto& t : p.terms()) v.push_back(exact_div(t.coef.get_num() * d, t.coef.get_den()));
    return v;
  };
  const std::vector<Int> ia = ints(a, da), ib = ints(b, db);
  const Int den = da * db;

  const unsigned wx = static_cast<unsigned>(a.max_degree(Var::x) + b.max_degree(Var::x) + 1);
  const unsigned wy = static_cast<unsigned>(a.max_degree(Var::y) + b.max_degree(Var::y) + 1);
  const std::size_t cells = static_cast<std::size_t>(wx) * wy;

  std::vector<Term> out;
  if (cells <= 8 * a.size() * b.size() + 4096) {
    std::vector<Int> grid(cells);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const Monomial ma = a.terms()[i].mono;
      for (std::size_t j = 0; j < b.size(); ++j) {
        const Monomial mb = b.terms()[j].mono;
        std::size_t idx = static_cast<std::size_t>(ma.dy + mb.dy) * wx + (ma.dx + mb.dx);
        mpz_addmul(grid[idx].get_mpz_t(), ia[i].get_mpz_t(), ib[j].get_mpz_t());
      }
    }
    const unsigned top = (wx - 1) + (wy - 1);
    for (unsigned tot = top + 1; tot-- > 0;) {
      unsigned hi = std::min(tot, wx - 1);
      unsigned lo = tot > wy - 1 ? tot - (wy - 1) : 0;
      for (unsigned dx = hi + 1; dx-- > lo;) {
        Int& g = grid[static_cast<std::size_t>(tot - dx) * wx + dx];
        if (g != 0) out.push_back({{dx, tot - dx}, make_rat(g, den)});
      }
    }
    BiPoly r;
    r = BiPoly::from_terms(std::move(out));
    return r;
  }

  std::map<std::pair<unsigned, unsigned>, Int> acc;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const Monomial ma = a.terms()[i].mono, mb = b.terms()[j].mono;
      Int& g = acc[{ma.dx + mb.dx, ma.dy + mb.dy}];
      mpz_addmul(g.get_mpz_t(), ia[i].get_mpz_t(), ib[j].get_mpz_t());
    }
  }
  for (auto& [k, v] : acc)
    if (v != 0) out.push_back({{k.first, k.second}, make_rat(v, den)});
  return BiPoly::from_terms(std::move(out));
}

inline BiPoly& BiPoly::operator*=(const BiPoly& b) { return *this = *this * b; }

enum class ArithKind { add, sub, mul };

inline BiPoly arith(const BiPoly& p, const BiPoly& q, ArithKind kind) {
  switch (kind) {
    case ArithKind::add:
      return p + q;
    case ArithKind::sub:
      return p - q;
    case ArithKind::mul:
      return p * q;
  }
  throw std::logic_error("unknown arithmetic kind");
}

inline BiPoly partial(const BiPoly& p, Var v) {
  if (v == Var::total) throw std::invalid_argument("partial derivative needs x or y");
  std::vector<Term> out;
  out.reserve(p.size());
  for (const auto& t : p.terms()) {
    unsigned e = v == Var::x ? t.mono.dx : t.mono.dy;
    if (e == 0) continue;
    Monomial m = t.mono;
    (v == Var::x ? m.dx : m.dy) -= 1;
    out.push_back({m, t.coef * e});
  }
  // exponent shift of one variable keeps relative order within same-degree strata
  return BiPoly::from_terms(std::move(out));
}

inline BiPoly pow(const BiPoly& p, unsigned e) {
  BiPoly r(1L), base = p;
  while (e) {
    if (e & 1) r *= base;
    e >>= 1;
    if (e) base *= base;
  }
  return r;
}

inline int degree(const BiPoly& p, Var v) { return p.degree(v); }

// p = content * primitive, primitive has coprime integer coefficients and a
// positive leading coefficient. content is 0 for p = 0.
struct IntegerForm {
  Rat content;
  BiPoly primitive;
};

inline IntegerForm integer_form(const BiPoly& p) {
  if (p.is_zero()) return {Rat(0), {}};
  const Int d = denominator_lcm(p);
  Int g = 0;
  for (const auto& t : p.terms()) g = gcd(g, exact_div(t.coef.get_num() * d, t.coef.get_den()));
  Rat c = make_rat(g, d);
  if (p.leading_coeff() < 0) c = -c;
  BiPoly prim = p * (1 / c);
  return {c, std::move(prim)};
}

inline BiPoly normalized(const BiPoly& p) { return integer_form(p).primitive; }

// Coefficients of y^j as dense polynomials in x. Requires integer coefficients.
inline std::vector<upoly::UPoly<Int>> to_ycoeffs(const BiPoly& p) {
  std::vector<upoly::UPoly<Int>> out(static_cast<std::size_t>(p.max_degree(Var::y) + 1));
  for (const auto& t : p.terms()) {
    auto& row = out[t.mono.dy];
    if (row.size() <= t.mono.dx) row.resize(t.mono.dx + 1);
    row[t.mono.dx] = t.coef.get_num();
  }
  return out;
}

inline BiPoly from_ycoeffs(const std::vector<upoly::UPoly<Int>>& c) {
  std::vector<Term> terms;
  for (std::size_t j = 0; j < c.size(); ++j)
    for (std::size_t i = 0; i < c[j].size(); ++i)
      if (c[j][i] != 0) terms.push_back({{static_cast<unsigned>(i), static_cast<unsigned>(j)}, Rat(c[j][i])});
  return BiPoly::from_terms(std::move(terms));
}

// Coefficients of x^i as dense polynomials in y.
inline std::vector<upoly::UPoly<Rat>> to_xcoeffs(const BiPoly& p) {
  std::vector<upoly::UPoly<Rat>> out(static_cast<std::size_t>(p.max_degree(Var::x) + 1));
  for (const auto& t : p.terms()) {
    auto& row = out[t.mono.dx];
    if (row.size() <= t.mono.dy) row.resize(t.mono.dy + 1);
    row[t.mono.dy] = t.coef;
  }
  return out;
}

inline BiPoly from_xcoeffs(const std::vector<upoly::UPoly<Rat>>& c) {
  std::vector<Term> terms;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = 0; j < c[i].size(); ++j)
      if (c[i][j] != 0) terms.push_back({{static_cast<unsigned>(i), static_cast<unsigned>(j)}, c[i][j]});
  return BiPoly::from_terms(std::move(terms));
}

// Univariate polynomial in x (all dy = 0) from dense coefficients.
inline BiPoly from_xpoly(const upoly::UPoly<Rat>& c) {
  std::vector<Term> terms;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i] != 0) terms.push_back({{static_cast<unsigned>(i), 0}, c[i]});
  return BiPoly::from_terms(std::move(terms));
}

inline BiPoly from_ypoly(const upoly::UPoly<Rat>& c) {
  std::vector<Term> terms;
  for (std::size_t j = 0; j < c.size(); ++j)
    if (c[j] != 0) terms.push_back({{0, static_cast<unsigned>(j)}, c[j]});
  return BiPoly::from_terms(std::move(terms));
}

inline upoly::UPoly<Rat> to_xpoly(const BiPoly& p) {
  upoly::UPoly<Rat> out(static_cast<std::size_t>(p.max_degree(Var::x) + 1));
  for (const auto& t : p.terms()) {
    if (t.mono.dy != 0) throw std::invalid_argument("polynomial depends on y");
    out[t.mono.dx] = t.coef;
  }
  return out;
}

// p(x + a, y)
inline BiPoly shift_x(const BiPoly& p, const Rat& a) {
  if (a == 0 || p.is_zero()) return p;
  std::vector<upoly::UPoly<Rat>> ycoef(static_cast<std::size_t>(p.max_degree(Var::y) + 1));
  for (const auto& t : p.terms()) {
    auto& row = ycoef[t.mono.dy];
    if (row.size() <= t.mono.dx) row.resize(t.mono.dx + 1);
    row[t.mono.dx] = t.coef;
  }
  std::vector<Term> terms;
  for (std::size_t j = 0; j < ycoef.size(); ++j) {
    auto shifted = upoly::taylor_shift(ycoef[j], a);
    for (std::size_t i = 0; i < shifted.size(); ++i)
      if (shifted[i] != 0) terms.push_back({{static_cast<unsigned>(i), static_cast<unsigned>(j)}, shifted[i]});
  }
  return BiPoly::from_terms(std::move(terms));
}

// p(a, y) as a dense polynomial in y.
inline upoly::UPoly<Rat> eval_x(const BiPoly& p, const Rat& a) {
  upoly::UPoly<Rat> out(static_cast<std::size_t>(std::max(p.max_degree(Var::y) + 1, 0)));
  for (const auto& t : p.terms()) {
    Rat v = t.coef;
    for (unsigned k = 0; k < t.mono.dx; ++k) v *= a;
    out[t.mono.dy] += v;
  }
  upoly::trim(out);
  return out;
}

// Lower total degree first, then term-wise canonical comparison. Used to
// order factor lists deterministically.
inline bool canonical_less(const BiPoly& a, const BiPoly& b) {
  int da = a.max_degree(Var::total), db = b.max_degree(Var::total);
  if (da != db) return da < db;
  const auto& ta = a.terms();
  const auto& tb = b.terms();
  for (std::size_t i = 0; i < std::min(ta.size(), tb.size()); ++i) {
    if (ta[i].mono != tb[i].mono) return precedes(tb[i].mono, ta[i].mono);
    if (ta[i].coef != tb[i].coef) return ta[i].coef < tb[i].coef;
  }
  return ta.size() < tb.size();
}

}  // namespace odereduce
