#pragma once

// Dense univariate polynomials over Int or Rat, stored low degree first with
// no trailing zeros (the zero polynomial is empty). Internal workhorse for the
// gcd and factorization code; the public polynomial type is BiPoly.

#include <odereduce/rational.hpp>

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace odereduce::upoly {

template <class T>
using UPoly = std::vector<T>;

template <class T>
void trim(UPoly<T>& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

template <class T>
int deg(const UPoly<T>& p) {
  return static_cast<int>(p.size()) - 1;
}

template <class T>
const T& lc(const UPoly<T>& p) {
  return p.back();
}

template <class T>
UPoly<T> add(const UPoly<T>& a, const UPoly<T>& b) {
  UPoly<T> r(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  trim(r);
  return r;
}

template <class T>
UPoly<T> sub(const UPoly<T>& a, const UPoly<T>& b) {
  UPoly<T> r(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
  trim(r);
  return r;
}

template <class T>
UPoly<T> scale(const UPoly<T>& a, const T& c) {
  if (c == 0) return {};
  UPoly<T> r(a);
  for (auto& v : r) v *= c;
  return r;
}

inline UPoly<Int> mul(const UPoly<Int>& a, const UPoly<Int>& b) {
  if (a.empty() || b.empty()) return {};
  UPoly<Int> r(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j)
      mpz_addmul(r[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
  }
  trim(r);
  return r;
}

// Common denominator of the coefficients.
inline Int denominator_lcm(const UPoly<Rat>& a) {
  Int d = 1;
  for (const auto& c : a) d = lcm(d, c.get_den());
  return d;
}

inline UPoly<Int> scaled_to_int(const UPoly<Rat>& a, const Int& d) {
  UPoly<Int> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = exact_div(a[i].get_num() * d, a[i].get_den());
  return r;
}

inline UPoly<Rat> to_rat(const UPoly<Int>& a) {
  UPoly<Rat> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = Rat(a[i]);
  return r;
}

inline UPoly<Rat> mul(const UPoly<Rat>& a, const UPoly<Rat>& b) {
  if (a.empty() || b.empty()) return {};
  Int da = denominator_lcm(a), db = denominator_lcm(b);
  UPoly<Int> p = mul(scaled_to_int(a, da), scaled_to_int(b, db));
  Int d = da * db;
  UPoly<Rat> r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[i] = make_rat(p[i], d);
  return r;
}

template <class T>
UPoly<T> derivative(const UPoly<T>& p) {
  if (p.size() <= 1) return {};
  UPoly<T> r(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) r[i - 1] = p[i] * static_cast<unsigned long>(i);
  trim(r);
  return r;
}

template <class T>
T eval(const UPoly<T>& p, const T& x) {
  T acc = 0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
  return acc;
}

// p(x + a)
template <class T>
UPoly<T> taylor_shift(UPoly<T> p, const T& a) {
  if (a == 0) return p;
  const std::size_t n = p.size();
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = n - 1; j > i; --j) p[j - 1] += a * p[j];
  return p;
}

inline Int content(const UPoly<Int>& p) {
  Int g = 0;
  for (const auto& c : p) {
    g = gcd(g, c);
    if (g == 1) break;
  }
  return g;
}

// Primitive part with positive leading coefficient.
inline UPoly<Int> primitive(const UPoly<Int>& p) {
  if (p.empty()) return {};
  Int g = content(p);
  if (p.back() < 0) g = -g;
  UPoly<Int> r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[i] = exact_div(p[i], g);
  return r;
}

// Returns primitive integer polynomial P and rational c with p = c * P.
inline std::pair<Rat, UPoly<Int>> integer_primitive(const UPoly<Rat>& p) {
  if (p.empty()) return {Rat(0), {}};
  Int d = denominator_lcm(p);
  UPoly<Int> ip = scaled_to_int(p, d);
  UPoly<Int> pp = primitive(ip);
  Rat c = make_rat(ip.back(), d) / Rat(pp.back());
  return {c, std::move(pp)};
}

inline std::pair<UPoly<Rat>, UPoly<Rat>> divmod(UPoly<Rat> a, const UPoly<Rat>& b) {
  if (b.empty()) throw std::domain_error("polynomial division by zero");
  if (a.size() < b.size()) return {{}, std::move(a)};
  UPoly<Rat> q(a.size() - b.size() + 1);
  const Rat inv = 1 / b.back();
  for (std::size_t k = q.size(); k-- > 0;) {
    Rat c = a[k + b.size() - 1] * inv;
    q[k] = c;
    if (c == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) a[k + j] -= c * b[j];
  }
  a.resize(b.size() - 1);
  trim(a);
  trim(q);
  return {std::move(q), std::move(a)};
}

inline UPoly<Rat> rem(const UPoly<Rat>& a, const UPoly<Rat>& b) { return divmod(a, b).second; }

inline UPoly<Rat> monic(UPoly<Rat> p) {
  if (p.empty()) return p;
  Rat inv = 1 / p.back();
  for (auto& c : p) c *= inv;
  return p;
}

// Extended Euclid over Q: returns (g, s, t) with s*a + t*b = g, g monic.
struct ExtGcd {
  UPoly<Rat> g, s, t;
};

inline ExtGcd ext_gcd(const UPoly<Rat>& a, const UPoly<Rat>& b) {
  UPoly<Rat> r0 = a, r1 = b, s0{Rat(1)}, s1{}, t0{}, t1{Rat(1)};
  while (!r1.empty()) {
    auto [q, r] = divmod(r0, r1);
    UPoly<Rat> s2 = sub(s0, mul(q, s1));
    UPoly<Rat> t2 = sub(t0, mul(q, t1));
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (r0.empty()) return {{}, {}, {}};
  Rat inv = 1 / r0.back();
  return {scale(r0, inv), scale(s0, inv), scale(t0, inv)};
}

// Exact division in Z[x]; nullopt when b does not divide a.
inline std::optional<UPoly<Int>> divide_exact(const UPoly<Int>& a, const UPoly<Int>& b) {
  if (b.empty()) throw std::domain_error("polynomial division by zero");
  if (a.empty()) return UPoly<Int>{};
  if (a.size() < b.size()) return std::nullopt;
  UPoly<Int> r(a);
  UPoly<Int> q(a.size() - b.size() + 1);
  const Int& lead = b.back();
  for (std::size_t k = q.size(); k-- > 0;) {
    Int& top = r[k + b.size() - 1];
    if (top == 0) continue;
    if (!divisible(top, lead)) return std::nullopt;
    Int c = exact_div(top, lead);
    for (std::size_t j = 0; j < b.size(); ++j)
      mpz_submul(r[k + j].get_mpz_t(), c.get_mpz_t(), b[j].get_mpz_t());
    q[k] = std::move(c);
  }
  for (std::size_t i = 0; i + 1 < b.size(); ++i)
    if (r[i] != 0) return std::nullopt;
  trim(q);
  return q;
}

}  // namespace odereduce::upoly
