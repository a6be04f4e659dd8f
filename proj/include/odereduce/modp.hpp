#pragma once

// Arithmetic in Z/pZ and in (Z/pZ)[x] for word-sized primes p < 2^63.
// Used for modular gcd images, rank profiles and univariate factoring.

#include <odereduce/rational.hpp>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace odereduce::modp {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline u64 mul(u64 a, u64 b, u64 p) { return static_cast<u64>(static_cast<u128>(a) * b % p); }
inline u64 add(u64 a, u64 b, u64 p) {
  u64 s = a + b;
  return s >= p ? s - p : s;
}
inline u64 sub(u64 a, u64 b, u64 p) { return a >= b ? a - b : a + p - b; }

inline u64 pow(u64 a, u64 e, u64 p) {
  u64 r = 1 % p;
  a %= p;
  while (e) {
    if (e & 1) r = mul(r, a, p);
    a = mul(a, a, p);
    e >>= 1;
  }
  return r;
}

inline u64 inv(u64 a, u64 p) {
  // extended Euclid on signed 128-bit to avoid overflow
  __int128 t = 0, nt = 1, r = p, nr = a % p;
  while (nr != 0) {
    __int128 q = r / nr;
    __int128 tmp = t - q * nt;
    t = nt;
    nt = tmp;
    tmp = r - q * nr;
    r = nr;
    nr = tmp;
  }
  if (r != 1) throw std::domain_error("element not invertible modulo p");
  if (t < 0) t += p;
  return static_cast<u64>(t);
}

inline u64 reduce(const Int& v, u64 p) {
  static_assert(sizeof(unsigned long) == 8, "64-bit unsigned long required");
  return mpz_fdiv_ui(v.get_mpz_t(), p);
}

inline u64 reduce(const Rat& v, u64 p) {
  return mul(reduce(v.get_num(), p), inv(reduce(v.get_den(), p), p), p);
}

inline bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % q == 0) return n == q;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    u64 x = pow(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mul(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

// Primes just below 2^62, descending. Fixed table, so results are reproducible.
inline const std::vector<u64>& large_primes() {
  static const std::vector<u64> table = [] {
    std::vector<u64> out;
    for (u64 c = (u64{1} << 62) - 1; out.size() < 1024; c -= 2)
      if (is_prime(c)) out.push_back(c);
    return out;
  }();
  return table;
}

// Primes just below 2^31: products fit in 64 bits without 128-bit reduction.
inline const std::vector<u64>& word_primes() {
  static const std::vector<u64> table = [] {
    std::vector<u64> out;
    for (u64 c = (u64{1} << 31) - 1; out.size() < 64; c -= 2)
      if (is_prime(c)) out.push_back(c);
    return out;
  }();
  return table;
}

// Small primes for factoring: distinct-degree factorization is cheap for these.
inline const std::vector<u64>& small_primes() {
  static const std::vector<u64> table = [] {
    std::vector<u64> out;
    for (u64 c = 10007; out.size() < 256; c += 2)
      if (is_prime(c)) out.push_back(c);
    return out;
  }();
  return table;
}

// ---------------------------------------------------------------------------
// Polynomials over Z/pZ, low degree first, trimmed.

using Poly = std::vector<u64>;

inline void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline int deg(const Poly& a) { return static_cast<int>(a.size()) - 1; }

inline Poly add(const Poly& a, const Poly& b, u64 p) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] = add(r[i], b[i], p);
  trim(r);
  return r;
}

inline Poly sub(const Poly& a, const Poly& b, u64 p) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] = sub(r[i], b[i], p);
  trim(r);
  return r;
}

inline Poly scale(const Poly& a, u64 c, u64 p) {
  if (c == 0) return {};
  Poly r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = mul(a[i], c, p);
  trim(r);
  return r;
}

inline Poly mul(const Poly& a, const Poly& b, u64 p) {
  if (a.empty() || b.empty()) return {};
  std::vector<u128> acc(a.size() + b.size() - 1, 0);
  // accumulate at most 2^64 / p^2 products before reducing; p < 2^62 allows 16
  const bool small = p < (u64{1} << 32);
  Poly r(acc.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (small) {
        acc[i + j] += static_cast<u128>(a[i]) * b[j];
      } else {
        r[i + j] = add(r[i + j], mul(a[i], b[j], p), p);
      }
    }
  }
  if (small)
    for (std::size_t k = 0; k < acc.size(); ++k) r[k] = static_cast<u64>(acc[k] % p);
  trim(r);
  return r;
}

inline Poly monic(const Poly& a, u64 p) {
  if (a.empty()) return a;
  return scale(a, inv(a.back(), p), p);
}

// Returns (q, r) with a = q*b + r.
inline std::pair<Poly, Poly> divrem(Poly a, const Poly& b, u64 p) {
  if (b.empty()) throw std::domain_error("polynomial division by zero modulo p");
  if (a.size() < b.size()) return {{}, std::move(a)};
  Poly q(a.size() - b.size() + 1, 0);
  const u64 li = inv(b.back(), p);
  for (std::size_t k = q.size(); k-- > 0;) {
    u64 c = mul(a[k + b.size() - 1], li, p);
    q[k] = c;
    if (c == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) a[k + j] = sub(a[k + j], mul(c, b[j], p), p);
  }
  a.resize(b.size() - 1);
  trim(a);
  trim(q);
  return {std::move(q), std::move(a)};
}

inline Poly rem(const Poly& a, const Poly& b, u64 p) { return divrem(a, b, p).second; }

inline Poly gcd(Poly a, Poly b, u64 p) {
  while (!b.empty()) {
    Poly r = rem(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a, p);
}

struct ExtGcd {
  Poly g, s, t;  // s*a + t*b = g, g monic
};

inline ExtGcd ext_gcd(const Poly& a, const Poly& b, u64 p) {
  Poly r0 = a, r1 = b, s0{1}, s1{}, t0{}, t1{1};
  while (!r1.empty()) {
    auto [q, r] = divrem(r0, r1, p);
    Poly s2 = sub(s0, mul(q, s1, p), p);
    Poly t2 = sub(t0, mul(q, t1, p), p);
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (r0.empty()) return {};
  u64 li = inv(r0.back(), p);
  return {scale(r0, li, p), scale(s0, li, p), scale(t0, li, p)};
}

inline Poly derivative(const Poly& a, u64 p) {
  if (a.size() <= 1) return {};
  Poly r(a.size() - 1);
  for (std::size_t i = 1; i < a.size(); ++i) r[i - 1] = mul(a[i], i % p, p);
  trim(r);
  return r;
}

inline u64 eval(const Poly& a, u64 x, u64 p) {
  u64 acc = 0;
  for (std::size_t i = a.size(); i-- > 0;) acc = add(mul(acc, x, p), a[i], p);
  return acc;
}

inline Poly powmod(Poly base, u64 e, const Poly& f, u64 p) {
  Poly r{1};
  base = rem(base, f, p);
  while (e) {
    if (e & 1) r = rem(mul(r, base, p), f, p);
    e >>= 1;
    if (e) base = rem(mul(base, base, p), f, p);
  }
  return r;
}

inline bool is_squarefree(const Poly& f, u64 p) {
  Poly d = derivative(f, p);
  if (d.empty()) return false;
  return deg(gcd(f, d, p)) == 0;
}

// Distinct-degree factorization of a monic squarefree f: pairs (product of all
// irreducible factors of degree d, d).
inline std::vector<std::pair<Poly, int>> distinct_degree(Poly f, u64 p) {
  std::vector<std::pair<Poly, int>> out;
  const Poly x{0, 1};
  Poly h = x;
  for (int d = 1; 2 * d <= deg(f); ++d) {
    h = powmod(h, p, f, p);
    Poly g = gcd(f, sub(h, x, p), p);
    if (deg(g) > 0) {
      out.emplace_back(g, d);
      f = divrem(f, g, p).first;
      h = rem(h, f, p);
    }
  }
  if (deg(f) > 0) out.emplace_back(f, deg(f));
  return out;
}

// Equal-degree splitting (Cantor-Zassenhaus), p odd.
inline std::vector<Poly> equal_degree(const Poly& f, int d, u64 p, std::mt19937_64& rng) {
  if (deg(f) == d) return {f};
  std::uniform_int_distribution<u64> coef(0, p - 1);
  for (;;) {
    Poly a(deg(f), 0);
    for (auto& c : a) c = coef(rng);
    trim(a);
    if (deg(a) < 1) continue;
    // a^(1 + p + ... + p^(d-1)) then raise to (p-1)/2
    Poly frob = a, acc = a;
    for (int i = 1; i < d; ++i) {
      frob = powmod(frob, p, f, p);
      acc = rem(mul(acc, frob, p), f, p);
    }
    Poly b = sub(powmod(acc, (p - 1) / 2, f, p), Poly{1}, p);
    Poly g = gcd(f, b, p);
    if (deg(g) > 0 && deg(g) < deg(f)) {
      auto left = equal_degree(g, d, p, rng);
      auto right = equal_degree(divrem(f, g, p).first, d, p, rng);
      left.insert(left.end(), right.begin(), right.end());
      return left;
    }
  }
}

// Monic irreducible factors of a monic squarefree polynomial.
inline std::vector<Poly> factor_squarefree(const Poly& f, u64 p, std::mt19937_64& rng) {
  std::vector<Poly> out;
  for (auto& [g, d] : distinct_degree(f, p)) {
    auto parts = equal_degree(g, d, p, rng);
    out.insert(out.end(), parts.begin(), parts.end());
  }
  return out;
}

inline std::size_t count_factors(const Poly& f, u64 p) {
  std::size_t n = 0;
  for (auto& [g, d] : distinct_degree(f, p)) n += static_cast<std::size_t>(deg(g) / d);
  return n;
}

// Chinese remaindering of a residue into an accumulated value.
// acc is kept in the symmetric range of modulus * p; returns whether acc changed.
inline bool crt_accumulate(Int& acc, const Int& modulus, u64 residue, u64 p, u64 modulus_inv_p) {
  u64 a = reduce(acc, p);
  u64 delta = mul(sub(residue, a, p), modulus_inv_p, p);
  if (delta == 0) return false;
  mpz_addmul_ui(acc.get_mpz_t(), modulus.get_mpz_t(), delta);
  Int full = modulus * static_cast<unsigned long>(p);
  if (acc > full / 2) acc -= full;
  return true;
}

inline Int symmetric(const Int& v, const Int& modulus) {
  Int half = modulus / 2;
  if (v > half) return v - modulus;
  if (v < -half) return v + modulus;
  return v;
}

}  // namespace odereduce::modp
