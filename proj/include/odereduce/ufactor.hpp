#pragma once

// Univariate factorization over Z (equivalently Q up to units): squarefree
// decomposition, factoring modulo a small prime, Hensel lifting and
// recombination of the lifted factors by trial division.

#include <odereduce/gcd.hpp>
#include <odereduce/modp.hpp>
#include <odereduce/upoly.hpp>

#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace odereduce::detail {

struct XFactor {
  XPoly poly;  // primitive, positive leading coefficient
  int mult;
};

// Yun's algorithm for a primitive polynomial of positive degree.
inline std::vector<XFactor> squarefree_x(const XPoly& f) {
  std::vector<XFactor> out;
  XPoly fp = upoly::derivative(f);
  XPoly a = upoly::primitive(gcd_x(f, fp));
  XPoly b = *upoly::divide_exact(f, a);
  XPoly c = *upoly::divide_exact(fp, a);
  XPoly d = upoly::sub(c, upoly::derivative(b));
  for (int i = 1; upoly::deg(b) > 0; ++i) {
    a = d.empty() ? upoly::primitive(b) : upoly::primitive(gcd_x(b, d));
    XPoly bn = *upoly::divide_exact(b, a);
    c = d.empty() ? XPoly{} : *upoly::divide_exact(d, a);
    d = upoly::sub(c, upoly::derivative(bn));
    if (upoly::deg(a) > 0) out.push_back({a, i});
    b = std::move(bn);
  }
  return out;
}

// Coefficients reduced into [0, m).
inline XPoly mod_positive(const XPoly& a, const Int& m) {
  XPoly r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) mpz_fdiv_r(r[i].get_mpz_t(), a[i].get_mpz_t(), m.get_mpz_t());
  upoly::trim(r);
  return r;
}

inline XPoly from_modp(const modp::Poly& a) {
  XPoly r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = Int(static_cast<unsigned long>(a[i]));
  return r;
}

// Lifts f = g*h (mod p) to modulus p^k. g is monic, lc(h) = lc(f) exactly.
inline std::pair<XPoly, XPoly> hensel_lift(const XPoly& f, XPoly g, XPoly h, modp::u64 p, int k) {
  const auto eg = modp::ext_gcd(reduce_poly(g, p), reduce_poly(h, p), p);
  if (modp::deg(eg.g) != 0) throw std::logic_error("hensel lift: factors not coprime modulo p");
  Int m = Int(static_cast<unsigned long>(p));
  for (int j = 1; j < k; ++j) {
    XPoly err = upoly::sub(f, upoly::mul(g, h));
    for (auto& c : err) c = exact_div(c, m);
    modp::Poly e = reduce_poly(err, p);
    if (!e.empty()) {
      auto [q, r] = modp::divrem(modp::mul(eg.t, e, p), reduce_poly(g, p), p);
      modp::Poly dh = modp::add(modp::mul(eg.s, e, p), modp::mul(q, reduce_poly(h, p), p), p);
      g = upoly::add(g, upoly::scale(from_modp(r), m));
      h = upoly::add(h, upoly::scale(from_modp(dh), m));
    }
    m *= static_cast<unsigned long>(p);
  }
  return {mod_positive(g, m), h};
}

inline XPoly symmetric_poly(const XPoly& a, const Int& m) {
  XPoly r = mod_positive(a, m);
  for (auto& c : r) c = modp::symmetric(c, m);
  upoly::trim(r);
  return r;
}

inline Int two_norm_ceil(const XPoly& f) {
  Int s = 0;
  for (const auto& c : f) s += c * c;
  Int r;
  mpz_sqrt(r.get_mpz_t(), s.get_mpz_t());
  return r + 1;
}

// Irreducible factors of a primitive squarefree polynomial with positive
// leading coefficient.
inline std::vector<XPoly> factor_squarefree_z(const XPoly& f, std::mt19937_64& rng) {
  const int n = upoly::deg(f);
  if (n <= 1) return {f};
  if (f[0] == 0) {
    // f = x * g with g(0) != 0 since f is squarefree
    XPoly g(f.begin() + 1, f.end());
    auto rest = factor_squarefree_z(g, rng);
    rest.insert(rest.begin(), XPoly{Int(0), Int(1)});
    return rest;
  }

  // pick the prime (among a few good ones) with the fewest modular factors
  modp::u64 best_p = 0;
  std::size_t best_count = 0;
  int good = 0;
  for (modp::u64 p : modp::small_primes()) {
    if (modp::reduce(f.back(), p) == 0) continue;
    modp::Poly fp = modp::monic(reduce_poly(f, p), p);
    if (!modp::is_squarefree(fp, p)) continue;
    std::size_t cnt = modp::count_factors(fp, p);
    if (best_p == 0 || cnt < best_count) {
      best_p = p;
      best_count = cnt;
    }
    if (cnt == 1 || ++good >= 5) break;
  }
  if (best_p == 0) throw std::runtime_error("no suitable prime for factorization");
  if (best_count == 1) return {f};

  const modp::u64 p = best_p;
  std::vector<modp::Poly> mods = modp::factor_squarefree(modp::monic(reduce_poly(f, p), p), p, rng);

  // coefficient bound for factors of lc(f) * f, with margin for sign
  Int bound = two_norm_ceil(f) * abs(f.back()) * 2;
  mpz_mul_2exp(bound.get_mpz_t(), bound.get_mpz_t(), static_cast<mp_bitcnt_t>(n));
  int k = 1;
  Int pk = Int(static_cast<unsigned long>(p));
  while (pk <= bound) {
    pk *= static_cast<unsigned long>(p);
    ++k;
  }

  // multifactor lift, one factor split off at a time
  std::vector<XPoly> lifted;
  XPoly current = f;
  for (std::size_t i = 0; i + 1 < mods.size(); ++i) {
    modp::Poly rest{modp::reduce(f.back(), p)};
    for (std::size_t j = i + 1; j < mods.size(); ++j) rest = modp::mul(rest, mods[j], p);
    XPoly h = from_modp(rest);
    h.back() = f.back();
    auto [g, hh] = hensel_lift(current, from_modp(mods[i]), h, p, k);
    lifted.push_back(std::move(g));
    current = mod_positive(hh, pk);
  }
  {
    Int lcinv;
    Int lcm_ = f.back();
    mpz_invert(lcinv.get_mpz_t(), lcm_.get_mpz_t(), pk.get_mpz_t());
    lifted.push_back(mod_positive(upoly::scale(current, lcinv), pk));
  }

  // recombination
  std::vector<XPoly> out;
  XPoly rem = f;
  std::vector<XPoly> pool = lifted;
  std::size_t s = 1;
  while (2 * s <= pool.size()) {
    bool found = false;
    std::vector<std::size_t> idx(s);
    for (std::size_t i = 0; i < s; ++i) idx[i] = i;
    for (;;) {
      XPoly prod{rem.back()};
      for (std::size_t i : idx) prod = mod_positive(upoly::mul(prod, pool[i]), pk);
      XPoly cand = symmetric_poly(prod, pk);
      if (upoly::deg(cand) > 0 && (rem[0] == 0 || cand[0] == 0 || divisible(rem.back() * rem[0], cand[0]))) {
        cand = upoly::primitive(cand);
        if (auto q = upoly::divide_exact(rem, cand)) {
          out.push_back(cand);
          rem = upoly::primitive(*q);
          for (std::size_t i = s; i-- > 0;) pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx[i]));
          found = true;
          break;
        }
      }
      // next combination
      std::size_t pos = s;
      while (pos > 0 && idx[pos - 1] == pool.size() - s + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t i = pos; i < s; ++i) idx[i] = idx[i - 1] + 1;
    }
    if (!found) ++s;
  }
  if (upoly::deg(rem) > 0) out.push_back(upoly::primitive(rem));
  return out;
}

// Full factorization of a primitive polynomial of positive degree.
inline std::vector<XFactor> factor_x(const XPoly& f, std::mt19937_64& rng) {
  std::vector<XFactor> out;
  for (auto& part : squarefree_x(upoly::primitive(f)))
    for (auto& q : factor_squarefree_z(part.poly, rng)) out.push_back({q, part.mult});
  return out;
}

}  // namespace odereduce::detail
