#pragma once

// Factorization of bivariate polynomials over Q.
//
// Squarefree parts (Yun's algorithm in y) are factored by specializing x at a
// point that keeps the y-degree and squarefreeness, factoring the univariate
// image, lifting the image factors x-adically and recombining lifted factors
// by trial division. Every factorization is checked by reconstruction.

#include <odereduce/bipoly.hpp>
#include <odereduce/gcd.hpp>
#include <odereduce/ufactor.hpp>

#include <algorithm>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace odereduce {

struct FactorPower {
  BiPoly poly;
  int mult = 0;
};

struct Factorization {
  Rat unit;
  std::vector<FactorPower> factors;

  BiPoly expand() const {
    BiPoly r(unit);
    for (const auto& f : factors) r *= pow(f.poly, static_cast<unsigned>(f.mult));
    return r;
  }
};

struct SplitN {
  BiPoly t;                         // x-only part, carries the numeric content
  std::vector<FactorPower> yfactors;  // irreducible factors with positive y-degree
};

using FactorRng = std::mt19937_64;

inline constexpr std::uint64_t default_factor_seed = 0x5eed5eedULL;

namespace detail {

// Power series in x with coefficients in Q[y], truncated at x^K.
using Series = std::vector<upoly::UPoly<Rat>>;

inline Series series_mul(const Series& a, const Series& b, std::size_t K) {
  Series r(K);
  for (std::size_t i = 0; i < std::min(a.size(), K); ++i) {
    if (a[i].empty()) continue;
    for (std::size_t j = 0; i + j < K && j < b.size(); ++j) {
      if (b[j].empty()) continue;
      r[i + j] = upoly::add(r[i + j], upoly::mul(a[i], b[j]));
    }
  }
  return r;
}

// Lifts target = g * h (mod x^K) from g0 * h0 = target[0], both monic in y.
inline std::pair<Series, Series> lift_series(const Series& target, const upoly::UPoly<Rat>& g0,
                                             const upoly::UPoly<Rat>& h0, std::size_t K) {
  const auto eg = upoly::ext_gcd(g0, h0);
  if (upoly::deg(eg.g) != 0) throw std::logic_error("x-adic lift: image factors not coprime");
  Series g(K), h(K);
  g[0] = g0;
  h[0] = h0;
  for (std::size_t k = 1; k < K; ++k) {
    upoly::UPoly<Rat> e = k < target.size() ? target[k] : upoly::UPoly<Rat>{};
    for (std::size_t i = 1; i < k; ++i)
      if (!g[i].empty() && !h[k - i].empty()) e = upoly::sub(e, upoly::mul(g[i], h[k - i]));
    if (e.empty()) continue;
    g[k] = upoly::rem(upoly::mul(eg.t, e), g0);
    h[k] = upoly::rem(upoly::mul(eg.s, e), h0);
  }
  return {std::move(g), std::move(h)};
}

inline std::vector<upoly::UPoly<Rat>> x_series_of(const BiPoly& p, std::size_t K) {
  auto s = to_xcoeffs(p);
  s.resize(std::max(s.size(), K));
  return s;
}

// lc in y as a dense polynomial in x.
inline upoly::UPoly<Rat> lc_y_poly(const BiPoly& p) {
  const unsigned dy = static_cast<unsigned>(p.max_degree(Var::y));
  upoly::UPoly<Rat> out(static_cast<std::size_t>(p.max_degree(Var::x) + 1));
  for (const auto& t : p.terms())
    if (t.mono.dy == dy) out[t.mono.dx] = t.coef;
  upoly::trim(out);
  return out;
}

inline XPoly int_coeffs(const upoly::UPoly<Rat>& u) {
  XPoly r(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) r[i] = u[i].get_num();
  return r;
}

// Primitive over Z[x] (content in x removed, integer content removed).
inline BiPoly primitive_in_y(const BiPoly& p) {
  return normalized(from_ycoeffs(primitive_y(to_ypoly(p))));
}

// Irreducible factors of F: integer, primitive in y, squarefree, deg_y >= 1.
inline std::vector<BiPoly> factor_squarefree_bivar(const BiPoly& F, FactorRng& rng) {
  const int dy = F.max_degree(Var::y);
  if (dy == 1) return {F};
  if (F.max_degree(Var::x) == 0) {
    XPoly u = int_coeffs(eval_x(F, Rat(0)));
    std::vector<BiPoly> out;
    for (auto& q : factor_squarefree_z(upoly::primitive(u), rng)) out.push_back(normalized(from_ypoly(upoly::to_rat(q))));
    return out;
  }

  const upoly::UPoly<Rat> lcy = lc_y_poly(F);
  struct Choice {
    long a;
    std::vector<XPoly> factors;
  };
  std::vector<Choice> choices;
  std::uniform_int_distribution<long> small(-3, 3);
  for (int attempt = 0; attempt < 400 && choices.size() < 3; ++attempt) {
    long a = attempt == 0 ? 0 : (attempt < 40 ? small(rng) : std::uniform_int_distribution<long>(-50 - attempt, 50 + attempt)(rng));
    if (std::any_of(choices.begin(), choices.end(), [a](const Choice& c) { return c.a == a; })) continue;
    if (upoly::eval(lcy, Rat(a)) == 0) continue;
    XPoly u = int_coeffs(eval_x(F, Rat(a)));
    if (upoly::deg(u) != dy) continue;
    XPoly pu = upoly::primitive(u);
    if (upoly::deg(gcd_x(pu, upoly::derivative(pu))) != 0) continue;
    choices.push_back({a, factor_squarefree_z(pu, rng)});
    if (choices.back().factors.size() == 1) return {F};
  }
  if (choices.empty()) throw std::runtime_error("no lucky evaluation point for factorization");
  const Choice& best = *std::min_element(choices.begin(), choices.end(), [](const Choice& l, const Choice& r) {
    return l.factors.size() < r.factors.size();
  });

  BiPoly G = shift_x(F, Rat(best.a));
  upoly::UPoly<Rat> ell = lc_y_poly(G);
  const std::size_t K = static_cast<std::size_t>(G.max_degree(Var::x) + upoly::deg(ell) + 1);

  // monic target G / lc_y(G) as a series in x
  std::vector<Rat> ell_inv(K);
  ell_inv[0] = 1 / ell[0];
  for (std::size_t k = 1; k < K; ++k) {
    Rat s = 0;
    for (std::size_t i = 1; i <= k && i < ell.size(); ++i) s += ell[i] * ell_inv[k - i];
    ell_inv[k] = -s * ell_inv[0];
  }
  const auto gx = x_series_of(G, K);
  Series target(K);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t i = 0; i <= k; ++i)
      if (!gx[i].empty() && ell_inv[k - i] != 0) target[k] = upoly::add(target[k], upoly::scale(gx[i], ell_inv[k - i]));

  std::vector<upoly::UPoly<Rat>> monics;
  for (const auto& q : best.factors) monics.push_back(upoly::monic(upoly::to_rat(q)));

  std::vector<Series> lifted;
  Series current = target;
  for (std::size_t i = 0; i + 1 < monics.size(); ++i) {
    upoly::UPoly<Rat> rest{Rat(1)};
    for (std::size_t j = i + 1; j < monics.size(); ++j) rest = upoly::mul(rest, monics[j]);
    auto [g, h] = lift_series(current, monics[i], rest, K);
    lifted.push_back(std::move(g));
    current = std::move(h);
  }
  lifted.push_back(std::move(current));

  // recombination
  std::vector<BiPoly> found;
  BiPoly rem = G;
  std::size_t s = 1;
  while (2 * s <= lifted.size()) {
    bool hit = false;
    std::vector<std::size_t> idx(s);
    for (std::size_t i = 0; i < s; ++i) idx[i] = i;
    const upoly::UPoly<Rat> ell_rem = lc_y_poly(rem);
    for (;;) {
      Series prod(K);
      prod[0] = {Rat(1)};
      for (std::size_t i : idx) prod = series_mul(prod, lifted[i], K);
      Series ells(K);
      for (std::size_t i = 0; i < ell_rem.size() && i < K; ++i)
        if (ell_rem[i] != 0) ells[i] = {ell_rem[i]};
      prod = series_mul(prod, ells, K);
      BiPoly cand = from_xcoeffs(prod);
      if (!cand.is_zero() && cand.max_degree(Var::y) > 0) {
        cand = primitive_in_y(cand);
        if (auto q = divide_exact(rem, cand)) {
          found.push_back(cand);
          rem = normalized(*q);
          for (std::size_t i = s; i-- > 0;) lifted.erase(lifted.begin() + static_cast<std::ptrdiff_t>(idx[i]));
          hit = true;
          break;
        }
      }
      std::size_t pos = s;
      while (pos > 0 && idx[pos - 1] == lifted.size() - s + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t i = pos; i < s; ++i) idx[i] = idx[i - 1] + 1;
    }
    if (!hit) ++s;
  }
  if (rem.max_degree(Var::y) > 0) found.push_back(rem);

  std::vector<BiPoly> out;
  for (const auto& f : found) out.push_back(normalized(shift_x(f, Rat(-best.a))));
  return out;
}

// Yun's algorithm in y for a polynomial that is primitive in y.
inline std::vector<FactorPower> squarefree_y(const BiPoly& f) {
  std::vector<FactorPower> out;
  if (f.max_degree(Var::y) <= 0) return out;
  BiPoly fp = partial(f, Var::y);
  BiPoly a = gcd_bivar(f, fp);
  BiPoly b = *divide_exact(f, a);
  BiPoly c = *divide_exact(fp, a);
  BiPoly d = c - partial(b, Var::y);
  for (int i = 1; b.max_degree(Var::y) > 0; ++i) {
    a = d.is_zero() ? normalized(b) : gcd_bivar(b, d);
    BiPoly bn = *divide_exact(b, a);
    c = d.is_zero() ? BiPoly{} : *divide_exact(d, a);
    d = c - partial(bn, Var::y);
    if (!a.is_constant()) out.push_back({normalized(a), i});
    b = std::move(bn);
  }
  return out;
}

}  // namespace detail

// Squarefree decomposition: parts pairwise coprime and squarefree, listed by
// increasing multiplicity; their product equals p up to a rational unit.
inline std::vector<FactorPower> squarefree_decompose(const BiPoly& p) {
  if (p.is_zero()) throw std::domain_error("squarefree decomposition of zero polynomial");
  if (p.is_constant()) return {};
  const BiPoly prim = normalized(p);
  const BiPoly cx = content_in_y(prim);
  const BiPoly py = *divide_exact(prim, cx);
  std::vector<FactorPower> parts = detail::squarefree_y(py);
  if (!cx.is_constant()) {
    for (auto& xf : detail::squarefree_x(upoly::primitive(detail::int_coeffs(to_xpoly(cx))))) {
      BiPoly q = normalized(from_xpoly(upoly::to_rat(xf.poly)));
      auto it = std::find_if(parts.begin(), parts.end(), [&](const FactorPower& f) { return f.mult == xf.mult; });
      if (it != parts.end()) {
        it->poly = normalized(it->poly * q);
      } else {
        parts.push_back({q, xf.mult});
      }
    }
  }
  std::sort(parts.begin(), parts.end(), [](const FactorPower& a, const FactorPower& b) { return a.mult < b.mult; });
  return parts;
}

inline Factorization factor_bivar(const BiPoly& p, FactorRng& rng) {
  if (p.is_zero()) throw std::domain_error("factorization of zero polynomial");
  Factorization out;
  if (p.is_constant()) {
    out.unit = p.leading_coeff();
    return out;
  }
  const BiPoly prim = normalized(p);
  const BiPoly cx = content_in_y(prim);
  const BiPoly py = *divide_exact(prim, cx);

  if (!cx.is_constant()) {
    for (auto& xf : detail::factor_x(detail::int_coeffs(to_xpoly(cx)), rng))
      out.factors.push_back({normalized(from_xpoly(upoly::to_rat(xf.poly))), xf.mult});
  }
  for (auto& part : detail::squarefree_y(py))
    for (auto& q : detail::factor_squarefree_bivar(part.poly, rng)) out.factors.push_back({normalized(q), part.mult});

  std::sort(out.factors.begin(), out.factors.end(),
            [](const FactorPower& a, const FactorPower& b) { return canonical_less(a.poly, b.poly); });

  BiPoly rest(1L);
  for (const auto& f : out.factors) rest *= pow(f.poly, static_cast<unsigned>(f.mult));
  auto unit = divide_exact(p, rest);
  if (!unit || !unit->is_constant() || unit->is_zero())
    throw std::logic_error("factorization failed reconstruction");
  out.unit = unit->leading_coeff();
  if (out.expand() != p) throw std::logic_error("factorization failed reconstruction");
  return out;
}

inline Factorization factor_bivar(const BiPoly& p) {
  FactorRng rng(default_factor_seed);
  return factor_bivar(p, rng);
}

inline SplitN split_x_only(const BiPoly& N, FactorRng& rng) {
  if (N.is_zero()) throw std::domain_error("split of zero polynomial");
  Factorization f = factor_bivar(N, rng);
  SplitN out{BiPoly(f.unit), {}};
  for (auto& fp : f.factors) {
    if (fp.poly.max_degree(Var::y) == 0) {
      out.t *= pow(fp.poly, static_cast<unsigned>(fp.mult));
    } else {
      out.yfactors.push_back(fp);
    }
  }
  return out;
}

inline SplitN split_x_only(const BiPoly& N) {
  FactorRng rng(default_factor_seed);
  return split_x_only(N, rng);
}

}  // namespace odereduce
