#pragma once

// Exact division and greatest common divisors of bivariate polynomials.
//
// Internally polynomials are viewed in Z[x][y]. The gcd is computed by the
// dense modular method: images modulo word-sized primes are obtained by
// evaluating x at random points, taking univariate gcds in y and
// interpolating; images are combined by Chinese remaindering until the
// candidate stabilizes, and every candidate is confirmed by trial division.

#include <odereduce/bipoly.hpp>
#include <odereduce/modp.hpp>
#include <odereduce/upoly.hpp>

#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace odereduce {
namespace detail {

using XPoly = upoly::UPoly<Int>;
using YPoly = std::vector<XPoly>;

inline void trim_y(YPoly& p) {
  while (!p.empty() && p.back().empty()) p.pop_back();
}

inline int max_deg_x(const YPoly& p) {
  int d = -1;
  for (const auto& c : p) d = std::max(d, upoly::deg(c));
  return d;
}

inline std::optional<YPoly> divide_exact_y(const YPoly& a, const YPoly& b) {
  if (b.empty()) throw std::domain_error("division by zero polynomial");
  if (a.empty()) return YPoly{};
  if (a.size() < b.size()) return std::nullopt;
  const std::size_t db = b.size() - 1;
  YPoly rem(a);
  YPoly q(a.size() - db);
  for (std::size_t k = q.size(); k-- > 0;) {
    XPoly& top = rem[k + db];
    if (top.empty()) continue;
    auto c = upoly::divide_exact(top, b.back());
    if (!c) return std::nullopt;
    for (std::size_t j = 0; j <= db; ++j) rem[k + j] = upoly::sub(rem[k + j], upoly::mul(*c, b[j]));
    q[k] = std::move(*c);
  }
  for (std::size_t j = 0; j < db; ++j)
    if (!rem[j].empty()) return std::nullopt;
  trim_y(q);
  return q;
}

inline modp::Poly reduce_poly(const XPoly& a, modp::u64 p) {
  modp::Poly r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = modp::reduce(a[i], p);
  modp::trim(r);
  return r;
}

// gcd over Z[x], including the integer content; positive leading coefficient.
inline XPoly gcd_x(const XPoly& a, const XPoly& b) {
  if (a.empty() && b.empty()) return {};
  if (a.empty()) return upoly::scale(b, Int(b.back() < 0 ? -1 : 1));
  if (b.empty()) return upoly::scale(a, Int(a.back() < 0 ? -1 : 1));
  const Int ca = upoly::content(a), cb = upoly::content(b);
  const Int cg = gcd(ca, cb);
  const XPoly pa = upoly::primitive(a), pb = upoly::primitive(b);
  if (upoly::deg(pa) == 0 || upoly::deg(pb) == 0) return {cg};
  const Int lg = gcd(pa.back(), pb.back());

  XPoly acc;
  Int modulus;
  int best = std::min(upoly::deg(pa), upoly::deg(pb)) + 1;
  for (modp::u64 p : modp::large_primes()) {
    if (modp::reduce(pa.back(), p) == 0 || modp::reduce(pb.back(), p) == 0) continue;
    modp::Poly g = modp::gcd(reduce_poly(pa, p), reduce_poly(pb, p), p);
    g = modp::scale(g, modp::reduce(lg, p), p);
    const int d = modp::deg(g);
    if (d == 0) return {cg};
    if (d > best) continue;
    bool changed = true;
    if (d < best) {
      best = d;
      acc.assign(g.begin(), g.end());
      for (std::size_t i = 0; i < g.size(); ++i) acc[i] = Int(static_cast<unsigned long>(g[i]));
      modulus = Int(static_cast<unsigned long>(p));
    } else {
      const modp::u64 minv = modp::inv(modp::reduce(modulus, p), p);
      changed = false;
      for (std::size_t i = 0; i < acc.size(); ++i)
        changed |= modp::crt_accumulate(acc[i], modulus, i < g.size() ? g[i] : 0, p, minv);
      modulus *= static_cast<unsigned long>(p);
    }
    if (changed) continue;
    XPoly cand(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) cand[i] = modp::symmetric(acc[i], modulus);
    upoly::trim(cand);
    if (cand.empty()) continue;
    cand = upoly::primitive(cand);
    if (upoly::divide_exact(pa, cand) && upoly::divide_exact(pb, cand)) return upoly::scale(cand, cg);
  }
  throw std::runtime_error("modular gcd did not converge");
}

// gcd of the y-coefficients, as a polynomial in Z[x].
inline XPoly content_y(const YPoly& p) {
  XPoly g;
  for (const auto& c : p) {
    if (c.empty()) continue;
    g = gcd_x(g, c);
    if (g.size() == 1 && (g[0] == 1 || g[0] == -1)) break;
  }
  return g;
}

inline YPoly primitive_y(const YPoly& p) {
  XPoly c = content_y(p);
  if (c.size() == 1 && c[0] == 1) return p;
  YPoly r(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j].empty()) continue;
    r[j] = *upoly::divide_exact(p[j], c);
  }
  return r;
}

// Newton interpolation modulo p through (xs[k], ys[k]).
inline modp::Poly interpolate(const std::vector<modp::u64>& xs, const std::vector<modp::u64>& ys, modp::u64 p) {
  const std::size_t n = xs.size();
  std::vector<modp::u64> coef(ys);
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = n - 1; i >= j; --i) {
      modp::u64 num = modp::sub(coef[i], coef[i - 1], p);
      modp::u64 den = modp::sub(xs[i], xs[i - j], p);
      coef[i] = modp::mul(num, modp::inv(den, p), p);
      if (i == j) break;
    }
  modp::Poly r{coef[n - 1]};
  for (std::size_t k = n - 1; k-- > 0;) {
    // r = r * (x - xs[k]) + coef[k]
    modp::Poly next(r.size() + 1, 0);
    for (std::size_t i = 0; i < r.size(); ++i) {
      next[i + 1] = modp::add(next[i + 1], r[i], p);
      next[i] = modp::sub(next[i], modp::mul(r[i], xs[k], p), p);
    }
    next[0] = modp::add(next[0], coef[k], p);
    r = std::move(next);
  }
  modp::trim(r);
  return r;
}

// gcd of a and b in Z[x][y]; both primitive in y with positive y-degree.
// Result is primitive in y (up to sign).
inline YPoly gcd_brown(const YPoly& a, const YPoly& b) {
  const XPoly g = gcd_x(a.back(), b.back());
  const int xbound = upoly::deg(g) + std::min(max_deg_x(a), max_deg_x(b));
  const int ybest0 = static_cast<int>(std::min(a.size(), b.size()));

  YPoly acc;
  Int modulus;
  int best = ybest0;
  int stale_failures = 0;
  for (modp::u64 p : modp::large_primes()) {
    if (modp::reduce(a.back().back(), p) == 0 || modp::reduce(b.back().back(), p) == 0 ||
        modp::reduce(g.back(), p) == 0)
      continue;
    std::vector<modp::Poly> ap(a.size()), bp(b.size());
    for (std::size_t j = 0; j < a.size(); ++j) ap[j] = reduce_poly(a[j], p);
    for (std::size_t j = 0; j < b.size(); ++j) bp[j] = reduce_poly(b[j], p);
    const modp::Poly gp = reduce_poly(g, p);

    std::mt19937_64 rng(p);
    std::uniform_int_distribution<modp::u64> pick(1, p - 1);
    std::vector<modp::u64> xs;
    std::vector<modp::Poly> images;
    int dmin = ybest0;
    int attempts = 0;
    while (static_cast<int>(xs.size()) < xbound + 1 && attempts < 8 * (xbound + 8)) {
      ++attempts;
      modp::u64 alpha = pick(rng);
      modp::u64 galpha = modp::eval(gp, alpha, p);
      if (galpha == 0) continue;
      modp::Poly u(ap.size()), v(bp.size());
      for (std::size_t j = 0; j < ap.size(); ++j) u[j] = modp::eval(ap[j], alpha, p);
      for (std::size_t j = 0; j < bp.size(); ++j) v[j] = modp::eval(bp[j], alpha, p);
      if (u.back() == 0 || v.back() == 0) continue;
      modp::Poly w = modp::scale(modp::gcd(u, v, p), galpha, p);
      const int d = modp::deg(w);
      if (d == 0) return {{Int(1)}};
      if (d > dmin) continue;
      if (d < dmin) {
        dmin = d;
        xs.clear();
        images.clear();
      }
      if (std::find(xs.begin(), xs.end(), alpha) != xs.end()) continue;
      xs.push_back(alpha);
      images.push_back(std::move(w));
    }
    if (static_cast<int>(xs.size()) < xbound + 1) continue;

    std::vector<modp::Poly> hp(static_cast<std::size_t>(dmin) + 1);
    std::vector<modp::u64> vals(xs.size());
    for (int j = 0; j <= dmin; ++j) {
      for (std::size_t k = 0; k < xs.size(); ++k)
        vals[k] = static_cast<std::size_t>(j) < images[k].size() ? images[k][j] : 0;
      hp[j] = interpolate(xs, vals, p);
    }

    if (dmin > best) continue;
    bool changed = true;
    if (dmin < best) {
      best = dmin;
      acc.assign(hp.size(), {});
      for (std::size_t j = 0; j < hp.size(); ++j) {
        acc[j].assign(static_cast<std::size_t>(xbound + 1), Int(0));
        for (std::size_t i = 0; i < hp[j].size(); ++i) acc[j][i] = Int(static_cast<unsigned long>(hp[j][i]));
      }
      modulus = Int(static_cast<unsigned long>(p));
    } else {
      const modp::u64 minv = modp::inv(modp::reduce(modulus, p), p);
      changed = false;
      for (std::size_t j = 0; j < acc.size(); ++j)
        for (std::size_t i = 0; i < acc[j].size(); ++i)
          changed |= modp::crt_accumulate(acc[j][i], modulus, i < hp[j].size() ? hp[j][i] : 0, p, minv);
      modulus *= static_cast<unsigned long>(p);
    }
    if (changed) continue;

    YPoly cand(acc.size());
    for (std::size_t j = 0; j < acc.size(); ++j) {
      cand[j].resize(acc[j].size());
      for (std::size_t i = 0; i < acc[j].size(); ++i) cand[j][i] = modp::symmetric(acc[j][i], modulus);
      upoly::trim(cand[j]);
    }
    trim_y(cand);
    if (!cand.empty()) {
      cand = primitive_y(cand);
      if (divide_exact_y(a, cand) && divide_exact_y(b, cand)) return cand;
    }
    // a stable but wrong image means an unlucky prime slipped in; start over
    if (++stale_failures % 3 == 0) best = ybest0;
  }
  throw std::runtime_error("bivariate modular gcd did not converge");
}

// Integer primitive form as a YPoly.
inline YPoly to_ypoly(const BiPoly& p) { return to_ycoeffs(integer_form(p).primitive); }

}  // namespace detail

// Exact quotient p / q, or nullopt when q does not divide p.
inline std::optional<BiPoly> divide_exact(const BiPoly& p, const BiPoly& q) {
  if (q.is_zero()) throw std::domain_error("division by zero polynomial");
  if (p.is_zero()) return BiPoly{};
  if (q.is_constant()) return p * (1 / q.leading_coeff());
  if (q.max_degree(Var::x) > p.max_degree(Var::x) || q.max_degree(Var::y) > p.max_degree(Var::y))
    return std::nullopt;
  const IntegerForm fp = integer_form(p), fq = integer_form(q);
  auto r = detail::divide_exact_y(to_ycoeffs(fp.primitive), to_ycoeffs(fq.primitive));
  if (!r) return std::nullopt;
  return from_ycoeffs(*r) * (fp.content / fq.content);
}

inline bool divides(const BiPoly& q, const BiPoly& p) { return divide_exact(p, q).has_value(); }

// Gcd normalized to a primitive integer polynomial with positive leading
// coefficient in canonical term order.
inline BiPoly gcd_bivar(const BiPoly& p, const BiPoly& q) {
  if (p.is_zero() && q.is_zero()) throw std::domain_error("gcd of zero polynomials");
  if (p.is_zero()) return normalized(q);
  if (q.is_zero()) return normalized(p);
  if (p.is_constant() || q.is_constant()) return BiPoly(1L);
  const detail::YPoly a = detail::to_ypoly(p), b = detail::to_ypoly(q);
  const detail::XPoly ca = detail::content_y(a), cb = detail::content_y(b);
  const detail::XPoly cg = detail::gcd_x(ca, cb);
  const detail::YPoly pa = detail::primitive_y(a), pb = detail::primitive_y(b);
  detail::YPoly g{{Int(1)}};
  if (pa.size() > 1 && pb.size() > 1) g = detail::gcd_brown(pa, pb);
  for (auto& c : g) c = upoly::mul(c, cg);
  return normalized(from_ycoeffs(g));
}

// The part of p that depends on x only: gcd of its y-coefficients,
// normalized. p must be nonzero.
inline BiPoly content_in_y(const BiPoly& p) {
  if (p.is_zero()) throw std::domain_error("content of zero polynomial");
  auto c = detail::content_y(detail::to_ypoly(p));
  return normalized(from_ycoeffs({c}));
}

}  // namespace odereduce
