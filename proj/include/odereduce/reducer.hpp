#pragma once

// Search for a rational transformation y -> A/B with canceled factor c | A
// that turns y' = M/N into t(x) y' = sum f_i(x) y^i.
//
// For each canceled y-degree cany the y-degrees of M and N are raised by cany
// and matched against the degree identities of the transformed equation;
// each consistent case gives candidate denominators B built from the
// y-dependent factors of N. The identity N c = t (B A_y - A B_y) B^(n-2) is
// linear in the coefficients of A and c, and once A, B, c are fixed the f_i
// follow from a second linear solve.

#include <odereduce/bipoly.hpp>
#include <odereduce/budget.hpp>
#include <odereduce/factor.hpp>
#include <odereduce/gcd.hpp>
#include <odereduce/io.hpp>
#include <odereduce/linalg.hpp>
#include <odereduce/modp.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <thread>
#include <unordered_map>
#include <vector>

namespace odereduce {

struct DegreeCase {
  int n = 0;
  int degA_y = 0;
  int degB_y = 0;
  int cany = 0;
  int inew = 0, jnew = 0;
  bool a_dominant = true;  // first branch of the degree test
};

struct FamilyMember {
  BiPoly A, c;
};

struct SolutionFamily {
  std::vector<FamilyMember> basis;
  int n = 0;
  int cany = 0;
  BiPoly B, t;

  std::size_t dim() const { return basis.size(); }
};

struct ReducerOptions {
  bool print_candidates = false;
  double max_seconds = 0;  // 0 = unlimited
  unsigned threads = 1;
  int grid_radius = 5;
  std::size_t grid_points_max = 20000;
};

struct DegreeTestResult {
  std::vector<Reduction> reductions;
  std::vector<SolutionFamily> families;  // filled when print_candidates is set
  std::size_t cases = 0;                 // (cany, n, B) tasks examined
};

namespace detail {

using MonoKey = std::uint64_t;

inline MonoKey mono_key(unsigned dx, unsigned dy) { return (static_cast<MonoKey>(dx) << 32) | dy; }

// Monomials of total degree <= d, canonical order.
inline std::vector<Monomial> monomials_total(int d) {
  std::vector<Monomial> out;
  for (int s = d; s >= 0; --s)
    for (int dx = s; dx >= 0; --dx) out.push_back({static_cast<unsigned>(dx), static_cast<unsigned>(s - dx)});
  return out;
}

// Monomials with dy <= ymax and dx <= xmax, canonical order.
inline std::vector<Monomial> monomials_box(int xmax, int ymax) {
  std::vector<Monomial> out;
  for (int dx = 0; dx <= xmax; ++dx)
    for (int dy = 0; dy <= ymax; ++dy) out.push_back({static_cast<unsigned>(dx), static_cast<unsigned>(dy)});
  std::sort(out.begin(), out.end(), precedes);
  return out;
}

// Coefficient-matching system: column k holds the coefficients of cols[k].
inline RatMatrix coefficient_matrix(const std::vector<BiPoly>& cols, std::vector<Monomial>* row_monos = nullptr) {
  std::unordered_map<MonoKey, std::size_t> row_of;
  std::vector<Monomial> monos;
  for (const auto& p : cols)
    for (const auto& t : p.terms())
      if (row_of.emplace(mono_key(t.mono.dx, t.mono.dy), monos.size()).second) monos.push_back(t.mono);
  RatMatrix m(monos.size(), cols.size());
  for (std::size_t k = 0; k < cols.size(); ++k)
    for (const auto& t : cols[k].terms()) m(row_of[mono_key(t.mono.dx, t.mono.dy)], k) = t.coef;
  if (row_monos) *row_monos = std::move(monos);
  return m;
}

inline BiPoly combine(const std::vector<Monomial>& monos, const std::vector<Rat>& v, std::size_t offset) {
  std::vector<Term> terms;
  for (std::size_t i = 0; i < monos.size(); ++i)
    if (v[offset + i] != 0) terms.push_back({monos[i], v[offset + i]});
  return BiPoly::from_terms(std::move(terms));
}

// Scales (A, c) to integer coefficients, jointly primitive, lc(A) > 0.
inline FamilyMember normalize_pair(FamilyMember m) {
  Int den = 1, g = 0;
  for (const auto* p : {&m.A, &m.c})
    for (const auto& t : p->terms()) den = lcm(den, t.coef.get_den());
  for (const auto* p : {&m.A, &m.c})
    for (const auto& t : p->terms()) g = gcd(g, Int(t.coef.get_num() * (den / t.coef.get_den())));
  if (g == 0) return m;
  Rat s(den, g);
  s.canonicalize();
  if (!m.A.is_zero() && m.A.leading_coeff() < 0) s = -s;
  m.A *= s;
  m.c *= s;
  return m;
}

inline bool is_one(const BiPoly& p) { return p.is_constant() && !p.is_zero(); }

inline BiPoly sum_scaled(const std::vector<BiPoly>& ps, const std::vector<Int>& g) {
  BiPoly r;
  for (std::size_t i = 0; i < ps.size(); ++i)
    if (g[i] != 0) r = r + ps[i] * BiPoly(Rat(g[i]));
  return r;
}

// Integer points of [-r, r]^d up to sign: gcd 1, first nonzero entry positive.
// Ordered by max-norm, then by the position of the first nonzero entry from
// the right, then lexicographically; at most max_points are produced.
inline std::vector<std::vector<Int>> grid_points(std::size_t d, int r, std::size_t max_points = SIZE_MAX) {
  std::vector<std::vector<Int>> out;
  if (d == 0) return out;
  for (int norm = 1; norm <= r; ++norm) {
    for (std::size_t first = d; first-- > 0;) {
      for (int lead = 1; lead <= norm; ++lead) {
        // entries after `first` range over [-norm, norm]
        std::vector<int> tail(d - first - 1, -norm);
        for (;;) {
          int mx = lead;
          Int g = lead;
          for (int c : tail) {
            mx = std::max(mx, std::abs(c));
            g = gcd(g, Int(c));
          }
          if (mx == norm && g == 1) {
            std::vector<Int> p(d);
            p[first] = lead;
            for (std::size_t i = 0; i < tail.size(); ++i) p[first + 1 + i] = tail[i];
            out.push_back(std::move(p));
            if (out.size() >= max_points) return out;
          }
          std::size_t i = tail.size();
          while (i > 0 && tail[i - 1] == norm) tail[--i] = -norm;
          if (i == 0) break;
          ++tail[i - 1];
        }
      }
    }
  }
  return out;
}

inline std::vector<int> factor_y_degrees(const SplitN& split) {
  std::vector<int> out;
  for (const auto& f : split.yfactors) out.push_back(f.poly.max_degree(Var::y));
  return out;
}

inline int ceil_div(int a, int b) { return a <= 0 ? 0 : (a + b - 1) / b; }

}  // namespace detail

// Candidate denominators of y-degree degB_y: products of y-dependent factors
// q of N with exponent e such that mult_N(q) >= e (n - 1) - 1.
inline std::vector<BiPoly> enumerate_B_candidates(const SplitN& split, int n, int degB_y) {
  if (degB_y == 0) return {BiPoly(1L)};
  const auto& fs = split.yfactors;
  std::vector<int> emax(fs.size());
  for (std::size_t i = 0; i < fs.size(); ++i) {
    // largest e with e (n - 1) - 1 <= mult
    emax[i] = (fs[i].mult + 1) / (n - 1);
  }
  const auto dys = detail::factor_y_degrees(split);
  std::vector<BiPoly> out;
  std::vector<int> e(fs.size(), 0);
  auto rec = [&](auto&& self, std::size_t i, int remaining) -> void {
    if (remaining == 0) {
      BiPoly b(1L);
      for (std::size_t k = 0; k < fs.size(); ++k)
        if (e[k] > 0) b *= pow(fs[k].poly, static_cast<unsigned>(e[k]));
      out.push_back(normalized(b));
      return;
    }
    if (i == fs.size()) return;
    for (int k = std::min(emax[i], remaining / dys[i]); k >= 0; --k) {
      e[i] = k;
      self(self, i + 1, remaining - k * dys[i]);
    }
    e[i] = 0;
  };
  rec(rec, 0, degB_y);
  return out;
}

// Both defining identities, gcd(A, B) = 1 and c | A.
inline bool verify_reduction(const BiPoly& M, const BiPoly& N, const Reduction& r) {
  if (r.n < 3 || r.f.size() != static_cast<std::size_t>(r.n) + 1) return false;
  if (r.t.is_zero() || r.t.max_degree(Var::y) > 0 || r.c.is_zero() || r.A.is_zero() || r.B.is_zero()) return false;
  for (const auto& fi : r.f)
    if (fi.max_degree(Var::y) > 0) return false;
  if (!detail::is_one(gcd_bivar(r.A, r.B))) return false;
  if (!divides(r.c, r.A)) return false;
  const BiPoly Bn2 = pow(r.B, static_cast<unsigned>(r.n - 2));
  const BiPoly wy = r.B * partial(r.A, Var::y) - r.A * partial(r.B, Var::y);
  if (N * r.c != r.t * wy * Bn2) return false;
  const BiPoly wx = r.B * partial(r.A, Var::x) - r.A * partial(r.B, Var::x);
  BiPoly sum;
  BiPoly Ai(1L);
  std::vector<BiPoly> Bpow(static_cast<std::size_t>(r.n) + 1, BiPoly(1L));
  for (int i = 1; i <= r.n; ++i) Bpow[i] = Bpow[i - 1] * r.B;
  for (int i = 0; i <= r.n; ++i) {
    if (!r.f[i].is_zero()) sum = sum + r.f[i] * Ai * Bpow[r.n - i];
    if (i < r.n) Ai *= r.A;
  }
  return M * r.c == sum - r.t * wx * Bn2;
}

// Nullspace of the linear condition on (A, c). A ranges over total degree
// <= degreeA, c over dy <= cany, dx <= degreeA - 1. The basis is reduced on
// the c-coordinates in canonical monomial order, so generators with c = 0
// come last.
inline std::optional<SolutionFamily> solve_A_and_c(const BiPoly& N, const BiPoly& t, const BiPoly& B, int n,
                                                   int degreeA, int cany, const Deadline& deadline = Deadline()) {
  if (n < 3 || cany < 0 || cany >= degreeA) throw std::invalid_argument("solve_A_and_c: bad degree case");
  const auto amonos = detail::monomials_total(degreeA);
  const auto cmonos = detail::monomials_box(degreeA - 1, cany);
  const BiPoly T = t * pow(B, static_cast<unsigned>(n - 2));
  const BiPoly P = T * B;
  const BiPoly Q = T * partial(B, Var::y);

  // column order: c monomials, then A monomials
  std::vector<BiPoly> cols;
  cols.reserve(cmonos.size() + amonos.size());
  for (const auto& m : cmonos) cols.push_back(N.shifted(m.dx, m.dy));
  for (const auto& m : amonos) {
    BiPoly col = Q.shifted(m.dx, m.dy);
    if (m.dy > 0) col = col - P.shifted(m.dx, m.dy - 1) * BiPoly(Rat(m.dy));
    cols.push_back(std::move(col));
  }
  const RatMatrix mat = detail::coefficient_matrix(cols);
  auto kernel = nullspace(mat, deadline);
  if (kernel.empty()) return std::nullopt;

  // reduced row echelon form of the kernel basis (small, plain rationals)
  const std::size_t ncols = cols.size();
  std::size_t row = 0;
  for (std::size_t col = 0; col < ncols && row < kernel.size(); ++col) {
    std::size_t piv = row;
    while (piv < kernel.size() && kernel[piv][col] == 0) ++piv;
    if (piv == kernel.size()) continue;
    std::swap(kernel[row], kernel[piv]);
    const Rat inv = 1 / kernel[row][col];
    for (auto& v : kernel[row]) v *= inv;
    for (std::size_t r = 0; r < kernel.size(); ++r) {
      if (r == row || kernel[r][col] == 0) continue;
      const Rat f = kernel[r][col];
      for (std::size_t j = 0; j < ncols; ++j)
        if (kernel[row][j] != 0) kernel[r][j] -= f * kernel[row][j];
    }
    ++row;
  }

  SolutionFamily fam;
  fam.n = n;
  fam.cany = cany;
  fam.B = B;
  fam.t = t;
  for (const auto& v : kernel)
    fam.basis.push_back({detail::combine(amonos, v, cmonos.size()), detail::combine(cmonos, v, 0)});

  // family soundness
  for (const auto& m : fam.basis)
    if (N * m.c != t * (B * partial(m.A, Var::y) - m.A * partial(B, Var::y)) * pow(B, static_cast<unsigned>(n - 2)))
      throw std::logic_error("solve_A_and_c: kernel element violates the identity");

  if (std::all_of(fam.basis.begin(), fam.basis.end(), [](const FamilyMember& m) { return m.c.is_zero(); }))
    return std::nullopt;
  if (fam.dim() == 1) {
    const auto& m = fam.basis[0];
    if (m.A.is_zero() || m.c.is_zero() || !detail::is_one(gcd_bivar(m.A, B))) return std::nullopt;
  }
  return fam;
}

// Concrete (A, c) pairs from a family. A single generator is returned as is
// (normalized). Otherwise the generators with c != 0 are combined over an
// integer grid modulo scaling; generators with c = 0 (they add multiples of
// B to A, or similar) are then used to make c divide A when possible.
inline std::vector<FamilyMember> specialize_family(const SolutionFamily& fam, const BiPoly& B,
                                                   const ReducerOptions& opt = ReducerOptions(),
                                                   const Deadline& deadline = Deadline()) {
  std::vector<FamilyMember> out;
  if (fam.dim() == 0) return out;
  if (fam.dim() == 1) {
    const auto& m = fam.basis[0];
    if (m.c.is_zero() || m.A.is_zero()) return out;
    out.push_back(detail::normalize_pair(m));
    return out;
  }
  std::vector<BiPoly> A1, c1, A0;
  for (const auto& m : fam.basis) {
    if (m.c.is_zero()) {
      A0.push_back(m.A);
    } else {
      A1.push_back(m.A);
      c1.push_back(m.c);
    }
  }
  int radius = opt.grid_radius;
  while (radius > 1) {
    double count = 1;
    for (std::size_t i = 0; i < A1.size(); ++i) count *= 2 * radius + 1;
    if (count <= static_cast<double>(opt.grid_points_max)) break;
    --radius;
  }
  int degreeA = 0;
  for (const auto& m : fam.basis) degreeA = std::max(degreeA, m.A.max_degree(Var::total));

  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& g : detail::grid_points(A1.size(), radius, opt.grid_points_max)) {
    deadline.check();
    const BiPoly c = detail::sum_scaled(c1, g);
    if (c.is_zero()) continue;
    BiPoly A = detail::sum_scaled(A1, g);
    if (!A0.empty()) {
      // A + sum lambda_k A0_k = c q, linear in (lambda, q)
      const int dq = degreeA - c.max_degree(Var::total);
      if (dq < 0) continue;
      const auto qmonos = detail::monomials_total(dq);
      std::vector<BiPoly> cols(A0.begin(), A0.end());
      for (const auto& m : qmonos) cols.push_back(-c.shifted(m.dx, m.dy));
      cols.push_back(A);  // right-hand side column, split off below
      std::vector<Monomial> rows;
      const RatMatrix full = detail::coefficient_matrix(cols, &rows);
      RatMatrix lhs(full.rows(), full.cols() - 1);
      std::vector<Rat> rhs(full.rows());
      for (std::size_t i = 0; i < full.rows(); ++i) {
        for (std::size_t j = 0; j + 1 < full.cols(); ++j) lhs(i, j) = full(i, j);
        rhs[i] = -full(i, full.cols() - 1);
      }
      auto sol = solve(lhs, rhs, deadline);
      if (!sol) continue;
      for (std::size_t k = 0; k < A0.size(); ++k)
        if ((*sol)[k] != 0) A = A + A0[k] * BiPoly((*sol)[k]);
    } else if (!divides(c, A)) {
      continue;
    }
    if (A.is_zero() || !divides(c, A)) continue;
    if (!detail::is_one(gcd_bivar(A, B))) continue;
    FamilyMember m = detail::normalize_pair({A, c});
    if (seen.emplace(render_poly(m.A), render_poly(m.c)).second) out.push_back(std::move(m));
  }
  return out;
}

namespace detail {

inline Rat det_exact(std::vector<std::vector<Rat>> a) {
  const std::size_t k = a.size();
  Rat d(1);
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t piv = c;
    while (piv < k && a[piv][c] == 0) ++piv;
    if (piv == k) return Rat(0);
    if (piv != c) {
      std::swap(a[piv], a[c]);
      d = -d;
    }
    d *= a[c][c];
    for (std::size_t r = c + 1; r < k; ++r) {
      if (a[r][c] == 0) continue;
      const Rat f = a[r][c] / a[c][c];
      for (std::size_t j = c; j < k; ++j) a[r][j] -= f * a[c][j];
    }
  }
  return d;
}

// Rational mu for which (q0 + mu g) c_y = (H0 + mu H1) c can have a nonzero
// solution with deg_y c <= cany. The system is taken at x = 3; its Gram
// determinant is a polynomial in mu of degree <= 2 (cany + 1) whose rational
// roots are returned (none when it vanishes identically).
inline std::vector<Rat> pencil_roots(const BiPoly& q0, const BiPoly& g, const BiPoly& H0, const BiPoly& H1, int cany) {
  const Rat x0(3);
  const auto q0e = eval_x(q0, x0), ge = eval_x(g, x0), h0e = eval_x(H0, x0), h1e = eval_x(H1, x0);
  const std::size_t k = static_cast<std::size_t>(cany) + 1;
  auto gram_det = [&](const Rat& mu) {
    const auto q = upoly::add(q0e, upoly::scale(ge, mu));
    const auto h = upoly::add(h0e, upoly::scale(h1e, mu));
    std::vector<upoly::UPoly<Rat>> cols(k);
    for (std::size_t j = 0; j < k; ++j) {
      upoly::UPoly<Rat> col(j, Rat(0));
      col.insert(col.end(), h.begin(), h.end());
      col = upoly::scale(col, Rat(-1));
      if (j > 0) {
        upoly::UPoly<Rat> d(j - 1, Rat(0));
        d.insert(d.end(), q.begin(), q.end());
        col = upoly::add(col, upoly::scale(d, Rat(static_cast<long>(j))));
      }
      cols[j] = std::move(col);
    }
    std::vector<std::vector<Rat>> G(k, std::vector<Rat>(k));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i; j < k; ++j) {
        Rat s(0);
        for (std::size_t r = 0; r < std::min(cols[i].size(), cols[j].size()); ++r) s += cols[i][r] * cols[j][r];
        G[i][j] = G[j][i] = s;
      }
    return det_exact(std::move(G));
  };
  // Newton interpolation at mu = 0 .. 2k
  const std::size_t npts = 2 * k + 1;
  std::vector<Rat> xs(npts), dd(npts);
  for (std::size_t i = 0; i < npts; ++i) {
    xs[i] = Rat(static_cast<long>(i));
    dd[i] = gram_det(xs[i]);
  }
  for (std::size_t j = 1; j < npts; ++j)
    for (std::size_t i = npts - 1; i >= j; --i) dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j]);
  upoly::UPoly<Rat> poly;
  for (std::size_t i = npts; i-- > 0;) {
    // poly = poly * (mu - xs[i]) + dd[i]
    upoly::UPoly<Rat> shifted(poly.size() + 1, Rat(0));
    for (std::size_t t = 0; t < poly.size(); ++t) {
      shifted[t + 1] += poly[t];
      shifted[t] -= poly[t] * xs[i];
    }
    if (shifted.empty()) shifted.push_back(Rat(0));
    shifted[0] += dd[i];
    upoly::trim(shifted);
    poly = std::move(shifted);
  }
  std::vector<Rat> roots;
  if (poly.size() < 2) return roots;
  const auto ip = upoly::integer_primitive(poly).second;
  std::mt19937_64 rng(1);
  for (const auto& f : factor_x(ip, rng)) {
    if (f.poly.size() != 2) continue;
    Rat r(-f.poly[0], f.poly[1]);
    r.canonicalize();
    roots.push_back(r);
  }
  return roots;
}

}  // namespace detail

// Pairs A = c q found from the quotient q. With N = t B^(n-2) Nt the (A, c)
// identity reads Nt c = c W(q, B) + q B c_y, where W(q, B) = B q_y - q B_y.
// Reduced mod B this is Nt + q B_y = 0 (mod B), linear in q alone, and it
// fixes q up to multiples of rad(B). Then c solves q c_y = H c with
// H = (Nt - W(q, B)) / B, which determines c up to a factor in x.
// Pure powers A = p^a, c = p^(a-1) are found first: there the identity is
// Nt = a B p_y - p B_y, linear in p for each a.
inline std::vector<FamilyMember> quotient_members(const BiPoly& N, const BiPoly& t, const BiPoly& B, int n,
                                                  int degreeA, int cany, const Deadline& deadline = Deadline()) {
  std::vector<FamilyMember> out;
  if (cany < 1) return out;
  const auto Nt = divide_exact(N, t * pow(B, static_cast<unsigned>(n - 2)));
  if (!Nt) return out;
  const BiPoly By = partial(B, Var::y);
  const int degB = B.max_degree(Var::total), degNt = Nt->max_degree(Var::total);
  std::set<std::pair<std::string, std::string>> seen;
  auto emit = [&](const BiPoly& A, const BiPoly& c) {
    FamilyMember m = detail::normalize_pair({A, c});
    if (seen.emplace(render_poly(m.A), render_poly(m.c)).second) out.push_back(std::move(m));
  };

  for (int a = 2; a <= degreeA && a - 1 <= cany; ++a) {
    deadline.check();
    const auto pmonos = detail::monomials_total(degreeA / a);
    std::vector<BiPoly> cols;
    for (const auto& m : pmonos) {
      BiPoly col = -By.shifted(m.dx, m.dy);
      if (m.dy > 0) col = col + B.shifted(m.dx, m.dy - 1) * BiPoly(Rat(a * static_cast<long>(m.dy)));
      cols.push_back(std::move(col));
    }
    cols.push_back(*Nt);
    const RatMatrix full = detail::coefficient_matrix(cols);
    RatMatrix lhs(full.rows(), full.cols() - 1);
    std::vector<Rat> rhs(full.rows());
    for (std::size_t i = 0; i < full.rows(); ++i) {
      for (std::size_t j = 0; j + 1 < full.cols(); ++j) lhs(i, j) = full(i, j);
      rhs[i] = full(i, full.cols() - 1);
    }
    const auto sol = solve(lhs, rhs, deadline);
    if (!sol) continue;
    const BiPoly p = detail::combine(pmonos, *sol, 0);
    if (p.max_degree(Var::y) < 1 || (a - 1) * p.max_degree(Var::y) > cany) continue;
    emit(pow(p, static_cast<unsigned>(a)), pow(p, static_cast<unsigned>(a - 1)));
  }

  for (int D = 1; D < degreeA; ++D) {
    deadline.check();
    const auto qmonos = detail::monomials_total(D);
    const int ds = std::max(degNt, D + degB - 1) - degB;
    const auto smonos = ds >= 0 ? detail::monomials_total(ds) : std::vector<Monomial>{};
    std::vector<BiPoly> cols;
    for (const auto& m : qmonos) cols.push_back(By.shifted(m.dx, m.dy));
    for (const auto& m : smonos) cols.push_back(-B.shifted(m.dx, m.dy));
    cols.push_back(*Nt);
    const RatMatrix full = detail::coefficient_matrix(cols);
    RatMatrix lhs(full.rows(), full.cols() - 1);
    std::vector<Rat> rhs(full.rows());
    for (std::size_t i = 0; i < full.rows(); ++i) {
      for (std::size_t j = 0; j + 1 < full.cols(); ++j) lhs(i, j) = full(i, j);
      rhs[i] = -full(i, full.cols() - 1);
    }
    const auto sol = solve(lhs, rhs, deadline);
    if (!sol) continue;
    const BiPoly q0 = detail::combine(qmonos, *sol, 0);
    std::vector<BiPoly> dirs;
    for (const auto& v : nullspace(lhs, deadline)) dirs.push_back(detail::combine(qmonos, v, 0));

    // q is pinned when dirs is empty; one free direction is solved exactly,
    // more are tried at small integer offsets
    std::vector<BiPoly> qs{q0};
    if (dirs.size() == 1) {
      const auto H0 = divide_exact(*Nt - (B * partial(q0, Var::y) - q0 * By), B);
      const auto H1 = divide_exact(-(B * partial(dirs[0], Var::y) - dirs[0] * By), B);
      if (H0 && H1)
        for (const auto& mu : detail::pencil_roots(q0, dirs[0], *H0, *H1, cany))
          if (mu != 0) qs.push_back(q0 + dirs[0] * BiPoly(mu));
    }
    int r = 0;
    if (dirs.size() <= 4) r = 2;
    else if (dirs.size() <= 6) r = 1;
    if (r > 0 && !dirs.empty()) {
      std::vector<int> g(dirs.size(), -r);
      for (;;) {
        if (std::any_of(g.begin(), g.end(), [](int v) { return v != 0; })) {
          BiPoly q = q0;
          for (std::size_t k = 0; k < dirs.size(); ++k)
            if (g[k] != 0) q = q + dirs[k] * BiPoly(static_cast<long>(g[k]));
          qs.push_back(std::move(q));
        }
        std::size_t k = 0;
        while (k < g.size() && g[k] == r) g[k++] = -r;
        if (k == g.size()) break;
        ++g[k];
      }
    }

    std::vector<Monomial> cmonos;
    for (const auto& m : detail::monomials_total(degreeA - D))
      if (static_cast<int>(m.dy) <= cany) cmonos.push_back(m);
    for (const auto& q : qs) {
      deadline.check();
      if (q.max_degree(Var::y) < 1) continue;
      const auto H = divide_exact(*Nt - (B * partial(q, Var::y) - q * By), B);
      if (!H) continue;
      std::vector<BiPoly> ccols;
      for (const auto& m : cmonos) {
        BiPoly col = -(*H).shifted(m.dx, m.dy);
        if (m.dy > 0) col = col + q.shifted(m.dx, m.dy - 1) * BiPoly(Rat(m.dy));
        ccols.push_back(std::move(col));
      }
      const auto kernel = nullspace(detail::coefficient_matrix(ccols), deadline);
      if (kernel.empty()) continue;
      const BiPoly c = detail::primitive_in_y(detail::combine(cmonos, kernel[0], 0));
      if (c.max_degree(Var::y) < 1) continue;
      emit(c * q, c);
    }
  }
  return out;
}

namespace detail {

inline bool eval_x_modp(const BiPoly& p, modp::u64 a, modp::u64 q, modp::Poly& out) {
  out.assign(static_cast<std::size_t>(std::max(p.max_degree(Var::y) + 1, 0)), 0);
  for (const auto& t : p.terms()) {
    const modp::u64 den = modp::reduce(t.coef.get_den(), q);
    if (den == 0) return false;
    modp::u64 v = modp::mul(modp::reduce(t.coef.get_num(), q), modp::inv(den, q), q);
    v = modp::mul(v, modp::pow(a, t.mono.dx, q), q);
    out[t.mono.dy] = modp::add(out[t.mono.dy], v, q);
  }
  modp::trim(out);
  return true;
}

// Unique solution of sum_i v_i cols[i] = rhs mod q, or nullopt if the columns
// are dependent mod q. `inconsistent` is set when a solution cannot exist.
inline std::optional<std::vector<modp::u64>> local_solve_modp(const std::vector<modp::Poly>& cols,
                                                              const modp::Poly& rhs, modp::u64 q,
                                                              bool& inconsistent) {
  std::size_t rows = rhs.size();
  for (const auto& c : cols) rows = std::max(rows, c.size());
  const std::size_t m = cols.size();
  std::vector<std::vector<modp::u64>> a(rows, std::vector<modp::u64>(m + 1, 0));
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < cols[j].size(); ++k) a[k][j] = cols[j][k];
  for (std::size_t k = 0; k < rhs.size(); ++k) a[k][m] = rhs[k];
  std::size_t r = 0;
  for (std::size_t c = 0; c <= m && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && a[piv][c] == 0) ++piv;
    if (piv == rows) {
      if (c < m) return std::nullopt;
      continue;
    }
    if (c == m) {
      inconsistent = true;
      return std::nullopt;
    }
    std::swap(a[piv], a[r]);
    const modp::u64 inv = modp::inv(a[r][c], q);
    for (std::size_t k = c; k <= m; ++k) a[r][k] = modp::mul(a[r][k], inv, q);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      const modp::u64 f = a[i][c];
      for (std::size_t k = c; k <= m; ++k) a[i][k] = modp::sub(a[i][k], modp::mul(f, a[r][k], q), q);
    }
    ++r;
  }
  if (r < m) return std::nullopt;
  std::vector<modp::u64> v(m);
  for (std::size_t i = 0; i < m; ++i) v[i] = a[i][m];
  return v;
}

// Proof of inconsistency for the f-system with deg_x f_i <= dx, computed mod a
// word prime. At dx + 2 points x = a the system in the values f_i(a) is
// solved; with independent columns at every point used, the stacked system
// has full column rank mod q, and hence over Q. A failing local system, or
// values that do not fit degree dx, then rule out any rational solution.
// Points where the local columns are dependent are skipped. Returns false
// when nothing can be concluded.
inline bool f_system_inconsistent(const BiPoly& M, const BiPoly& c, const BiPoly& t, const BiPoly& A,
                                  const BiPoly& B, int n, int dx) {
  const modp::u64 q = modp::word_primes()[1];
  const std::size_t K = static_cast<std::size_t>(dx) + 2;
  const BiPoly Ax = partial(A, Var::x), Bx = partial(B, Var::x);
  std::vector<modp::u64> pts;
  std::vector<std::vector<modp::u64>> vals(static_cast<std::size_t>(n) + 1);
  modp::Poly Ma, ca, ta, Aa, Ba, Axa, Bxa;
  for (modp::u64 step = 1; pts.size() < K && step <= 4 * K; ++step) {
    const modp::u64 a = (step * 7919 + 3) % q;
    if (!eval_x_modp(M, a, q, Ma) || !eval_x_modp(c, a, q, ca) || !eval_x_modp(t, a, q, ta) ||
        !eval_x_modp(A, a, q, Aa) || !eval_x_modp(B, a, q, Ba) || !eval_x_modp(Ax, a, q, Axa) ||
        !eval_x_modp(Bx, a, q, Bxa))
      return false;
    modp::Poly tw = modp::mul(ta, modp::sub(modp::mul(Ba, Axa, q), modp::mul(Aa, Bxa, q), q), q);
    for (int k = 0; k < n - 2; ++k) tw = modp::mul(tw, Ba, q);
    const modp::Poly R = modp::add(modp::mul(Ma, ca, q), tw, q);
    std::vector<modp::Poly> Ap(static_cast<std::size_t>(n) + 1, modp::Poly{1}), Bp = Ap;
    for (int i = 1; i <= n; ++i) {
      Ap[i] = modp::mul(Ap[i - 1], Aa, q);
      Bp[i] = modp::mul(Bp[i - 1], Ba, q);
    }
    std::vector<modp::Poly> cols(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) cols[i] = modp::mul(Ap[i], Bp[n - i], q);
    bool bad = false;
    auto v = local_solve_modp(cols, R, q, bad);
    if (bad) return true;
    if (!v) continue;
    pts.push_back(a);
    for (int i = 0; i <= n; ++i) vals[i].push_back((*v)[i]);
  }
  if (pts.size() < K) return false;
  // the interpolant of degree <= dx + 1 has top coefficient
  // sum_j v_j / prod_{l != j} (a_j - a_l); it vanishes iff degree <= dx
  std::vector<modp::u64> w(K);
  for (std::size_t j = 0; j < K; ++j) {
    modp::u64 d = 1;
    for (std::size_t l = 0; l < K; ++l)
      if (l != j) d = modp::mul(d, modp::sub(pts[j], pts[l], q), q);
    w[j] = modp::inv(d, q);
  }
  for (const auto& v : vals) {
    modp::u64 top = 0;
    for (std::size_t j = 0; j < K; ++j) top = modp::add(top, modp::mul(v[j], w[j], q), q);
    if (top != 0) return true;
  }
  return false;
}

}  // namespace detail

// f_0..f_n with sum f_i A^i B^(n-i) = M c + t (B A_x - A B_x) B^(n-2), or
// nullopt when no polynomial solution exists.
inline std::optional<std::vector<BiPoly>> solve_f(const BiPoly& M, const BiPoly& c, const BiPoly& t, const BiPoly& A,
                                                  const BiPoly& B, int n, const Deadline& deadline = Deadline()) {
  {
    // an upper bound on deg_x R is enough for the modular rejection
    const int ax = A.max_degree(Var::x), bx = B.max_degree(Var::x);
    const int bound = std::max(M.max_degree(Var::x) + c.max_degree(Var::x),
                               t.max_degree(Var::x) + ax + bx + (n - 2) * bx);
    if (detail::f_system_inconsistent(M, c, t, A, B, n, bound)) return std::nullopt;
  }
  const BiPoly R =
      M * c + t * (B * partial(A, Var::x) - A * partial(B, Var::x)) * pow(B, static_cast<unsigned>(n - 2));
  if (R.is_zero()) return std::vector<BiPoly>(static_cast<std::size_t>(n) + 1);
  const int dx = R.max_degree(Var::x);
  std::vector<BiPoly> base(static_cast<std::size_t>(n) + 1);
  std::vector<BiPoly> Apow(base.size(), BiPoly(1L)), Bpow(base.size(), BiPoly(1L));
  for (std::size_t i = 1; i < base.size(); ++i) {
    Apow[i] = Apow[i - 1] * A;
    Bpow[i] = Bpow[i - 1] * B;
  }
  std::vector<BiPoly> cols;
  std::vector<std::pair<int, int>> which;  // (i, k) for column x^k A^i B^(n-i)
  for (int i = 0; i <= n; ++i) {
    base[i] = Apow[i] * Bpow[n - i];
    for (int k = 0; k <= dx; ++k) {
      cols.push_back(base[i].shifted(static_cast<unsigned>(k), 0));
      which.emplace_back(i, k);
    }
  }
  cols.push_back(R);
  const RatMatrix full = detail::coefficient_matrix(cols);
  RatMatrix lhs(full.rows(), full.cols() - 1);
  std::vector<Rat> rhs(full.rows());
  for (std::size_t r = 0; r < full.rows(); ++r) {
    for (std::size_t j = 0; j + 1 < full.cols(); ++j) lhs(r, j) = full(r, j);
    rhs[r] = full(r, full.cols() - 1);
  }
  auto sol = solve(lhs, rhs, deadline);
  if (!sol) return std::nullopt;
  std::vector<BiPoly> f(base.size());
  std::vector<std::vector<Term>> terms(base.size());
  for (std::size_t j = 0; j < which.size(); ++j)
    if ((*sol)[j] != 0)
      terms[which[j].first].push_back({{static_cast<unsigned>(which[j].second), 0}, (*sol)[j]});
  for (std::size_t i = 0; i < base.size(); ++i) f[i] = BiPoly::from_terms(std::move(terms[i]));
  return f;
}

namespace detail {

struct Task {
  DegreeCase dc;
  BiPoly B;
};

struct TaskResult {
  std::vector<Reduction> reductions;
  std::optional<SolutionFamily> family;
};

inline TaskResult run_task(const BiPoly& M, const BiPoly& N, const BiPoly& t, int degreeA, const Task& task,
                           const ReducerOptions& opt, const Deadline& deadline) {
  TaskResult res;
  auto fam = solve_A_and_c(N, t, task.B, task.dc.n, degreeA, task.dc.cany, deadline);
  if (!fam) return res;
  auto members = specialize_family(*fam, task.B, opt, deadline);
  for (auto& m : quotient_members(N, t, task.B, task.dc.n, degreeA, task.dc.cany, deadline))
    if (std::none_of(members.begin(), members.end(), [&](const FamilyMember& e) { return e.A == m.A && e.c == m.c; }))
      members.push_back(std::move(m));
  for (const auto& m : members) {
    deadline.check();
    // only a transformation of exactly the requested degree counts
    if (m.A.max_degree(Var::total) != degreeA) continue;
    if (!divides(m.c, m.A) || !is_one(gcd_bivar(m.A, task.B))) continue;
    auto f = solve_f(M, m.c, t, m.A, task.B, task.dc.n, deadline);
    if (!f) continue;
    Reduction r{task.dc.n, m.A, task.B, m.c, t, std::move(*f)};
    if (!verify_reduction(M, N, r)) throw std::logic_error("degree_test: solved reduction fails verification");
    res.reductions.push_back(std::move(r));
  }
  if (opt.print_candidates) res.family = std::move(fam);
  return res;
}

}  // namespace detail

// Degree cases of the search, in enumeration order.
inline std::vector<DegreeCase> degree_cases(int degM_y, int degN_y, int max_mult, int degreeA) {
  std::vector<DegreeCase> out;
  for (int cany = 0; cany < degreeA; ++cany) {
    const int inew = degM_y + cany, jnew = degN_y + cany;
    // B = 1 cases are not limited by the factor multiplicities of N
    const int nmax = std::max(max_mult + 2, inew);
    for (int n = 3; n <= nmax; ++n) {
      const int lo = std::max(detail::ceil_div(inew, n), detail::ceil_div(jnew + 1, n));
      for (int i2 = lo; i2 <= jnew + 1; ++i2) {
        for (int i3 = 0; i3 <= i2; ++i3) {
          if (i2 + i3 - 1 + (n - 2) * i3 == jnew && inew == n * i2 && i2 > cany)
            out.push_back({n, i2, i3, cany, inew, jnew, true});
          if (i2 + i3 - 1 + (n - 2) * i2 == jnew && (inew == n * i2 || inew <= jnew + 1) && i3 >= cany)
            out.push_back({n, i3, i2, cany, inew, jnew, false});
        }
      }
    }
  }
  std::erase_if(out, [&](const DegreeCase& d) {
    return d.degA_y > degreeA || (d.degB_y > 0 && d.n > max_mult + 2);
  });
  return out;
}

inline DegreeTestResult degree_test(const BiPoly& M_in, const BiPoly& N_in, int degreeA,
                                    const ReducerOptions& opt = ReducerOptions()) {
  if (N_in.is_zero()) throw std::invalid_argument("degree_test: N must be nonzero");
  if (degreeA < 1) throw std::invalid_argument("degree_test: degreeA must be >= 1");
  const Deadline deadline(opt.max_seconds);
  DegreeTestResult result;
  if (M_in.is_zero()) return result;

  // work with the canceled pair
  BiPoly M = M_in, N = N_in;
  const BiPoly g = gcd_bivar(M, N);
  if (!g.is_constant()) {
    M = *divide_exact(M, g);
    N = *divide_exact(N, g);
  }

  const SplitN split = split_x_only(N);
  int max_mult = 0;
  for (const auto& f : split.yfactors) max_mult = std::max(max_mult, f.mult);
  const int degM_y = M.max_degree(Var::y), degN_y = N.max_degree(Var::y);

  std::vector<detail::Task> tasks;
  std::set<std::tuple<int, int, std::string>> seen;
  for (const auto& dc : degree_cases(degM_y, degN_y, max_mult, degreeA)) {
    for (auto& B : enumerate_B_candidates(split, dc.n, dc.degB_y)) {
      if (seen.emplace(dc.cany, dc.n, render_poly(B)).second) tasks.push_back({dc, std::move(B)});
    }
  }
  result.cases = tasks.size();

  std::vector<detail::TaskResult> results(tasks.size());
  const unsigned nthreads = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(tasks.size())));
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      deadline.check();
      results[i] = detail::run_task(M, N, split.t, degreeA, tasks[i], opt, deadline);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::atomic<bool> stop{false};
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= tasks.size() || stop) return;
        try {
          results[i] = detail::run_task(M, N, split.t, degreeA, tasks[i], opt, deadline);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mu);
          if (!err) err = std::current_exception();
          stop = true;
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < nthreads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
  }

  std::set<std::string> emitted;
  for (auto& r : results) {
    for (auto& red : r.reductions) {
      if (!verify_reduction(M, N, red)) throw std::logic_error("degree_test: unsound reduction");
      if (emitted.insert(write_reduction_text(red)).second) result.reductions.push_back(std::move(red));
    }
    if (r.family) result.families.push_back(std::move(*r.family));
  }
  return result;
}

inline DegreeTestResult degree_test(const OdeProblem& p, ReducerOptions opt = ReducerOptions()) {
  opt.print_candidates = opt.print_candidates || p.options.print_candidates;
  if (opt.max_seconds <= 0 && p.options.max_seconds) opt.max_seconds = *p.options.max_seconds;
  return degree_test(p.M, p.N, p.degreeA, opt);
}

}  // namespace odereduce
