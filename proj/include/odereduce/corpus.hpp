#pragma once

// Forward direction: push a polynomial ODE t y' = sum f_i y^i through
// y -> A/B, cancel the common factor of the resulting numerator and
// denominator, and emit problems whose certificate is known.

#include <odereduce/bipoly.hpp>
#include <odereduce/gcd.hpp>
#include <odereduce/io.hpp>
#include <odereduce/reducer.hpp>

#include <json.hpp>

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace odereduce {

struct GenSpec {
  int n = 3;
  std::vector<BiPoly> f;  // f[0..n], polynomials in x
  BiPoly t{1L};
  BiPoly A, B;
  std::uint64_t seed = 0;
};

struct Expansion {
  BiPoly M, N, c;
};

// Num = sum f_i A^i B^(n-i) - t (B A_x - A B_x) B^(n-2),
// Den = t (B A_y - A B_y) B^(n-2), c = gcd(Num, Den), (M, N) = (Num, Den) / c.
inline Expansion expand_transform(const GenSpec& s) {
  if (s.n < 2 || s.f.size() != static_cast<std::size_t>(s.n) + 1)
    throw std::invalid_argument("spec needs f0..fn with n >= 2");
  if (s.B.is_zero()) throw std::invalid_argument("B must be nonzero");
  if (s.A.is_zero()) throw std::invalid_argument("A must be nonzero");
  if (s.t.is_zero()) throw std::invalid_argument("t must be nonzero");
  const BiPoly Bn2 = pow(s.B, static_cast<unsigned>(s.n - 2));
  const BiPoly Den = s.t * (s.B * partial(s.A, Var::y) - s.A * partial(s.B, Var::y)) * Bn2;
  if (Den.is_zero()) throw std::invalid_argument("degenerate transformation: denominator vanishes");
  BiPoly Num = -(s.t * (s.B * partial(s.A, Var::x) - s.A * partial(s.B, Var::x)) * Bn2);
  BiPoly Ai(1L);
  std::vector<BiPoly> Bpow(static_cast<std::size_t>(s.n) + 1, BiPoly(1L));
  for (int i = 1; i <= s.n; ++i) Bpow[i] = Bpow[i - 1] * s.B;
  for (int i = 0; i <= s.n; ++i) {
    if (!s.f[i].is_zero()) Num = Num + s.f[i] * Ai * Bpow[s.n - i];
    if (i < s.n) Ai *= s.A;
  }
  Expansion e;
  e.c = Num.is_zero() ? normalized(Den) : gcd_bivar(Num, Den);
  e.M = *divide_exact(Num, e.c);
  e.N = *divide_exact(Den, e.c);
  if (e.M * e.c != Num || e.N * e.c != Den) throw std::logic_error("expand_transform: cancellation mismatch");
  return e;
}

inline Reduction certificate(const GenSpec& s, const Expansion& e) { return {s.n, s.A, s.B, e.c, s.t, s.f}; }

// Spec file: lines n, A, B, t (default 1), f0..fn (default 0), seed (optional).
inline GenSpec read_spec(std::istream& in) {
  auto tf = detail::read_transform_fields(in, {"seed"});
  GenSpec s{tf.n, tf.f, tf.t, tf.A, tf.B, 0};
  if (tf.extra.count("seed")) s.seed = static_cast<std::uint64_t>(detail::parse_long("seed", tf.extra["seed"]));
  return s;
}

inline std::string write_spec(const GenSpec& s) {
  std::string out = "n = " + std::to_string(s.n) + "\n";
  out += "A = " + render_poly(s.A) + "\n";
  out += "B = " + render_poly(s.B) + "\n";
  out += "t = " + render_poly(s.t) + "\n";
  for (std::size_t i = 0; i < s.f.size(); ++i) out += "f" + std::to_string(i) + " = " + render_poly(s.f[i]) + "\n";
  out += "seed = " + std::to_string(s.seed) + "\n";
  return out;
}

struct Instance {
  GenSpec spec;
  OdeProblem problem;
  BiPoly c;
  int attempts = 0;  // draws used, including resampled ones
};

namespace detail {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  int coef(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  int nonzero(int lo, int hi) {
    for (;;)
      if (int v = coef(lo, hi); v != 0) return v;
  }
  bool coin() { return coef(0, 1) == 1; }

  // One factor from the shape pool y + q(x), x y + k, y^2 + a1 x + a0.
  BiPoly factor(int max_total) {
    const BiPoly x = BiPoly::x(), y = BiPoly::y();
    for (;;) {
      const int shape = coef(0, 2);
      if (shape == 0) {
        const int dq = coef(0, std::min(2, max_total));
        BiPoly q(static_cast<long>(coef(-3, 3)));
        if (dq >= 1) q = q + x * BiPoly(static_cast<long>(coef(-3, 3)));
        if (dq >= 2) q = q + x * x * BiPoly(static_cast<long>(nonzero(-3, 3)));
        return y + q;
      }
      if (shape == 1 && max_total >= 2) return x * y + BiPoly(static_cast<long>(nonzero(-3, 3)));
      if (shape == 2 && max_total >= 2)
        return y * y + x * BiPoly(static_cast<long>(nonzero(-3, 3))) + BiPoly(static_cast<long>(coef(-3, 3)));
    }
  }

  BiPoly xpoly(int maxdeg, bool nonzero_lead = false) {
    const int d = coef(0, maxdeg);
    std::vector<Term> terms;
    for (int k = 0; k <= d; ++k) {
      int v = k == d && nonzero_lead ? nonzero(-3, 3) : coef(-3, 3);
      if (v != 0) terms.push_back({{static_cast<unsigned>(k), 0}, Rat(v)});
    }
    return BiPoly::from_terms(std::move(terms));
  }

 private:
  std::mt19937_64 rng_;
};

inline bool x_part_matches(const BiPoly& N, const BiPoly& t) {
  const SplitN s = split_x_only(N);
  return normalized(s.t) == normalized(t);
}

}  // namespace detail

// Random instance with a repeated factor in A and f0 = 0, so that a factor of
// A cancels. Deterministic in (n, maxdeg, seed). maxdeg bounds the total
// degree of A.
inline Instance random_instance(int n, int maxdeg, std::uint64_t seed) {
  if (n != 3 && n != 4) throw std::invalid_argument("random_instance: n must be 3 or 4");
  if (maxdeg < 2 || maxdeg > 16) throw std::invalid_argument("random_instance: maxdeg must be in 2..16");
  detail::Sampler rs(seed);
  const BiPoly x = BiPoly::x();
  for (int attempt = 1; attempt <= 100; ++attempt) {
    GenSpec s;
    s.n = n;
    s.seed = seed;
    // A = p^alpha * (other factors), alpha >= 2
    BiPoly p = rs.factor(maxdeg / 2);
    const int dp = p.max_degree(Var::total);
    const int alpha = rs.coef(2, std::max(2, maxdeg / dp));
    if (alpha * dp > maxdeg) continue;
    BiPoly A = pow(p, static_cast<unsigned>(alpha));
    int budget = maxdeg - alpha * dp;
    while (budget > 0 && rs.coin()) {
      BiPoly q = rs.factor(budget);
      if (q.max_degree(Var::total) > budget) break;
      A *= q;
      budget -= q.max_degree(Var::total);
    }
    // B from one or two factors with exponents 1..2, coprime to A
    BiPoly B(1L);
    const int nb = rs.coef(1, 2);
    for (int k = 0; k < nb; ++k) B *= pow(rs.factor(3), static_cast<unsigned>(rs.coef(1, 2)));
    if (!detail::is_one(gcd_bivar(A, B))) continue;

    switch (rs.coef(0, 2)) {
      case 0: s.t = BiPoly(1L); break;
      case 1: s.t = x; break;
      default: s.t = x + BiPoly(static_cast<long>(rs.nonzero(-3, 3))); break;
    }
    s.f.assign(static_cast<std::size_t>(n) + 1, BiPoly());
    for (int i = 1; i < n; ++i) s.f[i] = rs.xpoly(1);
    s.f[n] = rs.xpoly(1, true);
    s.A = normalized(A);
    s.B = normalized(B);

    Expansion e;
    try {
      e = expand_transform(s);
    } catch (const std::invalid_argument&) {
      continue;
    }
    // the canceled factor must divide A, and the x-only part of N must be t
    if (e.c.is_constant() || !divides(e.c, s.A)) continue;
    if (!detail::x_part_matches(e.N, s.t)) continue;
    Instance inst;
    inst.spec = std::move(s);
    inst.problem.M = e.M;
    inst.problem.N = e.N;
    inst.problem.degreeA = inst.spec.A.max_degree(Var::total);
    inst.c = e.c;
    inst.attempts = attempt;
    return inst;
  }
  throw std::runtime_error("random_instance: resampling exhausted after 100 draws");
}

inline nlohmann::json manifest_entry(const std::string& file, const Instance& inst) {
  return {{"file", file},
          {"seed", inst.spec.seed},
          {"n", inst.spec.n},
          {"degreeA", inst.problem.degreeA},
          {"attempts", inst.attempts},
          {"certificate", reduction_to_json(certificate(inst.spec, {inst.problem.M, inst.problem.N, inst.c}))}};
}

}  // namespace odereduce
