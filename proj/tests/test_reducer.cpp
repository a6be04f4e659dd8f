#include <odereduce/odereduce.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <optional>

#include "fixtures.hpp"

using namespace odereduce;

namespace {

BiPoly P(const char* s) { return parse_poly(s); }

// (t, f) and (t', f') describe the same reduced ODE when they differ by one
// nonzero rational factor.
bool same_ode(const BiPoly& t1, const std::vector<BiPoly>& f1, const BiPoly& t2, const std::vector<BiPoly>& f2) {
  if (f1.size() != f2.size() || t1.is_zero() || t2.is_zero()) return false;
  const Rat s = t2.leading_coeff() / t1.leading_coeff();
  if (t1 * BiPoly(s) != t2) return false;
  for (std::size_t i = 0; i < f1.size(); ++i)
    if (f1[i] * BiPoly(s) != f2[i]) return false;
  return true;
}

bool proportional(const BiPoly& a, const BiPoly& b) { return normalized(a) == normalized(b); }

struct Abel {
  GenSpec spec = fixtures::abel_example();
  Expansion e = expand_transform(spec);
  SplitN split = split_x_only(e.N);
};

const Abel& abel() {
  static const Abel a;
  return a;
}

std::optional<Reduction> find(const std::vector<Reduction>& rs, const BiPoly& B) {
  for (const auto& r : rs)
    if (proportional(r.B, B)) return r;
  return std::nullopt;
}

}  // namespace

TEST(DegreeTest, AbelExample) {
  const auto& a = abel();
  const DegreeTestResult res = degree_test(a.e.M, a.e.N, 4);
  ASSERT_EQ(res.reductions.size(), 1u);
  const Reduction& r = res.reductions[0];
  EXPECT_EQ(r.n, 3);
  EXPECT_TRUE(proportional(r.B, a.spec.B));
  EXPECT_TRUE(proportional(r.c, P("x + y + 1")));
  EXPECT_TRUE(same_ode(a.spec.t, a.spec.f, r.t, r.f)) << render_ode(r.t, r.f);
  EXPECT_TRUE(verify_reduction(a.e.M, a.e.N, r));
}

TEST(DegreeTest, SquareSubstitution) {
  const DegreeTestResult res = degree_test(P("y^5"), BiPoly(2L), 2);
  bool hit = false;
  for (const auto& r : res.reductions) {
    EXPECT_TRUE(verify_reduction(P("y^5"), BiPoly(2L), r));
    if (r.n == 3 && proportional(r.A, P("y^2")) && proportional(r.B, BiPoly(1L)) && proportional(r.c, P("y")))
      hit = hit || same_ode(BiPoly(1L), {BiPoly(), BiPoly(), BiPoly(), BiPoly(1L)}, r.t, r.f);
  }
  EXPECT_TRUE(hit);
}

TEST(DegreeTest, UnsatisfiableDegrees) {
  EXPECT_TRUE(degree_test(P("y^2 + x"), BiPoly(1L), 1).reductions.empty());
  EXPECT_TRUE(degree_cases(2, 0, 0, 1).empty());
}

TEST(DegreeTest, CancelsCommonFactorFirst) {
  const auto& a = abel();
  const BiPoly g = P("x*y + 7");
  const DegreeTestResult res = degree_test(a.e.M * g, a.e.N * g, 4);
  ASSERT_EQ(res.reductions.size(), 1u);
  EXPECT_TRUE(verify_reduction(a.e.M, a.e.N, res.reductions[0]));
}

TEST(DegreeTest, Preconditions) {
  EXPECT_THROW(degree_test(P("y"), BiPoly(), 2), std::invalid_argument);
  EXPECT_THROW(degree_test(P("y"), BiPoly(1L), 0), std::invalid_argument);
  EXPECT_TRUE(degree_test(BiPoly(), BiPoly(1L), 2).reductions.empty());
}

TEST(DegreeCases, AbelCaseIsEnumerated) {
  const auto& a = abel();
  int max_mult = 0;
  for (const auto& f : a.split.yfactors) max_mult = std::max(max_mult, f.mult);
  bool found = false;
  for (const auto& d : degree_cases(a.e.M.max_degree(Var::y), a.e.N.max_degree(Var::y), max_mult, 4))
    if (d.n == 3 && d.cany == 1 && d.degB_y == 4) found = true;
  EXPECT_TRUE(found);
}

TEST(BCandidates, Examples) {
  const auto& a = abel();
  const auto c3 = enumerate_B_candidates(a.split, 3, 4);
  EXPECT_TRUE(std::any_of(c3.begin(), c3.end(), [&](const BiPoly& b) { return b == normalized(a.spec.B); }));
  // every candidate obeys the multiplicity bound and is distinct
  for (std::size_t i = 0; i < c3.size(); ++i) {
    EXPECT_EQ(c3[i].max_degree(Var::y), 4);
    for (std::size_t j = i + 1; j < c3.size(); ++j) EXPECT_NE(c3[i], c3[j]);
    for (const auto& f : a.split.yfactors) {
      int e = 0;
      BiPoly q = c3[i];
      while (auto d = divide_exact(q, f.poly)) {
        q = *d;
        ++e;
      }
      EXPECT_LE(e * 2 - 1, f.mult);
    }
  }
  EXPECT_EQ(enumerate_B_candidates(a.split, 3, 0), (std::vector<BiPoly>{BiPoly(1L)}));
  EXPECT_EQ(enumerate_B_candidates(SplitN{BiPoly(1L), {}}, 4, 0), (std::vector<BiPoly>{BiPoly(1L)}));

  const GenSpec d = fixtures::abel_example_dominant();
  const SplitN s2 = split_x_only(expand_transform(d).N);
  const auto c2 = enumerate_B_candidates(s2, 3, 4);
  EXPECT_TRUE(std::any_of(c2.begin(), c2.end(), [&](const BiPoly& b) { return b == normalized(d.B); }));
}

TEST(SolveAC, AbelFamily) {
  const auto& a = abel();
  // with t = x the generator at b_{1,0} = 1 is integral
  const auto fam = solve_A_and_c(a.e.N, P("x"), a.spec.B, 3, 4, 1);
  ASSERT_TRUE(fam);
  ASSERT_EQ(fam->dim(), 1u);
  EXPECT_EQ(fam->basis[0].c, P("x + y + 1"));
  EXPECT_EQ(fam->basis[0].A,
            P("x^2*y^2 + 2*x*y^3 + y^4 + x^3 + 2*x^2*y + 3*x*y^2 + 2*y^3 + x^2 - x - 2*y - 1"));
  EXPECT_EQ(fam->basis[0].A, a.spec.A);
}

TEST(SolveAC, WrongDenominatorHasNoSolution) {
  const auto& a = abel();
  EXPECT_FALSE(solve_A_and_c(a.e.N, a.split.t, P("(x*y-2)^4"), 3, 4, 1));
  EXPECT_THROW(solve_A_and_c(a.e.N, a.split.t, a.spec.B, 2, 4, 1), std::invalid_argument);
  EXPECT_THROW(solve_A_and_c(a.e.N, a.split.t, a.spec.B, 3, 4, 4), std::invalid_argument);
}

TEST(SolveAC, DominantFamilyHasTwoParameters) {
  const GenSpec d = fixtures::abel_example_dominant();
  const Expansion e = expand_transform(d);
  const SplitN s = split_x_only(e.N);
  const auto fam = solve_A_and_c(e.N, s.t, d.B, 3, 4, 3);
  ASSERT_TRUE(fam);
  ASSERT_EQ(fam->dim(), 2u);
  const BiPoly& c1 = fam->basis[0].c;
  const BiPoly& c2 = fam->basis[1].c;
  // b_{3,0} is the x^3 coordinate, b_{2,1} the x^2 y one
  EXPECT_EQ(c1.coeff(3, 0), 1);
  EXPECT_EQ(c1.coeff(2, 1), 0);
  EXPECT_EQ(c2.coeff(3, 0), 0);
  EXPECT_EQ(c2.coeff(2, 1), 1);
  // parametric shape: b21 x^2 y + b21 x y^2 + b21/3 y^3
  EXPECT_EQ(c2.coeff(1, 2), 1);
  EXPECT_EQ(c2.coeff(0, 3), Rat(1, 3));

  // (b30, b21) = (1, 3) against the binomial expansion of (y+x+1)^3
  const BiPoly c = c1 + c2 * BiPoly(3L);
  EXPECT_EQ(c, P("x^3 + 3*x^2*y + 3*x*y^2 + y^3 + 3*x^2 + 6*x*y + 3*y^2 + 3*x + 3*y + 1"));
  const BiPoly A = fam->basis[0].A + fam->basis[1].A * BiPoly(3L);
  EXPECT_TRUE(divides(c, A));

  const auto members = specialize_family(*fam, d.B);
  ASSERT_FALSE(members.empty());
  bool hit = false;
  for (const auto& m : members) {
    EXPECT_TRUE(divides(m.c, m.A));
    EXPECT_TRUE(gcd_bivar(m.A, d.B).is_constant());
    if (proportional(m.c, P("(x+y+1)^3"))) hit = true;
  }
  EXPECT_TRUE(hit);
}

TEST(Specialize, SingleGenerator) {
  const auto& a = abel();
  const auto fam = solve_A_and_c(a.e.N, a.split.t, a.spec.B, 3, 4, 1);
  ASSERT_TRUE(fam);
  const auto members = specialize_family(*fam, a.spec.B);
  ASSERT_EQ(members.size(), 1u);
  EXPECT_TRUE(proportional(members[0].A, a.spec.A));
  EXPECT_TRUE(proportional(members[0].c, P("x + y + 1")));
}

TEST(Specialize, NoGridPointDivides) {
  SolutionFamily fam;
  fam.n = 3;
  fam.B = BiPoly(1L);
  fam.t = BiPoly(1L);
  fam.basis = {{P("y^2 + 2"), P("y")}, {P("x^2 + 1"), P("x")}};
  EXPECT_TRUE(specialize_family(fam, fam.B).empty());
  EXPECT_TRUE(specialize_family(SolutionFamily{}, BiPoly(1L)).empty());
}

TEST(Quotient, AbelExample) {
  const auto& a = abel();
  const auto ms = quotient_members(a.e.N, a.split.t, a.spec.B, 3, 4, 1);
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_TRUE(proportional(ms[0].A, a.spec.A));
  EXPECT_TRUE(proportional(ms[0].c, P("x + y + 1")));
}

TEST(Quotient, DominantExampleIsAPurePower) {
  const GenSpec d = fixtures::abel_example_dominant();
  const Expansion e = expand_transform(d);
  const auto ms = quotient_members(e.N, split_x_only(e.N).t, d.B, 3, 4, 3);
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_TRUE(proportional(ms[0].A, P("(x + y + 1)^4")));
  EXPECT_TRUE(proportional(ms[0].c, P("(x + y + 1)^3")));
}

// c = (y + 2)^4 has coordinates 8, 24, 32 on the reduced family basis, out of
// grid range; the quotient path finds it.
TEST(Quotient, PowerBeyondGrid) {
  GenSpec s;
  s.n = 3;
  s.A = P("(y + 2)^5");
  s.B = P("y^3 + 2*x*y + y^2 + 2*x - 3*y - 3");
  s.t = P("x - 3");
  s.f = {BiPoly(), P("-2*x + 1"), P("x - 1"), BiPoly(-2L)};
  const Expansion e = expand_transform(s);
  EXPECT_EQ(e.c, P("(y + 2)^4"));
  const SplitN split = split_x_only(e.N);
  const auto fam = solve_A_and_c(e.N, split.t, s.B, 3, 5, 4);
  ASSERT_TRUE(fam);
  for (const auto& m : specialize_family(*fam, s.B)) EXPECT_FALSE(proportional(m.A, s.A));
  const auto ms = quotient_members(e.N, split.t, s.B, 3, 5, 4);
  EXPECT_TRUE(std::any_of(ms.begin(), ms.end(), [&](const FamilyMember& m) { return proportional(m.A, s.A); }));
  const auto res = degree_test(e.M, e.N, 5);
  ASSERT_FALSE(res.reductions.empty());
  EXPECT_TRUE(proportional(res.reductions[0].A, s.A));
  EXPECT_TRUE(verify_reduction(e.M, e.N, res.reductions[0]));
}

TEST(Quotient, NonconstantFactorRequired) {
  const auto& a = abel();
  EXPECT_TRUE(quotient_members(a.e.N, a.split.t, a.spec.B, 3, 4, 0).empty());
  EXPECT_TRUE(quotient_members(a.e.N, a.split.t, P("(x*y-2)^4"), 3, 4, 1).empty());
}

TEST(SolveF, Examples) {
  const auto& a = abel();
  const auto f = solve_f(a.e.M, a.e.c, a.spec.t, a.spec.A, a.spec.B, 3);
  ASSERT_TRUE(f);
  EXPECT_TRUE(same_ode(a.spec.t, a.spec.f, a.spec.t, *f));

  const auto g = solve_f(P("y^5"), P("y"), BiPoly(2L), P("y^2"), BiPoly(1L), 3);
  ASSERT_TRUE(g);
  EXPECT_TRUE(same_ode(BiPoly(2L), {BiPoly(), BiPoly(), BiPoly(), BiPoly(1L)}, BiPoly(2L), *g));

  EXPECT_FALSE(solve_f(a.e.M + BiPoly(1L), a.e.c, a.spec.t, a.spec.A, a.spec.B, 3));
}

TEST(Verify, Examples) {
  const auto& a = abel();
  Reduction r = certificate(a.spec, a.e);
  EXPECT_TRUE(verify_reduction(a.e.M, a.e.N, r));
  Reduction bad = r;
  bad.c = BiPoly(1L);
  EXPECT_FALSE(verify_reduction(a.e.M, a.e.N, bad));

  const Reduction sq{3, P("y^2"), BiPoly(1L), P("y"), BiPoly(1L), {BiPoly(), BiPoly(), BiPoly(), BiPoly(1L)}};
  EXPECT_TRUE(verify_reduction(P("y^5"), BiPoly(2L), sq));

  // non-coprime pair, wrong arity, y in t
  Reduction shared = sq;
  shared.B = P("y");
  EXPECT_FALSE(verify_reduction(P("y^5"), BiPoly(2L), shared));
  Reduction arity = sq;
  arity.f.pop_back();
  EXPECT_FALSE(verify_reduction(P("y^5"), BiPoly(2L), arity));
  Reduction ty = sq;
  ty.t = P("y");
  EXPECT_FALSE(verify_reduction(P("y^5"), BiPoly(2L), ty));
}

TEST(DegreeTest, DominantExampleFindsReduction) {
  const GenSpec d = fixtures::abel_example_dominant();
  const Expansion e = expand_transform(d);
  ReducerOptions opt;
  opt.print_candidates = true;
  const auto res = degree_test(e.M, e.N, 4, opt);
  const auto r = find(res.reductions, d.B);
  ASSERT_TRUE(r);
  EXPECT_TRUE(proportional(r->c, P("(x+y+1)^3")));
  EXPECT_TRUE(same_ode(d.t, d.f, r->t, r->f));
  bool dim2 = false;
  for (const auto& f : res.families)
    if (f.cany == 3 && f.dim() == 2 && proportional(f.B, d.B)) dim2 = true;
  EXPECT_TRUE(dim2);
}

TEST(DegreeTest, OversizedBoundFindsNothingButReportsFamilies) {
  const auto& a = abel();
  ReducerOptions opt;
  opt.print_candidates = true;
  const auto res = degree_test(a.e.M, a.e.N, 5, opt);
  EXPECT_TRUE(res.reductions.empty());
  EXPECT_FALSE(res.families.empty());
}

TEST(DegreeTest, BudgetExceeded) {
  const auto& a = abel();
  ReducerOptions opt;
  opt.max_seconds = 1e-6;
  EXPECT_THROW(degree_test(a.e.M, a.e.N, 6, opt), BudgetExceeded);
}

// --- properties ------------------------------------------------------------

TEST(ReducerProperty, DeterministicAcrossThreads) {
  const GenSpec d = fixtures::abel_example_dominant();
  const Expansion e = expand_transform(d);
  ReducerOptions one, four;
  four.threads = 4;
  const auto r1 = degree_test(e.M, e.N, 4, one), r4 = degree_test(e.M, e.N, 4, four);
  EXPECT_EQ(r1.reductions, r4.reductions);
  EXPECT_EQ(r1.cases, r4.cases);
}

TEST(ReducerProperty, ScaleInvariant) {
  const auto& a = abel();
  const BiPoly s(Rat(-7, 3));
  const auto r1 = degree_test(a.e.M, a.e.N, 4), r2 = degree_test(a.e.M * s, a.e.N * s, 4);
  ASSERT_EQ(r1.reductions.size(), r2.reductions.size());
  for (std::size_t i = 0; i < r1.reductions.size(); ++i) {
    EXPECT_TRUE(proportional(r1.reductions[i].A, r2.reductions[i].A));
    EXPECT_TRUE(same_ode(r1.reductions[i].t, r1.reductions[i].f, r2.reductions[i].t, r2.reductions[i].f));
  }
}

TEST(ReducerProperty, CorpusRoundTrip) {
  for (std::uint64_t seed = 100; seed < 108; ++seed) {
    const Instance inst = random_instance(3 + static_cast<int>(seed % 2), 4, seed);
    const auto res = degree_test(inst.problem.M, inst.problem.N, inst.problem.degreeA);
    EXPECT_FALSE(res.reductions.empty()) << "seed " << seed << "\n" << write_spec(inst.spec);
    for (const auto& r : res.reductions) EXPECT_TRUE(verify_reduction(inst.problem.M, inst.problem.N, r));
  }
}
