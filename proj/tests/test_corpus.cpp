#include <odereduce/odereduce.hpp>

#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"

using namespace odereduce;

namespace {

BiPoly P(const char* s) { return parse_poly(s); }

}  // namespace

TEST(Expand, SquareSubstitution) {
  const Expansion e = expand_transform(fixtures::square_example());
  // Num = 1*y^6 - 0, Den = 2y, gcd = y
  EXPECT_EQ(e.M, P("y^5"));
  EXPECT_EQ(e.N, BiPoly(2L));
  EXPECT_EQ(e.c, P("y"));
}

TEST(Expand, AbelExample) {
  const Expansion e = expand_transform(fixtures::abel_example());
  EXPECT_EQ(e.c, P("x + y + 1"));
  const std::string m = render_poly(e.M), n = render_poly(e.N);
  EXPECT_EQ(m.rfind("4*x^13*y^6 + 6*x^12*y^7", 0), 0u) << m;
  EXPECT_EQ(n.rfind("2*x^13*y^6 - 2*x^15*y^3", 0), 0u) << n;
  // N = 2x (...)
  EXPECT_TRUE(divides(P("2*x"), e.N));
}

TEST(Expand, Identity) {
  GenSpec s = fixtures::square_example();
  s.A = P("y");
  const Expansion e = expand_transform(s);
  EXPECT_EQ(e.M, P("y^3"));
  EXPECT_EQ(e.N, BiPoly(1L));
  EXPECT_EQ(e.c, BiPoly(1L));
}

TEST(Expand, Degenerate) {
  GenSpec s = fixtures::square_example();
  s.B = BiPoly();
  EXPECT_THROW(expand_transform(s), std::invalid_argument);
  s = fixtures::square_example();
  s.A = P("x^2 + 1");  // no y: the denominator vanishes
  EXPECT_THROW(expand_transform(s), std::invalid_argument);
  s = fixtures::square_example();
  s.f.pop_back();
  EXPECT_THROW(expand_transform(s), std::invalid_argument);
}

TEST(Spec, TextRoundTrip) {
  GenSpec s = fixtures::abel_example();
  s.seed = 17;
  std::istringstream in(write_spec(s));
  const GenSpec r = read_spec(in);
  EXPECT_EQ(r.n, s.n);
  EXPECT_EQ(r.A, s.A);
  EXPECT_EQ(r.B, s.B);
  EXPECT_EQ(r.t, s.t);
  EXPECT_EQ(r.f, s.f);
  EXPECT_EQ(r.seed, 17u);
  std::istringstream bad("n = 3\nA = y\nB = 1\nf3 = y\n");
  EXPECT_THROW(read_spec(bad), InputError);
}

TEST(RandomInstance, Examples) {
  const Instance a = random_instance(3, 4, 1);
  EXPECT_FALSE(a.c.is_constant());
  const Instance b = random_instance(3, 4, 1);
  EXPECT_EQ(write_spec(a.spec), write_spec(b.spec));
  EXPECT_EQ(a.problem.M, b.problem.M);
  EXPECT_EQ(a.problem.N, b.problem.N);
  EXPECT_THROW(random_instance(5, 4, 1), std::invalid_argument);
  EXPECT_THROW(random_instance(3, 1, 1), std::invalid_argument);
}

TEST(RandomInstance, ManifestCarriesCertificate) {
  const Instance inst = random_instance(4, 5, 3);
  const auto j = manifest_entry("instance_0000.txt", inst);
  std::istringstream in(j.at("certificate").dump());
  const Reduction r = read_reduction(in);
  EXPECT_TRUE(verify_reduction(inst.problem.M, inst.problem.N, r));
  EXPECT_EQ(j.at("degreeA"), inst.problem.degreeA);
}

// --- properties ------------------------------------------------------------

TEST(CorpusProperty, Invariants) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const int n = 3 + static_cast<int>(seed % 2);
    const Instance inst = random_instance(n, 2 + static_cast<int>(seed % 5), seed);
    const GenSpec& s = inst.spec;
    SCOPED_TRACE(write_spec(s));
    ASSERT_TRUE(s.f[0].is_zero());
    EXPECT_LE(s.A.max_degree(Var::total), 2 + static_cast<int>(seed % 5));
    EXPECT_EQ(inst.problem.degreeA, s.A.max_degree(Var::total));
    // certificate validity
    EXPECT_TRUE(verify_reduction(inst.problem.M, inst.problem.N, certificate(s, {inst.problem.M, inst.problem.N, inst.c})));
    // coprime after cancellation
    EXPECT_TRUE(gcd_bivar(inst.problem.M, inst.problem.N).is_constant());
    // p^(alpha-1) | c for every repeated factor of A
    bool repeated = false;
    for (const auto& q : factor_bivar(s.A).factors) {
      if (q.mult < 2) continue;
      repeated = true;
      EXPECT_TRUE(divides(pow(q.poly, static_cast<unsigned>(q.mult - 1)), inst.c)) << render_poly(q.poly);
    }
    EXPECT_TRUE(repeated);
    EXPECT_TRUE(gcd_bivar(s.A, s.B).is_constant());
  }
}
