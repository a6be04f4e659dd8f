#include <odereduce/odereduce.hpp>

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "random_polys.hpp"

using namespace odereduce;

namespace {

OdeProblem read_text(const std::string& s) {
  std::istringstream in(s);
  return read_problem(in, Format::text);
}

std::size_t parse_error_offset(const std::string& s) {
  try {
    parse_poly(s);
  } catch (const ParseError& e) {
    return e.offset;
  }
  return 0;
}

}  // namespace

TEST(Parse, Examples) {
  const BiPoly p = parse_poly("x*y - 2");
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p.coeff(1, 1), 1);
  EXPECT_EQ(p.coeff(0, 0), -2);

  const BiPoly xy2 = BiPoly::x() * BiPoly::y() - BiPoly(2L);
  const BiPoly q = BiPoly::y() + BiPoly::x() * BiPoly::x() - BiPoly(1L);
  EXPECT_EQ(parse_poly("(x*y-2)^2*(y+x^2-1)^2"), xy2 * xy2 * q * q);

  EXPECT_THROW(parse_poly("y^x"), ParseError);
}

TEST(Parse, Grammar) {
  EXPECT_EQ(parse_poly(" 3 / 2 * x "), BiPoly::monomial(1, 0, Rat(3, 2)));
  EXPECT_EQ(parse_poly("-(x+1)"), BiPoly(-1L) - BiPoly::x());
  EXPECT_EQ(parse_poly("-x^2"), BiPoly::monomial(2, 0, Rat(-1)));
  EXPECT_EQ(parse_poly("x/4 - -y"), BiPoly::monomial(1, 0, Rat(1, 4)) + BiPoly::y());
  EXPECT_EQ(parse_poly("(x)^0"), BiPoly(1L));
  EXPECT_EQ(parse_poly("123456789012345678901234567890*y"),
            BiPoly::monomial(0, 1, Rat(Int("123456789012345678901234567890"))));
  EXPECT_TRUE(parse_poly("x - x").is_zero());
}

TEST(Parse, Errors) {
  EXPECT_THROW(parse_poly("2x"), ParseError);       // '*' is mandatory
  EXPECT_THROW(parse_poly("xy"), ParseError);
  EXPECT_THROW(parse_poly("x^-1"), ParseError);
  EXPECT_THROW(parse_poly("x^2^2"), ParseError);
  EXPECT_THROW(parse_poly("(x+1"), ParseError);
  EXPECT_THROW(parse_poly("x/(y+1)"), ParseError);
  EXPECT_THROW(parse_poly("x/0"), ParseError);
  EXPECT_THROW(parse_poly(""), ParseError);
  EXPECT_THROW(parse_poly("x + z"), ParseError);
  EXPECT_EQ(parse_error_offset("y^x"), 3u);
  EXPECT_EQ(parse_error_offset("x + z"), 5u);
  EXPECT_EQ(parse_error_offset("2x"), 2u);
}

TEST(Render, Examples) {
  EXPECT_EQ(render_poly(BiPoly()), "0");
  EXPECT_EQ(render_poly(parse_poly("1 + y + x")), "x + y + 1");
  EXPECT_EQ(render_poly(parse_poly("-3/2*x^2*y + y^3 - 1")), "-3/2*x^2*y + y^3 - 1");
  EXPECT_EQ(render_poly(parse_poly("-x")), "-x");
}

TEST(Render, AbelCanceledFactor) {
  const GenSpec s = [] {
    GenSpec g;
    g.n = 3;
    g.t = BiPoly::x();
    g.f = {BiPoly(), BiPoly(), parse_poly("-(x+1)"), BiPoly::x()};
    g.A = parse_poly("(y+x+1)^2*(y^2+x-1)");
    g.B = parse_poly("(x*y-2)^2*(y+x^2-1)^2");
    return g;
  }();
  EXPECT_EQ(render_poly(expand_transform(s).c), "x + y + 1");
}

TEST(ReadProblem, TextExamples) {
  const OdeProblem p = read_text("M = y^5\nN = 2\ndegreeA = 2\n");
  EXPECT_EQ(p.M, parse_poly("y^5"));
  EXPECT_EQ(p.N, BiPoly(2L));
  EXPECT_EQ(p.degreeA, 2);

  const OdeProblem q = read_text("# comment\n\nM = x\nN = y\ndegreeA = 3\nprint_candidates = true\nmax_seconds = 5\n");
  EXPECT_TRUE(q.options.print_candidates);
  EXPECT_EQ(q.options.max_seconds, 5);
}

TEST(ReadProblem, TextErrors) {
  auto message = [](const std::string& s) -> std::string {
    try {
      read_text(s);
    } catch (const InputError& e) {
      return e.what();
    }
    return "";
  };
  EXPECT_EQ(message("M = y^5\ndegreeA = 2\n"), "missing N");
  EXPECT_EQ(message("N = y^5\ndegreeA = 2\n"), "missing M");
  EXPECT_EQ(message("M = y\nN = 1\ndegreeA = 0\n"), "degreeA must be >= 1");
  EXPECT_EQ(message("M = y\nN = 1\n"), "missing degreeA");
  EXPECT_EQ(message("M = y\nN = 0\ndegreeA = 1\n"), "N must be nonzero");
  EXPECT_NE(message("M = y\nN = 1\ndegreeA = 2\ncolour = red\n"), "");
  EXPECT_THROW(read_text("M = y*\nN = 1\ndegreeA = 1\n"), ParseError);
}

TEST(ReadProblem, DegreeMayComeFromCaller) {
  std::istringstream in("M = y\nN = 1\n");
  EXPECT_EQ(read_problem(in, Format::text, false).degreeA, 0);
}

TEST(ReadProblem, StructuredRoundTrip) {
  OdeProblem p;
  p.M = parse_poly("x^3*y - 7/3*y^2 + 123456789012345678901234567890");
  p.N = parse_poly("2*x*y - 1");
  p.degreeA = 4;
  p.options.print_candidates = true;
  const std::string text = problem_to_json(p).dump();
  std::istringstream in(text);
  const OdeProblem q = read_problem(in);
  EXPECT_EQ(q.M, p.M);
  EXPECT_EQ(q.N, p.N);
  EXPECT_EQ(q.degreeA, 4);
  EXPECT_TRUE(q.options.print_candidates);
  // big coefficients travel as strings
  EXPECT_NE(text.find("\"123456789012345678901234567890\""), std::string::npos);
}

TEST(ReadProblem, StructuredErrors) {
  auto read = [](const std::string& s) {
    std::istringstream in(s);
    return read_problem(in, Format::structured);
  };
  EXPECT_THROW(read(R"({"N": [[0,0,1,1]], "degreeA": 1})"), InputError);
  EXPECT_THROW(read(R"({"M": [[0,0,1,1]], "N": [[0,0,1,0]], "degreeA": 1})"), InputError);
  EXPECT_THROW(read(R"({"M": [[0,0,1,1]], "N": [[0,0,1,1]], "degreeA": 0})"), InputError);
  EXPECT_THROW(read(R"({"M": [[0,0,1,1]], "N": [], "degreeA": 1})"), InputError);
  EXPECT_THROW(read(R"({"M": [[0,0,1,1],[0,0,2,1]], "N": [[0,0,1,1]], "degreeA": 1})"), InputError);
  EXPECT_THROW(read("{not json"), InputError);
  const OdeProblem p = read(R"({"M": [[0,1,"-5","3"]], "N": [[1,0,2,4]], "degreeA": 1})");
  EXPECT_EQ(p.M, BiPoly::monomial(0, 1, Rat(-5, 3)));
  EXPECT_EQ(p.N, BiPoly::monomial(1, 0, Rat(1, 2)));
}

TEST(Certificate, TextAndJsonRoundTrip) {
  Reduction r{3, parse_poly("y^2"), BiPoly(1L), parse_poly("2*y"), BiPoly(2L), {BiPoly(), BiPoly(), BiPoly(), BiPoly(2L)}};
  std::istringstream t(write_reduction_text(r));
  EXPECT_EQ(read_reduction(t), r);
  std::istringstream j(reduction_to_json(r).dump());
  EXPECT_EQ(read_reduction(j), r);
  EXPECT_EQ(render_ode(r.t, r.f), "(2)*y' = (2)*y^3");
}

// --- properties ------------------------------------------------------------

TEST(ParserProperty, RenderParseIdentity) {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 1000; ++k) {
    const BiPoly p = randpoly::dense(rng, randpoly::uniform(rng, 0, 7), 1000, true);
    const std::string s = render_poly(p);
    const BiPoly q = parse_poly(s);
    ASSERT_EQ(q, p) << s;
    ASSERT_EQ(render_poly(q), s);  // idempotent after one round
  }
}

TEST(ParserProperty, ParseRenderCanonical) {
  std::mt19937_64 rng(22);
  for (int k = 0; k < 300; ++k) {
    // product form, rendered then parsed back must agree with the expansion
    const BiPoly a = randpoly::dense(rng, 2, 4, true), b = randpoly::dense(rng, 2, 4);
    const std::string s = "(" + render_poly(a) + ")*(" + render_poly(b) + ")^2";
    const BiPoly once = parse_poly(s);
    EXPECT_EQ(once, a * b * b);
    EXPECT_EQ(parse_poly(render_poly(once)), once);
  }
}
