#pragma once

// Worked examples shared by the tests and the acceptance runner.

#include <odereduce/odereduce.hpp>

namespace fixtures {

using namespace odereduce;

// y' = y^3 - (x+1)/x y^2 under y -> (y+x+1)^2 (y^2+x-1) / ((xy-2)^2 (y+x^2-1)^2)
inline GenSpec abel_example() {
  GenSpec s;
  s.n = 3;
  s.t = parse_poly("x");
  s.f = {BiPoly(), BiPoly(), parse_poly("-(x+1)"), parse_poly("x")};
  s.A = parse_poly("(y+x+1)^2*(y^2+x-1)");
  s.B = parse_poly("(x*y-2)^2*(y+x^2-1)^2");
  return s;
}

// same equation, y -> (y+x+1)^4 / ((xy-2)^3 (y+x^2-1))
inline GenSpec abel_example_dominant() {
  GenSpec s = abel_example();
  s.A = parse_poly("(y+x+1)^4");
  s.B = parse_poly("(x*y-2)^3*(y+x^2-1)");
  return s;
}

// y' = y^3 under y -> y^2: numerator y^6, denominator 2y
inline GenSpec square_example() {
  GenSpec s;
  s.n = 3;
  s.t = BiPoly(1L);
  s.f = {BiPoly(), BiPoly(), BiPoly(), BiPoly(1L)};
  s.A = parse_poly("y^2");
  s.B = BiPoly(1L);
  return s;
}

}  // namespace fixtures
