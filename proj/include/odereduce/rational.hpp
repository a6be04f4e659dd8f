#pragma once

// Exact scalars. Integers and rationals are GMP-backed; mpq_class keeps every
// value canonical (positive denominator, reduced fraction).

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace odereduce {

using Int = mpz_class;
using Rat = mpq_class;

inline Rat make_rat(const Int& num, const Int& den) {
  if (den == 0) throw std::domain_error("zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

inline bool is_integer(const Rat& r) { return r.get_den() == 1; }

inline Int gcd(const Int& a, const Int& b) {
  Int g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

inline Int lcm(const Int& a, const Int& b) {
  Int l;
  mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return l;
}

inline bool divisible(const Int& a, const Int& b) {
  return mpz_divisible_p(a.get_mpz_t(), b.get_mpz_t()) != 0;
}

inline Int exact_div(const Int& a, const Int& b) {
  Int q;
  mpz_divexact(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

inline std::string to_string(const Int& v) { return v.get_str(); }

inline std::string to_string(const Rat& v) {
  if (is_integer(v)) return v.get_num().get_str();
  return v.get_num().get_str() + "/" + v.get_den().get_str();
}

inline bool fits_int64(const Int& v) {
  static const Int lo(std::to_string(INT64_MIN));
  static const Int hi(std::to_string(INT64_MAX));
  return v >= lo && v <= hi;
}

}  // namespace odereduce
