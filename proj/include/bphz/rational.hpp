#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace bphz {

// Exact arbitrary-precision rational. All algebra in this library is closed
// over these; doubles appear only in scaling-exponent fits.
using Rational = mpq_class;

inline std::string rat_str(const Rational& r) { return r.get_str(); }

inline Rational rat_parse(const std::string& s) {
  Rational r;
  if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
  r.canonicalize();
  return r;
}

inline double rat_double(const Rational& r) { return r.get_d(); }

inline Rational rat_pow(Rational base, long e) {
  if (e < 0) {
    if (base == 0) throw std::domain_error("rat_pow: 0 to negative power");
    base = 1 / base;
    e = -e;
  }
  Rational acc = 1;
  while (e > 0) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return acc;
}

inline Rational rat_factorial(int n) {
  Rational acc = 1;
  for (int i = 2; i <= n; ++i) acc *= i;
  return acc;
}

}  // namespace bphz
