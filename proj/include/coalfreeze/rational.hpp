// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <gmpxx.h>

#include <string>

namespace coalfreeze {

// All exact arithmetic goes through GMP rationals; doubles appear only at
// output boundaries and inside the Monte Carlo kernels.
using Rational = mpq_class;
using Integer = mpz_class;

// Parses "p/q", a plain integer, or a decimal string ("0.25" -> 1/4).
// Throws std::invalid_argument on anything else.
Rational parse_rational(const std::string& s);

// Exact conversion; every finite double is a binary rational.
Rational rational_from_double(double x);

// "p/q", or just "p" when the denominator is 1.
std::string rational_to_string(const Rational& r);

inline double to_double(const Rational& r) { return r.get_d(); }

inline Rational rat(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

}  // namespace coalfreeze
