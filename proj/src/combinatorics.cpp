// Apache License, Version 2.0, refer to LICENSE.txt
#include "coalfreeze/combinatorics.hpp"

#include <stdexcept>

namespace coalfreeze {

Integer binomial(unsigned n, unsigned k) {
  Integer r;
  if (k > n) return Integer(0);
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

Integer factorial(unsigned n) {
  Integer r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

Rational binomial_q(unsigned n, unsigned k) { return Rational(binomial(n, k)); }

Integer multinomial(const std::vector<int>& parts) {
  long n = 0;
  for (int p : parts) {
    if (p <= 0) throw std::invalid_argument("multinomial: parts must be >= 1");
    n += p;
  }
  Integer r = factorial(static_cast<unsigned>(n));
  for (int p : parts) r /= factorial(static_cast<unsigned>(p));
  return r;
}

Integer bell_number(int n) {
  if (n < 0) throw std::invalid_argument("bell_number: n < 0");
  // Bell triangle.
  std::vector<Integer> row{Integer(1)};
  for (int i = 1; i <= n; ++i) {
    std::vector<Integer> next;
    next.reserve(i + 1);
    next.push_back(row.back());
    for (int j = 0; j < i; ++j) next.push_back(next[j] + row[j]);
    row = std::move(next);
  }
  return row.front();
}

}  // namespace coalfreeze
