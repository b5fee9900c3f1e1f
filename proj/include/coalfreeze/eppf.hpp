// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <map>
#include <string>
#include <vector>

#include "coalfreeze/decrement.hpp"
#include "coalfreeze/partitions.hpp"

namespace coalfreeze {

// Forward recursion from p(1) = 1 with coefficients q(m:.), memoized on
// integer partitions:
//   p(n1..nl) = q(n:1)/n * sum_{j: nj=1} p(.., ^nj, ..)
//             + sum_{k>=2} q(n:k) sum_{j: nj>=k} C(nj,k)/C(n,k) p(.., nj-k+1, ..)
EppfTable mohle_eppf(const DecrementMatrix& q, int n);

// p(n1..nl) = sum_j q(n:nj)/C(n,nj) p(.., ^nj, ..)
EppfTable regenerative_eppf(const DecrementMatrix& q, int n);

// Permutation sum  sum_sigma prod_j q(N_sigma(j) : n_sigma(j)) / multinomial,
// N the tail sums.  Guarded at 8 parts.
Rational regenerative_eppf_explicit(const DecrementMatrix& q,
                                    const Composition& comp);

// Ewens sampling formula EPPF,
//   p(n1..nl) = theta^l prod_j (nj-1)! / (theta (theta+1) ... (theta+n-1)).
// External oracle for the delta_0 endpoint.
EppfTable ewens_eppf(const Rational& theta, int n);

// Inverts mohle_eppf row by row: q(b:1) from the singleton products, interior
// entries by induction on the (m,1,...,1) identities, q(b:b) by row
// normalization.  Requires p(1,1) > 0.
DecrementMatrix recover_decrement(const EppfTable& p, int n);

// --- symbolic expansion ------------------------------------------------

// Product of distinct entries q(b:k); at most one factor per row b.
struct QMonomial {
  std::vector<std::pair<int, int>> factors;  // (b,k), sorted by b descending

  auto operator<=>(const QMonomial&) const = default;
  std::string to_string() const;  // "q(4:2)q(3:1)"
};

struct QPolynomial {
  std::map<QMonomial, Rational> terms;

  bool operator==(const QPolynomial&) const = default;

  void add(const QMonomial& mono, const Rational& coeff);
  QPolynomial scaled(const Rational& c) const;
  QPolynomial times_var(int b, int k) const;
  QPolynomial plus(const QPolynomial& other) const;

  Rational evaluate(const DecrementMatrix& q) const;
  std::string to_string() const;
};

struct SymbolicEppf {
  int n_max = 0;
  std::map<IntegerPartition, QPolynomial> values;

  const QPolynomial& at(const IntegerPartition& key) const;
};

// Exact polynomial expansion of the recursion in the entries q(b:k).
// Guarded at n <= 6.
SymbolicEppf symbolic_mohle(int n);
SymbolicEppf symbolic_regenerative(int n);

}  // namespace coalfreeze
