// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <string>
#include <vector>

#include "coalfreeze/measures.hpp"
#include "coalfreeze/rational.hpp"

namespace coalfreeze {

enum class Flavor { mohle, regenerative };

std::string flavor_name(Flavor f);
Flavor flavor_from_name(const std::string& name);

// Triangular stochastic matrix q(b:k), 1 <= k <= b <= n_max.  From b active
// blocks, q(b:k) is the probability of a k-merge (k >= 2) or a freeze (k = 1)
// in the mohle flavor; in the regenerative flavor every move removes a block.
class DecrementMatrix {
 public:
  DecrementMatrix(Flavor flavor, std::vector<std::vector<Rational>> rows,
                  bool exact = true);

  int n_max() const { return static_cast<int>(rows_.size()); }
  Flavor flavor() const { return flavor_; }
  bool exact() const { return exact_; }

  const Rational& q(int b, int k) const;
  const std::vector<Rational>& row(int b) const;

  bool operator==(const DecrementMatrix& other) const = default;

 private:
  Flavor flavor_;
  std::vector<std::vector<Rational>> rows_;  // rows_[b-1] has b entries
  bool exact_;
};

// q(b:k) = Phi(b:k) / Phi(b) from the freeze data.  Throws when some Phi(b)
// vanishes (possible only for a null measure, or rho = 0 at b = 1; the b = 1
// row is always [1]).
DecrementMatrix from_measure(const FreezeMeasure& m, int n);

// Regenerative counterpart: Phi(b:k) = C(b,k) int x^(k-1)(1-x)^(b-k) Lambda,
// requires a nonzero Lambda.
DecrementMatrix regenerative_from_measure(const FreezeMeasure& m, int n);

// Unique consistent matrix with the given top row, filled in by the flavor's
// backward recursion solved in closed form:
//   mohle:  q(b:k) = [(k+1) q(b+1:k+1) + (b+1-k) q(b+1:k)]
//                    / [(b+1) - q(b+1:1) - 2 q(b+1:2)]      (k >= 2)
//           q(b:1) = b q(b+1:1) / [(b+1) - q(b+1:1) - 2 q(b+1:2)]
//   regenerative: same numerator over [(b+1) - q(b+1:1)], all k.
DecrementMatrix extend_backward(std::vector<Rational> row_n, Flavor flavor);

struct ConsistencyReport {
  bool ok = true;
  std::string first_violation;  // empty when ok
};

// Verifies the backward identities for every b < n_max.  Exact matrices are
// checked with tol 0, float-built ones with 1e-10 unless overridden.
ConsistencyReport check_consistency(const DecrementMatrix& q);
ConsistencyReport check_consistency(const DecrementMatrix& q,
                                    const Rational& tol);

// Total event rates recovered from a consistent mohle matrix, up to the
// positive factor fixed by the anchor.
struct PhiLadder {
  Rational rho;
  std::vector<Rational> phi;                 // phi[b-1] = Phi(b)
  std::vector<std::vector<Rational>> parts;  // parts[b-1][k-1] = Phi(b:k)
  // q(2:2) = 1 forces rho = 0; the ladder is then anchored at Phi(2) instead
  // of Phi(1) and this flag is set.
  bool rho_zero_boundary = false;

  int n() const { return static_cast<int>(phi.size()); }
};

// Phi(b)/Phi(b+1) = 1 - q(b+1:1)/(b+1) - 2 q(b+1:2)/(b+1), anchored at
// Phi(1) = rho_seed, with Phi(b:k) = q(b:k) Phi(b).  The result satisfies the
// Pascal-triangle identity and Phi(b) q(b:1)/b is constant in b.
PhiLadder recover_phi_ladder(const DecrementMatrix& q,
                             const Rational& rho_seed = Rational(1));

// Backward-difference construction of the Phi(n:m) table from a bare rate
// sequence.  A sequence is representable iff every entry comes out
// nonnegative AND every row sums back to Phi(n) (equivalently Phi(1) = rho);
// both channels are reported.
struct PositivityReport {
  PhiLadder ladder;
  bool all_nonnegative = true;
  bool row_sums_ok = true;
  bool phi_positive = true;
  std::vector<std::pair<int, int>> negative_entries;  // (n, m)
  std::vector<int> bad_row_sums;                      // n with Phi(n) != sum
  std::vector<int> nonpositive_phi;                   // n with Phi(n) <= 0

  bool valid() const { return all_nonnegative && row_sums_ok && phi_positive; }
  std::string summary() const;
};

PositivityReport phi_from_sequence(const std::vector<Rational>& phi,
                                   const Rational& rho);

// The decrement matrix induced by a valid ladder.
DecrementMatrix ladder_to_decrement(const PhiLadder& ladder);

}  // namespace coalfreeze
