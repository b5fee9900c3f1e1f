// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <cmath>
#include <vector>

#include "coalfreeze/rational.hpp"

namespace coalfreeze {

// Freeze data (Lambda, rho): Lambda is a finite measure on [0,1] given as
// rational atoms plus integer-parameter Beta densities, rho the per-block
// freeze rate.  This class keeps every derived rate rational.
struct FreezeMeasure {
  struct Atom {
    Rational x;  // location in [0,1]
    Rational w;  // weight > 0
  };
  struct BetaComponent {
    int a = 1;   // integer parameters >= 1
    int b = 1;
    Rational w;  // weight > 0
  };

  std::vector<Atom> atoms;
  std::vector<BetaComponent> betas;
  Rational rho;       // >= 0
  bool exact = true;  // false when constructed from floats

  static FreezeMeasure kingman(const Rational& rho);  // delta_0
  static FreezeMeasure hook(const Rational& rho);     // delta_1
  static FreezeMeasure uniform(const Rational& rho);  // Beta(1,1)
  static FreezeMeasure atom_at(const Rational& x, const Rational& w,
                               const Rational& rho);

  Rational total_mass() const;  // Lambda([0,1])
  bool lambda_is_zero() const;
  bool is_null() const;  // (Lambda, rho) == (0, 0)
  void validate() const;
};

struct RateValue {
  Rational value;
  bool exact = true;
  bool infinite = false;

  double as_double() const { return infinite ? HUGE_VAL : to_double(value); }
};

// lambda_{b,k} = int x^(k-2) (1-x)^(b-k) Lambda(dx), 2 <= k <= b.
// Atoms evaluate pointwise with the 0^0 = 1 convention, so delta_0 feeds only
// k = 2 and delta_1 only k = b.
RateValue lambda_rate(const FreezeMeasure& m, int b, int k);

// Phi(b:1) = rho*b;  Phi(b:k) = C(b,k) lambda_{b,k} for k >= 2.
RateValue phi(const FreezeMeasure& m, int b, int k);

// Phi(b) = sum_k Phi(b:k).
RateValue phi_total(const FreezeMeasure& m, int b);

// Same quantity through the closed-form integrand
// (1 - (1-x)^b - b x (1-x)^(b-1)) / x^2 integrated against Lambda, plus
// rho*b.  Independent route kept as a self-check against phi_total.
RateValue phi_total_closed_form(const FreezeMeasure& m, int b);

// mu_r = int x^r Lambda(dx) for r >= -1.  Infinite exactly when r = -1 and
// Lambda has an atom at 0 or a Beta component with a = 1.
RateValue mu_moment(const FreezeMeasure& m, int r);

// Rates for 2 <= k <= b <= n as rows indexed b = 2..n, entries k = 2..b.
using MergeRateArray = std::vector<std::vector<Rational>>;
MergeRateArray merge_rate_array(const FreezeMeasure& m, int n);

// lambda_{b,k} = lambda_{b+1,k} + lambda_{b+1,k+1} across the array.
bool merge_rates_consistent(const MergeRateArray& rates);

// Structural self-test of lambda_rate on this measure.
bool check_merge_consistency(const FreezeMeasure& m, int n);

}  // namespace coalfreeze
