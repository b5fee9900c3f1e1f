// Apache License, Version 2.0, refer to LICENSE.txt
#include "coalfreeze/measures.hpp"

#include <stdexcept>

#include "coalfreeze/combinatorics.hpp"

namespace coalfreeze {

namespace {

// x^e with the 0^0 = 1 convention used throughout the rate integrands.
Rational rpow(const Rational& x, int e) {
  if (e < 0) throw std::invalid_argument("rpow: negative exponent");
  Rational r(1);
  Rational base = x;
  unsigned n = static_cast<unsigned>(e);
  while (n) {
    if (n & 1) r *= base;
    base *= base;
    n >>= 1;
  }
  return r;
}

// For a Beta(a,b) component: E[x^p (1-x)^q], integers p, q >= 0.
Rational beta_mixed_moment(int a, int b, int p, int q) {
  // B(a+p, b+q) / B(a, b) with B(i,j) = (i-1)!(j-1)!/(i+j-1)!
  Rational num = Rational(factorial(a + p - 1)) * Rational(factorial(b + q - 1)) /
                 Rational(factorial(a + p + b + q - 1));
  Rational den = Rational(factorial(a - 1)) * Rational(factorial(b - 1)) /
                 Rational(factorial(a + b - 1));
  return num / den;
}

}  // namespace

FreezeMeasure FreezeMeasure::kingman(const Rational& rho) {
  return atom_at(Rational(0), Rational(1), rho);
}

FreezeMeasure FreezeMeasure::hook(const Rational& rho) {
  return atom_at(Rational(1), Rational(1), rho);
}

FreezeMeasure FreezeMeasure::uniform(const Rational& rho) {
  FreezeMeasure m;
  m.betas.push_back({1, 1, Rational(1)});
  m.rho = rho;
  m.validate();
  return m;
}

FreezeMeasure FreezeMeasure::atom_at(const Rational& x, const Rational& w,
                                     const Rational& rho) {
  FreezeMeasure m;
  m.atoms.push_back({x, w});
  m.rho = rho;
  m.validate();
  return m;
}

Rational FreezeMeasure::total_mass() const {
  Rational t(0);
  for (const auto& a : atoms) t += a.w;
  for (const auto& b : betas) t += b.w;
  return t;
}

bool FreezeMeasure::lambda_is_zero() const {
  return atoms.empty() && betas.empty();
}

bool FreezeMeasure::is_null() const { return lambda_is_zero() && rho == 0; }

void FreezeMeasure::validate() const {
  for (const auto& a : atoms) {
    if (a.x < 0 || a.x > 1)
      throw std::invalid_argument("measure: atom location outside [0,1]");
    if (a.w <= 0) throw std::invalid_argument("measure: atom weight <= 0");
  }
  for (const auto& b : betas) {
    if (b.a < 1 || b.b < 1)
      throw std::invalid_argument("measure: Beta parameters must be >= 1");
    if (b.w <= 0) throw std::invalid_argument("measure: Beta weight <= 0");
  }
  if (rho < 0) throw std::invalid_argument("measure: rho < 0");
}

RateValue lambda_rate(const FreezeMeasure& m, int b, int k) {
  if (k < 2 || k > b)
    throw std::out_of_range("lambda_rate: need 2 <= k <= b");
  Rational total(0);
  for (const auto& a : m.atoms)
    total += a.w * rpow(a.x, k - 2) * rpow(1 - a.x, b - k);
  for (const auto& bc : m.betas)
    total += bc.w * beta_mixed_moment(bc.a, bc.b, k - 2, b - k);
  return {total, m.exact, false};
}

RateValue phi(const FreezeMeasure& m, int b, int k) {
  if (k < 1 || k > b) throw std::out_of_range("phi: need 1 <= k <= b");
  if (k == 1) return {m.rho * b, m.exact, false};
  return {Rational(binomial(b, k)) * lambda_rate(m, b, k).value, m.exact,
          false};
}

RateValue phi_total(const FreezeMeasure& m, int b) {
  if (b < 1) throw std::out_of_range("phi_total: b < 1");
  Rational total(0);
  for (int k = 1; k <= b; ++k) total += phi(m, b, k).value;
  return {total, m.exact, false};
}

RateValue phi_total_closed_form(const FreezeMeasure& m, int b) {
  if (b < 1) throw std::out_of_range("phi_total_closed_form: b < 1");
  // (1 - (1-x)^b - b x (1-x)^(b-1)) / x^2 expanded in powers of x.  The
  // constant and linear coefficients cancel, so the quotient is a genuine
  // polynomial of degree b-2, integrated term by term against Lambda.
  std::vector<Rational> num(static_cast<size_t>(b) + 1, Rational(0));
  num[0] += 1;
  // 1 - sum_j C(b,j) (-x)^j  -  b x sum_j C(b-1,j) (-x)^j
  for (int j = 0; j <= b; ++j) {
    Rational c = Rational(binomial(b, j));
    if (j % 2) c = -c;
    num[j] -= c;
  }
  for (int j = 0; j <= b - 1; ++j) {
    Rational c = Rational(b) * Rational(binomial(b - 1, j));
    if (j % 2) c = -c;
    num[j + 1] -= c;
  }
  if (num[0] != 0 || num[1] != 0)
    throw std::logic_error("phi_total_closed_form: expansion must start at x^2");
  Rational total = m.rho * b;
  for (int j = 2; j <= b; ++j) {
    if (num[j] == 0) continue;
    Rational moment(0);
    for (const auto& a : m.atoms) moment += a.w * rpow(a.x, j - 2);
    for (const auto& bc : m.betas)
      moment += bc.w * beta_mixed_moment(bc.a, bc.b, j - 2, 0);
    total += num[j] * moment;
  }
  return {total, m.exact, false};
}

RateValue mu_moment(const FreezeMeasure& m, int r) {
  if (r < -1) throw std::out_of_range("mu_moment: r < -1 unsupported");
  if (r == -1) {
    for (const auto& a : m.atoms)
      if (a.x == 0) return {Rational(0), m.exact, true};
    for (const auto& bc : m.betas)
      if (bc.a == 1) return {Rational(0), m.exact, true};
    Rational total(0);
    for (const auto& a : m.atoms) total += a.w / a.x;
    for (const auto& bc : m.betas)
      total += bc.w * rat(bc.a + bc.b - 1, bc.a - 1);
    return {total, m.exact, false};
  }
  Rational total(0);
  for (const auto& a : m.atoms) total += a.w * rpow(a.x, r);
  for (const auto& bc : m.betas)
    total += bc.w * beta_mixed_moment(bc.a, bc.b, r, 0);
  return {total, m.exact, false};
}

MergeRateArray merge_rate_array(const FreezeMeasure& m, int n) {
  MergeRateArray rates;
  for (int b = 2; b <= n; ++b) {
    std::vector<Rational> row;
    row.reserve(b - 1);
    for (int k = 2; k <= b; ++k) row.push_back(lambda_rate(m, b, k).value);
    rates.push_back(std::move(row));
  }
  return rates;
}

bool merge_rates_consistent(const MergeRateArray& rates) {
  // rates[i] holds lambda_{i+2, k} for k = 2..i+2
  for (size_t i = 0; i + 1 < rates.size(); ++i) {
    const auto& cur = rates[i];
    const auto& next = rates[i + 1];
    for (size_t j = 0; j < cur.size(); ++j)
      if (cur[j] != next[j] + next[j + 1]) return false;
  }
  return true;
}

bool check_merge_consistency(const FreezeMeasure& m, int n) {
  if (n < 3) throw std::invalid_argument("check_merge_consistency: n < 3");
  return merge_rates_consistent(merge_rate_array(m, n));
}

}  // namespace coalfreeze
