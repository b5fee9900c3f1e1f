// Apache License, Version 2.0, refer to LICENSE.txt
#include "coalfreeze/decrement.hpp"

#include <cassert>
#include <sstream>
#include <stdexcept>

#include "coalfreeze/combinatorics.hpp"

namespace coalfreeze {

std::string flavor_name(Flavor f) {
  return f == Flavor::mohle ? "mohle" : "regenerative";
}

Flavor flavor_from_name(const std::string& name) {
  if (name == "mohle") return Flavor::mohle;
  if (name == "regenerative") return Flavor::regenerative;
  throw std::invalid_argument("unknown flavor: " + name);
}

namespace {

const Rational kFloatRowTolerance = rat(1, 1000000000000L);  // 1e-12

}  // namespace

DecrementMatrix::DecrementMatrix(Flavor flavor,
                                 std::vector<std::vector<Rational>> rows,
                                 bool exact)
    : flavor_(flavor), rows_(std::move(rows)), exact_(exact) {
  if (rows_.empty()) throw std::invalid_argument("decrement matrix: empty");
  for (size_t b = 1; b <= rows_.size(); ++b) {
    const auto& row = rows_[b - 1];
    if (row.size() != b)
      throw std::invalid_argument("decrement matrix: row " + std::to_string(b) +
                                  " must have " + std::to_string(b) +
                                  " entries");
    Rational sum(0);
    for (const auto& v : row) {
      if (v < 0)
        throw std::invalid_argument("decrement matrix: negative entry");
      sum += v;
    }
    const Rational drift = abs(sum - 1);
    if (exact_ ? drift != 0 : drift > kFloatRowTolerance)
      throw std::invalid_argument("decrement matrix: row " + std::to_string(b) +
                                  " sums to " + rational_to_string(sum));
  }
  if (rows_[0][0] != 1)
    throw std::invalid_argument("decrement matrix: q(1:1) must be 1");
}

const Rational& DecrementMatrix::q(int b, int k) const {
  if (b < 1 || b > n_max() || k < 1 || k > b)
    throw std::out_of_range("decrement matrix: q(" + std::to_string(b) + ":" +
                            std::to_string(k) + ") out of range");
  return rows_[b - 1][k - 1];
}

const std::vector<Rational>& DecrementMatrix::row(int b) const {
  if (b < 1 || b > n_max())
    throw std::out_of_range("decrement matrix: row out of range");
  return rows_[b - 1];
}

DecrementMatrix from_measure(const FreezeMeasure& m, int n) {
  if (n < 1) throw std::invalid_argument("from_measure: n < 1");
  if (m.is_null())
    throw std::invalid_argument("from_measure: (Lambda, rho) = (0, 0)");
  std::vector<std::vector<Rational>> rows;
  rows.push_back({Rational(1)});  // q(1:1) = 1 regardless of rho
  for (int b = 2; b <= n; ++b) {
    const Rational total = phi_total(m, b).value;
    if (total == 0)
      throw std::invalid_argument("from_measure: Phi(" + std::to_string(b) +
                                  ") = 0, degenerate measure");
    std::vector<Rational> row;
    row.reserve(b);
    for (int k = 1; k <= b; ++k) row.push_back(phi(m, b, k).value / total);
    rows.push_back(std::move(row));
  }
  return DecrementMatrix(Flavor::mohle, std::move(rows), m.exact);
}

DecrementMatrix regenerative_from_measure(const FreezeMeasure& m, int n) {
  if (n < 1) throw std::invalid_argument("regenerative_from_measure: n < 1");
  if (m.lambda_is_zero())
    throw std::invalid_argument(
        "regenerative_from_measure: Lambda = 0 has Phi(1:1) = 0");
  std::vector<std::vector<Rational>> rows;
  for (int b = 1; b <= n; ++b) {
    // Phi(b:k) = C(b,k) int x^(k-1) (1-x)^(b-k) Lambda(dx); the k-sum
    // telescopes to int (1-(1-x)^b)/x Lambda(dx).
    std::vector<Rational> parts;
    parts.reserve(b);
    Rational total(0);
    for (int k = 1; k <= b; ++k) {
      Rational v(0);
      for (const auto& a : m.atoms) {
        Rational term = a.w;
        for (int e = 0; e < k - 1; ++e) term *= a.x;
        for (int e = 0; e < b - k; ++e) term *= 1 - a.x;
        v += term;
      }
      for (const auto& bc : m.betas) {
        // E[x^(k-1) (1-x)^(b-k)] under Beta(a,b')
        Rational num = Rational(factorial(bc.a + k - 2)) *
                       Rational(factorial(bc.b + b - k - 1)) /
                       Rational(factorial(bc.a + bc.b + b - 2));
        Rational den = Rational(factorial(bc.a - 1)) *
                       Rational(factorial(bc.b - 1)) /
                       Rational(factorial(bc.a + bc.b - 1));
        v += bc.w * num / den;
      }
      v *= Rational(binomial(b, k));
      total += v;
      parts.push_back(std::move(v));
    }
    if (total == 0)
      throw std::invalid_argument("regenerative_from_measure: Phi(" +
                                  std::to_string(b) + ") = 0");
    std::vector<Rational> row;
    row.reserve(b);
    for (auto& v : parts) row.push_back(v / total);
    rows.push_back(std::move(row));
  }
  return DecrementMatrix(Flavor::regenerative, std::move(rows), m.exact);
}

DecrementMatrix extend_backward(std::vector<Rational> row_n, Flavor flavor) {
  const int n = static_cast<int>(row_n.size());
  if (n < 1) throw std::invalid_argument("extend_backward: empty row");
  std::vector<std::vector<Rational>> rows(n);
  rows[n - 1] = std::move(row_n);
  {
    Rational sum(0);
    for (const auto& v : rows[n - 1]) {
      if (v < 0) throw std::invalid_argument("extend_backward: negative entry");
      sum += v;
    }
    if (sum != 1)
      throw std::invalid_argument("extend_backward: row does not sum to 1");
  }
  for (int b = n - 1; b >= 1; --b) {
    const auto& up = rows[b];  // row b+1
    Rational den = Rational(b + 1) - up[0];
    if (flavor == Flavor::mohle && b + 1 >= 2) den -= 2 * up[1];
    if (b == 1) {
      // q(1:1) = 1 by convention; the recursion gives 0/0 only when
      // q(2:1) = 0 and agrees with 1 otherwise.
      rows[0] = {Rational(1)};
      break;
    }
    if (den <= 0)  // impossible for a stochastic row when b >= 2
      throw std::logic_error("extend_backward: nonpositive denominator");
    std::vector<Rational> row(b);
    if (flavor == Flavor::mohle) {
      row[0] = Rational(b) * up[0] / den;
      for (int k = 2; k <= b; ++k)
        row[k - 1] = (Rational(k + 1) * up[k] + Rational(b + 1 - k) * up[k - 1]) / den;
    } else {
      for (int k = 1; k <= b; ++k)
        row[k - 1] = (Rational(k + 1) * up[k] + Rational(b + 1 - k) * up[k - 1]) / den;
    }
    rows[b - 1] = std::move(row);
  }
  return DecrementMatrix(flavor, std::move(rows));
}

namespace {

std::string violation_string(int b, int k, const Rational& lhs,
                             const Rational& rhs) {
  std::ostringstream os;
  os << "q(" << b << ":" << k << ") = " << rational_to_string(lhs)
     << " but recursion gives " << rational_to_string(rhs);
  return os.str();
}

}  // namespace

ConsistencyReport check_consistency(const DecrementMatrix& q) {
  return check_consistency(q,
                           q.exact() ? Rational(0) : rat(1, 10000000000L));
}

ConsistencyReport check_consistency(const DecrementMatrix& q,
                                    const Rational& tol) {
  ConsistencyReport report;
  const int n = q.n_max();
  for (int b = n - 1; b >= 1; --b) {
    const auto& up = q.row(b + 1);
    const auto& cur = q.row(b);
    Rational carry = up[0];
    if (q.flavor() == Flavor::mohle) carry += 2 * up[1];
    carry /= Rational(b + 1);
    for (int k = 1; k <= b; ++k) {
      Rational rhs;
      if (q.flavor() == Flavor::mohle && k == 1)
        rhs = Rational(b) / Rational(b + 1) * up[0] + carry * cur[0];
      else
        rhs = (Rational(k + 1) * up[k] + Rational(b + 1 - k) * up[k - 1]) /
                  Rational(b + 1) +
              carry * cur[k - 1];
      if (abs(cur[k - 1] - rhs) > tol) {
        report.ok = false;
        report.first_violation = violation_string(b, k, cur[k - 1], rhs);
        return report;
      }
    }
  }
  return report;
}

PhiLadder recover_phi_ladder(const DecrementMatrix& q,
                             const Rational& rho_seed) {
  if (q.flavor() != Flavor::mohle)
    throw std::invalid_argument("recover_phi_ladder: mohle flavor required");
  if (rho_seed <= 0)
    throw std::invalid_argument("recover_phi_ladder: rho_seed must be > 0");
  const int n = q.n_max();
  PhiLadder ladder;
  ladder.phi.assign(n, Rational(0));

  const bool rho_zero = (n >= 2 && q.q(2, 2) == 1);
  ladder.rho_zero_boundary = rho_zero;
  if (!rho_zero) {
    ladder.phi[0] = rho_seed;
    ladder.rho = rho_seed;  // Phi(1) q(1:1) / 1
  } else {
    // q(2:2) = 1 forces Phi(1) = 0 and rho = 0; anchor at Phi(2) instead.
    if (n < 2) throw std::invalid_argument("recover_phi_ladder: n too small");
    ladder.phi[0] = Rational(0);
    ladder.phi[1] = rho_seed;
    ladder.rho = Rational(0);
  }
  for (int b = rho_zero ? 2 : 1; b < n; ++b) {
    const Rational ratio = Rational(1) - q.q(b + 1, 1) / Rational(b + 1) -
                           2 * q.q(b + 1, 2) / Rational(b + 1);
    if (ratio <= 0)
      throw std::runtime_error("recover_phi_ladder: nonpositive rate ratio");
    ladder.phi[b] = ladder.phi[b - 1] / ratio;
  }
  ladder.parts.assign(n, {});
  for (int b = 1; b <= n; ++b) {
    ladder.parts[b - 1].reserve(b);
    for (int k = 1; k <= b; ++k)
      ladder.parts[b - 1].push_back(q.q(b, k) * ladder.phi[b - 1]);
  }
  return ladder;
}

PositivityReport phi_from_sequence(const std::vector<Rational>& phi,
                                   const Rational& rho) {
  if (phi.empty()) throw std::invalid_argument("phi_from_sequence: empty");
  if (rho <= 0)
    throw std::invalid_argument("phi_from_sequence: rho must be > 0");
  const int n = static_cast<int>(phi.size());

  PositivityReport report;
  report.ladder.rho = rho;
  report.ladder.phi = phi;
  report.ladder.parts.assign(n, {});

  for (int b = 1; b <= n; ++b) {
    if (phi[b - 1] <= 0) {
      report.phi_positive = false;
      report.nonpositive_phi.push_back(b);
    }
  }

  // Phibar(n) = Phi(n) - rho n;  Psi(n) = (Phibar(n) - Phibar(n+1)) / n;
  // Phi(n:m) = -C(n,m) nabla^(m-2) Psi(n-m+1).
  std::vector<Rational> phibar(n);
  for (int b = 1; b <= n; ++b) phibar[b - 1] = phi[b - 1] - rho * b;
  std::vector<Rational> psi(n > 1 ? n - 1 : 0);
  for (int b = 1; b < n; ++b)
    psi[b - 1] = (phibar[b - 1] - phibar[b]) / Rational(b);

  auto nabla = [&](int j, int x) {  // nabla^j psi(x), 1-based x
    Rational acc(0);
    for (int i = 0; i <= j; ++i) {
      Rational term = Rational(binomial(j, i)) * psi[x - 1 + i];
      acc += (i % 2) ? -term : term;
    }
    return acc;
  };

  for (int b = 1; b <= n; ++b) {
    auto& row = report.ladder.parts[b - 1];
    row.reserve(b);
    row.push_back(rho * b);
    for (int m = 2; m <= b; ++m)
      row.push_back(-Rational(binomial(b, m)) * nabla(m - 2, b - m + 1));
    Rational sum(0);
    for (int m = 1; m <= b; ++m) {
      if (row[m - 1] < 0) {
        report.all_nonnegative = false;
        report.negative_entries.emplace_back(b, m);
      }
      sum += row[m - 1];
    }
    if (sum != phi[b - 1]) {
      report.row_sums_ok = false;
      report.bad_row_sums.push_back(b);
    }
  }
  return report;
}

std::string PositivityReport::summary() const {
  std::ostringstream os;
  if (valid()) {
    os << "valid ladder (all entries nonnegative, rows sum to Phi(n))";
    return os.str();
  }
  if (!phi_positive) {
    os << "Phi(n) <= 0 at n =";
    for (int b : nonpositive_phi) os << ' ' << b;
    os << "; ";
  }
  if (!all_nonnegative) {
    os << "negative entries at";
    for (auto [b, m] : negative_entries) os << " Phi(" << b << ":" << m << ")";
    os << "; ";
  }
  if (!row_sums_ok) {
    os << "row sums differ from Phi(n) at n =";
    for (int b : bad_row_sums) os << ' ' << b;
    os << " (requires Phi(1) = rho)";
  }
  return os.str();
}

DecrementMatrix ladder_to_decrement(const PhiLadder& ladder) {
  std::vector<std::vector<Rational>> rows;
  rows.reserve(ladder.n());
  for (int b = 1; b <= ladder.n(); ++b) {
    if (ladder.phi[b - 1] <= 0)
      throw std::invalid_argument("ladder_to_decrement: Phi(b) <= 0");
    std::vector<Rational> row;
    row.reserve(b);
    for (int k = 1; k <= b; ++k)
      row.push_back(ladder.parts[b - 1][k - 1] / ladder.phi[b - 1]);
    rows.push_back(std::move(row));
  }
  return DecrementMatrix(Flavor::mohle, std::move(rows));
}

}  // namespace coalfreeze
