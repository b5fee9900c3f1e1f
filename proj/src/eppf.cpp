// Apache License, Version 2.0, refer to LICENSE.txt
#include "coalfreeze/eppf.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "coalfreeze/combinatorics.hpp"

namespace coalfreeze {

namespace {

IntegerPartition drop_one_singleton(const IntegerPartition& lam) {
  // parts are sorted non-increasing, so the trailing part is a 1
  std::vector<int> parts(lam.parts.begin(), lam.parts.end() - 1);
  IntegerPartition out;
  out.parts = std::move(parts);
  return out;
}

IntegerPartition replace_part(const IntegerPartition& lam, size_t idx,
                              int value) {
  std::vector<int> parts = lam.parts;
  parts[idx] = value;
  return IntegerPartition::of(std::move(parts));
}

void require_flavor(const DecrementMatrix& q, Flavor f, const char* who) {
  if (q.flavor() != f)
    throw std::invalid_argument(std::string(who) + ": expected " +
                                flavor_name(f) + " flavor, got " +
                                flavor_name(q.flavor()));
}

}  // namespace

EppfTable mohle_eppf(const DecrementMatrix& q, int n) {
  require_flavor(q, Flavor::mohle, "mohle_eppf");
  if (n < 1 || n > q.n_max())
    throw std::invalid_argument("mohle_eppf: need 1 <= n <= n_max");
  EppfTable table;
  table.n_max = n;
  table.exact = q.exact();
  table.values[IntegerPartition::of({1})] = Rational(1);
  for (int m = 2; m <= n; ++m) {
    for (const auto& lam : integer_partitions_of(m)) {
      Rational acc(0);
      const int ones =
          static_cast<int>(std::count(lam.parts.begin(), lam.parts.end(), 1));
      if (ones > 0 && q.q(m, 1) != 0) {
        acc += q.q(m, 1) / m * ones * table.at(drop_one_singleton(lam));
      }
      for (int k = 2; k <= m; ++k) {
        const Rational& qk = q.q(m, k);
        if (qk == 0) continue;
        const Rational denom = binomial_q(m, k);
        for (size_t j = 0; j < lam.parts.size(); ++j) {
          if (j > 0 && lam.parts[j] == lam.parts[j - 1]) continue;
          const int v = lam.parts[j];
          if (v < k) continue;
          int mult = 0;
          for (int x : lam.parts) mult += (x == v);
          acc += qk * mult * binomial_q(v, k) / denom *
                 table.at(replace_part(lam, j, v - k + 1));
        }
      }
      table.values[lam] = acc;
    }
  }
  return table;
}

EppfTable regenerative_eppf(const DecrementMatrix& q, int n) {
  require_flavor(q, Flavor::regenerative, "regenerative_eppf");
  if (n < 1 || n > q.n_max())
    throw std::invalid_argument("regenerative_eppf: need 1 <= n <= n_max");
  EppfTable table;
  table.n_max = n;
  table.exact = q.exact();
  table.values[IntegerPartition::of({1})] = Rational(1);
  for (int m = 2; m <= n; ++m) {
    for (const auto& lam : integer_partitions_of(m)) {
      Rational acc(0);
      for (size_t j = 0; j < lam.parts.size(); ++j) {
        if (j > 0 && lam.parts[j] == lam.parts[j - 1]) continue;
        const int v = lam.parts[j];
        if (q.q(m, v) == 0) continue;
        int mult = 0;
        for (int x : lam.parts) mult += (x == v);
        Rational sub(1);
        if (lam.parts.size() > 1) {
          std::vector<int> rest = lam.parts;
          rest.erase(rest.begin() + j);
          sub = table.at(IntegerPartition::of(std::move(rest)));
        } else if (m != v) {
          throw std::logic_error("regenerative_eppf: bad part");
        }
        acc += q.q(m, v) / binomial_q(m, v) * mult * sub;
      }
      table.values[lam] = acc;
    }
  }
  return table;
}

Rational regenerative_eppf_explicit(const DecrementMatrix& q,
                                    const Composition& comp) {
  require_flavor(q, Flavor::regenerative, "regenerative_eppf_explicit");
  const int l = comp.length();
  if (l > 8)
    throw std::invalid_argument(
        "regenerative_eppf_explicit: more than 8 parts (factorial guard)");
  const int n = comp.n();
  if (n > q.n_max())
    throw std::invalid_argument("regenerative_eppf_explicit: rows missing");
  std::vector<int> order(l);
  for (int i = 0; i < l; ++i) order[i] = i;
  Rational total(0);
  std::sort(order.begin(), order.end());
  do {
    Rational prod(1);
    int tail = n;
    for (int j = 0; j < l; ++j) {
      const int part = comp.parts[order[j]];
      prod *= q.q(tail, part);
      if (prod == 0) break;
      tail -= part;
    }
    total += prod;
  } while (std::next_permutation(order.begin(), order.end()));
  return total / Rational(multinomial(comp.parts));
}

EppfTable ewens_eppf(const Rational& theta, int n) {
  if (theta <= 0) throw std::invalid_argument("ewens_eppf: theta must be > 0");
  if (n < 1) throw std::invalid_argument("ewens_eppf: n < 1");
  EppfTable table;
  table.n_max = n;
  // rising(m) = theta (theta+1) ... (theta+m-1)
  std::vector<Rational> rising(n + 1);
  rising[0] = Rational(1);
  for (int m = 1; m <= n; ++m) rising[m] = rising[m - 1] * (theta + (m - 1));
  for (int m = 1; m <= n; ++m) {
    for (const auto& lam : integer_partitions_of(m)) {
      Rational v(1);
      for (int part : lam.parts)
        v *= theta * Rational(factorial(static_cast<unsigned>(part - 1)));
      table.values[lam] = v / rising[m];
    }
  }
  return table;
}

DecrementMatrix recover_decrement(const EppfTable& p, int n) {
  if (p.n_max < n)
    throw std::invalid_argument("recover_decrement: table smaller than n");
  const auto ones = [](int j) {
    return IntegerPartition::of(std::vector<int>(j, 1));
  };
  const auto hook = [](int head, int num_ones) {
    std::vector<int> parts{head};
    parts.insert(parts.end(), num_ones, 1);
    return IntegerPartition::of(std::move(parts));
  };
  if (n >= 2 && p.at(ones(2)) == 0)
    throw std::invalid_argument(
        "recover_decrement: p(1,1) = 0, one-block regime is not invertible");

  std::vector<std::vector<Rational>> rows;
  rows.push_back({Rational(1)});
  for (int b = 2; b <= n; ++b) {
    const Rational prev = p.at(ones(b - 1));
    if (prev == 0)
      throw std::invalid_argument("recover_decrement: vanishing p(1,...,1)");
    std::vector<Rational> row(b, Rational(0));
    row[0] = p.at(ones(b)) / prev;  // q(b:1) from the singleton product
    // interior entries from p(m,1,...,1), by induction in m
    for (int m = 2; m <= b - 1; ++m) {
      Rational rhs = p.at(hook(m, b - m));
      rhs -= row[0] * rat(b - m, b) * p.at(hook(m, b - m - 1));
      for (int k = 2; k <= m - 1; ++k)
        rhs -= row[k - 1] * binomial_q(m, k) / binomial_q(b, k) *
               p.at(hook(m - k + 1, b - m));
      const Rational denom = p.at(ones(b - m + 1));
      if (denom == 0)
        throw std::invalid_argument("recover_decrement: vanishing p(1,...,1)");
      row[m - 1] = rhs * binomial_q(b, m) / denom;
    }
    Rational sum(0);
    for (int k = 1; k <= b - 1; ++k) sum += row[k - 1];
    row[b - 1] = 1 - sum;  // normalization
    rows.push_back(std::move(row));
  }
  return DecrementMatrix(Flavor::mohle, std::move(rows), p.exact);
}

// --- symbolic expansion ------------------------------------------------

std::string QMonomial::to_string() const {
  if (factors.empty()) return "1";
  std::ostringstream os;
  for (const auto& [b, k] : factors) os << "q(" << b << ":" << k << ")";
  return os.str();
}

void QPolynomial::add(const QMonomial& mono, const Rational& coeff) {
  if (coeff == 0) return;
  auto [it, inserted] = terms.emplace(mono, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0) terms.erase(it);
  }
}

QPolynomial QPolynomial::scaled(const Rational& c) const {
  QPolynomial out;
  if (c == 0) return out;
  for (const auto& [mono, coeff] : terms) out.terms.emplace(mono, coeff * c);
  return out;
}

QPolynomial QPolynomial::times_var(int b, int k) const {
  QPolynomial out;
  for (const auto& [mono, coeff] : terms) {
    QMonomial m = mono;
    auto pos = std::lower_bound(
        m.factors.begin(), m.factors.end(), std::make_pair(b, k),
        [](const auto& a, const auto& bb) { return a.first > bb.first; });
    m.factors.insert(pos, {b, k});
    out.terms.emplace(std::move(m), coeff);
  }
  return out;
}

QPolynomial QPolynomial::plus(const QPolynomial& other) const {
  QPolynomial out = *this;
  for (const auto& [mono, coeff] : other.terms) out.add(mono, coeff);
  return out;
}

Rational QPolynomial::evaluate(const DecrementMatrix& q) const {
  Rational total(0);
  for (const auto& [mono, coeff] : terms) {
    Rational prod = coeff;
    for (const auto& [b, k] : mono.factors) prod *= q.q(b, k);
    total += prod;
  }
  return total;
}

std::string QPolynomial::to_string() const {
  if (terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [mono, coeff] : terms) {
    if (!first) os << " + ";
    first = false;
    if (coeff != 1 || mono.factors.empty())
      os << rational_to_string(coeff) << (mono.factors.empty() ? "" : " ");
    if (!mono.factors.empty()) os << mono.to_string();
  }
  return os.str();
}

const QPolynomial& SymbolicEppf::at(const IntegerPartition& key) const {
  auto it = values.find(key);
  if (it == values.end())
    throw std::out_of_range("symbolic EPPF: missing partition " +
                            key.to_string());
  return it->second;
}

namespace {

QPolynomial one_polynomial() {
  QPolynomial p;
  p.add(QMonomial{}, Rational(1));
  return p;
}

}  // namespace

SymbolicEppf symbolic_mohle(int n) {
  if (n < 1 || n > 6)
    throw std::invalid_argument("symbolic_mohle: need 1 <= n <= 6");
  SymbolicEppf table;
  table.n_max = n;
  table.values[IntegerPartition::of({1})] = one_polynomial();
  for (int m = 2; m <= n; ++m) {
    for (const auto& lam : integer_partitions_of(m)) {
      QPolynomial acc;
      const int ones =
          static_cast<int>(std::count(lam.parts.begin(), lam.parts.end(), 1));
      if (ones > 0) {
        const auto& sub = table.at(drop_one_singleton(lam));
        acc = acc.plus(sub.scaled(rat(ones, m)).times_var(m, 1));
      }
      for (int k = 2; k <= m; ++k) {
        for (size_t j = 0; j < lam.parts.size(); ++j) {
          if (j > 0 && lam.parts[j] == lam.parts[j - 1]) continue;
          const int v = lam.parts[j];
          if (v < k) continue;
          int mult = 0;
          for (int x : lam.parts) mult += (x == v);
          const Rational c =
              Rational(mult) * binomial_q(v, k) / binomial_q(m, k);
          acc = acc.plus(table.at(replace_part(lam, j, v - k + 1))
                             .scaled(c)
                             .times_var(m, k));
        }
      }
      table.values[lam] = std::move(acc);
    }
  }
  return table;
}

SymbolicEppf symbolic_regenerative(int n) {
  if (n < 1 || n > 6)
    throw std::invalid_argument("symbolic_regenerative: need 1 <= n <= 6");
  SymbolicEppf table;
  table.n_max = n;
  table.values[IntegerPartition::of({1})] = one_polynomial();
  for (int m = 2; m <= n; ++m) {
    for (const auto& lam : integer_partitions_of(m)) {
      QPolynomial acc;
      for (size_t j = 0; j < lam.parts.size(); ++j) {
        if (j > 0 && lam.parts[j] == lam.parts[j - 1]) continue;
        const int v = lam.parts[j];
        int mult = 0;
        for (int x : lam.parts) mult += (x == v);
        QPolynomial sub = one_polynomial();
        if (lam.parts.size() > 1) {
          std::vector<int> rest = lam.parts;
          rest.erase(rest.begin() + j);
          sub = table.at(IntegerPartition::of(std::move(rest)));
        }
        acc = acc.plus(
            sub.scaled(Rational(mult) / binomial_q(m, v)).times_var(m, v));
      }
      table.values[lam] = std::move(acc);
    }
  }
  return table;
}

}  // namespace coalfreeze
