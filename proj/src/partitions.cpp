// Apache License, Version 2.0, refer to LICENSE.txt
#include "coalfreeze/partitions.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "coalfreeze/combinatorics.hpp"

namespace coalfreeze {

Composition::Composition(std::vector<int> p) : parts(std::move(p)) {
  if (parts.empty()) throw std::invalid_argument("composition: no parts");
  for (int x : parts)
    if (x < 1) throw std::invalid_argument("composition: parts must be >= 1");
}

int Composition::n() const {
  return std::accumulate(parts.begin(), parts.end(), 0);
}

IntegerPartition IntegerPartition::of(std::vector<int> parts) {
  if (parts.empty()) throw std::invalid_argument("partition: no parts");
  for (int x : parts)
    if (x < 1) throw std::invalid_argument("partition: parts must be >= 1");
  std::sort(parts.begin(), parts.end(), std::greater<int>());
  IntegerPartition p;
  p.parts = std::move(parts);
  return p;
}

int IntegerPartition::n() const {
  return std::accumulate(parts.begin(), parts.end(), 0);
}

std::string IntegerPartition::to_string() const {
  std::ostringstream os;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) os << '+';
    os << parts[i];
  }
  return os.str();
}

IntegerPartition IntegerPartition::parse(const std::string& s) {
  std::vector<int> parts;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, '+')) parts.push_back(std::stoi(tok));
  return IntegerPartition::of(std::move(parts));
}

namespace {

void canonicalize_blocks(std::vector<std::vector<int>>& blocks) {
  for (auto& b : blocks) std::sort(b.begin(), b.end());
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

void validate_blocks(int n, const std::vector<std::vector<int>>& blocks) {
  std::vector<char> seen(static_cast<size_t>(n) + 1, 0);
  int total = 0;
  for (const auto& b : blocks) {
    if (b.empty()) throw std::invalid_argument("set partition: empty block");
    for (int x : b) {
      if (x < 1 || x > n)
        throw std::invalid_argument("set partition: element out of range");
      if (seen[x]) throw std::invalid_argument("set partition: duplicate element");
      seen[x] = 1;
      ++total;
    }
  }
  if (total != n)
    throw std::invalid_argument("set partition: blocks do not cover [n]");
}

}  // namespace

SetPartition SetPartition::of(int n, std::vector<std::vector<int>> blocks) {
  validate_blocks(n, blocks);
  canonicalize_blocks(blocks);
  SetPartition sp;
  sp.n = n;
  sp.blocks = std::move(blocks);
  return sp;
}

SetPartition SetPartition::singletons(int n) {
  std::vector<std::vector<int>> blocks;
  blocks.reserve(n);
  for (int i = 1; i <= n; ++i) blocks.push_back({i});
  SetPartition sp;
  sp.n = n;
  sp.blocks = std::move(blocks);
  return sp;
}

SetPartition SetPartition::one_block(int n) {
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 1);
  SetPartition sp;
  sp.n = n;
  sp.blocks = {std::move(all)};
  return sp;
}

IntegerPartition SetPartition::shape() const {
  std::vector<int> sizes;
  sizes.reserve(blocks.size());
  for (const auto& b : blocks) sizes.push_back(static_cast<int>(b.size()));
  return IntegerPartition::of(std::move(sizes));
}

SetPartition SetPartition::restrict_to(int m) const {
  if (m < 1 || m > n)
    throw std::out_of_range("restrict_to: m out of range");
  std::vector<std::vector<int>> out;
  for (const auto& b : blocks) {
    std::vector<int> nb;
    for (int x : b)
      if (x <= m) nb.push_back(x);
    if (!nb.empty()) out.push_back(std::move(nb));
  }
  return SetPartition::of(m, std::move(out));
}

PartiallyFrozenPartition PartiallyFrozenPartition::all_active_singletons(int n) {
  PartiallyFrozenPartition p;
  p.n = n;
  for (int i = 1; i <= n; ++i) p.blocks.push_back({i});
  p.frozen.assign(n, 0);
  return p;
}

PartiallyFrozenPartition PartiallyFrozenPartition::of(
    int n, std::vector<std::vector<int>> blocks, std::vector<char> frozen) {
  if (blocks.size() != frozen.size())
    throw std::invalid_argument("partially frozen: status count mismatch");
  validate_blocks(n, blocks);
  // Canonicalize with statuses carried along.
  std::vector<size_t> order(blocks.size());
  std::iota(order.begin(), order.end(), 0);
  for (auto& b : blocks) std::sort(b.begin(), b.end());
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return blocks[a].front() < blocks[b].front();
  });
  PartiallyFrozenPartition p;
  p.n = n;
  for (size_t i : order) {
    p.blocks.push_back(std::move(blocks[i]));
    p.frozen.push_back(frozen[i]);
  }
  return p;
}

int PartiallyFrozenPartition::active_count() const {
  int c = 0;
  for (char f : frozen) c += !f;
  return c;
}

std::vector<int> PartiallyFrozenPartition::active_indices() const {
  std::vector<int> idx;
  for (size_t i = 0; i < frozen.size(); ++i)
    if (!frozen[i]) idx.push_back(static_cast<int>(i));
  return idx;
}

SetPartition PartiallyFrozenPartition::induced() const {
  return SetPartition::of(n, blocks);
}

PartiallyFrozenPartition PartiallyFrozenPartition::restrict_to(int m) const {
  if (m < 1 || m > n)
    throw std::out_of_range("restrict_to: m out of range");
  std::vector<std::vector<int>> out;
  std::vector<char> fr;
  for (size_t i = 0; i < blocks.size(); ++i) {
    std::vector<int> nb;
    for (int x : blocks[i])
      if (x <= m) nb.push_back(x);
    if (!nb.empty()) {
      out.push_back(std::move(nb));
      fr.push_back(frozen[i]);
    }
  }
  return PartiallyFrozenPartition::of(m, std::move(out), std::move(fr));
}

std::vector<IntegerPartition> integer_partitions_of(int m) {
  if (m < 1) throw std::invalid_argument("integer_partitions_of: m < 1");
  std::vector<IntegerPartition> out;
  std::vector<int> cur;
  // lexicographically decreasing, largest part first
  auto rec = [&](auto&& self, int rest, int maxpart) -> void {
    if (rest == 0) {
      IntegerPartition p;
      p.parts = cur;
      out.push_back(std::move(p));
      return;
    }
    for (int first = std::min(rest, maxpart); first >= 1; --first) {
      cur.push_back(first);
      self(self, rest - first, first);
      cur.pop_back();
    }
  };
  rec(rec, m, m);
  return out;
}

std::vector<SetPartition> enumerate_set_partitions(int n) {
  if (n < 1) throw std::invalid_argument("enumerate_set_partitions: n < 1");
  if (n > 12)
    throw std::invalid_argument(
        "enumerate_set_partitions: n > 12 (Bell number guard)");
  std::vector<SetPartition> out;
  std::vector<int> label(n);
  auto rec = [&](auto&& self, int i, int used) -> void {
    if (i == n) {
      std::vector<std::vector<int>> blocks(used);
      for (int j = 0; j < n; ++j) blocks[label[j]].push_back(j + 1);
      SetPartition sp;
      sp.n = n;
      sp.blocks = std::move(blocks);  // already canonical by construction
      out.push_back(std::move(sp));
      return;
    }
    for (int l = 0; l <= used; ++l) {
      label[i] = l;
      self(self, i + 1, std::max(used, l + 1));
    }
  };
  rec(rec, 0, 0);
  return out;
}

Integer shape_count(const IntegerPartition& shape) {
  // n! / (prod part! * prod multiplicity!)
  Integer denom(1);
  int n = 0;
  int run = 0;
  for (size_t i = 0; i < shape.parts.size(); ++i) {
    const int v = shape.parts[i];
    n += v;
    denom *= factorial(static_cast<unsigned>(v));
    run = (i > 0 && shape.parts[i - 1] == v) ? run + 1 : 1;
    denom *= run;  // running multiplicity factorial
  }
  return factorial(static_cast<unsigned>(n)) / denom;
}

const Rational& EppfTable::at(const IntegerPartition& key) const {
  auto it = values.find(key);
  if (it == values.end())
    throw std::out_of_range("EPPF table: missing partition " + key.to_string());
  return it->second;
}

bool EppfTable::contains(const IntegerPartition& key) const {
  return values.count(key) > 0;
}

void EppfTable::validate(const Rational& tol) const {
  const IntegerPartition one = IntegerPartition::of({1});
  if (abs(at(one) - 1) > tol)
    throw std::runtime_error("EPPF table: p(1) != 1");
  for (const auto& [key, v] : values)
    if (v < -tol || v > 1 + tol)
      throw std::runtime_error("EPPF table: p(" + key.to_string() +
                               ") outside [0,1]");
  for (int m = 1; m <= n_max; ++m) {
    Rational total(0);
    for (const auto& lam : integer_partitions_of(m))
      total += Rational(shape_count(lam)) * at(lam);
    if (abs(total - 1) > tol)
      throw std::runtime_error("EPPF table: shape-weighted total at m=" +
                               std::to_string(m) + " is " +
                               rational_to_string(total));
  }
}

AdditionRuleReport check_addition_rule(const EppfTable& p, int n,
                                       const Rational& tol) {
  AdditionRuleReport report;
  if (p.n_max < n)
    throw std::invalid_argument("check_addition_rule: table smaller than n");
  for (int m = 1; m < n; ++m) {
    for (const auto& lam : integer_partitions_of(m)) {
      std::vector<int> appended = lam.parts;
      appended.push_back(1);
      Rational rhs = p.at(IntegerPartition::of(std::move(appended)));
      // one term per part index; equal parts grouped by multiplicity
      for (size_t i = 0; i < lam.parts.size(); ++i) {
        if (i > 0 && lam.parts[i] == lam.parts[i - 1]) continue;
        int mult = 0;
        for (int v : lam.parts) mult += (v == lam.parts[i]);
        std::vector<int> bumped = lam.parts;
        bumped[i] += 1;
        rhs += mult * p.at(IntegerPartition::of(std::move(bumped)));
      }
      const Rational lhs = p.at(lam);
      if (abs(lhs - rhs) > tol) {
        report.ok = false;
        report.violations.push_back({lam, lhs, rhs});
      }
    }
  }
  return report;
}

}  // namespace coalfreeze
