// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "coalfreeze/rational.hpp"

namespace coalfreeze {

// Ordered sequence of positive integers.
struct Composition {
  std::vector<int> parts;

  Composition() = default;
  explicit Composition(std::vector<int> p);

  int n() const;
  int length() const { return static_cast<int>(parts.size()); }
};

// Non-increasing sequence of positive integers; the canonical key for every
// symmetric function of block sizes.
struct IntegerPartition {
  std::vector<int> parts;

  static IntegerPartition of(std::vector<int> parts);  // sorts, validates

  int n() const;
  int length() const { return static_cast<int>(parts.size()); }
  std::string to_string() const;  // "2+1"
  static IntegerPartition parse(const std::string& s);

  auto operator<=>(const IntegerPartition&) const = default;
};

// Partition of {1,...,n}.  Canonical form: elements ascending within a block,
// blocks ordered by least element.
struct SetPartition {
  int n = 0;
  std::vector<std::vector<int>> blocks;

  static SetPartition of(int n, std::vector<std::vector<int>> blocks);
  static SetPartition singletons(int n);
  static SetPartition one_block(int n);

  IntegerPartition shape() const;
  SetPartition restrict_to(int m) const;  // drops elements > m
  int block_count() const { return static_cast<int>(blocks.size()); }

  auto operator<=>(const SetPartition&) const = default;
};

// Set partition with a per-block active/frozen tag.
struct PartiallyFrozenPartition {
  int n = 0;
  std::vector<std::vector<int>> blocks;  // canonical order, as SetPartition
  std::vector<char> frozen;              // parallel to blocks

  static PartiallyFrozenPartition all_active_singletons(int n);
  static PartiallyFrozenPartition of(int n, std::vector<std::vector<int>> blocks,
                                     std::vector<char> frozen);

  int active_count() const;
  bool all_frozen() const { return active_count() == 0; }
  std::vector<int> active_indices() const;
  SetPartition induced() const;
  PartiallyFrozenPartition restrict_to(int m) const;

  auto operator<=>(const PartiallyFrozenPartition&) const = default;
};

std::vector<IntegerPartition> integer_partitions_of(int m);

// All Bell(n) partitions in restricted-growth order.  Guarded at n <= 12;
// anything larger must go through the sampling paths.
std::vector<SetPartition> enumerate_set_partitions(int n);

// Number of set partitions of [n] with the given shape.
Integer shape_count(const IntegerPartition& shape);

// Exact probabilities p(lambda) for integer partitions of every m <= n_max.
struct EppfTable {
  int n_max = 0;
  bool exact = true;
  std::map<IntegerPartition, Rational> values;

  const Rational& at(const IntegerPartition& key) const;
  bool contains(const IntegerPartition& key) const;

  // p(1) = 1, values in [0,1], and for each m the shape-weighted total is 1.
  void validate(const Rational& tol = Rational(0)) const;
};

struct AdditionRuleReport {
  struct Violation {
    IntegerPartition partition;
    Rational lhs;
    Rational rhs;
  };
  bool ok = true;
  std::vector<Violation> violations;
};

// Checks p(lambda) = p(lambda,1) + sum_i p(..., lambda_i+1, ...) for every
// partition of every m < n.  tol = 0 demands exact equality.
AdditionRuleReport check_addition_rule(const EppfTable& p, int n,
                                       const Rational& tol = Rational(0));

}  // namespace coalfreeze
