// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <initializer_list>
#include <vector>

#include "coalfreeze/partitions.hpp"
#include "coalfreeze/rational.hpp"

namespace coalfreeze::testing {

inline Rational q(const char* s) { return parse_rational(s); }

inline IntegerPartition ip(std::initializer_list<int> parts) {
  return IntegerPartition::of(std::vector<int>(parts));
}

inline SetPartition sp(int n,
                       std::initializer_list<std::initializer_list<int>> blocks) {
  std::vector<std::vector<int>> b;
  for (const auto& blk : blocks) b.emplace_back(blk);
  return SetPartition::of(n, std::move(b));
}

inline std::vector<Rational> row(std::initializer_list<const char*> entries) {
  std::vector<Rational> out;
  for (const char* e : entries) out.push_back(parse_rational(e));
  return out;
}

}  // namespace coalfreeze::testing
