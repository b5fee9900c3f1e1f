// Apache License, Version 2.0, refer to LICENSE.txt
#include <doctest.h>

#include <vector>

#include "coalfreeze/eppf.hpp"
#include "coalfreeze/rng.hpp"
#include "helpers.hpp"

using namespace coalfreeze;
using namespace coalfreeze::testing;

namespace {

QPolynomial poly(
    std::initializer_list<
        std::pair<const char*, std::vector<std::pair<int, int>>>>
        terms) {
  QPolynomial p;
  for (const auto& [coeff, factors] : terms) {
    QMonomial mono;
    mono.factors = factors;
    std::sort(mono.factors.begin(), mono.factors.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    p.add(mono, parse_rational(coeff));
  }
  return p;
}

DecrementMatrix random_matrix(Flavor flavor, int n, uint64_t seed) {
  RngStream rng(seed);
  std::vector<Rational> top;
  Rational total(0);
  for (int k = 0; k < n; ++k) {
    const Rational w = rat(1 + static_cast<long>(rng.below(9)));
    top.push_back(w);
    total += w;
  }
  for (auto& w : top) w /= total;
  return extend_backward(top, flavor);
}

}  // namespace

TEST_CASE("first values of the forward recursion") {
  const auto m = random_matrix(Flavor::mohle, 4, 51);
  const auto p = mohle_eppf(m, 4);
  CHECK(p.at(ip({1})) == Rational(1));
  CHECK(p.at(ip({2})) == m.q(2, 2));
  CHECK(p.at(ip({1, 1})) == m.q(2, 1));
  CHECK(p.at(ip({3})) == m.q(3, 3) + m.q(3, 2) * m.q(2, 2));
  CHECK(p.at(ip({2, 1})) ==
        m.q(3, 2) * m.q(2, 1) / 3 + m.q(3, 1) * m.q(2, 2) / 3);
  CHECK(p.at(ip({1, 1, 1})) == m.q(3, 1) * m.q(2, 1));
  CHECK(p.at(ip({1, 1, 1, 1})) == m.q(4, 1) * m.q(3, 1) * m.q(2, 1));
  p.validate();
}

TEST_CASE("kingman rho = 1/2 gives the size-3 table 1/3, 1/6, 1/6") {
  const auto m = from_measure(FreezeMeasure::kingman(q("1/2")), 3);
  const auto p = mohle_eppf(m, 3);
  CHECK(p.at(ip({3})) == q("1/3"));
  CHECK(p.at(ip({2, 1})) == q("1/6"));
  CHECK(p.at(ip({1, 1, 1})) == q("1/6"));
}

TEST_CASE("symbolic expansion matches the displayed tables at n <= 4") {
  const auto sym = symbolic_mohle(4);
  CHECK(sym.at(ip({1})) == poly({{"1", {}}}));
  CHECK(sym.at(ip({2})) == poly({{"1", {{2, 2}}}}));
  CHECK(sym.at(ip({1, 1})) == poly({{"1", {{2, 1}}}}));
  CHECK(sym.at(ip({3})) == poly({{"1", {{3, 3}}}, {"1", {{3, 2}, {2, 2}}}}));
  CHECK(sym.at(ip({2, 1})) ==
        poly({{"1/3", {{3, 2}, {2, 1}}}, {"1/3", {{3, 1}, {2, 2}}}}));
  CHECK(sym.at(ip({1, 1, 1})) == poly({{"1", {{3, 1}, {2, 1}}}}));
  CHECK(sym.at(ip({4})) == poly({{"1", {{4, 4}}},
                                 {"1", {{4, 3}, {2, 2}}},
                                 {"1", {{4, 2}, {3, 3}}},
                                 {"1", {{4, 2}, {3, 2}, {2, 2}}}}));
  // The five monomials of p(3,1).  The recursion forces 1/6 and 1/4 on the
  // third and fifth coefficients (the printed source table carries a typo:
  // with 1/2 and 1/12 the table would not normalize and the delta_0 case
  // would no longer match the Ewens formula).
  CHECK(sym.at(ip({3, 1})) == poly({{"1/4", {{4, 3}, {2, 1}}},
                                    {"1/6", {{4, 2}, {3, 2}, {2, 1}}},
                                    {"1/6", {{4, 2}, {3, 1}, {2, 2}}},
                                    {"1/4", {{4, 1}, {3, 3}}},
                                    {"1/4", {{4, 1}, {3, 2}, {2, 2}}}}));
  CHECK(sym.at(ip({2, 1, 1})) == poly({{"1/6", {{4, 2}, {3, 1}, {2, 1}}},
                                       {"1/6", {{4, 1}, {3, 2}, {2, 1}}},
                                       {"1/6", {{4, 1}, {3, 1}, {2, 2}}}}));
  CHECK(sym.at(ip({1, 1, 1, 1})) ==
        poly({{"1", {{4, 1}, {3, 1}, {2, 1}}}}));
}

TEST_CASE("symbolic regenerative expansion matches the displayed table") {
  const auto sym = symbolic_regenerative(4);
  CHECK(sym.at(ip({2})) == poly({{"1", {{2, 2}}}}));
  CHECK(sym.at(ip({1, 1})) == poly({{"1", {{2, 1}}}}));
  CHECK(sym.at(ip({3})) == poly({{"1", {{3, 3}}}}));
  CHECK(sym.at(ip({2, 1})) ==
        poly({{"1/3", {{3, 2}}}, {"1/3", {{3, 1}, {2, 2}}}}));
  CHECK(sym.at(ip({1, 1, 1})) == poly({{"1", {{3, 1}, {2, 1}}}}));
  CHECK(sym.at(ip({4})) == poly({{"1", {{4, 4}}}}));
  CHECK(sym.at(ip({3, 1})) ==
        poly({{"1/4", {{4, 3}}}, {"1/4", {{4, 1}, {3, 3}}}}));
  CHECK(sym.at(ip({2, 1, 1})) == poly({{"1/6", {{4, 2}, {2, 1}}},
                                       {"1/6", {{4, 1}, {3, 2}}},
                                       {"1/6", {{4, 1}, {3, 1}, {2, 2}}}}));
  CHECK(sym.at(ip({1, 1, 1, 1})) ==
        poly({{"1", {{4, 1}, {3, 1}, {2, 1}}}}));
}

TEST_CASE("symbolic evaluation equals the numeric engines") {
  const auto mm = random_matrix(Flavor::mohle, 5, 99);
  const auto pm = mohle_eppf(mm, 5);
  const auto sm = symbolic_mohle(5);
  const auto mr = random_matrix(Flavor::regenerative, 5, 100);
  const auto pr = regenerative_eppf(mr, 5);
  const auto sr = symbolic_regenerative(5);
  for (int m = 1; m <= 5; ++m) {
    for (const auto& lam : integer_partitions_of(m)) {
      CHECK(sm.at(lam).evaluate(mm) == pm.at(lam));
      CHECK(sr.at(lam).evaluate(mr) == pr.at(lam));
    }
  }
}

TEST_CASE("ewens sampling formula values") {
  const auto p = ewens_eppf(Rational(1), 3);
  CHECK(p.at(ip({1})) == Rational(1));
  CHECK(p.at(ip({2, 1})) == q("1/6"));
  CHECK(p.at(ip({1, 1, 1})) == q("1/6"));
  const auto p5 = ewens_eppf(q("5/2"), 5);
  p5.validate();
  CHECK(check_addition_rule(p5, 5).ok);
}

TEST_CASE("delta_0 matrices reproduce the Ewens formula with theta = 2 rho") {
  for (const char* rho : {"1/2", "1", "5/2"}) {
    const auto m = from_measure(FreezeMeasure::kingman(q(rho)), 6);
    const auto lhs = mohle_eppf(m, 6);
    const auto rhs = ewens_eppf(2 * q(rho), 6);
    for (int mm = 1; mm <= 6; ++mm)
      for (const auto& lam : integer_partitions_of(mm))
        CHECK(lhs.at(lam) == rhs.at(lam));
  }
}

TEST_CASE("delta_1 matrices concentrate on hook shapes") {
  const auto m = from_measure(FreezeMeasure::hook(Rational(1)), 6);
  const auto p = mohle_eppf(m, 6);
  for (int mm = 1; mm <= 6; ++mm) {
    for (const auto& lam : integer_partitions_of(mm)) {
      bool hook_shape = true;
      for (size_t i = 1; i < lam.parts.size(); ++i)
        hook_shape = hook_shape && lam.parts[i] == 1;
      if (!hook_shape) CHECK(p.at(lam) == Rational(0));
    }
  }
}

TEST_CASE("regenerative explicit formula equals the recursion") {
  const auto m = random_matrix(Flavor::regenerative, 6, 4242);
  const auto p = regenerative_eppf(m, 6);
  for (int mm = 1; mm <= 6; ++mm)
    for (const auto& lam : integer_partitions_of(mm))
      CHECK(regenerative_eppf_explicit(m, Composition(lam.parts)) ==
            p.at(lam));
  // order independence across a composition's rearrangements
  CHECK(regenerative_eppf_explicit(m, Composition({1, 2, 1})) ==
        p.at(ip({2, 1, 1})));
  CHECK(regenerative_eppf_explicit(m, Composition({6})) == m.q(6, 6));
}

TEST_CASE("singleton partitions have the product form in both flavors") {
  const auto mm = random_matrix(Flavor::mohle, 6, 7);
  const auto mr = random_matrix(Flavor::regenerative, 6, 8);
  Rational prod_m(1), prod_r(1);
  for (int b = 2; b <= 6; ++b) {
    prod_m *= mm.q(b, 1);
    prod_r *= mr.q(b, 1);
  }
  CHECK(mohle_eppf(mm, 6).at(ip({1, 1, 1, 1, 1, 1})) == prod_m);
  CHECK(regenerative_eppf(mr, 6).at(ip({1, 1, 1, 1, 1, 1})) == prod_r);
}

TEST_CASE("decrement recovery inverts the forward recursion") {
  const auto matrices = {
      from_measure(FreezeMeasure::kingman(q("1/2")), 6),
      from_measure(FreezeMeasure::uniform(Rational(1)), 6),
      from_measure(FreezeMeasure::atom_at(q("1/2"), Rational(1), Rational(1)),
                   6),
      random_matrix(Flavor::mohle, 6, 31337),
  };
  for (const auto& m : matrices) {
    const auto p = mohle_eppf(m, 6);
    CHECK(recover_decrement(p, 6) == m);
  }
}

TEST_CASE("decrement recovery needs p(1,1) > 0") {
  EppfTable p;
  p.n_max = 2;
  p.values[ip({1})] = Rational(1);
  p.values[ip({1, 1})] = Rational(0);
  p.values[ip({2})] = Rational(1);
  CHECK_THROWS_AS(recover_decrement(p, 2), std::invalid_argument);
}

TEST_CASE("engine and flavor must match") {
  const auto mm = random_matrix(Flavor::mohle, 4, 1);
  const auto mr = random_matrix(Flavor::regenerative, 4, 2);
  CHECK_THROWS_AS(mohle_eppf(mr, 4), std::invalid_argument);
  CHECK_THROWS_AS(regenerative_eppf(mm, 4), std::invalid_argument);
  CHECK_THROWS_AS(regenerative_eppf_explicit(mm, Composition({2, 1})),
                  std::invalid_argument);
}

TEST_CASE("inconsistent matrices yield tables violating the addition rule") {
  std::vector<std::vector<Rational>> rows{
      {Rational(1)}, row({"1/2", "1/2"}), row({"1/3", "1/3", "1/3"})};
  const DecrementMatrix bad(Flavor::mohle, rows);
  const auto p = mohle_eppf(bad, 3);
  p.validate();  // still a probability table at each size
  CHECK(!check_addition_rule(p, 3).ok);
}
