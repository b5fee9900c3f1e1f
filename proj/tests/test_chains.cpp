// Apache License, Version 2.0, refer to LICENSE.txt
#include <doctest.h>

#include <algorithm>

#include "coalfreeze/chains.hpp"
#include "coalfreeze/eppf.hpp"
#include "helpers.hpp"

using namespace coalfreeze;
using namespace coalfreeze::testing;

namespace {

DecrementMatrix pure_freeze_matrix(int n) {
  std::vector<std::vector<Rational>> rows;
  for (int b = 1; b <= n; ++b) {
    std::vector<Rational> r(b, Rational(0));
    r[0] = Rational(1);
    rows.push_back(std::move(r));
  }
  return DecrementMatrix(Flavor::mohle, std::move(rows));
}

DecrementMatrix matrix_from_top(std::vector<Rational> top) {
  return extend_backward(std::move(top), Flavor::mohle);
}

}  // namespace

TEST_CASE("fm_step edge cases") {
  const auto q4 = from_measure(FreezeMeasure::uniform(Rational(1)), 4);
  RngStream rng(1);

  // all-frozen states are fixed points
  auto done = PartiallyFrozenPartition::of(3, {{1, 2}, {3}}, {1, 1});
  CHECK(fm_step(done, q4, rng) == done);

  // one active block always freezes
  auto one = PartiallyFrozenPartition::of(3, {{1, 2}, {3}}, {0, 1});
  const auto next = fm_step(one, q4, rng);
  CHECK(next.all_frozen());
  CHECK(next.induced() == one.induced());

  // q(2:1) = 1 forces a freeze from two active singletons
  auto two = PartiallyFrozenPartition::all_active_singletons(2);
  const auto stepped = fm_step(two, pure_freeze_matrix(2), rng);
  CHECK(stepped.active_count() == 1);
  CHECK(stepped.induced() == SetPartition::singletons(2));
}

TEST_CASE("fm_run pure freeze and pure merge endpoints") {
  RngStream rng(2);
  const auto frozen_run = fm_run(2, pure_freeze_matrix(2), rng);
  CHECK(frozen_run.final == SetPartition::singletons(2));
  CHECK(frozen_run.steps == 2);

  // q(b:1) = 0: everything merges into one block before the last freeze
  const auto merge_only = from_measure(FreezeMeasure::kingman(Rational(0)), 6);
  for (int trial = 0; trial < 20; ++trial) {
    const auto run = fm_run(6, merge_only, rng);
    CHECK(run.final == SetPartition::one_block(6));
  }
}

TEST_CASE("fm_run stays within the 2n-1 step bound") {
  const auto m = from_measure(FreezeMeasure::uniform(Rational(1)), 10);
  RngStream rng(3);
  for (int trial = 0; trial < 10000; ++trial) {
    const auto run = fm_run(10, m, rng);
    CHECK(run.steps <= 19);
    CHECK(run.final.shape().n() == 10);
  }
}

TEST_CASE("exact FM final law equals the forward recursion") {
  const auto matrices = {
      from_measure(FreezeMeasure::kingman(q("1/2")), 4),
      from_measure(FreezeMeasure::uniform(Rational(1)), 4),
      matrix_from_top(row({"1/10", "2/10", "3/10", "4/10"})),
  };
  for (const auto& m : matrices) {
    const auto law = fm_final_law(4, m);
    const auto p = mohle_eppf(m, 4);
    for (const auto& [part, prob] : law.mass) CHECK(prob == p.at(part.shape()));
    // exchangeability: equal shapes carry equal mass, covering all partitions
    CHECK(law.mass.size() == 15);  // Bell(4)
  }
}

TEST_CASE("sa_step on two balls") {
  // exact one-step laws via the transition matrix
  const auto states = enumerate_set_partitions(2);
  const auto P = sa_transition_matrix(2, row({"1/3", "2/3"}));
  REQUIRE(states[0] == SetPartition::one_block(2));
  REQUIRE(states[1] == SetPartition::singletons(2));
  CHECK(P[1][1] == q("1/3"));  // K=1 keeps the singletons
  CHECK(P[1][0] == q("2/3"));  // K=2: lone survivor is marked, box merges
  CHECK(P[0][1] == q("1/3"));  // K=1: deleted ball re-enters as a singleton
  CHECK(P[0][0] == q("2/3"));
}

TEST_CASE("sa transition rows are stochastic") {
  const auto top = row({"1/10", "2/10", "3/10", "4/10"});
  const auto P = sa_transition_matrix(4, top);
  CHECK(P.size() == 15);
  for (const auto& r : P) {
    Rational sum(0);
    for (const auto& v : r) sum += v;
    CHECK(sum == Rational(1));
  }
  const auto P3 = sa_transition_matrix(3, row({"1/3", "1/3", "1/3"}));
  CHECK(P3.size() == 5);
}

TEST_CASE("sa stationary law: degenerate rows give point masses") {
  const auto all_freeze = sa_stationary(4, row({"1", "0", "0", "0"}));
  CHECK(all_freeze.mass.at(SetPartition::singletons(4)) == Rational(1));
  const auto no_freeze = sa_stationary(4, row({"0", "1/2", "0", "1/2"}));
  CHECK(no_freeze.mass.at(SetPartition::one_block(4)) == Rational(1));
}

TEST_CASE("sa stationary law matches the recursion for the kingman row") {
  const auto dist = sa_stationary(3, row({"1/3", "2/3", "0"}));
  const auto law = shape_law(dist);
  CHECK(law.at(ip({3})) == q("1/3"));
  CHECK(law.at(ip({2, 1})) == q("1/2"));   // 3 partitions x 1/6
  CHECK(law.at(ip({1, 1, 1})) == q("1/6"));
}

TEST_CASE("sa stationary equals fm final law equals the recursion") {
  const auto tops = {row({"1/10", "2/10", "3/10", "4/10"}),
                     row({"1/4", "1/4", "1/4", "1/4"}),
                     row({"1/2", "0", "0", "1/2"})};
  for (const auto& top : tops) {
    const auto m = matrix_from_top(top);
    const auto stationary = shape_law(sa_stationary(4, top));
    const auto fm = shape_law(fm_final_law(4, m));
    const auto rec = eppf_shape_law(mohle_eppf(m, 4), 4);
    CHECK(stationary == fm);
    CHECK(stationary == rec);
  }
}

TEST_CASE("sa chain has one closed communicating class") {
  for (int n = 3; n <= 6; ++n) {
    std::vector<Rational> top(n, Rational(0));
    top[0] = q("1/3");
    top[1] = q("1/3");
    top[n - 1] += q("1/3");
    const auto members = sa_recurrent_class(n, top);
    CHECK(members.size() == enumerate_set_partitions(n).size());
  }
  // hook row: the closed class is the hook-shaped partitions
  const auto hook_members = sa_recurrent_class(4, row({"1/2", "0", "0", "1/2"}));
  const auto states = enumerate_set_partitions(4);
  for (int idx : hook_members) {
    const auto shape = states[idx].shape();
    for (size_t i = 1; i < shape.parts.size(); ++i)
      CHECK(shape.parts[i] == 1);
  }
  CHECK(hook_members.size() < states.size());
}

TEST_CASE("restriction jump law is consistent for measure matrices") {
  const auto m = from_measure(FreezeMeasure::kingman(q("1/2")), 4);
  const auto report = check_jump_consistency(m, 4, 3);
  CHECK(report.exact_mode);
  CHECK(report.max_tv == 0.0);
  CHECK(report.states_checked > 0);

  const auto u = from_measure(FreezeMeasure::uniform(Rational(1)), 5);
  for (int mm = 1; mm <= 4; ++mm)
    CHECK(check_jump_consistency(u, 5, mm).max_tv == 0.0);

  // rho = 0 exercises the multi-step paths (one step often cannot move the
  // restriction at all)
  const auto pure = from_measure(
      FreezeMeasure::atom_at(q("1/2"), Rational(1), Rational(0)), 4);
  CHECK(check_jump_consistency(pure, 4, 2).max_tv == 0.0);
}

TEST_CASE("restriction jump law detects the uniform-rows matrix") {
  std::vector<std::vector<Rational>> rows{
      {Rational(1)}, row({"1/2", "1/2"}), row({"1/3", "1/3", "1/3"})};
  const DecrementMatrix bad(Flavor::mohle, rows);
  const auto report = check_jump_consistency(bad, 3, 2);
  CHECK(report.exact_mode);
  CHECK(report.max_tv == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("restriction at full size is trivially consistent") {
  const auto m = from_measure(FreezeMeasure::uniform(Rational(1)), 4);
  CHECK(check_jump_consistency(m, 4, 4).max_tv == 0.0);
}

TEST_CASE("monte carlo mode reports small deviation for a consistent matrix") {
  const auto m = from_measure(FreezeMeasure::uniform(Rational(1)), 7);
  const auto report = check_jump_consistency(m, 7, 4, 20000, 99);
  CHECK(!report.exact_mode);
  CHECK(report.max_tv <= 4.0 * report.mc_error);
}

TEST_CASE("sa operations are not consistent under restriction") {
  // One step of SA_3 from singletons, restricted to [2], against one step of
  // SA_2 from the restricted state: the laws differ (exact TV = 2/15 for the
  // uniform measure at rho = 1), so no analogue of the FM restriction
  // property can hold for SA.
  const auto m3 = from_measure(FreezeMeasure::uniform(Rational(1)), 3);
  const auto P3 = sa_transition_matrix(3, m3.row(3));
  const auto P2 = sa_transition_matrix(2, m3.row(2));
  const auto states3 = enumerate_set_partitions(3);
  const auto states2 = enumerate_set_partitions(2);
  const size_t start3 = 4;  // {{1},{2},{3}} is last in RGS order
  REQUIRE(states3[start3] == SetPartition::singletons(3));
  const size_t start2 = 1;
  REQUIRE(states2[start2] == SetPartition::singletons(2));

  std::map<SetPartition, Rational> restricted, direct;
  for (size_t j = 0; j < states3.size(); ++j)
    restricted[states3[j].restrict_to(2)] += P3[start3][j];
  for (size_t j = 0; j < states2.size(); ++j)
    direct[states2[j]] += P2[start2][j];
  Rational tv(0);
  for (const auto& [k, v] : restricted) tv += abs(v - direct[k]);
  CHECK(tv / 2 == q("2/15"));
}

TEST_CASE("identical seeds give identical runs") {
  const auto m = from_measure(FreezeMeasure::uniform(Rational(1)), 6);
  RngStream a(12345), b(12345), c(54321);
  const auto ra = fm_run(6, m, a);
  const auto rb = fm_run(6, m, b);
  CHECK(ra.final == rb.final);
  CHECK(ra.steps == rb.steps);
  bool any_diff = false;
  RngStream a2(12345);
  for (int i = 0; i < 50; ++i) {
    const auto x = fm_run(6, m, a2);
    const auto y = fm_run(6, m, c);
    any_diff = any_diff || !(x.final == y.final);
  }
  CHECK(any_diff);
}
