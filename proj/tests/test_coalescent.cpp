// Apache License, Version 2.0, refer to LICENSE.txt
#include <doctest.h>

#include <cmath>
#include <map>

#include "coalfreeze/coalescent.hpp"
#include "coalfreeze/eppf.hpp"
#include "coalfreeze/mc.hpp"
#include "helpers.hpp"

using namespace coalfreeze;
using namespace coalfreeze::testing;

TEST_CASE("a single line freezes in one event") {
  const auto m = FreezeMeasure::kingman(q("1/2"));
  RngStream rng(5);
  double total = 0.0;
  const int runs = 20000;
  for (int r = 0; r < runs; ++r) {
    const auto traj = simulate(1, m, rng);
    REQUIRE(traj.complete);
    REQUIRE(traj.events.size() == 1);
    CHECK(!traj.events[0].is_merge);
    total += traj.events[0].time;
  }
  // Exponential(rho) with rho = 1/2: mean 2, sd 2
  const double mean = total / runs;
  CHECK(std::abs(mean - 2.0) < 4.0 * 2.0 / std::sqrt(runs));
}

TEST_CASE("two lines: event split and holding time") {
  // Phi(2) = 2 Phi(2:1) = rho*2 = 1, Phi(2:2) = 1
  const auto m = FreezeMeasure::kingman(q("1/2"));
  RngStream rng(6);
  const int runs = 40000;
  int merges = 0;
  double first_time = 0.0;
  for (int r = 0; r < runs; ++r) {
    const auto traj = simulate(2, m, rng);
    merges += traj.events[0].is_merge;
    first_time += traj.events[0].time;
  }
  const double share = static_cast<double>(merges) / runs;
  CHECK(std::abs(share - 0.5) < 4.0 * 0.5 / std::sqrt(runs));
  const double mean = first_time / runs;  // Exponential(2)
  CHECK(std::abs(mean - 0.5) < 4.0 * 0.5 / std::sqrt(runs));
}

TEST_CASE("freezing times are constant exactly on final blocks") {
  const auto m = FreezeMeasure::uniform(Rational(1));
  RngStream rng(7);
  for (int r = 0; r < 2000; ++r) {
    const auto traj = simulate(6, m, rng);
    REQUIRE(traj.complete);
    const auto tau = freezing_times(traj);
    for (const auto& blk : traj.final.blocks) {
      for (int x : blk) CHECK(tau[x - 1] == tau[blk.front() - 1]);
    }
    // distinct blocks froze at distinct event times
    std::map<double, int> by_time;
    for (const auto& blk : traj.final.blocks) by_time[tau[blk.front() - 1]] += 1;
    CHECK(by_time.size() == traj.final.blocks.size());
  }
}

TEST_CASE("age order lists blocks by decreasing freezing time") {
  Trajectory traj;
  traj.n = 3;
  traj.complete = true;
  traj.final = PartiallyFrozenPartition::of(3, {{1, 2}, {3}}, {1, 1});
  traj.freezing_times_by_element = {1.0, 1.0, 0.5};
  const auto ordered = age_order(traj);
  REQUIRE(ordered.blocks.size() == 2);
  CHECK(ordered.blocks[0] == std::vector<int>{1, 2});
  CHECK(ordered.blocks[1] == std::vector<int>{3});
  CHECK(ordered.tau[0] == 1.0);

  Trajectory single;
  single.n = 2;
  single.complete = true;
  single.final = PartiallyFrozenPartition::of(2, {{1, 2}}, {1});
  single.freezing_times_by_element = {0.7, 0.7};
  CHECK(age_order(single).blocks.size() == 1);

  Trajectory tied;
  tied.n = 2;
  tied.complete = true;
  tied.final = PartiallyFrozenPartition::of(2, {{1}, {2}}, {1, 1});
  tied.freezing_times_by_element = {0.7, 0.7};
  CHECK_THROWS_AS(age_order(tied), std::logic_error);
}

TEST_CASE("embedded jump chain is the fm chain") {
  const auto m = FreezeMeasure::uniform(Rational(1));
  const auto mat = from_measure(m, 5);
  const auto exact = mohle_eppf(mat, 5);
  const auto emp = coalescent_estimate_eppf(5, m, 50000, 2024, true);
  CHECK(max_sigma_deviation(emp, exact) < 4.0);
  const auto emp_fm = fm_estimate_eppf(5, mat, 50000, 2025, true);
  CHECK(max_sigma_deviation(emp_fm, exact) < 4.0);
}

TEST_CASE("holding times have mean 1/Phi(b)") {
  const auto m = FreezeMeasure::uniform(Rational(1));
  const int n = 5;
  std::vector<double> expected(n + 1);
  for (int b = 1; b <= n; ++b)
    expected[b] = 1.0 / to_double(phi_total(m, b).value);
  RngStream rng(11);
  std::vector<double> sum(n + 1, 0.0);
  std::vector<long> visits(n + 1, 0);
  for (int r = 0; r < 20000; ++r) {
    const auto traj = simulate(n, m, rng);
    int b = n;
    double prev = 0.0;
    for (const auto& e : traj.events) {
      sum[b] += e.time - prev;
      visits[b] += 1;
      prev = e.time;
      b -= e.is_merge ? static_cast<int>(e.blocks.size()) - 1 : 1;
    }
  }
  for (int b = 1; b <= n; ++b) {
    REQUIRE(visits[b] > 1000);
    const double mean = sum[b] / static_cast<double>(visits[b]);
    const double sigma = expected[b] / std::sqrt(static_cast<double>(visits[b]));
    CHECK(std::abs(mean - expected[b]) < 4.0 * sigma);
  }
}

TEST_CASE("coupled freeze rates refine per run") {
  const auto lambda = FreezeMeasure::uniform(Rational(0));
  RngStream rng(13);
  for (int r = 0; r < 400; ++r) {
    const auto run = simulate_coupled(30, lambda, Rational(1), Rational(3), rng);
    CHECK(run.high_refines_low);
    CHECK(run.high.blocks.size() >= run.low.blocks.size());
  }
  // equal rates couple to identical partitions
  for (int r = 0; r < 50; ++r) {
    const auto run = simulate_coupled(10, lambda, Rational(2), Rational(2), rng);
    CHECK(run.low == run.high);
  }
}

TEST_CASE("paintbox intervals are disjoint subintervals of [0,1]") {
  const auto m = FreezeMeasure::uniform(Rational(1));
  const auto report = paintbox_estimate(m, 120, 200, 17, true);
  CHECK(report.per_run.size() == 200);
  for (const auto& run : report.per_run) {
    double prev_end = 0.0;
    for (const auto& iv : run.intervals) {
      CHECK(iv.a >= prev_end - 1e-12);
      CHECK(iv.b <= 1.0 + 1e-12);
      CHECK(iv.b > iv.a);
      prev_end = iv.b;
    }
    CHECK(run.block_count == static_cast<int>(run.intervals.size()));
  }
}

TEST_CASE("hook measures paint a single non-singleton interval") {
  const auto m = FreezeMeasure::hook(q("1/2"));
  const auto report = paintbox_estimate(m, 100, 400, 19, true);
  int with_one = 0;
  for (const auto& run : report.per_run) {
    int nonsingleton = 0;
    for (const auto& iv : run.intervals) nonsingleton += (iv.block_size > 1);
    CHECK(nonsingleton <= 1);
    with_one += (nonsingleton == 1);
  }
  CHECK(with_one >= 392);  // all-freeze runs are possible but rare
}

TEST_CASE("kingman age-ordered frequencies match the stick-breaking moments") {
  // oldest block frequency 1 - Y1, second Y1 (1 - Y2), Y ~ Beta(2 rho, 1);
  // with rho = 1/2 the first moments are 1/2 and 1/4.
  const auto m = FreezeMeasure::kingman(q("1/2"));
  const int n = 200, runs = 2000;
  const auto rates = RateTable::build(m, n);
  RngStream rng(23);
  double f1 = 0.0, f2 = 0.0;
  long have2 = 0;
  for (int r = 0; r < runs; ++r) {
    const auto traj = simulate(n, rates, m.rho, rng);
    const auto ordered = age_order(traj);
    f1 += static_cast<double>(ordered.blocks[0].size()) / n;
    if (ordered.blocks.size() >= 2) {
      f2 += static_cast<double>(ordered.blocks[1].size()) / n;
      ++have2;
    }
  }
  // 4 sigma plus a finite-n allowance
  CHECK(std::abs(f1 / runs - 0.5) < 0.035);
  CHECK(std::abs(f2 / static_cast<double>(have2) - 0.25) < 0.035);
}

TEST_CASE("singleton fraction tracks the mu_{-1} dichotomy") {
  const auto finite = FreezeMeasure::atom_at(q("1/2"), Rational(1), Rational(1));
  const auto f60 = singleton_report(finite, 60, 300, 31, true);
  const auto f120 = singleton_report(finite, 120, 300, 32, true);
  CHECK(f60.mu_minus1_finite);
  CHECK(f60.singleton_fraction > 0.05);
  CHECK(f120.singleton_fraction > 0.05);

  const auto infinite = FreezeMeasure::kingman(Rational(1));
  const auto k30 = singleton_report(infinite, 30, 300, 33, true);
  const auto k60 = singleton_report(infinite, 60, 300, 34, true);
  const auto k120 = singleton_report(infinite, 120, 300, 35, true);
  CHECK(!k30.mu_minus1_finite);
  CHECK(k30.singleton_fraction > k60.singleton_fraction);
  CHECK(k60.singleton_fraction > k120.singleton_fraction);
}

TEST_CASE("rho = 0 needs a horizon and leaves survivors") {
  const auto m = FreezeMeasure::kingman(Rational(0));
  RngStream rng(37);
  CHECK_THROWS_AS(simulate(3, m, rng), std::invalid_argument);
  const auto traj = simulate(3, m, rng, 1e9);
  CHECK(!traj.complete);
  CHECK(traj.final.induced() == SetPartition::one_block(3));
}
