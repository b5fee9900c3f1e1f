// Apache License, Version 2.0, refer to LICENSE.txt
#include <doctest.h>

#include "coalfreeze/decrement.hpp"
#include "coalfreeze/measures.hpp"
#include "helpers.hpp"

using namespace coalfreeze;
using namespace coalfreeze::testing;

namespace {

// q(b:b) = 1 everywhere: full merges only, no freeze.
DecrementMatrix full_merge_matrix(int n) {
  std::vector<std::vector<Rational>> rows;
  for (int b = 1; b <= n; ++b) {
    std::vector<Rational> row(b, Rational(0));
    row[b - 1] = Rational(1);
    rows.push_back(std::move(row));
  }
  return DecrementMatrix(Flavor::mohle, std::move(rows));
}

}  // namespace

TEST_CASE("kingman and hook decrement rows have their closed forms") {
  const auto kingman = from_measure(FreezeMeasure::kingman(q("1/2")), 6);
  for (int b = 2; b <= 6; ++b) {
    CHECK(kingman.q(b, 1) == Rational(1) / b);  // 2rho/(b-1+2rho), rho=1/2
    CHECK(kingman.q(b, 2) == rat(b - 1, b));
    for (int k = 3; k <= b; ++k) CHECK(kingman.q(b, k) == 0);
  }
  const auto hook = from_measure(FreezeMeasure::hook(Rational(1)), 6);
  for (int b = 2; b <= 6; ++b) {
    CHECK(hook.q(b, 1) == rat(b, 1 + b));
    CHECK(hook.q(b, b) == rat(1, 1 + b));
    for (int k = 2; k < b; ++k) CHECK(hook.q(b, k) == 0);
  }
}

TEST_CASE("uniform measure decrement row at n = 3") {
  const auto m = from_measure(FreezeMeasure::uniform(Rational(1)), 3);
  CHECK(m.q(3, 1) == q("3/5"));
  CHECK(m.q(3, 2) == q("3/10"));
  CHECK(m.q(3, 3) == q("1/10"));
}

TEST_CASE("from_measure rejects the null measure but allows rho = 0") {
  FreezeMeasure null_measure;
  CHECK_THROWS(from_measure(null_measure, 3));
  const auto no_freeze =
      from_measure(FreezeMeasure::kingman(Rational(0)), 4);
  CHECK(no_freeze.q(1, 1) == Rational(1));
  CHECK(no_freeze.q(4, 2) == Rational(1));
  CHECK(no_freeze.q(4, 1) == Rational(0));
}

TEST_CASE("backward extension from a uniform row of length 4") {
  const auto m = extend_backward(row({"1/4", "1/4", "1/4", "1/4"}),
                                 Flavor::mohle);
  CHECK(m.q(3, 1) == q("3/13"));
  CHECK(m.q(3, 2) == q("5/13"));
  CHECK(m.q(3, 3) == q("5/13"));
  CHECK(m.q(1, 1) == Rational(1));
}

TEST_CASE("backward extension closed forms from a generic fourth row") {
  const auto row4 = row({"1/10", "2/10", "3/10", "4/10"});
  const auto mohle = extend_backward(row4, Flavor::mohle);
  CHECK(mohle.q(3, 1) == q("3/35"));
  CHECK(mohle.q(3, 2) == q("13/35"));
  CHECK(mohle.q(3, 3) == q("19/35"));
  const auto regen = extend_backward(row4, Flavor::regenerative);
  CHECK(regen.q(3, 1) == q("7/39"));
  CHECK(regen.q(3, 2) == q("13/39"));
  CHECK(regen.q(3, 3) == q("19/39"));
}

TEST_CASE("extension of the top measure row reproduces the whole matrix") {
  const auto measures = {
      FreezeMeasure::kingman(q("1/2")),
      FreezeMeasure::hook(Rational(1)),
      FreezeMeasure::uniform(Rational(1)),
      FreezeMeasure::atom_at(q("1/2"), Rational(1), Rational(1)),
  };
  for (const auto& m : measures) {
    const auto a = from_measure(m, 8);
    CHECK(extend_backward(a.row(8), Flavor::mohle) == a);
    const auto b = regenerative_from_measure(m, 8);
    CHECK(extend_backward(b.row(8), Flavor::regenerative) == b);
  }
}

TEST_CASE("consistency check accepts measure matrices and the full-merge matrix") {
  for (const auto& m : {FreezeMeasure::kingman(Rational(1)),
                        FreezeMeasure::uniform(Rational(1))}) {
    CHECK(check_consistency(from_measure(m, 8)).ok);
    CHECK(check_consistency(regenerative_from_measure(m, 8)).ok);
  }
  CHECK(check_consistency(full_merge_matrix(8)).ok);
}

TEST_CASE("consistency check pinpoints a perturbed row") {
  auto rows = std::vector<std::vector<Rational>>{
      {Rational(1)}, row({"1/2", "1/2"}), row({"1/3", "1/3", "1/3"})};
  const DecrementMatrix bad(Flavor::mohle, rows);
  const auto report = check_consistency(bad);
  CHECK(!report.ok);
  CHECK(!report.first_violation.empty());
}

TEST_CASE("phi ladder recovery for a kingman matrix") {
  const auto m = from_measure(FreezeMeasure::kingman(q("1/2")), 8);
  const auto ladder = recover_phi_ladder(m, q("1/2"));
  CHECK(!ladder.rho_zero_boundary);
  CHECK(ladder.rho == q("1/2"));
  for (int b = 1; b <= 8; ++b) {
    CHECK(ladder.phi[b - 1] == rat(b) / 2 + rat(b * (b - 1)) / 2);
    // rho = Phi(b) q(b:1) / b, constant in b
    CHECK(ladder.phi[b - 1] * m.q(b, 1) / b == q("1/2"));
  }
  // scaling the seed scales the ladder, not the matrix
  const auto doubled = recover_phi_ladder(m, Rational(1));
  for (int b = 1; b <= 8; ++b) {
    CHECK(doubled.phi[b - 1] == 2 * ladder.phi[b - 1]);
    for (int k = 1; k <= b; ++k)
      CHECK(doubled.parts[b - 1][k - 1] == 2 * ladder.parts[b - 1][k - 1]);
  }
}

TEST_CASE("phi ladder recovery satisfies the Pascal-triangle identity") {
  const auto measures = {FreezeMeasure::uniform(Rational(1)),
                         FreezeMeasure::atom_at(q("1/2"), q("2/3"), q("1/3"))};
  for (const auto& meas : measures) {
    const auto m = from_measure(meas, 8);
    const auto ladder = recover_phi_ladder(m);
    for (int b = 2; b < 8; ++b)
      for (int k = 2; k <= b; ++k)
        CHECK(ladder.parts[b - 1][k - 1] ==
              (rat(k + 1) * ladder.parts[b][k] +
               rat(b + 1 - k) * ladder.parts[b][k - 1]) /
                  rat(b + 1));
  }
}

TEST_CASE("phi ladder recovery flags the no-freeze boundary") {
  const auto ladder = recover_phi_ladder(full_merge_matrix(5), Rational(1));
  CHECK(ladder.rho_zero_boundary);
  CHECK(ladder.rho == Rational(0));
  CHECK(ladder.phi[0] == Rational(0));
  CHECK(ladder.phi[1] == Rational(1));  // anchored at Phi(2)
}

TEST_CASE("backward-difference construction reproduces measure ladders") {
  const auto measures = {
      FreezeMeasure::kingman(Rational(1)),
      FreezeMeasure::hook(Rational(1)),
      FreezeMeasure::uniform(Rational(1)),
      FreezeMeasure::atom_at(q("1/2"), Rational(1), Rational(1)),
  };
  for (const auto& meas : measures) {
    std::vector<Rational> phis;
    for (int b = 1; b <= 8; ++b) phis.push_back(phi_total(meas, b).value);
    const auto report = phi_from_sequence(phis, meas.rho);
    CHECK(report.valid());
    for (int b = 1; b <= 8; ++b)
      for (int k = 1; k <= b; ++k)
        CHECK(report.ladder.parts[b - 1][k - 1] == phi(meas, b, k).value);
    CHECK(check_consistency(ladder_to_decrement(report.ladder)).ok);
  }
}

TEST_CASE("backward-difference construction: explicit small ladders") {
  // Phi(n) = n + n(n-1)/2 at rho = 1: binary merges only
  std::vector<Rational> kingman_phi;
  for (int b = 1; b <= 8; ++b)
    kingman_phi.push_back(rat(b) + rat(b * (b - 1)) / 2);
  const auto kr = phi_from_sequence(kingman_phi, Rational(1));
  CHECK(kr.valid());
  for (int b = 2; b <= 8; ++b) {
    CHECK(kr.ladder.parts[b - 1][1] == rat(b * (b - 1)) / 2);
    for (int k = 3; k <= b; ++k) CHECK(kr.ladder.parts[b - 1][k - 1] == 0);
  }
  // Phi(n) = n + (n-1) at rho = 1: Phi(n:m) = n/(m(m-1))
  std::vector<Rational> uniform_phi;
  for (int b = 1; b <= 8; ++b) uniform_phi.push_back(rat(2 * b - 1));
  const auto ur = phi_from_sequence(uniform_phi, Rational(1));
  CHECK(ur.valid());
  for (int b = 2; b <= 8; ++b)
    for (int k = 2; k <= b; ++k)
      CHECK(ur.ladder.parts[b - 1][k - 1] == rat(b) / rat(k * (k - 1)));
}

TEST_CASE("backward-difference construction rejects Phi(n) = n + n^2") {
  // Every nabla entry is nonnegative here; the failure shows up in the row
  // sums (Phi(1) != rho), which is the other representability channel.
  std::vector<Rational> phis;
  for (int b = 1; b <= 12; ++b) phis.push_back(rat(b + b * b));
  const auto report = phi_from_sequence(phis, Rational(1));
  CHECK(!report.valid());
  CHECK(report.all_nonnegative);
  CHECK(!report.row_sums_ok);
  CHECK(report.bad_row_sums.size() == 12);
  CHECK_THROWS(
      [&] { (void)DecrementMatrix(ladder_to_decrement(report.ladder)); }());
}

TEST_CASE("backward-difference construction reports genuine negative entries") {
  // Phibar(n) = 2^n decays too slowly for complete monotonicity
  std::vector<Rational> phis;
  Rational pow2(2);
  for (int b = 1; b <= 8; ++b) {
    phis.push_back(rat(b) + pow2);
    pow2 *= 2;
  }
  const auto report = phi_from_sequence(phis, Rational(1));
  CHECK(!report.all_nonnegative);
  CHECK(!report.negative_entries.empty());
  CHECK(report.negative_entries.front() == std::make_pair(4, 3));
}

TEST_CASE("decrement matrix validation") {
  CHECK_THROWS(DecrementMatrix(Flavor::mohle, {row({"1/2", "1/2"})}));
  CHECK_THROWS(DecrementMatrix(Flavor::mohle,
                               {{Rational(1)}, row({"1/2", "1/3"})}));
  CHECK_THROWS(extend_backward(row({"2/3", "1/2"}), Flavor::mohle));
}
