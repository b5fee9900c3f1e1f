// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <map>
#include <string>
#include <vector>

#include "coalfreeze/decrement.hpp"
#include "coalfreeze/partitions.hpp"
#include "coalfreeze/rng.hpp"

namespace coalfreeze {

// One freeze-and-merge move.  With b > 1 active blocks: probability q(b:k)
// merges a uniform k-subset of the active blocks into one active block,
// probability q(b:1) freezes a uniform active block.  b = 1 always freezes,
// all-frozen states are fixed.
PartiallyFrozenPartition fm_step(const PartiallyFrozenPartition& state,
                                 const DecrementMatrix& q, RngStream& rng);

struct FmRunResult {
  SetPartition final;
  int steps = 0;
};

// Iterates fm_step from the all-active singleton state until everything is
// frozen.  Terminates within 2n-1 steps (asserted).
FmRunResult fm_run(int n, const DecrementMatrix& q, RngStream& rng);

// One sample-and-add move on partitions of [n] driven by the row q(n:.):
// K = 1 re-seats one uniform ball as a singleton; K = k >= 2 removes an
// ordered uniform sample of k-1 balls, marks a uniform survivor and adds the
// removed balls to its box.
SetPartition sa_step(const SetPartition& state,
                     const std::vector<Rational>& row_n, RngStream& rng);

// Exact distribution over canonical set partitions.
struct Distribution {
  std::map<SetPartition, Rational> mass;

  void validate() const;  // nonnegative, sums to one
};

std::map<IntegerPartition, Rational> shape_law(const Distribution& dist);

// Shape law of the EPPF at top size: shape_count(lambda) * p(lambda).
std::map<IntegerPartition, Rational> eppf_shape_law(const EppfTable& p, int n);

// Exact transition matrix of the SA chain over enumerate_set_partitions(n),
// by summation over K, removed subsets and marks.  Guarded at n <= 8.
std::vector<std::vector<Rational>> sa_transition_matrix(
    int n, const std::vector<Rational>& row_n);

// Unique stationary law of the SA chain.  Degenerate rows short-circuit to
// the point masses (q(n:1) = 1 -> singletons, q(n:1) = 0 -> one block);
// otherwise the fixed-point system is solved exactly.
Distribution sa_stationary(int n, const std::vector<Rational>& row_n);

// The single recurrent class of the SA chain, as state indices into
// enumerate_set_partitions(n); verifies there is exactly one bottom class.
std::vector<int> sa_recurrent_class(int n, const std::vector<Rational>& row_n);

// Exact law of the final partition of the FM chain from the all-active
// singleton state, by enumeration of the event tree.  Guarded at n <= 5.
Distribution fm_final_law(int n, const DecrementMatrix& q);

// Empirical shape tallies from repeated fm_run; deterministic given the
// seed regardless of threading (see mc.hpp for the drivers).
struct JumpConsistencyReport {
  int n = 0;
  int m = 0;
  bool exact_mode = true;
  long samples = 0;   // per law, Monte Carlo mode only
  uint64_t seed = 0;  // Monte Carlo mode only
  int states_checked = 0;
  double max_tv = 0.0;
  double mc_error = 0.0;  // crude scale of Monte Carlo noise on a TV estimate
  std::string worst_state;

  bool consistent(double threshold) const { return max_tv <= threshold; }
};

// Compares, for a battery of start states, one step of FM_m on the restricted
// state against the restriction of the iterated FM_n chain at the first time
// the restriction (statuses included) changes.  n <= 5 is fully enumerated
// with rational arithmetic; larger n uses Monte Carlo with `samples` runs per
// law.  Guarded at n <= 10.
JumpConsistencyReport check_jump_consistency(const DecrementMatrix& q, int n,
                                             int m, long samples = 0,
                                             uint64_t seed = 0);

}  // namespace coalfreeze
