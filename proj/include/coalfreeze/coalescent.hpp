// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coalfreeze/measures.hpp"
#include "coalfreeze/partitions.hpp"
#include "coalfreeze/rng.hpp"

namespace coalfreeze {

// Event rates as doubles, derived from the exact rationals once per (m, n).
struct RateTable {
  int n = 0;
  std::vector<std::vector<double>> category_cdf;  // [b-1][k-1], cumulative q(b:.)
  std::vector<double> total_rate;                 // [b-1] = Phi(b)

  static RateTable build(const FreezeMeasure& m, int n);
};

struct Event {
  double time = 0.0;
  bool is_merge = false;
  std::vector<std::vector<int>> blocks;  // merged blocks, or the frozen block
};

struct Trajectory {
  int n = 0;
  bool complete = false;  // all blocks frozen
  std::vector<Event> events;
  PartiallyFrozenPartition final;
  std::vector<double> freezing_times_by_element;  // index j-1; NaN if active
  int tie_redraws = 0;
};

// Continuous-time run with b-active total rate Phi(b): holding times are
// exponential, the event category follows Phi(b:k)/Phi(b), so the embedded
// jump chain is exactly the FM chain for from_measure(m, n).  rho = 0 needs
// an explicit horizon.  Equal consecutive float times trigger a re-draw,
// counted in tie_redraws.
Trajectory simulate(int n, const FreezeMeasure& m, RngStream& rng,
                    std::optional<double> horizon = std::nullopt,
                    bool record_events = true);
Trajectory simulate(int n, const RateTable& rates, const Rational& rho,
                    RngStream& rng, std::optional<double> horizon = std::nullopt,
                    bool record_events = true);

// tau_j per element; throws on incomplete trajectories.
std::vector<double> freezing_times(const Trajectory& t);

struct OrderedPartition {
  std::vector<std::vector<int>> blocks;  // older first
  std::vector<double> tau;               // block freezing times, descending
};

// Blocks sorted by decreasing freezing time (the block containing j is older
// than the block containing i when tau_i < tau_j).  Cross-block ties are
// measure zero and asserted against.
OrderedPartition age_order(const Trajectory& t);

struct PaintboxRun {
  struct Interval {
    double a = 0.0;
    double b = 0.0;
    int block_size = 0;
  };
  std::vector<Interval> intervals;  // age order, disjoint in [0,1]
  double singleton_freq = 0.0;      // fraction of elements in singleton blocks
  int block_count = 0;
};

struct PaintboxReport {
  int n = 0;
  long runs = 0;
  uint64_t seed = 0;
  std::vector<PaintboxRun> per_run;
  double mean_singleton_freq = 0.0;
  double mean_block_count = 0.0;
};

// Empirical (a_j, b_j) interval estimates per run: a_j counts elements with
// strictly earlier freezing times, b_j - a_j is the block frequency.
// Finite-n approximation of the limiting paintbox; no rate is claimed.
PaintboxReport paintbox_estimate(const FreezeMeasure& m, int n, long runs,
                                 uint64_t seed, bool parallel = true);

struct SingletonReport {
  int n = 0;
  long runs = 0;
  uint64_t seed = 0;
  double singleton_fraction = 0.0;  // mean fraction of elements in singletons
  bool mu_minus1_finite = false;
  std::string verdict;
};

// Diagnostic comparison of the observed singleton fraction against the
// mu_{-1} < infinity prediction (singletons persist) vs mu_{-1} = infinity
// (they vanish).  Trend indicator, not a sharp test.
SingletonReport singleton_report(const FreezeMeasure& m, int n, long runs,
                                 uint64_t seed, bool parallel = true);

struct CoupledRun {
  SetPartition low;   // final partition at rho_lo
  SetPartition high;  // final partition at rho_hi
  bool high_refines_low = false;
};

// Coupled realization of two freeze rates on one merger history: shared merge
// clocks, freeze marks drawn at rho_hi and thinned by rho_lo/rho_hi.  The
// high-rate partition refines the low-rate one on every run (asserted).
CoupledRun simulate_coupled(int n, const FreezeMeasure& lambda_only,
                            const Rational& rho_lo, const Rational& rho_hi,
                            RngStream& rng);

}  // namespace coalfreeze
