// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "coalfreeze/chains.hpp"
#include "coalfreeze/coalescent.hpp"
#include "coalfreeze/decrement.hpp"
#include "coalfreeze/measures.hpp"
#include "coalfreeze/partitions.hpp"

namespace coalfreeze {

// Monte Carlo drivers.  Each run i draws its stream from
// RngStream::for_run(seed, i) and contributes integer tallies, so the OpenMP
// kernels reproduce the serial reference bit for bit; the serial versions are
// kept as the testing baseline.

struct ShapeCounts {
  int n = 0;
  long samples = 0;
  uint64_t seed = 0;
  std::map<IntegerPartition, long> counts;

  bool operator==(const ShapeCounts&) const = default;
};

ShapeCounts fm_shape_counts_serial(int n, const DecrementMatrix& q,
                                   long samples, uint64_t seed);
ShapeCounts fm_shape_counts_parallel(int n, const DecrementMatrix& q,
                                     long samples, uint64_t seed);

ShapeCounts coalescent_shape_counts_serial(int n, const FreezeMeasure& m,
                                           long samples, uint64_t seed);
ShapeCounts coalescent_shape_counts_parallel(int n, const FreezeMeasure& m,
                                             long samples, uint64_t seed);

struct EmpiricalCell {
  IntegerPartition shape;
  long count = 0;
  double p_hat = 0.0;    // per-partition probability estimate
  double stderr_ = 0.0;  // binomial standard error, same scale as p_hat
};

struct EmpiricalEppf {
  int n = 0;
  long samples = 0;
  uint64_t seed = 0;
  std::vector<EmpiricalCell> cells;  // sorted by shape

  const EmpiricalCell* find(const IntegerPartition& shape) const;
};

// Shape frequencies divided by the number of set partitions of each shape.
EmpiricalEppf estimate_from_counts(const ShapeCounts& counts);

EmpiricalEppf fm_estimate_eppf(int n, const DecrementMatrix& q, long samples,
                               uint64_t seed, bool parallel = true);
EmpiricalEppf coalescent_estimate_eppf(int n, const FreezeMeasure& m,
                                       long samples, uint64_t seed,
                                       bool parallel = true);

// Largest |p_hat - p_exact| / stderr over the cells of the exact table
// (cells with stderr 0 must match exactly or they count as infinity).
double max_sigma_deviation(const EmpiricalEppf& emp, const EppfTable& exact);

}  // namespace coalfreeze
