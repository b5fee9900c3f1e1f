// Apache License, Version 2.0, refer to LICENSE.txt
#include "coalfreeze/mc.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace coalfreeze {

namespace {

// Double CDFs of the decrement rows, for fast category draws.
struct RowSampler {
  std::vector<std::vector<double>> cdf;  // [b-1], entries k = 1..b

  static RowSampler build(const DecrementMatrix& q, int n) {
    RowSampler s;
    s.cdf.resize(n);
    for (int b = 1; b <= n; ++b) {
      double acc = 0.0;
      auto& row = s.cdf[b - 1];
      row.resize(b);
      for (int k = 1; k <= b; ++k) {
        acc += to_double(q.q(b, k));
        row[k - 1] = acc;
      }
      row[b - 1] = 1.0;
    }
    return s;
  }
};

int draw_from_cdf(const std::vector<double>& cdf, RngStream& rng) {
  const double u = rng.u01();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return static_cast<int>(it - cdf.begin()) + 1;
}

// The FM move touches blocks only through the set of active blocks, so the
// estimator runs on block sizes alone.
IntegerPartition fm_run_shape(int n, const RowSampler& sampler,
                              RngStream& rng) {
  std::vector<int> active(n, 1);
  std::vector<int> done;
  done.reserve(n);
  while (!active.empty()) {
    const int b = static_cast<int>(active.size());
    const int k = (b == 1) ? 1 : draw_from_cdf(sampler.cdf[b - 1], rng);
    if (k == 1) {
      const size_t pos = rng.below(active.size());
      done.push_back(active[pos]);
      active[pos] = active.back();
      active.pop_back();
    } else {
      for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(rng.below(active.size() - i));
        std::swap(active[i], active[j]);
      }
      int total = 0;
      for (int i = 0; i < k; ++i) total += active[i];
      active.erase(active.begin(), active.begin() + k);
      active.push_back(total);
    }
  }
  return IntegerPartition::of(std::move(done));
}

using CountMap = std::map<IntegerPartition, long>;

void merge_counts(CountMap& into, const CountMap& from) {
  for (const auto& [shape, c] : from) into[shape] += c;
}

template <typename RunShape>
ShapeCounts run_serial(int n, long samples, uint64_t seed, RunShape&& run) {
  if (samples < 1) throw std::invalid_argument("shape counts: samples < 1");
  ShapeCounts out;
  out.n = n;
  out.samples = samples;
  out.seed = seed;
  for (long r = 0; r < samples; ++r) {
    RngStream rng = RngStream::for_run(seed, r);
    out.counts[run(rng)] += 1;
  }
  return out;
}

template <typename RunShape>
ShapeCounts run_parallel(int n, long samples, uint64_t seed, RunShape&& run) {
  if (samples < 1) throw std::invalid_argument("shape counts: samples < 1");
  ShapeCounts out;
  out.n = n;
  out.samples = samples;
  out.seed = seed;
#pragma omp parallel
  {
    CountMap local;
#pragma omp for schedule(static) nowait
    for (long r = 0; r < samples; ++r) {
      RngStream rng = RngStream::for_run(seed, r);
      local[run(rng)] += 1;
    }
    // integer tallies commute, so the merge order cannot change the result
#pragma omp critical(coalfreeze_counts_merge)
    merge_counts(out.counts, local);
  }
  return out;
}

}  // namespace

ShapeCounts fm_shape_counts_serial(int n, const DecrementMatrix& q,
                                   long samples, uint64_t seed) {
  if (q.flavor() != Flavor::mohle)
    throw std::invalid_argument("fm_shape_counts: mohle flavor required");
  if (q.n_max() < n)
    throw std::invalid_argument("fm_shape_counts: matrix too small");
  const RowSampler sampler = RowSampler::build(q, n);
  return run_serial(n, samples, seed,
                    [&](RngStream& rng) { return fm_run_shape(n, sampler, rng); });
}

ShapeCounts fm_shape_counts_parallel(int n, const DecrementMatrix& q,
                                     long samples, uint64_t seed) {
  if (q.flavor() != Flavor::mohle)
    throw std::invalid_argument("fm_shape_counts: mohle flavor required");
  if (q.n_max() < n)
    throw std::invalid_argument("fm_shape_counts: matrix too small");
  const RowSampler sampler = RowSampler::build(q, n);
  return run_parallel(n, samples, seed, [&](RngStream& rng) {
    return fm_run_shape(n, sampler, rng);
  });
}

namespace {

IntegerPartition coalescent_run_shape(int n, const RateTable& rates,
                                      const Rational& rho, RngStream& rng) {
  const Trajectory traj = simulate(n, rates, rho, rng, std::nullopt, false);
  return traj.final.induced().shape();
}

}  // namespace

ShapeCounts coalescent_shape_counts_serial(int n, const FreezeMeasure& m,
                                           long samples, uint64_t seed) {
  if (m.rho <= 0)
    throw std::invalid_argument("coalescent_shape_counts: rho must be > 0");
  const RateTable rates = RateTable::build(m, n);
  return run_serial(n, samples, seed, [&](RngStream& rng) {
    return coalescent_run_shape(n, rates, m.rho, rng);
  });
}

ShapeCounts coalescent_shape_counts_parallel(int n, const FreezeMeasure& m,
                                             long samples, uint64_t seed) {
  if (m.rho <= 0)
    throw std::invalid_argument("coalescent_shape_counts: rho must be > 0");
  const RateTable rates = RateTable::build(m, n);
  return run_parallel(n, samples, seed, [&](RngStream& rng) {
    return coalescent_run_shape(n, rates, m.rho, rng);
  });
}

const EmpiricalCell* EmpiricalEppf::find(const IntegerPartition& shape) const {
  for (const auto& cell : cells)
    if (cell.shape == shape) return &cell;
  return nullptr;
}

EmpiricalEppf estimate_from_counts(const ShapeCounts& counts) {
  EmpiricalEppf out;
  out.n = counts.n;
  out.samples = counts.samples;
  out.seed = counts.seed;
  const double ns = static_cast<double>(counts.samples);
  for (const auto& [shape, c] : counts.counts) {
    EmpiricalCell cell;
    cell.shape = shape;
    cell.count = c;
    const double f = static_cast<double>(c) / ns;
    const double nshape = to_double(Rational(shape_count(shape)));
    cell.p_hat = f / nshape;
    cell.stderr_ = std::sqrt(f * (1.0 - f) / ns) / nshape;
    out.cells.push_back(std::move(cell));
  }
  return out;
}

EmpiricalEppf fm_estimate_eppf(int n, const DecrementMatrix& q, long samples,
                               uint64_t seed, bool parallel) {
  return estimate_from_counts(parallel
                                  ? fm_shape_counts_parallel(n, q, samples, seed)
                                  : fm_shape_counts_serial(n, q, samples, seed));
}

EmpiricalEppf coalescent_estimate_eppf(int n, const FreezeMeasure& m,
                                       long samples, uint64_t seed,
                                       bool parallel) {
  return estimate_from_counts(
      parallel ? coalescent_shape_counts_parallel(n, m, samples, seed)
               : coalescent_shape_counts_serial(n, m, samples, seed));
}

double max_sigma_deviation(const EmpiricalEppf& emp, const EppfTable& exact) {
  // Standard error taken under the exact law: sigma for the shape frequency
  // is sqrt(P (1-P) / samples) with P the exact shape probability.
  double worst = 0.0;
  const double ns = static_cast<double>(emp.samples);
  for (const auto& lam : integer_partitions_of(emp.n)) {
    const double nshape = to_double(Rational(shape_count(lam)));
    const double p_exact = to_double(exact.at(lam));
    const double shape_p = p_exact * nshape;  // probability of the shape
    const auto* cell = emp.find(lam);
    const double f = cell ? static_cast<double>(cell->count) / ns : 0.0;
    if (shape_p == 0.0) {
      if (f != 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    const double sigma = std::sqrt(shape_p * (1.0 - shape_p) / ns);
    if (sigma == 0.0) {
      if (f != shape_p) return std::numeric_limits<double>::infinity();
      continue;
    }
    worst = std::max(worst, std::abs(f - shape_p) / sigma);
  }
  return worst;
}

}  // namespace coalfreeze
