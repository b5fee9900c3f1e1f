// Apache License, Version 2.0, refer to LICENSE.txt
//
// Serial-vs-OpenMP throughput comparison of the Monte Carlo kernels.  The
// parallel kernels must reproduce the serial tallies exactly, which is
// verified before timings are reported.

#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <string>

#include "coalfreeze/decrement.hpp"
#include "coalfreeze/mc.hpp"
#include "coalfreeze/measures.hpp"

namespace cf = coalfreeze;

namespace {

template <typename F>
double time_s(F&& f) {
  const double t0 = omp_get_wtime();
  f();
  return omp_get_wtime() - t0;
}

void report(const char* kernel, long samples, double serial_s,
            double parallel_s) {
  std::printf("%-28s %10ld %12.3f %12.3f %9.2fx\n", kernel, samples, serial_s,
              parallel_s, serial_s / parallel_s);
}

}  // namespace

int main(int argc, char** argv) {
  long fm_samples = 400000;
  long co_samples = 40000;
  if (argc > 1) fm_samples = std::atol(argv[1]);
  if (argc > 2) co_samples = std::atol(argv[2]);
  const uint64_t seed = 20260810;

  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-28s %10s %12s %12s %9s\n", "kernel", "samples", "serial[s]",
              "openmp[s]", "speedup");

  {
    const auto m = cf::FreezeMeasure::uniform(cf::Rational(1));
    const auto q = cf::from_measure(m, 8);
    cf::ShapeCounts a, b;
    const double ts =
        time_s([&] { a = cf::fm_shape_counts_serial(8, q, fm_samples, seed); });
    const double tp = time_s(
        [&] { b = cf::fm_shape_counts_parallel(8, q, fm_samples, seed); });
    if (!(a == b)) {
      std::fprintf(stderr, "fm kernel mismatch between serial and openmp\n");
      return 1;
    }
    report("fm_shape_counts n=8", fm_samples, ts, tp);
  }
  {
    const auto m = cf::FreezeMeasure::atom_at(cf::rat(1, 2), cf::Rational(1),
                                              cf::Rational(1));
    cf::ShapeCounts a, b;
    const double ts = time_s(
        [&] { a = cf::coalescent_shape_counts_serial(60, m, co_samples, seed); });
    const double tp = time_s([&] {
      b = cf::coalescent_shape_counts_parallel(60, m, co_samples, seed);
    });
    if (!(a == b)) {
      std::fprintf(stderr,
                   "coalescent kernel mismatch between serial and openmp\n");
      return 1;
    }
    report("coalescent_counts n=60", co_samples, ts, tp);
  }
  return 0;
}
