// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <cmath>
#include <cstdint>

namespace coalfreeze {

inline uint64_t splitmix64(uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// xoshiro256** seeded through splitmix64.  Same seed, same trajectory, on
// every platform.  This is the only source of randomness in the project;
// std::random distributions are avoided because their mappings are not
// specified by the standard.
class RngStream {
 public:
  static constexpr const char* kAlgorithm = "xoshiro256**/splitmix64";

  explicit RngStream(uint64_t seed) : seed_(seed) {
    uint64_t x = seed;
    for (auto& s : state_) s = splitmix64(x);
  }

  // Independent stream for Monte Carlo run number `run`.  Runs are merged by
  // integer summation, so results do not depend on execution order.
  static RngStream for_run(uint64_t seed, uint64_t run) {
    uint64_t x = seed ^ (0x9E3779B97F4A7C15ULL * (run + 1));
    return RngStream(splitmix64(x));
  }

  uint64_t seed() const { return seed_; }

  uint64_t next() {
    const uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0,1) with 53 random bits.
  double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Unbiased uniform on {0,...,n-1} (Lemire multiply-shift with rejection).
  uint64_t below(uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
    auto lo = static_cast<uint64_t>(m);
    if (lo < n) {
      const uint64_t t = (0 - n) % n;
      while (lo < t) {
        m = static_cast<unsigned __int128>(next()) * n;
        lo = static_cast<uint64_t>(m);
      }
    }
    return static_cast<uint64_t>(m >> 64);
  }

  double exponential(double rate) {
    double u;
    do {
      u = u01();
    } while (u == 0.0);
    return -std::log(u) / rate;
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  uint64_t seed_;
  uint64_t state_[4];
};

}  // namespace coalfreeze
