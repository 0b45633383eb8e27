#pragma once

// Portable seeded generators for tests. The same recurrences are mirrored in
// tests/oracles/support.py so externally computed reference values can be
// frozen into the C++ tests.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace tradenet::testkit {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on (0, 1).
  double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  // Box-Muller, one variate per call (the sine branch is discarded).
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

inline std::vector<double> white_noise(std::uint64_t seed, std::size_t n, double scale = 1.0) {
  SplitMix64 rng(seed);
  std::vector<double> out(n);
  for (double& v : out) v = scale * rng.normal();
  return out;
}

inline std::vector<double> ar1(std::uint64_t seed, std::size_t n, double phi, double scale = 1.0) {
  SplitMix64 rng(seed);
  std::vector<double> out(n);
  double prev = 0.0;
  for (double& v : out) {
    v = phi * prev + scale * rng.normal();
    prev = v;
  }
  return out;
}

inline std::vector<double> random_walk(std::uint64_t seed, std::size_t n, double drift = 0.0,
                                       double start = 100.0, double scale = 1.0) {
  SplitMix64 rng(seed);
  std::vector<double> out(n);
  double level = start;
  for (double& v : out) {
    level += drift + scale * rng.normal();
    v = level;
  }
  return out;
}

}  // namespace tradenet::testkit
