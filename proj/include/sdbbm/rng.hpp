#pragma once

#include <array>
#include <cstdint>

// Seedable random streams for the particle simulator.
//
// Engine: xoshiro256++ seeded through SplitMix64. All distributions are
// implemented here rather than taken from <random> so that byte-identical
// output is stable across standard-library releases and platforms.
//
// Stream derivation (frozen; documented in the README): the stream for
// replicate i under master seed s seeds SplitMix64 with
//     s + (i + 1) * 0x9E3779B97F4A7C15   (mod 2^64)
// and draws the four xoshiro words from it. Distinct replicate indices give
// independent, reproducible streams regardless of execution order.

namespace sdbbm {

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);
  static RngStream for_replicate(std::uint64_t seed, std::uint64_t replicate);

  std::uint64_t next_u64();

  // [0, 1), 53-bit resolution
  double uniform01();
  // Exp(rate); rate == 0 yields +infinity
  double exponential(double rate);
  // standard normal, Marsaglia polar with the second variate cached in-stream
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  // exact Poisson via multiplicative method, chunked for large means
  std::int64_t poisson(double mean);

 private:
  std::array<std::uint64_t, 4> state_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace sdbbm
