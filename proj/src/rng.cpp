#include "sdbbm/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sdbbm {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += kGolden);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& w : state_) w = splitmix64(sm);
}

RngStream RngStream::for_replicate(std::uint64_t seed, std::uint64_t replicate) {
  return RngStream(seed + (replicate + 1) * kGolden);
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::exponential(double rate) {
  if (rate < 0.0 || !std::isfinite(rate))
    throw std::domain_error("exponential rate must be finite and nonnegative");
  if (rate == 0.0) return std::numeric_limits<double>::infinity();
  return -std::log1p(-uniform01()) / rate;
}

double RngStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  cached_normal_ = v * f;
  has_cached_normal_ = true;
  return u * f;
}

std::int64_t RngStream::poisson(double mean) {
  if (mean < 0.0 || !std::isfinite(mean))
    throw std::domain_error("poisson mean must be finite and nonnegative");
  std::int64_t total = 0;
  // Poisson(a + b) = Poisson(a) + Poisson(b); chunking keeps exp(-chunk)
  // comfortably above the subnormal range for the multiplicative method.
  while (mean > 0.0) {
    const double chunk = mean > 30.0 ? 30.0 : mean;
    mean -= chunk;
    const double limit = std::exp(-chunk);
    double prod = uniform01();
    std::int64_t count = 0;
    while (prod > limit) {
      ++count;
      prod *= uniform01();
    }
    total += count;
  }
  return total;
}

}  // namespace sdbbm
