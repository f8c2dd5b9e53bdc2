#pragma once

#include <cstdint>
#include <random>

namespace mclab {

/// Splittable stream derivation: a (seed, substream) pair is mixed through
/// SplitMix64 into the state of a standard engine. Trials identify their
/// stream by (master_seed, substream id), so parallel execution order never
/// affects the draws.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t substream = 0)
      : engine_(splitmix64(splitmix64(seed) ^ splitmix64(~substream))) {}

  /// Child stream derived from this stream's identity, for nested substreams.
  static RngStream child(std::uint64_t seed, std::uint64_t substream,
                         std::uint64_t lane) {
    return RngStream(splitmix64(seed) ^ splitmix64(substream), lane);
  }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double gaussian() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
  }
  bool bernoulli(double p) { return std::bernoulli_distribution(p)(engine_); }
  double rademacher() { return bernoulli(0.5) ? 1.0 : -1.0; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mclab
