#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace combosim {

/// Deterministic random source used by every stochastic component.
///
/// All samplers are built on explicit 53-bit uniforms so that a given seed
/// reproduces the same stream regardless of standard-library distribution
/// internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Exponential variate with the given mean (inverse CDF on a 53-bit
  /// uniform). Always >= 0; zero only when the uniform is exactly 0.
  double exponential(double mean) { return -mean * std::log1p(-uniform()); }

 private:
  std::mt19937_64 gen_;
};

/// splitmix64 finalizer; used to derive independent per-role seeds from one
/// master seed so that batch and chunked execution draw identical streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream_id + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Fixed role ids for the independent random streams of one scenario point.
enum class RngStream : std::uint64_t {
  Source = 1,
  Splitter = 2,
  Detector0 = 3,
  Detector1 = 4,
};

inline std::uint64_t stream_seed(std::uint64_t master, RngStream role) {
  return mix_seed(master, static_cast<std::uint64_t>(role));
}

}  // namespace combosim
