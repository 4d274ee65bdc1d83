#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace superfractal {

/// SplitMix64 finaliser; used to derive independent substream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed for substream `stream` of the generator seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// The single generator used throughout the library: mt19937_64, whose output
/// sequence is fixed by the C++ standard. All conversions from raw 64-bit
/// draws to doubles and indices are done here rather than through
/// <random> distributions, whose algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on {0, ..., n-1}; Lemire's multiply-shift with rejection.
  std::size_t index(std::size_t n);

  Rng substream(std::uint64_t stream) const { return Rng(derive_seed(seed_, stream)); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Inverse-CDF sampler over a finite probability vector.
class Categorical {
 public:
  Categorical() = default;
  explicit Categorical(std::span<const double> probs);

  std::size_t operator()(Rng& rng) const;
  std::size_t size() const { return cdf_.size(); }

 private:
  std::vector<double> cdf_;
};

}  // namespace superfractal
