#include "superfractal/rng.hpp"

#include <algorithm>
#include <stdexcept>

namespace superfractal {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

__extension__ typedef unsigned __int128 uint128;

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Rng::index: empty range");
  const std::uint64_t range = n;
  uint128 m = uint128(engine_()) * range;
  std::uint64_t low = std::uint64_t(m);
  if (low < range) {
    const std::uint64_t threshold = (0 - range) % range;
    while (low < threshold) {
      m = uint128(engine_()) * range;
      low = std::uint64_t(m);
    }
  }
  return std::size_t(m >> 64);
}

Categorical::Categorical(std::span<const double> probs) {
  if (probs.empty()) throw std::invalid_argument("Categorical: no outcomes");
  cdf_.reserve(probs.size());
  double acc = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw std::invalid_argument("Categorical: negative probability");
    acc += p;
    cdf_.push_back(acc);
  }
  if (!(acc > 0.0)) throw std::invalid_argument("Categorical: zero total mass");
  for (double& c : cdf_) c /= acc;
  cdf_.back() = 1.0;
}

std::size_t Categorical::operator()(Rng& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  std::size_t k = std::size_t(it - cdf_.begin());
  // upper_bound never lands on a zero-probability outcome.
  if (k >= cdf_.size()) k = cdf_.size() - 1;
  return k;
}

}  // namespace superfractal
