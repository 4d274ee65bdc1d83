#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "superfractal/geometry.hpp"
#include "superfractal/raster.hpp"
#include "superfractal/rng.hpp"

namespace superfractal {

/// What the attractor theory may assume about an IFS's maps.
enum class Contractivity {
  strict,            ///< every map has Lipschitz constant < 1 on the unit square
  on_average,        ///< contractive on average only; convergence claims are not reported
  equivalent_metric  ///< contractive in a metric equivalent to the Euclidean one (fractal interpolation)
};

/// An iterated function system with probabilities.
class Ifs {
 public:
  /// Validates probabilities (nonnegative, sum 1 within 1e-12) and, for
  /// Contractivity::strict, that every map contracts the unit square.
  Ifs(std::vector<Map2> maps, std::vector<double> probs, std::string name = {},
      Contractivity contractivity = Contractivity::strict);

  /// Uniform probabilities.
  static Ifs uniform(std::vector<Map2> maps, std::string name = {},
                     Contractivity contractivity = Contractivity::strict);

  std::size_t size() const { return maps_.size(); }
  const Map2& map(std::size_t m) const { return maps_[m]; }
  std::span<const Map2> maps() const { return maps_; }
  double prob(std::size_t m) const { return probs_[m]; }
  std::span<const double> probs() const { return probs_; }
  const std::string& name() const { return name_; }
  Contractivity contractivity() const { return contractivity_; }
  bool strictly_contractive() const { return contractivity_ == Contractivity::strict; }
  /// Largest per-map Lipschitz constant (exact for affine maps, grid estimate otherwise).
  double lipschitz() const { return lipschitz_; }
  const Categorical& sampler() const { return sampler_; }

 private:
  std::vector<Map2> maps_;
  std::vector<double> probs_;
  std::string name_;
  Contractivity contractivity_;
  double lipschitz_ = 0.0;
  Categorical sampler_;
};

/// Lipschitz constant used by validation: operator norm for affine maps,
/// the hint when present, otherwise a 32x32 grid estimate.
double map_lipschitz(const Map2& map);

/// A finite code-space address; digits are 0-based map indices.
using Address = std::vector<std::uint32_t>;

/// F(K) = union of f_m(K), mapping pixel centres; output shares the input grid.
Raster hutchinson_set(const Ifs& ifs, const Raster& r);

/// F(mu) = sum of p_m f_m(mu), pushing each pixel's mass forward from its centre.
/// Mass mapped outside the frame is dropped.
MeasureRaster hutchinson_measure(const Ifs& ifs, const MeasureRaster& mu);

/// A_k = F(A_{k-1}); stops early once A_k == A_{k-1}.
Raster deterministic_attractor(const Ifs& ifs, const Raster& r0, std::size_t k);

/// Deterministic algorithm on a coloured raster: each target pixel takes the
/// colour of the last source pixel mapped into it ("texture effect" demo).
/// Output colours are not expected to settle.
ColourRaster deterministic_attractor_textured(const Ifs& ifs, const ColourRaster& c0, std::size_t k);

struct ChaosGameOptions {
  std::uint64_t seed = 0;
  std::size_t n_points = 100000;  ///< total iterations, including burn-in
  std::size_t burn_in = 100;
  Point2 start{0.5, 0.5};
};

/// Random iteration: x_{l+1} = f_m(x_l) with probability p_m. Calls
/// visit(point, digit) for every iterate after the burn-in; `digit` is the
/// map that produced the point. Sequential, single stream.
void chaos_game(const Ifs& ifs, const ChaosGameOptions& opt,
                const std::function<void(Point2, std::uint32_t)>& visit);

/// Number of post-burn-in points per shard of the rasterising chaos games.
inline constexpr std::size_t kChaosShardPoints = std::size_t{1} << 20;

/// Rasterised chaos game. Work is split into fixed shards of
/// kChaosShardPoints kept points; shard j runs its own burn-in on substream
/// j of the seed, so output is independent of the worker count. With a
/// single shard the visited points are exactly those of chaos_game().
Raster chaos_game_raster(const Ifs& ifs, const ChaosGameOptions& opt, const Grid& grid);

/// Per-pixel visit counts (same sharding as chaos_game_raster).
std::vector<std::uint64_t> chaos_game_counts(const Ifs& ifs, const ChaosGameOptions& opt, const Grid& grid);

/// Visit counts normalised to total mass 1.
MeasureRaster chaos_game_measure(const Ifs& ifs, const ChaosGameOptions& opt, const Grid& grid);

/// f_{a_1} o f_{a_2} o ... o f_{a_k}(x0).
Point2 address_point(const Ifs& ifs, const Address& addr, Point2 x0);

/// Cylinder measure of the shift IFS: product of p over the digits (1 for the empty address).
double shift_cylinder_measure(const Ifs& ifs, const Address& addr);

}  // namespace superfractal
