#include "superfractal/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "superfractal/parallel.hpp"

namespace superfractal {

double map_lipschitz(const Map2& map) {
  if (map.lipschitz_hint) return *map.lipschitz_hint;
  if (map.is_affine()) return map.affine_operator_norm();
  return estimate_lipschitz(map, 32);
}

Ifs::Ifs(std::vector<Map2> maps, std::vector<double> probs, std::string name, Contractivity contractivity)
    : maps_(std::move(maps)), probs_(std::move(probs)), name_(std::move(name)), contractivity_(contractivity) {
  if (maps_.empty()) throw std::invalid_argument("IFS needs at least one map");
  if (probs_.size() != maps_.size()) {
    throw std::invalid_argument("IFS has " + std::to_string(maps_.size()) + " maps but " +
                                std::to_string(probs_.size()) + " probabilities");
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw std::invalid_argument("IFS probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("IFS probabilities sum to " + std::to_string(total) + ", not 1");
  }
  for (std::size_t m = 0; m < maps_.size(); ++m) {
    const double l = map_lipschitz(maps_[m]);
    lipschitz_ = std::max(lipschitz_, l);
    if (contractivity_ == Contractivity::strict && !(l < 1.0)) {
      throw std::invalid_argument("IFS map " + std::to_string(m + 1) + " is not a contraction (Lipschitz " +
                                  std::to_string(l) + ")");
    }
  }
  sampler_ = Categorical(probs_);
}

Ifs Ifs::uniform(std::vector<Map2> maps, std::string name, Contractivity contractivity) {
  std::vector<double> probs(maps.size(), maps.empty() ? 0.0 : 1.0 / double(maps.size()));
  if (!probs.empty()) {
    // Make the sum exact so the 1e-12 check never trips on rounding.
    probs.back() = 1.0 - std::accumulate(probs.begin(), probs.end() - 1, 0.0);
  }
  return Ifs(std::move(maps), std::move(probs), std::move(name), contractivity);
}

Raster hutchinson_set(const Ifs& ifs, const Raster& r) {
  Raster out(r.width(), r.height(), r.frame());
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!r.test(i)) continue;
    const Point2 c = r.center(r.pixel(i));
    for (const Map2& f : ifs.maps()) out.plot(f(c));
  }
  return out;
}

MeasureRaster hutchinson_measure(const Ifs& ifs, const MeasureRaster& mu) {
  MeasureRaster out(mu.width(), mu.height(), mu.frame());
  const auto masses = mu.masses();
  for (std::size_t i = 0; i < masses.size(); ++i) {
    if (masses[i] == 0.0) continue;
    const Point2 c = mu.center(mu.pixel(i));
    for (std::size_t m = 0; m < ifs.size(); ++m) {
      if (ifs.prob(m) == 0.0) continue;
      if (const auto j = out.locate_linear(ifs.map(m)(c))) out.add(*j, ifs.prob(m) * masses[i]);
    }
  }
  return out;
}

Raster deterministic_attractor(const Ifs& ifs, const Raster& r0, std::size_t k) {
  Raster current = r0;
  for (std::size_t step = 0; step < k; ++step) {
    Raster next = hutchinson_set(ifs, current);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

ColourRaster deterministic_attractor_textured(const Ifs& ifs, const ColourRaster& c0, std::size_t k) {
  ColourRaster current = c0;
  for (std::size_t step = 0; step < k; ++step) {
    ColourRaster next(current.width(), current.height(), current.frame(), current.background());
    for (std::size_t i = 0; i < current.size(); ++i) {
      const Rgb& colour = current.at(i);
      if (colour == current.background()) continue;
      const Point2 c = current.center(current.pixel(i));
      for (const Map2& f : ifs.maps()) {
        if (const auto j = next.locate_linear(f(c))) next.put(*j, colour);
      }
    }
    current = std::move(next);
  }
  return current;
}

namespace {

void check_options(const ChaosGameOptions& opt) {
  if (!(opt.n_points > opt.burn_in)) throw std::invalid_argument("chaos game: n_points must exceed burn_in");
}

template <typename Visit>
void run_orbit(const Ifs& ifs, Rng rng, Point2 x, std::size_t burn_in, std::size_t kept, Visit&& visit) {
  const Categorical& pick = ifs.sampler();
  const auto maps = ifs.maps();
  for (std::size_t l = 0; l < burn_in; ++l) x = maps[pick(rng)](x);
  for (std::size_t l = 0; l < kept; ++l) {
    const auto m = std::uint32_t(pick(rng));
    x = maps[m](x);
    visit(x, m);
  }
}

struct Shard {
  std::size_t index;
  std::size_t kept;
};

std::vector<Shard> shards_for(const ChaosGameOptions& opt) {
  const std::size_t kept = opt.n_points - opt.burn_in;
  std::vector<Shard> out;
  for (std::size_t begin = 0, j = 0; begin < kept; begin += kChaosShardPoints, ++j) {
    out.push_back({j, std::min(kChaosShardPoints, kept - begin)});
  }
  return out;
}

}  // namespace

void chaos_game(const Ifs& ifs, const ChaosGameOptions& opt,
                const std::function<void(Point2, std::uint32_t)>& visit) {
  check_options(opt);
  run_orbit(ifs, Rng(opt.seed).substream(0), opt.start, opt.burn_in, opt.n_points - opt.burn_in, visit);
}

std::vector<std::uint64_t> chaos_game_counts(const Ifs& ifs, const ChaosGameOptions& opt, const Grid& grid) {
  check_options(opt);
  const auto shards = shards_for(opt);
  std::vector<std::vector<std::uint64_t>> partial(shards.size());
  const Rng master(opt.seed);
  parallel_for(shards.size(), [&](std::size_t s) {
    std::vector<std::uint64_t> counts(grid.size(), 0);
    run_orbit(ifs, master.substream(shards[s].index), opt.start, opt.burn_in, shards[s].kept,
              [&](Point2 p, std::uint32_t) {
                if (const auto i = grid.locate_linear(p)) ++counts[*i];
              });
    partial[s] = std::move(counts);
  });
  std::vector<std::uint64_t> total(grid.size(), 0);
  for (const auto& counts : partial) {
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += counts[i];
  }
  return total;
}

Raster chaos_game_raster(const Ifs& ifs, const ChaosGameOptions& opt, const Grid& grid) {
  const auto counts = chaos_game_counts(ifs, opt, grid);
  Raster out(grid.width(), grid.height(), grid.frame());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] > 0) out.set(i);
  }
  return out;
}

MeasureRaster chaos_game_measure(const Ifs& ifs, const ChaosGameOptions& opt, const Grid& grid) {
  const auto counts = chaos_game_counts(ifs, opt, grid);
  MeasureRaster out(grid.width(), grid.height(), grid.frame());
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw std::runtime_error("chaos_game_measure: every point fell outside the frame");
  const double inv = 1.0 / double(total);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] > 0) out.add(i, double(counts[i]) * inv);
  }
  return out;
}

Point2 address_point(const Ifs& ifs, const Address& addr, Point2 x0) {
  if (addr.empty()) throw std::invalid_argument("address_point: empty address");
  Point2 x = x0;
  for (auto it = addr.rbegin(); it != addr.rend(); ++it) {
    if (*it >= ifs.size()) throw std::out_of_range("address digit out of range");
    x = ifs.map(*it)(x);
  }
  return x;
}

double shift_cylinder_measure(const Ifs& ifs, const Address& addr) {
  double p = 1.0;
  for (auto d : addr) {
    if (d >= ifs.size()) throw std::out_of_range("address digit out of range");
    p *= ifs.prob(d);
  }
  return p;
}

}  // namespace superfractal
