#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "superfractal/ifs.hpp"

using namespace superfractal;
using namespace fixtures;

TEST_CASE("ifs validation") {
  CHECK_THROWS_AS(Ifs({Map2::identity()}, {1.0}), std::invalid_argument);
  CHECK_NOTHROW(Ifs({Map2::identity()}, {1.0}, "", Contractivity::on_average));
  CHECK_THROWS_AS(Ifs({f11(), f21()}, {0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(Ifs({f11(), f21()}, {0.5}), std::invalid_argument);
  CHECK_THROWS_AS(Ifs({f11(), f21()}, {1.5, -0.5}), std::invalid_argument);
  CHECK(sierpinski().lipschitz() == doctest::Approx(0.5));
  const auto trees = titree_ifss({0.74, 0.26});
  CHECK_FALSE(trees[0].strictly_contractive());
}

TEST_CASE("hutchinson_set on the full square gives three half-scale squares") {
  const Raster out = hutchinson_set(sierpinski(), Raster::filled(64, 64));
  // Rows count from the top: the lower half of the frame is rows 32..63.
  Raster oracle(64, 64);
  for (std::size_t row = 0; row < 64; ++row) {
    for (std::size_t col = 0; col < 64; ++col) {
      const bool lower = row >= 32;
      const bool left = col < 32;
      const bool right = col >= 32;
      const bool top_middle = row < 32 && col >= 16 && col < 48;
      if ((lower && (left || right)) || top_middle) oracle.set(Pixel{col, row});
    }
  }
  CHECK(out == oracle);
  CHECK(out.count() == 3 * 32 * 32);
}

TEST_CASE("single pixel at the fixed point is invariant for one map") {
  const Ifs one({Map2::affine(0.5, 0, 0.25, 0, 0.5, 0.25)}, {1.0});
  Raster r(64, 64);
  r.plot(fixed_point(one.map(0)));
  CHECK(hutchinson_set(one, r) == r);
  MeasureRaster mu = MeasureRaster::point_mass(64, 64, {0.9, 0.1});
  for (int i = 0; i < 12; ++i) mu = hutchinson_measure(one, mu);
  CHECK(mu.total() == doctest::Approx(1.0));
  CHECK(mu.mass(*mu.locate_linear(fixed_point(one.map(0)))) == doctest::Approx(1.0));
}

TEST_CASE("deterministic attractor") {
  const Raster full = Raster::filled(256, 256);
  CHECK(deterministic_attractor(sierpinski(), full, 0) == full);
  const Raster a30 = deterministic_attractor(sierpinski(), full, 30);
  const std::vector<std::size_t> boxes{1, 2, 4, 8, 16, 32, 64};
  const double d = box_dimension(a30, boxes);
  CHECK(d >= 1.50);
  CHECK(d <= 1.66);
  // l^k is below a pixel long before k = 60.
  CHECK(deterministic_attractor(sierpinski(), full, 60) == deterministic_attractor(sierpinski(), full, 61));
}

TEST_CASE("deterministic attractor forgets its initial image") {
  const Ifs fishy = Ifs::uniform({f11(), f21(), f22()});
  Raster a(200, 200), b = Raster::filled(200, 200);
  a.plot({0.1, 0.9});
  a.plot({0.8, 0.2});
  const Raster ka = deterministic_attractor(fishy, a, 20);
  const Raster kb = deterministic_attractor(fishy, b, 20);
  CHECK_FALSE(ka.empty());
  CHECK(hausdorff_distance(ka, kb) <= 2.0);
}

TEST_CASE("chaos game matches the deterministic oracle") {
  ChaosGameOptions opt;
  opt.seed = 11;
  opt.n_points = 1000000;
  const Grid grid(256, 256);
  const Raster chaos = chaos_game_raster(sierpinski(), opt, grid);
  const Raster oracle = deterministic_attractor(sierpinski(), Raster::filled(256, 256), 30);
  const std::size_t hit = chaos.overlap(oracle);
  CHECK(double(hit) >= 0.99 * double(oracle.count()));
  CHECK(double(chaos.count() - hit) <= 0.005 * double(oracle.count()));
}

TEST_CASE("chaos game with one map collapses to the fixed point") {
  const Ifs one({Map2::affine(0.5, 0, 0, 0, 0.5, 0)}, {1.0});
  ChaosGameOptions opt;
  opt.seed = 1;
  opt.n_points = 1000;
  opt.burn_in = 60;
  opt.start = {1.0, 1.0};
  double worst = 0.0;
  chaos_game(one, opt, [&](Point2 p, std::uint32_t digit) {
    CHECK(digit == 0);
    worst = std::max(worst, distance(p, {0, 0}));
  });
  CHECK(worst <= std::ldexp(std::sqrt(2.0), -60));
}

TEST_CASE("chaos game is deterministic per seed and single-shard equals the sequential stream") {
  ChaosGameOptions opt;
  opt.seed = 5;
  opt.n_points = 20000;
  const Grid grid(64, 64);
  CHECK(chaos_game_counts(sierpinski(), opt, grid) == chaos_game_counts(sierpinski(), opt, grid));
  std::vector<std::uint64_t> seq(grid.size(), 0);
  chaos_game(sierpinski(), opt, [&](Point2 p, std::uint32_t) {
    if (const auto i = grid.locate_linear(p)) ++seq[*i];
  });
  CHECK(seq == chaos_game_counts(sierpinski(), opt, grid));
}

TEST_CASE("uniform probabilities spread visits evenly over Sierpinski pixels") {
  ChaosGameOptions opt;
  opt.seed = 99;
  opt.n_points = 10000000;
  const auto counts = chaos_game_counts(sierpinski(), opt, Grid(128, 128));
  std::uint64_t lo = ~std::uint64_t{0}, hi = 0;
  for (auto c : counts) {
    if (c == 0) continue;
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  CHECK(double(hi) / double(lo) < 3.0);
}

TEST_CASE("invariant measure gives each first-level piece its probability") {
  ChaosGameOptions opt;
  opt.seed = 3;
  opt.n_points = 10000000;
  const MeasureRaster mu = chaos_game_measure(sierpinski({0.6, 0.2, 0.2}), opt, Grid(256, 256));
  CHECK(mu.total() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(mu.mass_in(Frame{0, 0, 0.5, 0.5}) - 0.6) < 0.01);
  CHECK(std::abs(mu.mass_in(Frame{0.5, 0, 1, 0.5}) - 0.2) < 0.01);
}

TEST_CASE("address points") {
  const Ifs s = sierpinski();
  const Point2 centroid{0.5, std::sqrt(3.0) / 6};
  const Point2 want = s.map(0)(s.map(1)(centroid));
  const Point2 got = address_point(s, {0, 1}, centroid);
  CHECK(got == want);
  const Address ones(40, 0);
  CHECK(distance(address_point(s, ones, {1, 1}), fixed_point(s.map(0))) < std::ldexp(std::sqrt(2.0), -40));
  const Address mixed{2, 0, 1, 1, 0, 2, 2, 1, 0, 0, 1, 2, 0, 1, 2, 2};
  CHECK(distance(address_point(s, mixed, {0, 0}), address_point(s, mixed, {1, 1})) <=
        std::ldexp(std::sqrt(2.0), -16) + 1e-15);
}

TEST_CASE("shift cylinder measure") {
  const Ifs two({f11(), f21()}, {0.5, 0.5});
  CHECK(shift_cylinder_measure(two, {0, 1}) == 0.25);
  const Ifs skewed({f11(), f21()}, {0.74, 0.26});
  CHECK(shift_cylinder_measure(skewed, {1}) == 0.26);
  CHECK(shift_cylinder_measure(skewed, {}) == 1.0);
}
