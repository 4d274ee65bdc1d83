#include <cmath>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "superfractal/apps.hpp"

using namespace superfractal;
using namespace fixtures;

namespace {

void check_point(Point2 got, Point2 want, double tol = 1e-12) {
  CHECK(std::abs(got.x - want.x) <= tol);
  CHECK(std::abs(got.y - want.y) <= tol);
}

constexpr Point2 kO{0, 0};
constexpr Point2 kSpaceA{0.25, 0.5};
constexpr Point2 kSpaceB{0.5, 1.0};
constexpr Point2 kSpaceA2{1.0 / 3, 0.5};
constexpr Point2 kSpaceB2{2.0 / 3, 1.0};

}  // namespace

TEST_CASE("interpolation maps hit their endpoints") {
  const InterpolationData data{{{0, 0}, {0.5, 1}, {1, 0}}, {0.3, 0.3}};
  const Ifs f = build_interpolation_ifs(data);
  CHECK(f.contractivity() == Contractivity::equivalent_metric);
  CHECK(f.prob(0) == doctest::Approx(0.5));
  for (std::size_t m = 0; m < 2; ++m) {
    check_point(f.map(m)(data.points.front()), data.points[m]);
    check_point(f.map(m)(data.points.back()), data.points[m + 1]);
  }
  // Adjacent maps meet at the shared interpolation point.
  check_point(f.map(0)(data.points.back()), f.map(1)(data.points.front()));
  const std::vector<Point2> ends{data.points.front(), data.points.back()};
  const Frame hull = interpolation_hull(data);
  for (const Point2& p : data.points) CHECK(expansion_distance(f, ends, hull, 16, p) < 1e-6);
}

TEST_CASE("interpolation hull is invariant") {
  const InterpolationData data{{{0, 0.2}, {0.3, -0.4}, {0.7, 0.9}, {1, 0.1}}, {0.6, -0.5, 0.4}};
  const Frame h = interpolation_hull(data);
  const Ifs f = build_interpolation_ifs(data);
  for (const Map2& m : f.maps()) {
    for (Point2 c : {Point2{h.x_min, h.y_min}, Point2{h.x_max, h.y_min}, Point2{h.x_min, h.y_max},
                     Point2{h.x_max, h.y_max}}) {
      const Point2 q = m(c);
      CHECK(q.x >= h.x_min - 1e-12);
      CHECK(q.x <= h.x_max + 1e-12);
      CHECK(q.y >= h.y_min - 1e-12);
      CHECK(q.y <= h.y_max + 1e-12);
    }
  }
}

TEST_CASE("collinear data with zero vertical factors gives the chord") {
  const InterpolationData data{{{0, 1}, {0.25, 1.5}, {1, 3}}, {0.0, 0.0}};
  const SuperIfs s({build_interpolation_ifs(data)}, {1.0}, 1);
  for (const Point2 p : backward_expand(s, CodeTree::constant(2, 8, 0), {0.4, -7})) {
    CHECK(std::abs(p.y - (1 + 2 * p.x)) < 1e-12);
  }
}

TEST_CASE("interpolation rejects bad data") {
  CHECK_THROWS_AS(interpolation_maps({{{0, 0}, {0, 1}}, {0.2}}), std::invalid_argument);
  CHECK_THROWS_AS(interpolation_maps({{{0, 0}, {1, 1}}, {1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(interpolation_maps({{{0, 0}, {1, 1}}, {0.1, 0.2}}), std::invalid_argument);
}

TEST_CASE("V-variable interpolation still passes through the data") {
  const InterpolationData data{{{0, 0}, {0.4, 0.5}, {1, 0.2}}, {0.35, -0.3}};
  const std::vector<double> other{-0.45, 0.5};
  const SuperIfs s = interpolation_superifs(data, other, 2);
  Rng rng(3);
  std::vector<IndexA> log;
  for (int t = 0; t < 6; ++t) log.push_back(s.sample(rng));
  const Grove g = grove_from_log(log);
  for (std::size_t v = 0; v < 2; ++v) {
    std::vector<Point2> pts = backward_expand(s, g[v], data.points.front());
    const auto more = backward_expand(s, g[v], data.points.back());
    pts.insert(pts.end(), more.begin(), more.end());
    for (const Point2& want : data.points) {
      double best = 1e9;
      for (const Point2& p : pts) best = std::min(best, distance(p, want));
      CHECK(best < 1e-12);
    }
  }
}

TEST_CASE("space-filling maps chain the base segment") {
  const SuperIfs s = spacefill_superifs();
  const Ifs& f1 = s.ifs(0);
  const Ifs& f2 = s.ifs(1);
  const Point2 c = kSpacefillEnd;
  check_point(f1.map(0)(kO), kO);
  check_point(f1.map(0)(c), kSpaceA);
  check_point(f1.map(1)(c), kSpaceA);
  check_point(f1.map(1)(kO), kSpaceB);
  check_point(f1.map(2)(kO), kSpaceB);
  check_point(f1.map(2)(c), c);
  check_point(f2.map(0)(c), kSpaceA2);
  check_point(f2.map(1)(c), kSpaceA2);
  check_point(f2.map(1)(kO), kSpaceB2);
  check_point(f2.map(2)(kO), kSpaceB2);
  check_point(f2.map(2)(c), c);
  // Evaluated at (1, 0) instead of C, the maps miss A.
  check_point(f1.map(0)({1, 0}), {0, 0.5});
  check_point(f2.map(0)({1, 0}), {0, 0.5});
  check_point(fixed_point(f1.map(2)), c, 1e-9);
}

TEST_CASE("level-one approximant of the constant tree") {
  const SuperIfs s = spacefill_superifs();
  const Polyline p = spacefill_approximant(s, CodeTree::constant(3, 1, 0));
  REQUIRE(p.points.size() == 4);
  check_point(p.points[0], kO);
  check_point(p.points[1], kSpaceA);
  check_point(p.points[2], kSpaceB);
  check_point(p.points[3], kSpacefillEnd);
  CHECK(p.segments() == 3);
  CHECK(p.segment_addresses[1] == Address{1});
}

TEST_CASE("approximants keep their endpoints and stay connected") {
  const SuperIfs s = spacefill_superifs(2);
  Rng rng(8);
  for (std::size_t depth = 0; depth <= 7; ++depth) {
    std::vector<IndexA> log;
    for (std::size_t t = 0; t < depth; ++t) log.push_back(s.sample(rng));
    for (std::size_t v = 0; v < 2; ++v) {
      const Polyline p = spacefill_approximant(s, log, v, depth);
      CHECK(p.segments() == level_width(3, depth));
      check_point(p.points.front(), kSpacefillStart, 1e-9);
      check_point(p.points.back(), kSpacefillEnd, 1e-9);
      for (const Point2& q : p.points) {
        CHECK(q.x >= -1e-12);
        CHECK(q.x <= 1 + 1e-12);
        CHECK(q.y >= -1e-12);
        CHECK(q.y <= 1 + 1e-12);
      }
    }
  }
}

TEST_CASE("polyline writers") {
  const Polyline p = spacefill_approximant(spacefill_superifs(), CodeTree::constant(3, 1, 1));
  std::ostringstream csv, svg;
  write_polyline_csv(csv, p);
  write_polyline_svg(svg, p);
  CHECK(csv.str().rfind("x,y,address\n0,0,\n", 0) == 0);
  CHECK(svg.str().find("<line") != std::string::npos);
}

TEST_CASE("colour key digits") {
  CHECK(colour_key_digits(2) == 24);
  CHECK(colour_key_digits(3) == 24);
  CHECK(colour_key_digits(8) == 21);
  CHECK(colour_key_digits(1024) == 6);
}

TEST_CASE("constant palette paints everything red") {
  PaletteIfs red;
  for (int m = 0; m < 3; ++m) red.maps.push_back(Map3::constant({255, 0, 0}));
  ChaosGameOptions opt;
  opt.seed = 1;
  opt.n_points = 200000;
  const ColourRaster img = colour_steal_render(sierpinski(), red, opt, Grid(128, 128));
  std::size_t painted = 0;
  for (const Rgb& c : img.pixels()) {
    if (c == img.background()) continue;
    ++painted;
    CHECK(c == Rgb{255, 0, 0});
  }
  CHECK(painted > 1000);
}

TEST_CASE("colour follows the geometry when palette and geometry share maps") {
  // Sierpinski maps on the red-green face of the colour cube.
  PaletteIfs face;
  face.maps = {Map3{{0.5, 0, 0, 0, 0.5, 0, 0, 0, 0}, {0, 0, 0}},
               Map3{{0.5, 0, 0, 0, 0.5, 0, 0, 0, 0}, {127.5, 0, 0}},
               Map3{{0.5, 0, 0, 0, 0.5, 0, 0, 0, 0}, {63.75, 127.5, 0}}};
  face.start = {127.5, 127.5, 0};
  ChaosGameOptions opt;
  opt.seed = 2;
  opt.n_points = 300000;
  opt.start = {0.5, 0.5};
  const Grid grid(128, 128);
  const ColourRaster img = colour_steal_render(sierpinski(), face, opt, grid);
  const double pixel = std::sqrt(2.0) / 128;
  for (std::size_t i = 0; i < img.size(); ++i) {
    const Rgb& c = img.at(i);
    if (c == img.background()) continue;
    const Point2 centre = img.center(img.pixel(i));
    CHECK(distance({c[0] / 255.0, c[1] / 255.0}, centre) <= pixel + 1.0 / 255);
  }
}

TEST_CASE("overlapping pieces take the colour of the lowest address") {
  const Map2 half = Map2::affine(0.5, 0, 0.25, 0, 0.5, 0.25);
  const Ifs twins = Ifs::uniform({half, half});
  PaletteIfs p;
  p.maps = {Map3::constant({255, 0, 0}), Map3::constant({0, 0, 255})};
  ChaosGameOptions opt;
  opt.seed = 3;
  opt.n_points = 50000;
  const ColourRaster img = colour_steal_render(twins, p, opt, Grid(64, 64));
  std::size_t painted = 0;
  for (const Rgb& c : img.pixels()) {
    if (c == img.background()) continue;
    ++painted;
    CHECK(c == Rgb{255, 0, 0});
  }
  CHECK(painted >= 1);
}

TEST_CASE("colour stealing is independent of the worker count and shard merge is deterministic") {
  PaletteIfs shade;
  for (const Colour3 t : {Colour3{255, 0, 0}, Colour3{0, 255, 0}, Colour3{0, 0, 255}}) {
    shade.maps.push_back(Map3::scale_toward(0.5, t));
  }
  ChaosGameOptions opt;
  opt.seed = 4;
  opt.n_points = 3 * kChaosShardPoints;
  const Grid grid(64, 64);
  const ColourRaster a = colour_steal_render(sierpinski(), shade, opt, grid);
  const ColourRaster b = colour_steal_render(sierpinski(), shade, opt, grid);
  CHECK(std::equal(a.pixels().begin(), a.pixels().end(), b.pixels().begin()));
}

TEST_CASE("tree colour stealing writes each pixel from its first branch") {
  const SuperIfs s = sierpinski_pair(2);
  std::vector<PaletteIfs> palettes(2);
  palettes[0].maps.assign(3, Map3::constant({255, 0, 0}));
  palettes[1].maps.assign(3, Map3::constant({0, 0, 255}));
  const CodeTree sigma = CodeTree::constant(3, 6, 0);
  const ColourRaster img = colour_steal_render(s, palettes, sigma, {0.5, 0.5}, Grid(128, 128));
  for (const Rgb& c : img.pixels()) CHECK((c == img.background() || c == Rgb{255, 0, 0}));
  CHECK_THROWS_AS(colour_steal_render(s, std::span<const PaletteIfs>(palettes.data(), 1), CodeTree::constant(2, 2, 0),
                                      {0.5, 0.5}, Grid(8, 8)),
                  std::invalid_argument);
}
