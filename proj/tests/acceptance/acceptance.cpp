// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed here.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "superfractal/apps.hpp"
#include "superfractal/dimension.hpp"
#include "superfractal/ifs.hpp"
#include "superfractal/superfractal.hpp"
#include "superfractal/trees.hpp"

using namespace superfractal;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ------------------------------------------------------------------ fixtures

Ifs sierpinski() {
  return Ifs::uniform({Map2::affine(0.5, 0, 0, 0, 0.5, 0), Map2::affine(0.5, 0, 0.5, 0, 0.5, 0),
                       Map2::affine(0.5, 0, 0.25, 0, 0.5, 0.5)},
                      "sierpinski");
}

Ifs thirds() {
  const double t = 1.0 / 3;
  return Ifs::uniform({Map2::affine(t, 0, 0, 0, t, 0), Map2::affine(t, 0, 2 * t, 0, t, 0),
                       Map2::affine(t, 0, t, 0, t, 2 * t)},
                      "thirds");
}

const Map2 kF11 = Map2::affine(0.5, -0.375, 0.3125, 0.5, 0.375, 0.1875);
const Map2 kF21 = Map2::affine(0.5, 0.375, 0.1875, -0.5, 0.375, 0.6875);
const Map2 kF12 = Map2::affine(0.5, -0.375, 0.3125, -0.5, -0.375, 0.8125);
const Map2 kF22 = Map2::affine(0.5, 0.375, 0.1875, 0.5, -0.375, 0.3125);

SuperIfs fish(std::size_t screens) {
  return SuperIfs({Ifs::uniform({kF11, kF21}), Ifs::uniform({kF12, kF22})}, {0.5, 0.5}, screens, "fish");
}

ScaleTable pair_table() { return ScaleTable({{0.5, 0.5, 0.5}, {1.0 / 3, 1.0 / 3, 1.0 / 3}}); }
const std::vector<double> kHalf{0.5, 0.5};

IndexA random_index(std::size_t screens, std::size_t arity, std::size_t labels, Rng& rng) {
  const std::vector<double> p(labels, 1.0 / double(labels));
  return sample_index(p, screens, arity, rng);
}

CodeTree random_tree(std::size_t arity, std::size_t depth, std::size_t labels, Rng& rng) {
  std::vector<Label> l(tree_size(arity, depth));
  for (auto& x : l) x = Label(rng.index(labels));
  return CodeTree(arity, depth, std::move(l));
}

Grove random_grove(std::size_t screens, std::size_t arity, std::size_t depth, std::size_t labels, Rng& rng) {
  std::vector<CodeTree> t;
  for (std::size_t v = 0; v < screens; ++v) t.push_back(random_tree(arity, depth, labels, rng));
  return Grove(std::move(t));
}

FunctionGrove random_function_grove(std::size_t screens, std::size_t arity, std::size_t labels, Rng& rng) {
  FunctionGrove g = FunctionGrove::from_index(random_index(screens, arity, labels, rng));
  const std::size_t extra = rng.index(2);
  for (std::size_t i = 0; i < extra; ++i) g = compose(g, FunctionGrove::from_index(random_index(screens, arity, labels, rng)));
  return g;
}

// ----------------------------------------------------------------- criteria

Outcome moran() {
  const std::vector<double> half{0.5, 0.5, 0.5};
  const std::vector<double> third{1.0 / 3, 1.0 / 3, 1.0 / 3};
  const double d1 = moran_dimension(half);
  const double d2 = moran_dimension(third);
  const bool ok = std::abs(d1 - 1.584962500721156) <= 1e-9 && std::abs(d2 - 1.0) <= 1e-9;
  return {ok, fmt("D1=%.15f D2=%.15f (tol 1e-9)", d1, d2)};
}

Outcome random_dim() {
  const double d = random_dimension(pair_table(), kHalf);
  return {std::abs(d - 1.262) <= 1e-3, fmt("D_R=%.9f, want 1.262 +- 1e-3", d)};
}

Outcome homogeneous() {
  const double closed = 2 * std::log(3.0) / (std::log(2.0) + std::log(3.0));
  const double root = homogeneous_dimension(pair_table(), kHalf);
  VVariableOptions opt;
  opt.lyapunov.steps = 100000;
  const auto v1 = vvariable_dimension(pair_table(), kHalf, 1, 20240601, opt);
  const bool ok = std::abs(root - closed) <= 1e-9 && std::abs(v1.dimension - closed) <= 0.01;
  return {ok, fmt("root=%.12f closed=%.12f; V=1 estimate %.5f +- %.5f (tol 0.01)", root, closed, v1.dimension,
                  v1.uncertainty)};
}

Outcome bracketing() {
  const double lo = 1.226 - 0.01;
  const double hi = 1.262 + 0.01;
  VVariableOptions opt;
  opt.lyapunov.steps = 100000;
  std::vector<DimensionEstimate> est;
  std::string detail;
  bool ok = true;
  for (std::size_t v : {2, 8, 64}) {
    est.push_back(vvariable_dimension(pair_table(), kHalf, v, 777 + v, opt));
    const auto& e = est.back();
    ok = ok && e.dimension > lo && e.dimension < hi;
    detail += fmt("V=%zu: %.5f +- %.5f; ", v, e.dimension, e.uncertainty);
  }
  for (std::size_t i = 1; i < est.size(); ++i) {
    ok = ok && est[i].dimension >= est[i - 1].dimension - (est[i].uncertainty + est[i - 1].uncertainty);
  }
  return {ok, detail + fmt("bracket (%.3f, %.3f), non-decreasing within error bars", lo, hi)};
}

Outcome cylinder_bounds() {
  const std::vector<double> p{0.5, 0.5};
  const std::size_t samples = 100000;
  std::size_t rows = 0;
  std::size_t failed = 0;
  double worst = -1e9;
  for (std::size_t k : {1, 2}) {
    for (std::size_t v : {16, 64}) {
      const auto hist = v_tree_histogram(v, 2, k, p, samples, 1000 * k + v);
      const double bound = cylinder_bound(2, k, v);
      for (std::size_t c = 0; c < hist.size(); ++c) {
        const CodeTree tau = cylinder_tree(2, k, 2, c);
        const double est = double(hist[c]) / double(samples);
        const double se = std::sqrt(est * (1 - est) / double(samples));
        const double slack = std::abs(est - rho_cylinder(tau, p)) - (bound + 3 * se);
        worst = std::max(worst, slack);
        ++rows;
        if (slack > 0) ++failed;
      }
    }
  }
  return {failed == 0, fmt("%zu cylinders, %zu outside bound + 3 stderr (max excess %.4f)", rows, failed, worst)};
}

Outcome free_trees() {
  const auto f = free_probability_mc(64, 2, 2, 100000, 4242);
  const double floor = 1.0 - cylinder_bound(2, 2, 64) - 3 * f.std_error;
  return {f.estimate >= floor, fmt("Pr(free)=%.5f +- %.5f >= %.5f", f.estimate, f.std_error, floor)};
}

Outcome conjugacy() {
  const SuperIfs s = fish(3);
  Rng rng(7007);
  const Point2 x0{0.5, 0.5};
  std::size_t bad = 0;
  double worst = 0.0;
  auto sorted = [](std::vector<Point2> v) {
    std::sort(v.begin(), v.end(), [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    return v;
  };
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t depth = rng.index(6);  // expansions have depth <= 6
    const Grove g = random_grove(3, 2, depth, 2, rng);
    const IndexA a = s.sample(rng);
    PointBank in;
    for (std::size_t v = 0; v < 3; ++v) in.push_back(backward_expand(s, g[v], x0));
    const PointBank stepped = super_step_points(s, a, in);
    const Grove eg = eta(a, g);
    for (std::size_t v = 0; v < 3; ++v) {
      const auto lhs = sorted(backward_expand(s, eg[v], x0));
      const auto rhs = sorted(stepped[v]);
      if (lhs.size() != rhs.size()) {
        ++bad;
        continue;
      }
      double d = 0.0;
      for (std::size_t i = 0; i < lhs.size(); ++i) d = std::max(d, distance(lhs[i], rhs[i]));
      worst = std::max(worst, d);
      if (d > 1e-9) ++bad;
    }
  }
  return {bad == 0, fmt("100 instances x 3 screens, %zu mismatches, max deviation %.3g (tol 1e-9)", bad, worst)};
}

Outcome v_variability() {
  const std::size_t screens = 3;
  const std::size_t cap = 8;  // groves are truncated so the orbit stays finite
  Rng rng(8008);
  Grove g = Grove::constant(screens, 2, 0, 0);
  std::size_t violations = 0;
  std::size_t worst = 0;
  for (int step = 0; step < 1000; ++step) {
    g = eta(random_index(screens, 2, 3, rng), g);
    if (g.depth() > cap) g = g.truncated(cap);
    for (std::size_t l = 0; l <= g.depth(); ++l) {
      const std::size_t n = count_distinct_subtrees(g, l);
      worst = std::max(worst, n);
      if (n > screens) ++violations;
    }
  }
  return {violations == 0, fmt("1000 steps, V=%zu, max distinct subtrees %zu, violations %zu", screens, worst,
                               violations)};
}

Outcome function_algebra() {
  Rng rng(9009);
  std::size_t bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t screens = 1 + rng.index(4);
    const std::size_t arity = 1 + rng.index(3);
    const auto a = random_function_grove(screens, arity, 3, rng);
    const auto b = random_function_grove(screens, arity, 3, rng);
    const auto c = random_function_grove(screens, arity, 3, rng);
    const Grove w = random_grove(screens, arity, rng.index(3), 3, rng);
    if (!(compose(compose(a, b), c) == compose(a, compose(b, c)))) ++bad;
    if (!(eta_of_function_tree(compose(a, b), w) == eta_of_function_tree(a, eta_of_function_tree(b, w)))) ++bad;
  }
  return {bad == 0, fmt("1000 random triples, %zu failures", bad)};
}

Outcome chaos_vs_deterministic() {
  ChaosGameOptions opt;
  opt.seed = 1010;
  opt.n_points = 1000000;
  const Raster chaos = chaos_game_raster(sierpinski(), opt, Grid(256, 256));
  const Raster oracle = deterministic_attractor(sierpinski(), Raster::filled(256, 256), 30);
  const std::size_t hit = chaos.overlap(oracle);
  const double coverage = double(hit) / double(oracle.count());
  const double extra = double(chaos.count() - hit) / double(oracle.count());
  return {coverage >= 0.99 && extra <= 0.005,
          fmt("coverage %.4f (>= 0.99), extra %.4f (<= 0.005)", coverage, extra)};
}

Outcome point_fixtures() {
  const Point2 A{0.25, 0.5}, B{0.5, 0.75}, C{0.75, 0.5}, D{0.5, 0.25};
  const Point2 B1{9.0 / 32, 23.0 / 32}, B2{23.0 / 32, 23.0 / 32}, B3{9.0 / 32, 9.0 / 32};
  // f_2^2(B) = (23/32, 9/32), the mirror image of B_3.
  const Point2 B4{23.0 / 32, 9.0 / 32};
  struct Relation {
    const Map2& f;
    Point2 in, out;
  };
  const Relation rel[] = {{kF11, A, A},  {kF11, B, B1}, {kF11, C, B}, {kF21, A, B},  {kF21, B, B2}, {kF21, C, C},
                          {kF12, A, A},  {kF12, B, B3}, {kF12, C, D}, {kF22, A, D},  {kF22, B, B4}, {kF22, C, C}};
  double worst = 0.0;
  for (const auto& r : rel) worst = std::max(worst, distance(r.f(r.in), r.out));
  return {worst <= 1e-12, fmt("12 relations, max error %.3g (tol 1e-12)", worst)};
}

Outcome spacefill() {
  const SuperIfs s = spacefill_superifs(2);
  const Polyline one = spacefill_approximant(s, CodeTree::constant(3, 1, 0));
  const std::vector<Point2> want{{0, 0}, {0.25, 0.5}, {0.5, 1}, kSpacefillEnd};
  bool ok = one.points.size() == want.size();
  for (std::size_t i = 0; ok && i < want.size(); ++i) ok = distance(one.points[i], want[i]) <= 1e-12;
  Rng rng(1212);
  double worst = 0.0;
  for (std::size_t depth = 0; depth <= 8; ++depth) {
    for (int rep = 0; rep < 3; ++rep) {
      std::vector<IndexA> log;
      for (std::size_t t = 0; t < depth; ++t) log.push_back(s.sample(rng));
      for (std::size_t v = 0; v < 2; ++v) {
        const Polyline p = spacefill_approximant(s, log, v, depth);
        worst = std::max({worst, distance(p.points.front(), kSpacefillStart), distance(p.points.back(), kSpacefillEnd)});
      }
    }
    const Polyline c = spacefill_approximant(s, CodeTree::constant(3, depth, 1));
    worst = std::max({worst, distance(c.points.front(), kSpacefillStart), distance(c.points.back(), kSpacefillEnd)});
  }
  ok = ok && worst <= 1e-9;
  return {ok, fmt("level-1 O->A->B->C %s; depths 0..8 endpoint error %.3g, end point (%.1f, %.1f)",
                  ok ? "exact" : "wrong", worst, kSpacefillEnd.x, kSpacefillEnd.y)};
}

Outcome interpolation() {
  Rng rng(1313);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t intervals = 2 + rng.index(4);
    std::vector<double> xs{0.0, 1.0};
    for (std::size_t i = 1; i < intervals; ++i) xs.push_back(0.05 + 0.9 * rng.uniform());
    std::sort(xs.begin(), xs.end());
    InterpolationData data;
    for (double x : xs) data.points.push_back({x * 3 - 1, 2 * rng.uniform() - 1});
    for (std::size_t i = 0; i < intervals; ++i) data.vertical.push_back(1.8 * rng.uniform() - 0.9);
    const Ifs f = build_interpolation_ifs(data);
    const std::vector<Point2> ends{data.points.front(), data.points.back()};
    const Frame hull = interpolation_hull(data);
    for (const Point2& p : data.points) worst = std::max(worst, expansion_distance(f, ends, hull, 16, p));
  }
  return {worst <= 1e-6, fmt("100 data sets, worst distance %.3g (tol 1e-6)", worst)};
}

Outcome box_counting() {
  const Raster s = deterministic_attractor(sierpinski(), Raster::filled(1024, 1024), 30);
  const std::vector<std::size_t> b2{2, 4, 8, 16, 32, 64, 128};
  const double ds = box_dimension(s, b2);
  const Raster t = deterministic_attractor(thirds(), Raster::filled(729, 729), 30);
  const std::vector<std::size_t> b3{1, 3, 9, 27, 81};
  const double dt = box_dimension(t, b3);
  const bool ok = std::abs(ds - 1.585) <= 0.05 && std::abs(dt - 1.0) <= 0.08;
  return {ok, fmt("Sierpinski %.4f (1.585 +- 0.05), thirds %.4f (1.0 +- 0.08)", ds, dt)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "moran-dimensions", 1e-3, moran},
      {2, "random-dimension", 1e-3, random_dim},
      {3, "homogeneous-dimension", 30, homogeneous},
      {4, "v-variable-bracketing", 300, bracketing},
      {5, "cylinder-measure-bound", 120, cylinder_bounds},
      {6, "free-tree-probability", 60, free_trees},
      {7, "conjugacy", 30, conjugacy},
      {8, "v-variability", 30, v_variability},
      {9, "function-tree-algebra", 10, function_algebra},
      {10, "chaos-game-vs-deterministic", 10, chaos_vs_deterministic},
      {11, "fish-point-fixtures", 1e-3, point_fixtures},
      {12, "space-filling-fixture", 1, spacefill},
      {13, "interpolation", 30, interpolation},
      {14, "box-counting", 60, box_counting},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s %02d %s: %s [%.3f s, budget %g s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                secs, c.budget_seconds, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
