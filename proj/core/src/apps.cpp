#include "superfractal/apps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "superfractal/parallel.hpp"

namespace superfractal {

// ------------------------------------------------------ fractal interpolation

namespace {

void check_interpolation(const InterpolationData& data) {
  if (data.points.size() < 2) throw std::invalid_argument("interpolation needs at least two points");
  if (data.vertical.size() != data.points.size() - 1) {
    throw std::invalid_argument("interpolation needs one vertical factor per interval (" +
                                std::to_string(data.points.size() - 1) + "), got " +
                                std::to_string(data.vertical.size()));
  }
  for (std::size_t i = 1; i < data.points.size(); ++i) {
    if (!(data.points[i].x > data.points[i - 1].x)) {
      throw std::invalid_argument("interpolation x values must be strictly increasing (point " + std::to_string(i) +
                                  ")");
    }
  }
  for (double d : data.vertical) {
    if (!(std::abs(d) < 1.0)) throw std::invalid_argument("interpolation vertical factors need |d| < 1");
  }
}

struct Affine {
  double a, b, e, c, d, g;

  Point2 operator()(Point2 p) const { return {a * p.x + b * p.y + e, c * p.x + d * p.y + g}; }
  // (*this) o other
  Affine then(const Affine& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, a * o.e + b * o.g + e,
            c * o.a + d * o.c, c * o.b + d * o.d, c * o.e + d * o.g + g};
  }
};

Affine to_affine(const Map2& m) {
  if (!m.is_affine()) throw std::invalid_argument("expansion_distance needs affine maps");
  const auto c = m.coefficients();
  return {c[0], c[1], c[2], c[3], c[4], c[5]};
}

double box_distance(const Frame& b, Point2 p) {
  const double dx = std::max({b.x_min - p.x, 0.0, p.x - b.x_max});
  const double dy = std::max({b.y_min - p.y, 0.0, p.y - b.y_max});
  return std::hypot(dx, dy);
}

Frame image_box(const Affine& f, const Frame& h) {
  const Point2 corners[4] = {f({h.x_min, h.y_min}), f({h.x_max, h.y_min}), f({h.x_min, h.y_max}),
                             f({h.x_max, h.y_max})};
  Frame out{corners[0].x, corners[0].y, corners[0].x, corners[0].y};
  for (const Point2& q : corners) {
    out.x_min = std::min(out.x_min, q.x);
    out.x_max = std::max(out.x_max, q.x);
    out.y_min = std::min(out.y_min, q.y);
    out.y_max = std::max(out.y_max, q.y);
  }
  return out;
}

struct BranchSearch {
  const std::vector<Affine>& maps;
  std::span<const Point2> start;
  const Frame& hull;
  std::size_t depth;
  Point2 target;
  double best = std::numeric_limits<double>::infinity();

  void visit(const Affine& g, std::size_t level) {
    if (level == depth) {
      for (const Point2& x : start) best = std::min(best, distance(g(x), target));
      return;
    }
    std::vector<std::pair<double, Affine>> children;
    children.reserve(maps.size());
    for (const Affine& f : maps) {
      const Affine h = g.then(f);
      children.emplace_back(box_distance(image_box(h, hull), target), h);
    }
    std::stable_sort(children.begin(), children.end(),
                     [](const auto& l, const auto& r) { return l.first < r.first; });
    for (const auto& [bound, h] : children) {
      if (bound >= best) break;
      visit(h, level + 1);
    }
  }
};

}  // namespace

std::vector<InterpolationMap> interpolation_maps(const InterpolationData& data) {
  check_interpolation(data);
  const auto& p = data.points;
  const Point2 first = p.front();
  const Point2 last = p.back();
  const double span = last.x - first.x;
  std::vector<InterpolationMap> out;
  for (std::size_t m = 1; m < p.size(); ++m) {
    const double d = data.vertical[m - 1];
    InterpolationMap f{};
    f.d = d;
    f.a = (p[m].x - p[m - 1].x) / span;
    f.e = (last.x * p[m - 1].x - first.x * p[m].x) / span;
    f.c = (p[m].y - p[m - 1].y - d * (last.y - first.y)) / span;
    f.g = (last.x * p[m - 1].y - first.x * p[m].y - d * (last.x * first.y - first.x * last.y)) / span;
    out.push_back(f);
  }
  return out;
}

Ifs build_interpolation_ifs(const InterpolationData& data) {
  const auto coeffs = interpolation_maps(data);
  std::vector<Map2> maps;
  std::vector<double> probs;
  for (const auto& f : coeffs) {
    maps.push_back(Map2::affine(f.a, 0.0, f.e, f.c, f.d, f.g));
    probs.push_back(f.a);
  }
  // The a_m telescope to 1; fold the rounding into the last one.
  double head = 0.0;
  for (std::size_t m = 0; m + 1 < probs.size(); ++m) head += probs[m];
  probs.back() = 1.0 - head;
  return Ifs(std::move(maps), std::move(probs), "interpolation", Contractivity::equivalent_metric);
}

SuperIfs interpolation_superifs(const InterpolationData& data, std::span<const double> vertical2,
                                std::size_t screens) {
  InterpolationData other = data;
  other.vertical.assign(vertical2.begin(), vertical2.end());
  return SuperIfs({build_interpolation_ifs(data), build_interpolation_ifs(other)}, {0.5, 0.5}, screens,
                  "interpolation");
}

Frame interpolation_hull(const InterpolationData& data) {
  const auto coeffs = interpolation_maps(data);
  const Point2 first = data.points.front();
  const Point2 last = data.points.back();
  double dmax = 0.0;
  double reach = 0.0;
  for (const auto& f : coeffs) {
    dmax = std::max(dmax, std::abs(f.d));
    reach = std::max({reach, std::abs(f.c * first.x + f.g), std::abs(f.c * last.x + f.g)});
  }
  double y = reach / (1.0 - dmax);
  for (const Point2& p : data.points) y = std::max(y, std::abs(p.y));
  return Frame{first.x, -y, last.x, y};
}

double expansion_distance(const Ifs& ifs, std::span<const Point2> start, const Frame& hull, std::size_t depth,
                          Point2 target) {
  if (start.empty()) throw std::invalid_argument("expansion_distance: empty start set");
  std::vector<Affine> maps;
  for (const Map2& m : ifs.maps()) maps.push_back(to_affine(m));
  BranchSearch search{maps, start, hull, depth, target};
  search.visit(Affine{1, 0, 0, 0, 1, 0}, 0);
  return search.best;
}

// -------------------------------------------------------- space-filling curves

double Polyline::length() const {
  double l = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) l += distance(points[i - 1], points[i]);
  return l;
}

SuperIfs spacefill_superifs(std::size_t screens) {
  const double h = 0.5;
  const double t = 2.0 / 3.0;
  const double third = 1.0 / 3.0;
  Ifs f1 = Ifs::uniform({Map2::affine(0, h, 0, h, 0, 0), Map2::affine(0, -h, h, -h, 0, 1),
                         Map2::affine(h, 0, h, 0, -1, 1)},
                        "spacefill-1", Contractivity::on_average);
  Ifs f2 = Ifs::uniform({Map2::affine(0, t, 0, h, 0, 0), Map2::affine(0, -t, t, -h, 0, 1),
                         Map2::affine(third, 0, t, 0, -1, 1)},
                        "spacefill-2", Contractivity::on_average);
  return SuperIfs({std::move(f1), std::move(f2)}, {0.5, 0.5}, screens, "spacefill");
}

namespace {

constexpr double kChainTol = 1e-9;

Polyline branch_curve(const SuperIfs& s, const CodeTree& sigma, std::size_t node, std::size_t level, Point2 start,
                      Point2 end) {
  if (level == sigma.depth()) return Polyline{{start, end}, {Address{}}};
  const Label n = sigma.label(node);
  if (n >= s.size()) throw std::out_of_range("code tree names IFS " + std::to_string(n + 1));
  const Ifs& f = s.ifs(n);
  Polyline out;
  out.points.push_back(start);
  for (std::size_t m = 0; m < f.size(); ++m) {
    Polyline child = branch_curve(s, sigma, sigma.child(node, m), level + 1, start, end);
    for (Point2& p : child.points) p = f.map(m)(p);
    for (Address& a : child.segment_addresses) a.insert(a.begin(), std::uint32_t(m));
    const Point2 expected = out.points.back();
    if (distance(child.points.back(), expected) <= kChainTol &&
        distance(child.points.front(), expected) > kChainTol) {
      std::reverse(child.points.begin(), child.points.end());
      std::reverse(child.segment_addresses.begin(), child.segment_addresses.end());
    } else if (distance(child.points.front(), expected) > kChainTol) {
      throw NumericalFailure("space-filling chain broken at branch " + std::to_string(m + 1) + " of level " +
                             std::to_string(level) + ": image starts at (" + std::to_string(child.points.front().x) +
                             ", " + std::to_string(child.points.front().y) + ")");
    }
    out.points.insert(out.points.end(), child.points.begin() + 1, child.points.end());
    out.segment_addresses.insert(out.segment_addresses.end(), child.segment_addresses.begin(),
                                 child.segment_addresses.end());
  }
  if (distance(out.points.back(), end) > kChainTol) {
    throw NumericalFailure("space-filling chain does not end at the curve end point");
  }
  return out;
}

}  // namespace

Polyline spacefill_approximant(const SuperIfs& s, const CodeTree& sigma, Point2 start, Point2 end) {
  if (sigma.arity() != s.arity()) throw std::invalid_argument("code tree arity does not match the superIFS");
  return branch_curve(s, sigma, 0, 0, start, end);
}

Polyline spacefill_approximant(const SuperIfs& s, std::span<const IndexA> log, std::size_t screen,
                               std::size_t depth) {
  if (depth == 0) {
    return spacefill_approximant(s, CodeTree(s.arity(), 0, {0}));
  }
  if (log.size() < depth) throw std::invalid_argument("index log shorter than the requested depth");
  if (screen >= s.screens()) throw std::out_of_range("screen index out of range");
  const Grove g = grove_from_log(log.subspan(log.size() - depth));
  return spacefill_approximant(s, g[screen]);
}

namespace {

Rgb hue(double t) {
  // Piecewise-linear rainbow on [0, 1).
  const double h = 6.0 * (t - std::floor(t));
  const double x = 1.0 - std::abs(std::fmod(h, 2.0) - 1.0);
  double r = 0, g = 0, b = 0;
  switch (int(h)) {
    case 0: r = 1, g = x; break;
    case 1: r = x, g = 1; break;
    case 2: g = 1, b = x; break;
    case 3: g = x, b = 1; break;
    case 4: r = x, b = 1; break;
    default: r = 1, b = x; break;
  }
  return {std::uint8_t(std::lround(200 * r)), std::uint8_t(std::lround(200 * g)), std::uint8_t(std::lround(200 * b))};
}

double address_fraction(const Address& a, std::size_t arity) {
  double t = 0.0;
  double w = 1.0;
  for (auto d : a) {
    w /= double(arity);
    t += d * w;
  }
  return t;
}

}  // namespace

void write_polyline_svg(std::ostream& out, const Polyline& p, std::size_t pixels, std::size_t arity) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << pixels << "\" height=\"" << pixels
      << "\" viewBox=\"-0.02 -0.02 1.04 1.04\">\n"
      << "<g transform=\"matrix(1 0 0 -1 0 1)\" stroke-width=\"0.003\" stroke-linecap=\"round\">\n";
  for (std::size_t i = 0; i < p.segments(); ++i) {
    const Rgb c = hue(address_fraction(p.segment_addresses[i], arity));
    out << "<line x1=\"" << p.points[i].x << "\" y1=\"" << p.points[i].y << "\" x2=\"" << p.points[i + 1].x
        << "\" y2=\"" << p.points[i + 1].y << "\" stroke=\"rgb(" << int(c[0]) << ',' << int(c[1]) << ','
        << int(c[2]) << ")\"/>\n";
  }
  out << "</g>\n</svg>\n";
}

void write_polyline_csv(std::ostream& out, const Polyline& p) {
  out << "x,y,address\n";
  for (std::size_t i = 0; i < p.points.size(); ++i) {
    out << p.points[i].x << ',' << p.points[i].y << ',';
    if (i > 0) {
      for (auto d : p.segment_addresses[i - 1]) out << (d + 1);
    }
    out << '\n';
  }
}

// ------------------------------------------------------------ colour stealing

Colour3 Map3::operator()(const Colour3& p) const {
  return {linear[0] * p[0] + linear[1] * p[1] + linear[2] * p[2] + offset[0],
          linear[3] * p[0] + linear[4] * p[1] + linear[5] * p[2] + offset[1],
          linear[6] * p[0] + linear[7] * p[1] + linear[8] * p[2] + offset[2]};
}

Map3 Map3::scale_toward(double s, const Colour3& target) {
  Map3 m;
  m.linear = {s, 0, 0, 0, s, 0, 0, 0, s};
  for (int i = 0; i < 3; ++i) m.offset[i] = (1.0 - s) * target[i];
  return m;
}

Map3 Map3::constant(const Colour3& c) {
  Map3 m;
  m.offset = c;
  return m;
}

Rgb to_rgb(const Colour3& c) {
  Rgb out{};
  for (int i = 0; i < 3; ++i) out[i] = std::uint8_t(std::lround(std::clamp(c[i], 0.0, 255.0)));
  return out;
}

std::size_t colour_key_digits(std::size_t arity) {
  if (arity <= 1) return 24;
  return std::min<std::size_t>(24, std::size_t(std::floor(63.0 / std::log2(double(arity)))));
}

namespace {

struct KeyedPixels {
  std::vector<std::uint64_t> key;
  std::vector<Rgb> colour;
};

}  // namespace

ColourRaster colour_steal_render(const Ifs& geometry, const PaletteIfs& palette, const ChaosGameOptions& opt,
                                 const Grid& grid, Rgb background) {
  if (palette.maps.size() != geometry.size()) {
    throw std::invalid_argument("palette IFS has " + std::to_string(palette.maps.size()) + " maps, geometry has " +
                                std::to_string(geometry.size()));
  }
  if (!(opt.n_points > opt.burn_in)) throw std::invalid_argument("colour stealing: n_points must exceed burn_in");
  const std::size_t m_count = geometry.size();
  const std::size_t digits = colour_key_digits(m_count);
  std::uint64_t top = 1;
  for (std::size_t i = 1; i < digits; ++i) top *= m_count;  // weight of the newest digit
  constexpr std::uint64_t kUnset = std::numeric_limits<std::uint64_t>::max();

  const std::size_t kept = opt.n_points - opt.burn_in;
  const std::size_t shards = (kept + kChaosShardPoints - 1) / kChaosShardPoints;
  std::vector<KeyedPixels> partial(shards);
  const Rng master(opt.seed);
  parallel_for(shards, [&](std::size_t s) {
    KeyedPixels px{std::vector<std::uint64_t>(grid.size(), kUnset), std::vector<Rgb>(grid.size(), background)};
    Rng rng = master.substream(s);
    const std::size_t count = std::min(kChaosShardPoints, kept - s * kChaosShardPoints);
    Point2 x = opt.start;
    Colour3 c = palette.start;
    std::uint64_t key = 0;
    for (std::size_t l = 0; l < opt.burn_in + count; ++l) {
      const std::size_t m = geometry.sampler()(rng);
      x = geometry.map(m)(x);
      c = palette.maps[m](c);
      key = m_count > 1 ? std::uint64_t(m) * top + key / m_count : 0;
      if (l < opt.burn_in) continue;
      if (const auto i = grid.locate_linear(x); i && key < px.key[*i]) {
        px.key[*i] = key;
        px.colour[*i] = to_rgb(c);
      }
    }
    partial[s] = std::move(px);
  });
  ColourRaster out(grid.width(), grid.height(), grid.frame(), background);
  std::vector<std::uint64_t> best(grid.size(), kUnset);
  for (const auto& px : partial) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (px.key[i] < best[i]) {
        best[i] = px.key[i];
        out.put(i, px.colour[i]);
      }
    }
  }
  return out;
}

ColourRaster colour_steal_render(const SuperIfs& geometry, std::span<const PaletteIfs> palettes,
                                 const CodeTree& sigma, Point2 x0, const Grid& grid, Rgb background) {
  if (palettes.size() != 1 && palettes.size() != geometry.size()) {
    throw std::invalid_argument("need one palette, or one per IFS");
  }
  for (const auto& p : palettes) {
    if (p.maps.size() != geometry.arity()) throw std::invalid_argument("palette IFS must have M maps");
  }
  if (sigma.arity() != geometry.arity()) throw std::invalid_argument("code tree arity does not match the superIFS");
  const std::size_t m_count = geometry.arity();
  const std::size_t k = sigma.depth();
  const std::size_t count = level_width(m_count, k);
  std::vector<Point2> pts(count, x0);
  std::vector<Colour3> cols(count, palettes.front().start);
  for (std::size_t l = k; l-- > 0;) {
    const auto labels = sigma.level(l);
    const std::size_t below = level_width(m_count, k - l - 1);
    const std::size_t block = below * m_count;
    for (std::size_t j = 0; j < count; ++j) {
      const Label n = labels[j / block];
      if (n >= geometry.size()) throw std::out_of_range("code tree names IFS " + std::to_string(n + 1));
      const std::size_t m = (j / below) % m_count;
      pts[j] = geometry.ifs(n).map(m)(pts[j]);
      cols[j] = palettes[palettes.size() == 1 ? 0 : n].maps[m](cols[j]);
    }
  }
  ColourRaster out(grid.width(), grid.height(), grid.frame(), background);
  std::vector<std::uint8_t> written(grid.size(), 0);
  for (std::size_t j = 0; j < count; ++j) {
    if (const auto i = grid.locate_linear(pts[j]); i && !written[*i]) {
      written[*i] = 1;
      out.put(*i, to_rgb(cols[j]));
    }
  }
  return out;
}

}  // namespace superfractal
