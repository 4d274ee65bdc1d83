#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "superfractal/ifs.hpp"
#include "superfractal/superfractal.hpp"

namespace superfractal {

// ------------------------------------------------------ fractal interpolation

struct InterpolationData {
  std::vector<Point2> points;    // (x_i, y_i), i = 0..I, x strictly increasing
  std::vector<double> vertical;  // d_m for m = 1..I, |d_m| < 1
};

// Coefficients of f_m(x, y) = (a x + e, c x + d y + g).
struct InterpolationMap {
  double a, e, c, d, g;
};

// Solves f_m(x_0, y_0) = (x_{m-1}, y_{m-1}) and f_m(x_I, y_I) = (x_m, y_m).
std::vector<InterpolationMap> interpolation_maps(const InterpolationData& data);

// The interpolation IFS, with p_m = a_m (the x-length share of piece m).
// Flagged Contractivity::equivalent_metric: the maps need not contract in
// the Euclidean metric.
Ifs build_interpolation_ifs(const InterpolationData& data);

// Two interpolation IFSs for the same points with different vertical
// factors, P = (1/2, 1/2); every V-variable member interpolates the data.
SuperIfs interpolation_superifs(const InterpolationData& data, std::span<const double> vertical2,
                                std::size_t screens);

// Smallest distance from `target` to the depth-k expansion
// { f_{i_1} o ... o f_{i_k}(x) : x in start } of an affine IFS, found by
// branch and bound over the M^k compositions. `hull` must be a box that
// contains `start` and is mapped into itself by every map.
double expansion_distance(const Ifs& ifs, std::span<const Point2> start, const Frame& hull, std::size_t depth,
                          Point2 target);

// A box [x_0, x_I] x [-Y, Y] mapped into itself by the interpolation maps.
Frame interpolation_hull(const InterpolationData& data);

// -------------------------------------------------------- space-filling curves

struct Polyline {
  std::vector<Point2> points;
  std::vector<Address> segment_addresses;  // one per segment, branch digits from the root

  std::size_t segments() const { return segment_addresses.size(); }
  double length() const;
};

// The two 3-map IFSs whose images of the segment from O = (0,0) to C = (1,1/2)
// chain into O -> A -> B -> C. P = (1/2, 1/2); V screens.
SuperIfs spacefill_superifs(std::size_t screens = 2);

inline constexpr Point2 kSpacefillStart{0.0, 0.0};
inline constexpr Point2 kSpacefillEnd{1.0, 0.5};

// Images of the base segment along every branch of sigma (levels 0..k-1
// read), joined into one connected path from `start` to `end`. Each branch
// image is traversed in whichever direction continues the path; throws
// NumericalFailure when neither endpoint matches within 1e-9.
Polyline spacefill_approximant(const SuperIfs& s, const CodeTree& sigma, Point2 start = kSpacefillStart,
                               Point2 end = kSpacefillEnd);

// Approximant for screen v after the last k logged steps.
Polyline spacefill_approximant(const SuperIfs& s, std::span<const IndexA> log, std::size_t screen, std::size_t depth);

void write_polyline_svg(std::ostream& out, const Polyline& p, std::size_t pixels = 512, std::size_t arity = 3);
// "x,y,address" per vertex; the address is that of the segment ending there.
void write_polyline_csv(std::ostream& out, const Polyline& p);

// ------------------------------------------------------------ colour stealing

using Colour3 = std::array<double, 3>;

// Affine map of R^3: x -> L x + t, L row-major.
struct Map3 {
  std::array<double, 9> linear{};
  std::array<double, 3> offset{};

  Colour3 operator()(const Colour3& p) const;
  static Map3 scale_toward(double s, const Colour3& target);
  static Map3 constant(const Colour3& c);
};

// Auxiliary IFS on the colour cube [0,255]^3; digits are shared with the
// geometry IFS, so only the maps matter.
struct PaletteIfs {
  std::vector<Map3> maps;
  Colour3 start{127.5, 127.5, 127.5};
};

Rgb to_rgb(const Colour3& c);

// Digits kept in a pixel's address key: j = min(24, floor(63 / log2 M)).
std::size_t colour_key_digits(std::size_t arity);

// Paired chaos game: the same digit sequence drives the geometry IFS and the
// palette. Each pixel takes the palette point of its lowest address (first
// kept digits compared lexicographically, most recent map first).
// Deterministic per seed and independent of the worker count.
ColourRaster colour_steal_render(const Ifs& geometry, const PaletteIfs& palette, const ChaosGameOptions& opt,
                                 const Grid& grid, Rgb background = {255, 255, 255});

// V-variable version: the depth-k branches of sigma are expanded in
// lexicographic order on the geometry and on palette[sigma label] (or the
// single palette), so the first write to a pixel is its lowest address.
ColourRaster colour_steal_render(const SuperIfs& geometry, std::span<const PaletteIfs> palettes,
                                 const CodeTree& sigma, Point2 x0, const Grid& grid,
                                 Rgb background = {255, 255, 255});

}  // namespace superfractal
