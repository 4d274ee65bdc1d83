#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "superfractal/geometry.hpp"

namespace superfractal {

/// The rectangle of the plane a raster discretises.
struct Frame {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 1.0;
  double y_max = 1.0;

  friend bool operator==(const Frame&, const Frame&) = default;
};

struct Pixel {
  std::size_t col = 0;
  std::size_t row = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Pixel grid geometry shared by every raster kind. Row 0 is the top row
/// (largest y), matching the PGM/PPM scan order.
class Grid {
 public:
  Grid(std::size_t width, std::size_t height, Frame frame = {});

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return width_ * height_; }
  const Frame& frame() const { return frame_; }

  std::size_t linear(Pixel p) const { return p.row * width_ + p.col; }
  Pixel pixel(std::size_t linear) const { return {linear % width_, linear / width_}; }

  /// Pixel containing p, or nothing when p falls outside the frame.
  std::optional<Pixel> locate(Point2 p) const;
  std::optional<std::size_t> locate_linear(Point2 p) const;
  Point2 center(Pixel p) const;

  bool same_shape(const Grid& other) const {
    return width_ == other.width_ && height_ == other.height_ && frame_ == other.frame_;
  }

 private:
  std::size_t width_;
  std::size_t height_;
  Frame frame_;
  double sx_;
  double sy_;
};

/// Binary raster: a discrete model of a compact set.
class Raster : public Grid {
 public:
  Raster(std::size_t width, std::size_t height, Frame frame = {});

  static Raster filled(std::size_t width, std::size_t height, Frame frame = {});

  bool test(Pixel p) const { return bits_[linear(p)] != 0; }
  bool test(std::size_t i) const { return bits_[i] != 0; }
  void set(Pixel p, bool on = true) { bits_[linear(p)] = on ? 1 : 0; }
  void set(std::size_t i, bool on = true) { bits_[i] = on ? 1 : 0; }
  /// Sets the pixel containing p; returns false when p is outside the frame.
  bool plot(Point2 p);

  void clear();
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  std::span<const std::uint8_t> bits() const { return bits_; }

  /// Pixels set in both rasters, and set only in this one.
  std::size_t overlap(const Raster& other) const;
  bool subset_of(const Raster& other) const;

  friend bool operator==(const Raster& a, const Raster& b) {
    return a.same_shape(b) && a.bits_ == b.bits_;
  }

 private:
  std::vector<std::uint8_t> bits_;
};

/// Per-pixel mass; a discrete model of a probability measure.
class MeasureRaster : public Grid {
 public:
  MeasureRaster(std::size_t width, std::size_t height, Frame frame = {});

  /// Unit point mass in the pixel containing p.
  static MeasureRaster point_mass(std::size_t width, std::size_t height, Point2 p, Frame frame = {});
  /// Uniform mass over the set pixels of `support`.
  static MeasureRaster uniform_on(const Raster& support);

  double mass(Pixel p) const { return mass_[linear(p)]; }
  double mass(std::size_t i) const { return mass_[i]; }
  void add(std::size_t i, double m) { mass_[i] += m; }
  std::span<const double> masses() const { return mass_; }
  std::span<double> masses() { return mass_; }

  double total() const;
  double max() const;
  /// Scales to total mass 1. Throws when the total is zero.
  void normalize();
  void clear();
  Raster support() const;
  /// Mass of pixels whose centres satisfy x_min <= x < x_max, y_min <= y < y_max.
  double mass_in(const Frame& box) const;

 private:
  std::vector<double> mass_;
};

using Rgb = std::array<std::uint8_t, 3>;

class ColourRaster : public Grid {
 public:
  ColourRaster(std::size_t width, std::size_t height, Frame frame = {}, Rgb background = {255, 255, 255});

  const Rgb& at(Pixel p) const { return rgb_[linear(p)]; }
  const Rgb& at(std::size_t i) const { return rgb_[i]; }
  void put(std::size_t i, Rgb c) { rgb_[i] = c; }
  std::span<const Rgb> pixels() const { return rgb_; }
  const Rgb& background() const { return background_; }
  /// Pixels that differ from the background colour.
  Raster support() const;

 private:
  Rgb background_;
  std::vector<Rgb> rgb_;
};

/// Exact discrete Hausdorff distance between the sets of pixel centres, in
/// pixel units. Both rasters must share a grid and be nonempty.
double hausdorff_distance(const Raster& a, const Raster& b);

/// Box-counting dimension: least-squares slope of log N(b) against
/// log(width / b) for grid-aligned boxes of b pixels anchored at pixel (0,0).
double box_dimension(const Raster& r, std::span<const std::size_t> box_sizes);

/// Number of b x b boxes that contain at least one set pixel.
std::size_t box_count(const Raster& r, std::size_t box);

}  // namespace superfractal
