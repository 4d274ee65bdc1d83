#include "superfractal/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace superfractal {

Grid::Grid(std::size_t width, std::size_t height, Frame frame)
    : width_(width), height_(height), frame_(frame) {
  if (width == 0 || height == 0) throw std::invalid_argument("raster dimensions must be positive");
  if (!(frame.x_max > frame.x_min) || !(frame.y_max > frame.y_min)) {
    throw std::invalid_argument("raster frame must have positive extent");
  }
  sx_ = double(width_) / (frame_.x_max - frame_.x_min);
  sy_ = double(height_) / (frame_.y_max - frame_.y_min);
}

std::optional<Pixel> Grid::locate(Point2 p) const {
  // The frame is closed: points on the right and bottom edges land in the last column/row.
  const double u = (p.x - frame_.x_min) * sx_;
  const double v = (frame_.y_max - p.y) * sy_;
  if (!(u >= 0.0 && v >= 0.0 && u <= double(width_) && v <= double(height_))) return std::nullopt;
  return Pixel{std::min(std::size_t(u), width_ - 1), std::min(std::size_t(v), height_ - 1)};
}

std::optional<std::size_t> Grid::locate_linear(Point2 p) const {
  const auto px = locate(p);
  if (!px) return std::nullopt;
  return linear(*px);
}

Point2 Grid::center(Pixel p) const {
  return {frame_.x_min + (double(p.col) + 0.5) / sx_, frame_.y_max - (double(p.row) + 0.5) / sy_};
}

Raster::Raster(std::size_t width, std::size_t height, Frame frame)
    : Grid(width, height, frame), bits_(width * height, 0) {}

Raster Raster::filled(std::size_t width, std::size_t height, Frame frame) {
  Raster r(width, height, frame);
  std::fill(r.bits_.begin(), r.bits_.end(), std::uint8_t{1});
  return r;
}

bool Raster::plot(Point2 p) {
  const auto i = locate_linear(p);
  if (!i) return false;
  bits_[*i] = 1;
  return true;
}

void Raster::clear() { std::fill(bits_.begin(), bits_.end(), std::uint8_t{0}); }

std::size_t Raster::count() const {
  return std::size_t(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::size_t Raster::overlap(const Raster& other) const {
  if (!same_shape(other)) throw std::invalid_argument("raster shapes differ");
  std::size_t n = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i) n += (bits_[i] & other.bits_[i]);
  return n;
}

bool Raster::subset_of(const Raster& other) const { return overlap(other) == count(); }

MeasureRaster::MeasureRaster(std::size_t width, std::size_t height, Frame frame)
    : Grid(width, height, frame), mass_(width * height, 0.0) {}

MeasureRaster MeasureRaster::point_mass(std::size_t width, std::size_t height, Point2 p, Frame frame) {
  MeasureRaster m(width, height, frame);
  const auto i = m.locate_linear(p);
  if (!i) throw std::invalid_argument("point mass lies outside the frame");
  m.mass_[*i] = 1.0;
  return m;
}

MeasureRaster MeasureRaster::uniform_on(const Raster& support) {
  MeasureRaster m(support.width(), support.height(), support.frame());
  const std::size_t n = support.count();
  if (n == 0) throw std::invalid_argument("uniform measure on an empty raster");
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (support.test(i)) m.mass_[i] = 1.0 / double(n);
  }
  return m;
}

double MeasureRaster::total() const { return std::accumulate(mass_.begin(), mass_.end(), 0.0); }

double MeasureRaster::max() const { return *std::max_element(mass_.begin(), mass_.end()); }

void MeasureRaster::normalize() {
  const double t = total();
  if (!(t > 0.0)) throw std::invalid_argument("cannot normalise a zero measure");
  for (double& m : mass_) m /= t;
}

void MeasureRaster::clear() { std::fill(mass_.begin(), mass_.end(), 0.0); }

Raster MeasureRaster::support() const {
  Raster r(width(), height(), frame());
  for (std::size_t i = 0; i < mass_.size(); ++i) {
    if (mass_[i] > 0.0) r.set(i);
  }
  return r;
}

double MeasureRaster::mass_in(const Frame& box) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < mass_.size(); ++i) {
    if (mass_[i] == 0.0) continue;
    const Point2 c = center(pixel(i));
    if (c.x >= box.x_min && c.x < box.x_max && c.y >= box.y_min && c.y < box.y_max) acc += mass_[i];
  }
  return acc;
}

ColourRaster::ColourRaster(std::size_t width, std::size_t height, Frame frame, Rgb background)
    : Grid(width, height, frame), background_(background), rgb_(width * height, background) {}

Raster ColourRaster::support() const {
  Raster r(width(), height(), frame());
  for (std::size_t i = 0; i < rgb_.size(); ++i) {
    if (rgb_[i] != background_) r.set(i);
  }
  return r;
}

namespace {

std::vector<std::pair<long, long>> set_pixels(const Raster& r) {
  std::vector<std::pair<long, long>> out;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r.test(i)) {
      const Pixel p = r.pixel(i);
      out.emplace_back(long(p.col), long(p.row));
    }
  }
  return out;
}

// max over a in A of min over b in B of |a - b|^2, with the early-break
// trick: once some b is closer than the running maximum, a cannot raise it.
long directed_hausdorff2(const std::vector<std::pair<long, long>>& a,
                         const std::vector<std::pair<long, long>>& b) {
  long cmax = 0;
  for (const auto& [ax, ay] : a) {
    long cmin = std::numeric_limits<long>::max();
    bool dominated = false;
    for (const auto& [bx, by] : b) {
      const long dx = ax - bx;
      const long dy = ay - by;
      const long d = dx * dx + dy * dy;
      if (d < cmin) cmin = d;
      if (cmin <= cmax) {
        dominated = true;
        break;
      }
    }
    if (!dominated) cmax = std::max(cmax, cmin);
  }
  return cmax;
}

}  // namespace

double hausdorff_distance(const Raster& a, const Raster& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("hausdorff_distance: raster shapes differ");
  const auto pa = set_pixels(a);
  const auto pb = set_pixels(b);
  if (pa.empty() || pb.empty()) throw std::invalid_argument("hausdorff_distance: empty raster");
  const long d2 = std::max(directed_hausdorff2(pa, pb), directed_hausdorff2(pb, pa));
  return std::sqrt(double(d2));
}

std::size_t box_count(const Raster& r, std::size_t box) {
  if (box == 0) throw std::invalid_argument("box size must be positive");
  const std::size_t bw = (r.width() + box - 1) / box;
  const std::size_t bh = (r.height() + box - 1) / box;
  std::vector<std::uint8_t> hit(bw * bh, 0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!r.test(i)) continue;
    const Pixel p = r.pixel(i);
    hit[(p.row / box) * bw + p.col / box] = 1;
  }
  return std::size_t(std::count(hit.begin(), hit.end(), std::uint8_t{1}));
}

double box_dimension(const Raster& r, std::span<const std::size_t> box_sizes) {
  if (box_sizes.size() < 3) throw std::invalid_argument("box_dimension: need at least 3 box sizes");
  if (r.empty()) throw std::invalid_argument("box_dimension: empty raster");
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t b : box_sizes) {
    xs.push_back(std::log(double(r.width()) / double(b)));
    ys.push_back(std::log(double(box_count(r, b))));
  }
  if (std::all_of(ys.begin(), ys.end(), [&](double y) { return y == ys.front(); })) {
    throw std::domain_error("box_dimension: box counts are all equal");
  }
  const double n = double(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) throw std::domain_error("box_dimension: box sizes are all equal");
  return sxy / sxx;
}

}  // namespace superfractal
