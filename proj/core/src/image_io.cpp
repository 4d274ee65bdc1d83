#include "superfractal/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace superfractal {

namespace {

void header(std::ostream& out, const char* magic, const Grid& g) {
  out << magic << '\n' << g.width() << ' ' << g.height() << '\n' << 255 << '\n';
}

std::ofstream open_binary(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

std::uint8_t measure_grey(double mass, double max_mass, double gamma) {
  if (!(max_mass > 0.0) || mass <= 0.0) return 0;
  const double v = std::round(255.0 * std::pow(mass / max_mass, gamma));
  return std::uint8_t(std::clamp(v, 0.0, 255.0));
}

void write_pgm(std::ostream& out, const Raster& r) {
  header(out, "P5", r);
  std::vector<char> row(r.width());
  for (std::size_t y = 0; y < r.height(); ++y) {
    for (std::size_t x = 0; x < r.width(); ++x) row[x] = r.test(Pixel{x, y}) ? char(0) : char(255);
    out.write(row.data(), std::streamsize(row.size()));
  }
}

void write_pgm(std::ostream& out, const MeasureRaster& m, double gamma) {
  header(out, "P5", m);
  const double mmax = m.max();
  std::vector<char> row(m.width());
  for (std::size_t y = 0; y < m.height(); ++y) {
    for (std::size_t x = 0; x < m.width(); ++x) {
      row[x] = char(measure_grey(m.mass(Pixel{x, y}), mmax, gamma));
    }
    out.write(row.data(), std::streamsize(row.size()));
  }
}

void write_ppm(std::ostream& out, const ColourRaster& c) {
  header(out, "P6", c);
  for (const Rgb& px : c.pixels()) out.write(reinterpret_cast<const char*>(px.data()), 3);
}

void write_ppm(std::ostream& out, const Raster& r, Rgb ink, Rgb background) {
  header(out, "P6", r);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const Rgb& px = r.test(i) ? ink : background;
    out.write(reinterpret_cast<const char*>(px.data()), 3);
  }
}

void write_pgm(const std::filesystem::path& path, const Raster& r) {
  auto out = open_binary(path);
  write_pgm(out, r);
}

void write_pgm(const std::filesystem::path& path, const MeasureRaster& m, double gamma) {
  auto out = open_binary(path);
  write_pgm(out, m, gamma);
}

void write_ppm(const std::filesystem::path& path, const ColourRaster& c) {
  auto out = open_binary(path);
  write_ppm(out, c);
}

Raster read_pgm(const std::filesystem::path& path, Frame frame) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string magic;
  std::size_t w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (magic != "P5" || maxval != 255) throw std::runtime_error(path.string() + ": not an 8-bit P5 file");
  in.get();
  Raster r(w, h, frame);
  std::vector<char> row(w);
  for (std::size_t y = 0; y < h; ++y) {
    if (!in.read(row.data(), std::streamsize(w))) throw std::runtime_error(path.string() + ": truncated");
    for (std::size_t x = 0; x < w; ++x) {
      if (static_cast<unsigned char>(row[x]) < 128) r.set(Pixel{x, y});
    }
  }
  return r;
}

}  // namespace superfractal
