#pragma once

#include <filesystem>
#include <ostream>

#include "superfractal/raster.hpp"

namespace superfractal {

// Binary Netpbm writers: row-major, top row first, maxval 255.

/// P5; set pixels are black (0) on white (255).
void write_pgm(std::ostream& out, const Raster& r);
/// P5; pixel value round(255 * (m / m_max)^gamma).
void write_pgm(std::ostream& out, const MeasureRaster& m, double gamma = 0.5);
/// P6.
void write_ppm(std::ostream& out, const ColourRaster& c);
/// P6; set pixels in `ink`, others in `background`.
void write_ppm(std::ostream& out, const Raster& r, Rgb ink, Rgb background = {255, 255, 255});

void write_pgm(const std::filesystem::path& path, const Raster& r);
void write_pgm(const std::filesystem::path& path, const MeasureRaster& m, double gamma = 0.5);
void write_ppm(const std::filesystem::path& path, const ColourRaster& c);

/// Grey level for a measure pixel.
std::uint8_t measure_grey(double mass, double max_mass, double gamma);

/// Reads a P5 file back as a binary raster (pixels darker than 128 are set).
Raster read_pgm(const std::filesystem::path& path, Frame frame = {});

}  // namespace superfractal
