#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "superfractal/apps.hpp"
#include "superfractal/ifs.hpp"
#include "superfractal/raster.hpp"
#include "superfractal/superfractal.hpp"

namespace superfractal::cli {

using Json = nlohmann::json;

// A configuration problem, reported as "file:line: path: message".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& file, std::size_t line, const std::string& path, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Line of every value in a JSON document, keyed by JSON pointer
// ("/ifs/0/maps/1/probs"). Built by a separate scan of the text because the
// parser does not keep positions.
class LineIndex {
 public:
  explicit LineIndex(const std::string& text);
  // Line of the value at `pointer`, or of its nearest ancestor that exists.
  std::size_t line_of(const std::string& pointer) const;

 private:
  std::map<std::string, std::size_t> lines_;
};

// A parsed config document with the context needed for precise errors.
class Config {
 public:
  static Config load(const std::filesystem::path& path);
  static Config parse(const std::string& text, std::string file = "<config>");

  const Json& root() const { return root_; }
  const std::string& file() const { return file_; }
  const std::string& text() const { return text_; }
  // FNV-1a 64 of the raw text, as 16 hex digits.
  std::string hash() const;

  [[noreturn]] void fail(const std::string& pointer, const std::string& message) const;

  // Typed access relative to a JSON pointer; missing or mistyped fields
  // raise ConfigError naming the field.
  const Json& at(const std::string& pointer) const;
  bool has(const std::string& pointer) const;
  double number(const std::string& pointer) const;
  std::uint64_t unsigned_integer(const std::string& pointer) const;
  std::string string(const std::string& pointer) const;
  std::vector<double> numbers(const std::string& pointer) const;

  double number_or(const std::string& pointer, double fallback) const;
  std::uint64_t unsigned_or(const std::string& pointer, std::uint64_t fallback) const;
  std::string string_or(const std::string& pointer, const std::string& fallback) const;

 private:
  Config(Json root, std::string text, std::string file);
  Json root_;
  std::string text_;
  std::string file_;
  LineIndex lines_;
};

// Schema readers. Each validates against the library invariants and turns
// any rejection into a ConfigError pointing at the offending entry.
Map2 read_map(const Config& c, const std::string& pointer);
Ifs read_ifs(const Config& c, const std::string& pointer);
// "/ifs" (array) + "/ifs_probs" + "/screens".
SuperIfs read_superifs(const Config& c);
Frame read_frame(const Config& c);
Grid read_grid(const Config& c);
InterpolationData read_interpolation(const Config& c, const std::string& pointer, const std::string& vertical_key);
PaletteIfs read_palette(const Config& c, const std::string& pointer);

}  // namespace superfractal::cli
