#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace superfractal::cli {

// Flags shared by the subcommands; unset optionals fall back to the config.
struct Options {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = ".";
  std::optional<std::size_t> iterations;
  std::optional<std::size_t> stride;
  std::optional<std::string> mode;

  // dimension
  std::optional<std::string> regime;
  std::optional<std::size_t> screens;
  std::optional<std::size_t> steps;
  std::optional<double> tol;
  std::size_t ifs_index = 1;

  // treestats
  std::size_t arity = 2;
  std::size_t labels = 2;
  std::vector<double> probs;
  std::size_t depth = 1;
  std::size_t samples = 100000;

  // interp / spacefill
  std::optional<std::size_t> expand_depth;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

int cmd_render(const Options& o);
int cmd_superrun(const Options& o);
int cmd_dimension(const Options& o);
int cmd_treestats(const Options& o);
int cmd_interp(const Options& o);
int cmd_spacefill(const Options& o);
int cmd_colour(const Options& o);

}  // namespace superfractal::cli
