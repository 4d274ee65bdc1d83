#include "config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace superfractal::cli {

ConfigError::ConfigError(const std::string& file, std::size_t line, const std::string& path,
                         const std::string& message)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " + (path.empty() ? "" : path + ": ") + message),
      line_(line) {}

// ----------------------------------------------------------------- LineIndex

namespace {

std::string escape_pointer_token(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '~') {
      out += "~0";
    } else if (ch == '/') {
      out += "~1";
    } else {
      out += ch;
    }
  }
  return out;
}

struct Scope {
  std::string pointer;
  bool object;
  std::string key;
  std::size_t index = 0;
};

}  // namespace

LineIndex::LineIndex(const std::string& text) {
  std::vector<Scope> stack;
  std::size_t line = 1;
  bool want_key = false;
  auto child_pointer = [&]() -> std::string {
    if (stack.empty()) return "";
    const Scope& f = stack.back();
    return f.pointer + "/" + (f.object ? escape_pointer_token(f.key) : std::to_string(f.index));
  };
  auto record = [&] { lines_.emplace(child_pointer(), line); };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (ch == '\n') {
      ++line;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch)) || ch == ':') continue;
    switch (ch) {
      case '{':
      case '[': {
        record();
        const std::string p = child_pointer();
        stack.push_back({p, ch == '{', {}, 0});
        want_key = ch == '{';
        break;
      }
      case '}':
      case ']':
        if (!stack.empty()) stack.pop_back();
        want_key = false;
        break;
      case ',':
        if (!stack.empty()) {
          if (stack.back().object) {
            want_key = true;
          } else {
            ++stack.back().index;
          }
        }
        break;
      case '"': {
        std::string s;
        for (++i; i < text.size() && text[i] != '"'; ++i) {
          if (text[i] == '\\' && i + 1 < text.size()) ++i;
          if (text[i] == '\n') ++line;
          s += text[i];
        }
        if (want_key && !stack.empty()) {
          stack.back().key = s;
          want_key = false;
        } else {
          record();
        }
        break;
      }
      default:
        // Number or literal.
        record();
        while (i + 1 < text.size() && !std::isspace(static_cast<unsigned char>(text[i + 1])) && text[i + 1] != ',' &&
               text[i + 1] != '}' && text[i + 1] != ']') {
          ++i;
        }
        break;
    }
  }
}

std::size_t LineIndex::line_of(const std::string& pointer) const {
  std::string p = pointer;
  while (true) {
    if (auto it = lines_.find(p); it != lines_.end()) return it->second;
    if (p.empty()) return 1;
    p.erase(p.rfind('/'));
  }
}

// -------------------------------------------------------------------- Config

Config::Config(Json root, std::string text, std::string file)
    : root_(std::move(root)), text_(std::move(text)), file_(std::move(file)), lines_(text_) {}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), 0, "", "cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

Config Config::parse(const std::string& text, std::string file) {
  try {
    Json root = Json::parse(text);
    if (!root.is_object()) throw ConfigError(file, 1, "", "config must be a JSON object");
    return Config(std::move(root), text, std::move(file));
  } catch (const Json::parse_error& e) {
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1;
    for (std::size_t i = 0; i < end; ++i) line += text[i] == '\n';
    std::string what = e.what();
    // Drop nlohmann's "[json.exception.parse_error.101] " prefix.
    if (auto pos = what.find("] "); pos != std::string::npos) what = what.substr(pos + 2);
    throw ConfigError(file, line, "", "JSON syntax error: " + what);
  }
}

std::string Config::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text_) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void Config::fail(const std::string& pointer, const std::string& message) const {
  throw ConfigError(file_, lines_.line_of(pointer), pointer, message);
}

bool Config::has(const std::string& pointer) const { return root_.contains(Json::json_pointer(pointer)); }

const Json& Config::at(const std::string& pointer) const {
  if (!has(pointer)) {
    const auto slash = pointer.rfind('/');
    fail(pointer.substr(0, slash), "missing required field '" + pointer.substr(slash + 1) + "'");
  }
  return root_.at(Json::json_pointer(pointer));
}

double Config::number(const std::string& pointer) const {
  const Json& j = at(pointer);
  if (!j.is_number()) fail(pointer, "expected a number");
  return j.get<double>();
}

std::uint64_t Config::unsigned_integer(const std::string& pointer) const {
  const Json& j = at(pointer);
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
    fail(pointer, "expected a nonnegative integer");
  }
  return j.get<std::uint64_t>();
}

std::string Config::string(const std::string& pointer) const {
  const Json& j = at(pointer);
  if (!j.is_string()) fail(pointer, "expected a string");
  return j.get<std::string>();
}

std::vector<double> Config::numbers(const std::string& pointer) const {
  const Json& j = at(pointer);
  if (!j.is_array()) fail(pointer, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(pointer + "/" + std::to_string(i)));
  return out;
}

double Config::number_or(const std::string& pointer, double fallback) const {
  return has(pointer) ? number(pointer) : fallback;
}

std::uint64_t Config::unsigned_or(const std::string& pointer, std::uint64_t fallback) const {
  return has(pointer) ? unsigned_integer(pointer) : fallback;
}

std::string Config::string_or(const std::string& pointer, const std::string& fallback) const {
  return has(pointer) ? string(pointer) : fallback;
}

// ------------------------------------------------------------ schema readers

namespace {

template <typename F>
auto guarded(const Config& c, const std::string& pointer, F&& make) {
  try {
    return make();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    c.fail(pointer, e.what());
  }
}

Contractivity read_contractivity(const Config& c, const std::string& pointer) {
  const std::string s = c.string_or(pointer, "strict");
  if (s == "strict") return Contractivity::strict;
  if (s == "on_average") return Contractivity::on_average;
  if (s == "equivalent_metric") return Contractivity::equivalent_metric;
  c.fail(pointer, "contractivity must be strict, on_average or equivalent_metric");
}

}  // namespace

Map2 read_map(const Config& c, const std::string& pointer) {
  const std::string kind = c.string(pointer + "/kind");
  if (kind == "affine" || kind == "projective") {
    const auto coeffs = c.numbers(pointer + "/coefficients");
    const std::size_t want = kind == "affine" ? 6 : 12;
    if (coeffs.size() != want) {
      c.fail(pointer + "/coefficients", kind + " maps take " + std::to_string(want) + " coefficients, got " +
                                            std::to_string(coeffs.size()));
    }
    return guarded(c, pointer, [&] {
      if (kind == "affine") return Map2::affine(coeffs[0], coeffs[1], coeffs[2], coeffs[3], coeffs[4], coeffs[5]);
      std::array<double, 12> a{};
      std::copy(coeffs.begin(), coeffs.end(), a.begin());
      return Map2::projective(a);
    });
  }
  if (kind == "similitude") {
    const double scale = c.number(pointer + "/scale");
    const double angle = c.number_or(pointer + "/angle", 0.0) * std::numbers::pi / 180.0;
    const auto t = c.numbers(pointer + "/translation");
    if (t.size() != 2) c.fail(pointer + "/translation", "translation needs two numbers");
    const bool reflect = c.has(pointer + "/reflect") && c.at(pointer + "/reflect").get<bool>();
    return guarded(c, pointer, [&] { return Similitude2::from_angle(scale, angle, {t[0], t[1]}, reflect).to_map(); });
  }
  c.fail(pointer + "/kind", "unknown map kind '" + kind + "' (affine, projective or similitude)");
}

Ifs read_ifs(const Config& c, const std::string& pointer) {
  const Json& maps_json = c.at(pointer + "/maps");
  if (!maps_json.is_array() || maps_json.empty()) c.fail(pointer + "/maps", "expected a nonempty array of maps");
  std::vector<Map2> maps;
  for (std::size_t m = 0; m < maps_json.size(); ++m) maps.push_back(read_map(c, pointer + "/maps/" + std::to_string(m)));
  const Contractivity contractivity = read_contractivity(c, pointer + "/contractivity");
  const std::string name = c.string_or(pointer + "/name", "");
  const std::string probs_ptr = pointer + "/probs";
  if (c.has(probs_ptr) && c.at(probs_ptr).is_string()) {
    if (c.string(probs_ptr) != "uniform") c.fail(probs_ptr, "probs must be an array or \"uniform\"");
    return guarded(c, pointer, [&] { return Ifs::uniform(std::move(maps), name, contractivity); });
  }
  const auto probs = c.numbers(probs_ptr);
  return guarded(c, probs_ptr, [&] { return Ifs(std::move(maps), probs, name, contractivity); });
}

SuperIfs read_superifs(const Config& c) {
  const Json& list = c.at("/ifs");
  if (!list.is_array() || list.empty()) c.fail("/ifs", "expected a nonempty array of IFSs");
  std::vector<Ifs> ifss;
  for (std::size_t n = 0; n < list.size(); ++n) ifss.push_back(read_ifs(c, "/ifs/" + std::to_string(n)));
  std::vector<double> probs;
  if (ifss.size() == 1 && !c.has("/ifs_probs")) {
    probs = {1.0};
  } else {
    probs = c.numbers("/ifs_probs");
  }
  const std::size_t screens = c.unsigned_or("/screens", 1);
  return guarded(c, "/ifs_probs", [&] { return SuperIfs(std::move(ifss), probs, screens, c.string_or("/name", "")); });
}

Frame read_frame(const Config& c) {
  if (!c.has("/frame")) return Frame{};
  const auto f = c.numbers("/frame");
  if (f.size() != 4) c.fail("/frame", "frame is [x_min, y_min, x_max, y_max]");
  return guarded(c, "/frame", [&] {
    Grid probe(1, 1, Frame{f[0], f[1], f[2], f[3]});
    return probe.frame();
  });
}

Grid read_grid(const Config& c) {
  const std::size_t w = c.unsigned_or("/raster/width", 256);
  const std::size_t h = c.unsigned_or("/raster/height", w);
  return guarded(c, "/raster", [&] { return Grid(w, h, read_frame(c)); });
}

InterpolationData read_interpolation(const Config& c, const std::string& pointer, const std::string& vertical_key) {
  InterpolationData data;
  const Json& pts = c.at(pointer + "/points");
  if (!pts.is_array()) c.fail(pointer + "/points", "expected an array of [x, y] pairs");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto p = c.numbers(pointer + "/points/" + std::to_string(i));
    if (p.size() != 2) c.fail(pointer + "/points/" + std::to_string(i), "expected [x, y]");
    data.points.push_back({p[0], p[1]});
  }
  data.vertical = c.numbers(pointer + "/" + vertical_key);
  guarded(c, pointer, [&] { return interpolation_maps(data); });
  return data;
}

PaletteIfs read_palette(const Config& c, const std::string& pointer) {
  PaletteIfs p;
  const Json& maps = c.at(pointer + "/maps");
  if (!maps.is_array()) c.fail(pointer + "/maps", "expected an array of palette maps");
  for (std::size_t m = 0; m < maps.size(); ++m) {
    const std::string mp = pointer + "/maps/" + std::to_string(m);
    Map3 g;
    const auto lin = c.numbers(mp + "/linear");
    const auto off = c.numbers(mp + "/offset");
    if (lin.size() != 9) c.fail(mp + "/linear", "palette maps need a 3x3 linear part (9 numbers)");
    if (off.size() != 3) c.fail(mp + "/offset", "palette maps need a 3-vector offset");
    std::copy(lin.begin(), lin.end(), g.linear.begin());
    std::copy(off.begin(), off.end(), g.offset.begin());
    p.maps.push_back(g);
  }
  if (c.has(pointer + "/start")) {
    const auto s = c.numbers(pointer + "/start");
    if (s.size() != 3) c.fail(pointer + "/start", "start colour needs three numbers");
    p.start = {s[0], s[1], s[2]};
  }
  return p;
}

}  // namespace superfractal::cli
