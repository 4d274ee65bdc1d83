// Runs the installed command-line tool against the example configs.
#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

const fs::path kTool = SUPERFRACTAL_TOOL;
const fs::path kConfigs = SUPERFRACTAL_CONFIGS;
const fs::path kWork = SUPERFRACTAL_WORK;

struct Run {
  int code;
  std::string output;
};

Run run(const std::string& args, const fs::path& out) {
  fs::remove_all(out);
  fs::create_directories(out);
  const fs::path log = out.string() + ".log";
  const std::string cmd = kTool.string() + " " + args + " --out " + out.string() + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream text;
  text << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, text.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count_files(const fs::path& dir, const std::string& prefix) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) n += e.path().filename().string().rfind(prefix, 0) == 0;
  return n;
}

fs::path write_config(const std::string& name, const Json& j) {
  fs::create_directories(kWork);
  const fs::path p = kWork / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

Json read_config(const std::string& name) {
  std::ifstream in(kConfigs / name);
  return Json::parse(in);
}

std::string cfg(const std::string& name) { return "--config " + (kConfigs / name).string(); }

}  // namespace

TEST_CASE("a missing probability field is a config error naming the field") {
  Json j = read_config("sierpinski_pair.json");
  j.erase("ifs_probs");
  const Run r = run("superrun --config " + write_config("no_probs.json", j).string(), kWork / "no_probs");
  CHECK(r.code == 2);
  CHECK(r.output.find("ifs_probs") != std::string::npos);
}

TEST_CASE("malformed json reports a config error") {
  fs::create_directories(kWork);
  std::ofstream(kWork / "broken.json") << "{\"ifs\": [1, 2,";
  const Run r = run("render --config " + (kWork / "broken.json").string(), kWork / "broken");
  CHECK(r.code == 2);
}

TEST_CASE("render is byte-identical on rerun") {
  const Run a = run("render " + cfg("sierpinski.json"), kWork / "render_a");
  const Run b = run("render " + cfg("sierpinski.json"), kWork / "render_b");
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(slurp(kWork / "render_a" / "render.pgm") == slurp(kWork / "render_b" / "render.pgm"));
  CHECK(slurp(kWork / "render_a" / "manifest.json") == slurp(kWork / "render_b" / "manifest.json"));
  const Run chaos = run("render --mode chaos-measure " + cfg("fish_render.json"), kWork / "render_fish");
  CHECK(chaos.code == 0);
}

TEST_CASE("superrun writes frames and an index log") {
  const Run r = run("superrun " + cfg("fish.json"), kWork / "fish");
  REQUIRE(r.code == 0);
  CHECK(count_files(kWork / "fish", "frame_") == 50);
  const std::string log = slurp(kWork / "fish" / "index_log.csv");
  CHECK(log.rfind("step,v,n_v,v_1,v_2\n", 0) == 0);
  CHECK(std::count(log.begin(), log.end(), '\n') == 1 + 25 * 2);

  const Run strided = run("superrun --stride 5 " + cfg("fish.json"), kWork / "fish_stride");
  REQUIRE(strided.code == 0);
  CHECK(count_files(kWork / "fish_stride", "frame_") == 10);
  CHECK(slurp(kWork / "fish_stride" / "index_log.csv") == log);
  const Json man = Json::parse(slurp(kWork / "fish_stride" / "manifest.json"));
  CHECK(man["parameters"]["stride"] == 5);
}

TEST_CASE("the same seed gives the same log and a different seed a different one") {
  const Run a = run("superrun --seed 99 --stride 0 " + cfg("sierpinski_pair.json"), kWork / "seed_a");
  const Run b = run("superrun --seed 99 --stride 0 " + cfg("sierpinski_pair.json"), kWork / "seed_b");
  const Run c = run("superrun --seed 100 --stride 0 " + cfg("sierpinski_pair.json"), kWork / "seed_c");
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  REQUIRE(c.code == 0);
  const std::string la = slurp(kWork / "seed_a" / "index_log.csv");
  CHECK(la == slurp(kWork / "seed_b" / "index_log.csv"));
  CHECK(la != slurp(kWork / "seed_c" / "index_log.csv"));
  CHECK(count_files(kWork / "seed_a", "frame_") == 0);
}

TEST_CASE("measure superrun on the projective trees") {
  Json j = read_config("titree_measures.json");
  j["iterations"] = 3;
  j["raster"] = {{"width", 100}, {"height", 100}};
  const Run r = run("superrun --config " + write_config("titree_small.json", j).string(), kWork / "titree");
  CHECK(r.code == 0);
}

TEST_CASE("dimension regimes") {
  const Run random = run("dimension " + cfg("sierpinski_pair.json"), kWork / "dim_random");
  REQUIRE(random.code == 0);
  CHECK(random.output.find("random dimension: 1.2624618") != std::string::npos);
  const Run homog = run("dimension --regime homogeneous " + cfg("sierpinski_pair.json"), kWork / "dim_homog");
  REQUIRE(homog.code == 0);
  CHECK(homog.output.find("homogeneous dimension: 1.2262943") != std::string::npos);
  const Run moran = run("dimension --regime moran --ifs 2 " + cfg("sierpinski_pair.json"), kWork / "dim_moran");
  REQUIRE(moran.code == 0);
  CHECK(moran.output.find("moran dimension: 1") != std::string::npos);
  const Run vv = run("dimension --regime vvariable --screens 2 --steps 20000 --tol 1e-3 " + cfg("sierpinski_pair.json"),
                     kWork / "dim_vv");
  REQUIRE(vv.code == 0);
  const std::string csv = slurp(kWork / "dim_vv" / "lyapunov.csv");
  CHECK(csv.rfind("alpha,gamma_estimate,stderr,k,V,seed\n", 0) == 0);
}

TEST_CASE("dimension of non-similitude maps fails with a message") {
  const Run r = run("dimension " + cfg("fish.json"), kWork / "dim_fish");
  CHECK(r.code != 0);
  CHECK(r.output.find("similitude") != std::string::npos);
}

TEST_CASE("treestats writes one row per cylinder") {
  const Run r = run("treestats -M 2 -N 2 -V 64 --depth 1 --samples 20000 --seed 4", kWork / "treestats");
  REQUIRE(r.code == 0);
  const std::string csv = slurp(kWork / "treestats" / "treestats.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 8);
  CHECK(r.output.find("0 outside the bound") != std::string::npos);
}

TEST_CASE("interpolation, space-filling and colour commands") {
  const Run i = run("interp " + cfg("interp.json"), kWork / "interp");
  CHECK(i.code == 0);
  CHECK(fs::exists(kWork / "interp" / "interp.svg"));
  const Run s = run("spacefill " + cfg("spacefill.json"), kWork / "spacefill");
  CHECK(s.code == 0);
  CHECK(fs::exists(kWork / "spacefill" / "index_log.csv"));
  const Run c = run("colour " + cfg("colour.json"), kWork / "colour");
  CHECK(c.code == 0);
  CHECK(slurp(kWork / "colour" / "colour.ppm").rfind("P6\n256 256\n255\n", 0) == 0);
}

TEST_CASE("unknown subcommands and flags are usage errors") {
  CHECK(run("nosuchcommand", kWork / "usage").code != 0);
  CHECK(run("render", kWork / "usage").code == 2);
}
