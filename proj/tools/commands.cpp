#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "config.hpp"
#include "superfractal/apps.hpp"
#include "superfractal/dimension.hpp"
#include "superfractal/image_io.hpp"
#include "superfractal/superfractal.hpp"
#include "superfractal/trees.hpp"

#ifndef SUPERFRACTAL_VERSION
#define SUPERFRACTAL_VERSION "unknown"
#endif

namespace superfractal::cli {

namespace fs = std::filesystem;

namespace {

class Manifest {
 public:
  Manifest(std::string command, const Options& o) {
    doc_["tool"] = "superfractal";
    doc_["version"] = SUPERFRACTAL_VERSION;
    doc_["command"] = std::move(command);
    if (!o.config.empty()) doc_["config"] = o.config.filename().string();
    doc_["outputs"] = Json::array();
    doc_["parameters"] = Json::object();
  }

  void config_hash(const Config& c) { doc_["config_hash"] = "fnv1a64:" + c.hash(); }
  void seed(std::uint64_t s) { doc_["seed"] = s; }
  Json& parameters() { return doc_["parameters"]; }
  Json& results() { return doc_["results"]; }
  void output(const fs::path& p) { doc_["outputs"].push_back(p.filename().string()); }

  void write(const fs::path& dir) const {
    std::ofstream out(dir / "manifest.json");
    if (!out) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
    out << doc_.dump(2) << '\n';
  }

 private:
  Json doc_;
};

Config load(const Options& o) {
  if (o.config.empty()) throw ConfigError("<command line>", 0, "", "--config is required for this command");
  return Config::load(o.config);
}

std::uint64_t require_seed(const Options& o, const Config* c) {
  if (o.seed) return *o.seed;
  if (c && c->has("/seed")) return c->unsigned_integer("/seed");
  if (c) c->fail("", "missing required field 'seed' (or pass --seed); randomized commands need an explicit seed");
  throw ConfigError("<command line>", 0, "", "--seed is required for this command");
}

std::size_t iterations_of(const Options& o, const Config& c, std::size_t fallback) {
  return o.iterations ? *o.iterations : c.unsigned_or("/iterations", fallback);
}

std::string mode_of(const Options& o, const Config& c, const std::string& fallback) {
  return o.mode ? *o.mode : c.string_or("/mode", fallback);
}

fs::path prepare_out(const Options& o) {
  fs::create_directories(o.out);
  return o.out;
}

std::ofstream open_text(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << std::setprecision(17);
  return out;
}

Point2 read_point(const Config& c, const std::string& pointer) {
  const auto p = c.numbers(pointer);
  if (p.size() != 2) c.fail(pointer, "expected [x, y]");
  return {p[0], p[1]};
}

Raster initial_raster(const Config& c, const Grid& g, std::size_t screen) {
  const std::string kind = c.has("/init") && c.at("/init").is_string() ? c.string("/init") : "full";
  if (c.has("/init") && c.at("/init").is_object()) {
    const std::string ptr = "/init/pgm/" + std::to_string(screen);
    const fs::path file = fs::path(c.file()).parent_path() / c.string(ptr);
    Raster r = read_pgm(file, g.frame());
    if (r.width() != g.width() || r.height() != g.height()) c.fail(ptr, "initial image size does not match raster");
    return r;
  }
  if (kind == "full") return Raster::filled(g.width(), g.height(), g.frame());
  if (kind == "point") {
    Raster r(g.width(), g.height(), g.frame());
    if (!r.plot(read_point(c, "/init_point"))) c.fail("/init_point", "initial point lies outside the frame");
    return r;
  }
  c.fail("/init", "init must be \"full\", \"point\" or {\"pgm\": [...]}");
}

MeasureRaster initial_measure(const Config& c, const Grid& g, std::size_t screen) {
  const std::string kind = c.has("/init") && c.at("/init").is_string() ? c.string("/init") : "full";
  if (kind == "point") {
    const Point2 p = read_point(c, "/init_point");
    if (!g.locate(p)) c.fail("/init_point", "initial point lies outside the frame");
    return MeasureRaster::point_mass(g.width(), g.height(), p, g.frame());
  }
  return MeasureRaster::uniform_on(initial_raster(c, g, screen));
}

std::string frame_name(std::size_t step, std::size_t v, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "frame_%04zu_%zu.%s", step, v + 1, ext);
  return buf;
}

}  // namespace

int cmd_render(const Options& o) {
  const Config c = load(o);
  const fs::path out = prepare_out(o);
  Manifest man("render", o);
  man.config_hash(c);
  const std::size_t n = c.unsigned_or("/render_ifs", 1);
  if (n == 0 || !c.has("/ifs/" + std::to_string(n - 1))) c.fail("/render_ifs", "no such IFS");
  const Ifs ifs = read_ifs(c, "/ifs/" + std::to_string(n - 1));
  const Grid grid = read_grid(c);
  const std::string mode = mode_of(o, c, "deterministic");
  man.parameters()["mode"] = mode;
  man.parameters()["width"] = grid.width();
  man.parameters()["height"] = grid.height();

  if (mode == "deterministic") {
    const std::size_t k = iterations_of(o, c, 30);
    man.parameters()["iterations"] = k;
    const Raster r = deterministic_attractor(ifs, initial_raster(c, grid, 0), k);
    write_pgm(out / "render.pgm", r);
    man.output(out / "render.pgm");
    man.results()["pixels"] = r.count();
  } else if (mode == "chaos-set" || mode == "chaos-measure") {
    ChaosGameOptions opt;
    opt.seed = require_seed(o, &c);
    opt.n_points = c.unsigned_or("/points", 1000000);
    opt.burn_in = c.unsigned_or("/burn_in", 100);
    if (c.has("/start")) opt.start = read_point(c, "/start");
    if (!(opt.n_points > opt.burn_in)) c.fail("/points", "points must exceed burn_in");
    man.seed(opt.seed);
    man.parameters()["points"] = opt.n_points;
    man.parameters()["burn_in"] = opt.burn_in;
    if (mode == "chaos-set") {
      const Raster r = chaos_game_raster(ifs, opt, grid);
      write_pgm(out / "render.pgm", r);
      man.results()["pixels"] = r.count();
    } else {
      const MeasureRaster m = chaos_game_measure(ifs, opt, grid);
      const double gamma = c.number_or("/gamma", 0.5);
      write_pgm(out / "render.pgm", m, gamma);
      man.parameters()["gamma"] = gamma;
      man.results()["support_pixels"] = m.support().count();
    }
    man.output(out / "render.pgm");
  } else if (mode == "textured") {
    // Demo only: colours follow the last write and do not settle.
    const std::size_t k = iterations_of(o, c, 20);
    ColourRaster img(grid.width(), grid.height(), grid.frame());
    for (std::size_t i = 0; i < img.size(); ++i) {
      img.put(i, img.pixel(i).col < grid.width() / 2 ? Rgb{200, 30, 30} : Rgb{30, 160, 30});
    }
    write_ppm(out / "render.ppm", deterministic_attractor_textured(ifs, img, k));
    man.output(out / "render.ppm");
    man.parameters()["iterations"] = k;
  } else {
    c.fail("/mode", "render mode must be deterministic, chaos-set, chaos-measure or textured");
  }
  man.write(out);
  std::cout << "render: wrote " << (out / "render").string() << (mode == "textured" ? ".ppm" : ".pgm") << '\n';
  return kExitOk;
}

int cmd_superrun(const Options& o) {
  const Config c = load(o);
  const fs::path out = prepare_out(o);
  Manifest man("superrun", o);
  man.config_hash(c);
  SuperIfs s = read_superifs(c);
  if (o.screens) s = s.with_screens(*o.screens);
  const Grid grid = read_grid(c);
  const std::string mode = mode_of(o, c, "sets");
  const std::size_t iterations = iterations_of(o, c, 25);
  const std::size_t stride = o.stride ? *o.stride : c.unsigned_or("/stride", 1);
  const std::uint64_t seed = require_seed(o, &c);
  man.seed(seed);
  man.parameters()["mode"] = mode;
  man.parameters()["iterations"] = iterations;
  man.parameters()["stride"] = stride;
  man.parameters()["screens"] = s.screens();
  man.parameters()["width"] = grid.width();
  man.parameters()["height"] = grid.height();
  man.parameters()["strictly_contractive"] = s.strictly_contractive();

  std::size_t frames = 0;
  auto dump = [&](std::size_t step, std::size_t v, auto&& write) {
    if (stride == 0 || step % stride != 0) return;
    const std::string name = frame_name(step, v, "pgm");
    write(out / name);
    man.output(out / name);
    ++frames;
  };

  std::vector<IndexA> log;
  if (mode == "sets") {
    SetBank init;
    for (std::size_t v = 0; v < s.screens(); ++v) init.screens.push_back(initial_raster(c, grid, v));
    std::size_t step = 0;
    auto run = run_superfractal(s, std::move(init), iterations, seed, [&](const SetBank& bank, const IndexA&) {
      ++step;
      for (std::size_t v = 0; v < bank.size(); ++v) {
        dump(step, v, [&](const fs::path& p) { write_pgm(p, bank[v]); });
      }
    });
    log = std::move(run.log);
  } else if (mode == "measures") {
    const double gamma = c.number_or("/gamma", 0.5);
    MeasureBank init;
    for (std::size_t v = 0; v < s.screens(); ++v) init.screens.push_back(initial_measure(c, grid, v));
    std::size_t step = 0;
    auto run = run_superfractal(s, std::move(init), iterations, seed, [&](const MeasureBank& bank, const IndexA&) {
      ++step;
      for (std::size_t v = 0; v < bank.size(); ++v) {
        dump(step, v, [&](const fs::path& p) { write_pgm(p, bank[v], gamma); });
      }
    });
    log = std::move(run.log);
  } else {
    c.fail("/mode", "superrun mode must be sets or measures");
  }
  {
    auto csv = open_text(out / "index_log.csv");
    write_index_log(csv, log);
  }
  man.output(out / "index_log.csv");
  man.results()["frames"] = frames;
  man.write(out);
  std::cout << "superrun: " << iterations << " steps, " << frames << " frames, log in "
            << (out / "index_log.csv").string() << '\n';
  return kExitOk;
}

int cmd_dimension(const Options& o) {
  const Config c = load(o);
  const fs::path out = prepare_out(o);
  Manifest man("dimension", o);
  man.config_hash(c);
  const SuperIfs s = read_superifs(c);
  const std::string regime = o.regime ? *o.regime : c.string_or("/dimension/regime", "moran");
  ScaleTable table = [&] {
    try {
      return ScaleTable::from_superifs(s);
    } catch (const std::invalid_argument& e) {
      c.fail("/ifs", e.what());
    }
  }();
  man.parameters()["regime"] = regime;
  std::cout << std::setprecision(12);
  double d = 0.0;
  double uncertainty = 0.0;
  double residual = 0.0;
  if (regime == "moran") {
    if (o.ifs_index == 0 || o.ifs_index > table.size()) throw std::invalid_argument("--ifs out of range");
    d = moran_dimension(table.row(o.ifs_index - 1));
    residual = moran_objective(table.row(o.ifs_index - 1), d);
    man.parameters()["ifs"] = o.ifs_index;
  } else if (regime == "random") {
    d = random_dimension(table, s.probs());
    residual = random_objective(table, s.probs(), d);
  } else if (regime == "homogeneous") {
    d = homogeneous_dimension(table, s.probs());
    residual = homogeneous_objective(table, s.probs(), d);
  } else if (regime == "vvariable") {
    const std::uint64_t seed = require_seed(o, &c);
    const std::size_t screens = o.screens ? *o.screens : s.screens();
    VVariableOptions opt;
    opt.lyapunov.steps = o.steps ? *o.steps : c.unsigned_or("/dimension/steps", 100000);
    opt.tol = o.tol ? *o.tol : c.number_or("/dimension/tol", 1e-4);
    const DimensionEstimate e = vvariable_dimension(table, s.probs(), screens, seed, opt);
    d = e.dimension;
    uncertainty = e.uncertainty;
    residual = e.gamma_at_root;
    man.seed(seed);
    man.parameters()["screens"] = screens;
    man.parameters()["steps"] = opt.lyapunov.steps;
    man.parameters()["tol"] = opt.tol;
    auto csv = open_text(out / "lyapunov.csv");
    write_lyapunov_csv_header(csv);
    LyapunovEstimate at;
    at.gamma = e.gamma_at_root;
    at.std_error = e.gamma_std_error;
    write_lyapunov_csv_row(csv, d, at, opt.lyapunov.steps, screens, seed);
    man.output(out / "lyapunov.csv");
  } else {
    throw std::invalid_argument("regime must be moran, random, homogeneous or vvariable");
  }
  std::cout << regime << " dimension: " << d;
  if (regime == "vvariable") std::cout << " +/- " << uncertainty;
  std::cout << "  (residual " << residual << ")\n";
  man.results()["dimension"] = d;
  man.results()["uncertainty"] = uncertainty;
  man.results()["residual"] = residual;
  man.write(out);
  return kExitOk;
}

int cmd_treestats(const Options& o) {
  const fs::path out = prepare_out(o);
  Manifest man("treestats", o);
  const std::uint64_t seed = require_seed(o, nullptr);
  if (o.depth > 3) throw std::invalid_argument("treestats: depth is limited to 3");
  if (!o.screens) throw std::invalid_argument("treestats: --screens (V) is required");
  const std::size_t v = *o.screens;
  std::vector<double> probs = o.probs;
  if (probs.empty()) probs.assign(o.labels, 1.0 / double(o.labels));
  if (probs.size() != o.labels) throw std::invalid_argument("treestats: need N probabilities");
  const auto hist = v_tree_histogram(v, o.arity, o.depth, probs, o.samples, seed);
  const double bound = cylinder_bound(o.arity, o.depth, v);
  man.seed(seed);
  man.parameters()["M"] = o.arity;
  man.parameters()["N"] = o.labels;
  man.parameters()["V"] = v;
  man.parameters()["depth"] = o.depth;
  man.parameters()["samples"] = o.samples;

  auto csv = open_text(out / "treestats.csv");
  csv << "tau_id,tau,V,estimate,stderr,rho,bound,pass\n";
  std::size_t failures = 0;
  for (std::size_t id = 0; id < hist.size(); ++id) {
    const CodeTree tau = cylinder_tree(o.arity, o.depth, o.labels, id);
    const double est = double(hist[id]) / double(o.samples);
    const double se = std::sqrt(est * (1.0 - est) / double(o.samples));
    const double rho = rho_cylinder(tau, probs);
    const bool pass = std::abs(est - rho) <= bound + 3.0 * se;
    failures += !pass;
    csv << id << ",\"" << to_text(tau) << "\"," << v << ',' << est << ',' << se << ',' << rho << ',' << bound << ','
        << (pass ? "pass" : "fail") << '\n';
  }
  man.output(out / "treestats.csv");
  man.results()["cylinders"] = hist.size();
  man.results()["failures"] = failures;
  man.write(out);
  std::cout << "treestats: " << hist.size() << " cylinders, " << failures << " outside the bound\n";
  return failures == 0 ? kExitOk : kExitNumerical;
}

int cmd_interp(const Options& o) {
  const Config c = load(o);
  const fs::path out = prepare_out(o);
  Manifest man("interp", o);
  man.config_hash(c);
  const InterpolationData data = read_interpolation(c, "/interp", "vertical");
  const std::size_t depth = o.expand_depth ? *o.expand_depth : c.unsigned_or("/interp/depth", 10);
  const std::size_t m = data.points.size() - 1;
  if (std::pow(double(m), double(depth)) > double(1 << 22)) c.fail("/interp/depth", "expansion too large");
  CodeTree sigma = CodeTree::constant(m, depth, 0);
  std::optional<SuperIfs> s;
  if (c.has("/interp/vertical2")) {
    const InterpolationData other = read_interpolation(c, "/interp", "vertical2");
    const std::size_t screens = o.screens ? *o.screens : c.unsigned_or("/screens", 2);
    s = interpolation_superifs(data, other.vertical, screens);
    const std::uint64_t seed = require_seed(o, &c);
    man.seed(seed);
    Rng rng(seed);
    std::vector<IndexA> log;
    for (std::size_t t = 0; t < depth; ++t) log.push_back(s->sample(rng));
    if (depth > 0) sigma = grove_from_log(log)[0];
    man.parameters()["screens"] = screens;
  } else {
    s = SuperIfs({build_interpolation_ifs(data)}, {1.0}, 1, "interpolation");
  }
  std::vector<Point2> pts;
  for (const Point2 x0 : {data.points.front(), data.points.back()}) {
    const auto e = backward_expand(*s, sigma, x0);
    pts.insert(pts.end(), e.begin(), e.end());
  }
  std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  Polyline graph;
  graph.points = pts;
  graph.segment_addresses.assign(pts.size() - 1, Address{});
  {
    auto svg = open_text(out / "interp.svg");
    write_polyline_svg(svg, graph);
    auto csv = open_text(out / "interp.csv");
    write_polyline_csv(csv, graph);
  }
  man.output(out / "interp.svg");
  man.output(out / "interp.csv");
  man.parameters()["depth"] = depth;
  man.results()["points"] = pts.size();
  man.write(out);
  std::cout << "interp: " << pts.size() << " graph points\n";
  return kExitOk;
}

int cmd_spacefill(const Options& o) {
  const fs::path out = prepare_out(o);
  Manifest man("spacefill", o);
  std::optional<Config> c;
  if (!o.config.empty()) {
    c = load(o);
    man.config_hash(*c);
  }
  const std::size_t depth = o.expand_depth ? *o.expand_depth : (c ? c->unsigned_or("/spacefill/depth", 5) : 5);
  if (depth > 12) throw std::invalid_argument("spacefill: depth is limited to 12");
  const std::size_t screens = o.screens ? *o.screens : (c ? c->unsigned_or("/screens", 2) : 2);
  const std::string mode = o.mode ? *o.mode : (c ? c->string_or("/mode", "random") : "random");
  const SuperIfs s = spacefill_superifs(screens);
  man.parameters()["depth"] = depth;
  man.parameters()["mode"] = mode;
  std::vector<Polyline> curves;
  if (mode == "constant") {
    curves.push_back(spacefill_approximant(s, CodeTree::constant(3, depth, 0)));
  } else if (mode == "random") {
    const std::uint64_t seed = require_seed(o, c ? &*c : nullptr);
    man.seed(seed);
    man.parameters()["screens"] = screens;
    Rng rng(seed);
    std::vector<IndexA> log;
    for (std::size_t t = 0; t < depth; ++t) log.push_back(s.sample(rng));
    for (std::size_t v = 0; v < screens; ++v) curves.push_back(spacefill_approximant(s, log, v, depth));
    auto csv = open_text(out / "index_log.csv");
    write_index_log(csv, log);
    man.output(out / "index_log.csv");
  } else {
    throw std::invalid_argument("spacefill mode must be constant or random");
  }
  for (std::size_t v = 0; v < curves.size(); ++v) {
    const std::string base = "spacefill_" + std::to_string(v + 1);
    auto svg = open_text(out / (base + ".svg"));
    write_polyline_svg(svg, curves[v]);
    auto csv = open_text(out / (base + ".csv"));
    write_polyline_csv(csv, curves[v]);
    man.output(out / (base + ".svg"));
    man.output(out / (base + ".csv"));
    std::cout << base << ": " << curves[v].segments() << " segments from (" << curves[v].points.front().x << ", "
              << curves[v].points.front().y << ") to (" << curves[v].points.back().x << ", "
              << curves[v].points.back().y << ")\n";
  }
  man.write(out);
  return kExitOk;
}

int cmd_colour(const Options& o) {
  const Config c = load(o);
  const fs::path out = prepare_out(o);
  Manifest man("colour", o);
  man.config_hash(c);
  const std::uint64_t seed = require_seed(o, &c);
  man.seed(seed);
  const Grid grid = read_grid(c);
  const std::string mode = mode_of(o, c, "chaos");
  ColourRaster img(grid.width(), grid.height(), grid.frame());
  if (mode == "chaos") {
    const Ifs geometry = read_ifs(c, "/ifs/0");
    const PaletteIfs palette = read_palette(c, "/palette/0");
    ChaosGameOptions opt;
    opt.seed = seed;
    opt.n_points = c.unsigned_or("/points", 1000000);
    opt.burn_in = c.unsigned_or("/burn_in", 100);
    try {
      img = colour_steal_render(geometry, palette, opt, grid);
    } catch (const std::invalid_argument& e) {
      c.fail("/palette/0", e.what());
    }
    man.parameters()["points"] = opt.n_points;
  } else if (mode == "tree") {
    SuperIfs s = read_superifs(c);
    if (o.screens) s = s.with_screens(*o.screens);
    std::vector<PaletteIfs> palettes;
    const Json& list = c.at("/palette");
    for (std::size_t i = 0; i < list.size(); ++i) palettes.push_back(read_palette(c, "/palette/" + std::to_string(i)));
    const std::size_t depth = o.expand_depth ? *o.expand_depth : c.unsigned_or("/depth", 10);
    if (std::pow(double(s.arity()), double(depth)) > double(1 << 24)) c.fail("/depth", "expansion too large");
    Rng rng(seed);
    std::vector<IndexA> log;
    for (std::size_t t = 0; t < depth; ++t) log.push_back(s.sample(rng));
    const CodeTree sigma = depth > 0 ? grove_from_log(log)[0] : CodeTree(s.arity(), 0, {0});
    const Point2 x0 = c.has("/start") ? read_point(c, "/start") : Point2{0.5, 0.5};
    try {
      img = colour_steal_render(s, palettes, sigma, x0, grid);
    } catch (const std::invalid_argument& e) {
      c.fail("/palette", e.what());
    }
    man.parameters()["depth"] = depth;
    man.parameters()["screens"] = s.screens();
  } else {
    c.fail("/mode", "colour mode must be chaos or tree");
  }
  write_ppm(out / "colour.ppm", img);
  man.output(out / "colour.ppm");
  man.parameters()["mode"] = mode;
  man.write(out);
  std::cout << "colour: wrote " << (out / "colour.ppm").string() << '\n';
  return kExitOk;
}

}  // namespace superfractal::cli
