#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "superfractal/geometry.hpp"

using namespace superfractal::cli;

namespace {

void common_flags(CLI::App* cmd, Options& o, bool needs_config) {
  auto* cfg = cmd->add_option("--config", o.config, "JSON configuration file");
  if (needs_config) cfg->required();
  cmd->add_option("--seed", o.seed, "RNG seed (required by randomized commands unless the config has one)");
  cmd->add_option("--out", o.out, "output directory")->capture_default_str();
  cmd->add_option("--iterations", o.iterations, "number of iterations / steps");
  cmd->add_option("--stride", o.stride, "write every Nth frame (0: none)");
  cmd->add_option("--mode", o.mode, "command-specific mode");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"V-variable fractals: rendering, superIFS iteration, tree statistics and dimensions"};
  app.require_subcommand(1);
  Options o;

  auto* render = app.add_subcommand("render", "render an IFS attractor (deterministic, chaos-set, chaos-measure)");
  common_flags(render, o, true);

  auto* superrun = app.add_subcommand("superrun", "run the V-screen random iteration on sets or measures");
  common_flags(superrun, o, true);
  superrun->add_option("--screens", o.screens, "override V");

  auto* dimension = app.add_subcommand("dimension", "dimension of the attractor family");
  common_flags(dimension, o, true);
  dimension->add_option("--regime", o.regime, "moran | random | homogeneous | vvariable");
  dimension->add_option("--screens", o.screens, "V for the vvariable regime");
  dimension->add_option("--steps", o.steps, "Lyapunov product length k");
  dimension->add_option("--tol", o.tol, "bisection tolerance");
  dimension->add_option("--ifs", o.ifs_index, "IFS used by the moran regime (1-based)")->capture_default_str();

  auto* treestats = app.add_subcommand("treestats", "Monte Carlo cylinder statistics of V-trees");
  common_flags(treestats, o, false);
  treestats->add_option("--arity,-M", o.arity, "M")->capture_default_str();
  treestats->add_option("--labels,-N", o.labels, "N")->capture_default_str();
  treestats->add_option("--screens,-V", o.screens, "V")->required();
  treestats->add_option("--probs", o.probs, "P (defaults to uniform)");
  treestats->add_option("--depth", o.depth, "cylinder depth k (<= 3)")->capture_default_str();
  treestats->add_option("--samples", o.samples, "number of sampled trees")->capture_default_str();

  auto* interp = app.add_subcommand("interp", "fractal interpolation graph");
  common_flags(interp, o, true);
  interp->add_option("--depth", o.expand_depth, "expansion depth");
  interp->add_option("--screens", o.screens, "V when two vertical-factor sets are given");

  auto* spacefill = app.add_subcommand("spacefill", "V-variable space-filling curve approximants");
  common_flags(spacefill, o, false);
  spacefill->add_option("--depth", o.expand_depth, "approximant depth");
  spacefill->add_option("--screens", o.screens, "V");

  auto* colour = app.add_subcommand("colour", "colour-stealing render");
  common_flags(colour, o, true);
  colour->add_option("--depth", o.expand_depth, "code tree depth (tree mode)");
  colour->add_option("--screens", o.screens, "override V (tree mode)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*render) return cmd_render(o);
    if (*superrun) return cmd_superrun(o);
    if (*dimension) return cmd_dimension(o);
    if (*treestats) return cmd_treestats(o);
    if (*interp) return cmd_interp(o);
    if (*spacefill) return cmd_spacefill(o);
    if (*colour) return cmd_colour(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const superfractal::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const superfractal::SingularEvaluation& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
