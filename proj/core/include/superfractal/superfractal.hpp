#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "superfractal/ifs.hpp"
#include "superfractal/raster.hpp"
#include "superfractal/trees.hpp"

namespace superfractal {

// N component IFSs sharing M maps, IFS probabilities P and V screens.
class SuperIfs {
 public:
  SuperIfs(std::vector<Ifs> ifss, std::vector<double> probs, std::size_t screens, std::string name = {});

  std::size_t size() const { return ifss_.size(); }
  std::size_t arity() const { return ifss_.front().size(); }
  std::size_t screens() const { return screens_; }
  const Ifs& ifs(std::size_t n) const { return ifss_[n]; }
  std::span<const Ifs> ifss() const { return ifss_; }
  double prob(std::size_t n) const { return probs_[n]; }
  std::span<const double> probs() const { return probs_; }
  const Categorical& sampler() const { return sampler_; }
  const std::string& name() const { return name_; }
  // True only when every component IFS is strictly contractive; convergence
  // diagnostics are meaningless otherwise.
  bool strictly_contractive() const;
  double lipschitz() const;

  // Same maps, different number of screens.
  SuperIfs with_screens(std::size_t screens) const;
  // Draws a ~ P^a with the master stream.
  IndexA sample(Rng& rng) const { return sample_index(sampler_, screens_, arity(), rng); }

 private:
  std::vector<Ifs> ifss_;
  std::vector<double> probs_;
  std::size_t screens_;
  std::string name_;
  Categorical sampler_;
};

template <typename Screen>
struct ScreenBank {
  std::vector<Screen> screens;
  std::size_t generation = 0;

  std::size_t size() const { return screens.size(); }
  const Screen& operator[](std::size_t v) const { return screens[v]; }
};

using SetBank = ScreenBank<Raster>;
using MeasureBank = ScreenBank<MeasureRaster>;
using PointBank = std::vector<std::vector<Point2>>;

// Output screen v = union over m of f_m^{n_v}(input screen v_{v,m}). The input
// bank is left untouched.
SetBank super_step_sets(const SuperIfs& s, const IndexA& a, const SetBank& in);

// Output screen v = sum over m of p_m^{n_v} f_m^{n_v}(input v_{v,m}). Throws
// NumericalFailure when an output mass is off by more than 1e-6 (mass left
// the frame), then renormalises to 1.
MeasureBank super_step_measures(const SuperIfs& s, const IndexA& a, const MeasureBank& in);

// Exact version on finite point sets: screen v is the concatenation over m of
// f_m^{n_v} applied to every point of input v_{v,m}.
PointBank super_step_points(const SuperIfs& s, const IndexA& a, const PointBank& in);

template <typename Screen>
struct SuperRun {
  ScreenBank<Screen> bank;
  std::vector<IndexA> log;
};

// V-screen random iteration: each step draws a from the master stream of
// `seed`, applies it and swaps buffers. `observe` sees the new bank and the
// index that produced it after every step.
SuperRun<Raster> run_superfractal(const SuperIfs& s, SetBank init, std::size_t iterations, std::uint64_t seed,
                                  const std::function<void(const SetBank&, const IndexA&)>& observe = {});
SuperRun<MeasureRaster> run_superfractal(const SuperIfs& s, MeasureBank init, std::size_t iterations,
                                         std::uint64_t seed,
                                         const std::function<void(const MeasureBank&, const IndexA&)>& observe = {});

// The M^k points f_{i_1}^{sigma(root)} o ... o f_{i_k}^{sigma(i_1..i_{k-1})}(x0)
// for a depth-k tree, in lexicographic branch order. Only levels 0..k-1 of
// sigma are read.
std::vector<Point2> backward_expand(const SuperIfs& s, const CodeTree& sigma, Point2 x0);

struct WeightedPoint {
  Point2 point;
  double weight;
};

// As backward_expand, each point weighted by the product of its branch
// probabilities p_{i_1}^{sigma(root)} p_{i_2}^{sigma(i_1)} ...
std::vector<WeightedPoint> backward_expand_measure(const SuperIfs& s, const CodeTree& sigma, Point2 x0);

// The grove eta^{log[last]} o ... o eta^{log[0]} applied to a constant
// depth-0 grove: its component v is the code tree of screen v after the
// logged steps, truncated at depth log.size(). Labels on the bottom level
// are placeholders (0).
Grove grove_from_log(std::span<const IndexA> log);

// CSV with header "step,v,n_v,v_1..v_M"; steps, screens and labels 1-based.
void write_index_log(std::ostream& out, std::span<const IndexA> log);
std::vector<IndexA> read_index_log(std::istream& in);

}  // namespace superfractal
