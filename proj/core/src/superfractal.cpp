#include "superfractal/superfractal.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "superfractal/parallel.hpp"

namespace superfractal {

SuperIfs::SuperIfs(std::vector<Ifs> ifss, std::vector<double> probs, std::size_t screens, std::string name)
    : ifss_(std::move(ifss)), probs_(std::move(probs)), screens_(screens), name_(std::move(name)) {
  if (ifss_.empty()) throw std::invalid_argument("superIFS needs at least one IFS");
  if (screens_ == 0) throw std::invalid_argument("superIFS needs V >= 1 screens");
  for (std::size_t n = 0; n < ifss_.size(); ++n) {
    if (ifss_[n].size() != ifss_.front().size()) {
      throw std::invalid_argument("superIFS component " + std::to_string(n + 1) + " has " +
                                  std::to_string(ifss_[n].size()) + " maps, expected " +
                                  std::to_string(ifss_.front().size()));
    }
  }
  if (probs_.size() != ifss_.size()) {
    throw std::invalid_argument("superIFS has " + std::to_string(ifss_.size()) + " IFSs but " +
                                std::to_string(probs_.size()) + " probabilities");
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw std::invalid_argument("superIFS probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("superIFS probabilities sum to " + std::to_string(total) + ", not 1");
  }
  sampler_ = Categorical(probs_);
}

bool SuperIfs::strictly_contractive() const {
  return std::all_of(ifss_.begin(), ifss_.end(), [](const Ifs& f) { return f.strictly_contractive(); });
}

double SuperIfs::lipschitz() const {
  double l = 0.0;
  for (const auto& f : ifss_) l = std::max(l, f.lipschitz());
  return l;
}

SuperIfs SuperIfs::with_screens(std::size_t screens) const {
  SuperIfs out = *this;
  if (screens == 0) throw std::invalid_argument("superIFS needs V >= 1 screens");
  out.screens_ = screens;
  return out;
}

namespace {

void check_step(const SuperIfs& s, const IndexA& a, std::size_t bank_size) {
  if (a.screens() != s.screens() || a.arity() != s.arity()) {
    throw std::invalid_argument("index shape does not match the superIFS");
  }
  if (bank_size != s.screens()) {
    throw std::invalid_argument("screen bank has " + std::to_string(bank_size) + " screens, expected " +
                                std::to_string(s.screens()));
  }
  for (std::size_t v = 0; v < a.screens(); ++v) {
    if (a.ifs(v) >= s.size()) throw std::out_of_range("index names IFS " + std::to_string(a.ifs(v) + 1));
  }
}

template <typename Screen>
void check_uniform(const ScreenBank<Screen>& bank) {
  for (const auto& sc : bank.screens) {
    if (!sc.same_shape(bank.screens.front())) throw std::invalid_argument("screens must share one grid");
  }
}

}  // namespace

SetBank super_step_sets(const SuperIfs& s, const IndexA& a, const SetBank& in) {
  check_step(s, a, in.size());
  check_uniform(in);
  const Raster& shape = in[0];
  SetBank out;
  out.generation = in.generation + 1;
  out.screens.assign(in.size(), Raster(shape.width(), shape.height(), shape.frame()));
  parallel_for(in.size(), [&](std::size_t v) {
    const Ifs& f = s.ifs(a.ifs(v));
    Raster& target = out.screens[v];
    for (std::size_t m = 0; m < f.size(); ++m) {
      const Raster& src = in[a.link(v, m)];
      const Map2& map = f.map(m);
      for (std::size_t i = 0; i < src.size(); ++i) {
        if (src.test(i)) target.plot(map(src.center(src.pixel(i))));
      }
    }
  });
  return out;
}

MeasureBank super_step_measures(const SuperIfs& s, const IndexA& a, const MeasureBank& in) {
  check_step(s, a, in.size());
  check_uniform(in);
  for (std::size_t v = 0; v < in.size(); ++v) {
    if (std::abs(in[v].total() - 1.0) > 1e-9) {
      throw std::invalid_argument("input screen " + std::to_string(v + 1) + " does not have unit mass");
    }
  }
  const MeasureRaster& shape = in[0];
  MeasureBank out;
  out.generation = in.generation + 1;
  out.screens.assign(in.size(), MeasureRaster(shape.width(), shape.height(), shape.frame()));
  parallel_for(in.size(), [&](std::size_t v) {
    const Ifs& f = s.ifs(a.ifs(v));
    MeasureRaster& target = out.screens[v];
    for (std::size_t m = 0; m < f.size(); ++m) {
      const double p = f.prob(m);
      if (p == 0.0) continue;
      const MeasureRaster& src = in[a.link(v, m)];
      const Map2& map = f.map(m);
      const auto masses = src.masses();
      for (std::size_t i = 0; i < masses.size(); ++i) {
        if (masses[i] == 0.0) continue;
        if (const auto j = target.locate_linear(map(src.center(src.pixel(i))))) target.add(*j, p * masses[i]);
      }
    }
  });
  for (std::size_t v = 0; v < out.size(); ++v) {
    const double total = out.screens[v].total();
    if (std::abs(total - 1.0) > 1e-6) {
      throw NumericalFailure("screen " + std::to_string(v + 1) + " kept mass " + std::to_string(total) +
                             " after a step; part of the measure left the frame");
    }
    out.screens[v].normalize();
  }
  return out;
}

PointBank super_step_points(const SuperIfs& s, const IndexA& a, const PointBank& in) {
  check_step(s, a, in.size());
  PointBank out(in.size());
  for (std::size_t v = 0; v < in.size(); ++v) {
    const Ifs& f = s.ifs(a.ifs(v));
    for (std::size_t m = 0; m < f.size(); ++m) {
      for (const Point2& p : in[a.link(v, m)]) out[v].push_back(f.map(m)(p));
    }
  }
  return out;
}

namespace {

template <typename Screen, typename Step, typename Observe>
SuperRun<Screen> run(const SuperIfs& s, ScreenBank<Screen> init, std::size_t iterations, std::uint64_t seed,
                     Step&& step, const Observe& observe) {
  if (init.size() != s.screens()) throw std::invalid_argument("initial bank must have V screens");
  check_uniform(init);
  SuperRun<Screen> result{std::move(init), {}};
  result.log.reserve(iterations);
  Rng master(seed);
  for (std::size_t t = 0; t < iterations; ++t) {
    IndexA a = s.sample(master);
    // Double buffer: the new bank is built from the old one, then replaces it.
    result.bank = step(s, a, result.bank);
    result.log.push_back(std::move(a));
    if (observe) observe(result.bank, result.log.back());
  }
  return result;
}

}  // namespace

SuperRun<Raster> run_superfractal(const SuperIfs& s, SetBank init, std::size_t iterations, std::uint64_t seed,
                                  const std::function<void(const SetBank&, const IndexA&)>& observe) {
  return run(s, std::move(init), iterations, seed, super_step_sets, observe);
}

SuperRun<MeasureRaster> run_superfractal(const SuperIfs& s, MeasureBank init, std::size_t iterations,
                                         std::uint64_t seed,
                                         const std::function<void(const MeasureBank&, const IndexA&)>& observe) {
  return run(s, std::move(init), iterations, seed, super_step_measures, observe);
}

namespace {

// Walks the depth-k tree bottom-up. Point j of the flat array belongs, at
// level l, to node j / M^{k-l} and to branch (j / M^{k-l-1}) mod M of it.
template <typename Apply>
void expand_levels(const SuperIfs& s, const CodeTree& sigma, std::size_t count, Apply&& apply) {
  if (sigma.arity() != s.arity()) throw std::invalid_argument("code tree arity does not match the superIFS");
  const std::size_t k = sigma.depth();
  const std::size_t m = s.arity();
  for (std::size_t l = k; l-- > 0;) {
    const auto labels = sigma.level(l);
    const std::size_t below = level_width(m, k - l - 1);
    const std::size_t block = below * m;
    for (std::size_t j = 0; j < count; ++j) {
      const Label n = labels[j / block];
      if (n >= s.size()) throw std::out_of_range("code tree names IFS " + std::to_string(n + 1));
      apply(j, s.ifs(n), (j / below) % m);
    }
  }
}

}  // namespace

std::vector<Point2> backward_expand(const SuperIfs& s, const CodeTree& sigma, Point2 x0) {
  std::vector<Point2> pts(level_width(s.arity(), sigma.depth()), x0);
  expand_levels(s, sigma, pts.size(),
                [&](std::size_t j, const Ifs& f, std::size_t m) { pts[j] = f.map(m)(pts[j]); });
  return pts;
}

std::vector<WeightedPoint> backward_expand_measure(const SuperIfs& s, const CodeTree& sigma, Point2 x0) {
  std::vector<WeightedPoint> pts(level_width(s.arity(), sigma.depth()), WeightedPoint{x0, 1.0});
  expand_levels(s, sigma, pts.size(), [&](std::size_t j, const Ifs& f, std::size_t m) {
    pts[j].point = f.map(m)(pts[j].point);
    pts[j].weight *= f.prob(m);
  });
  return pts;
}

Grove grove_from_log(std::span<const IndexA> log) {
  if (log.empty()) throw std::invalid_argument("grove_from_log: empty log");
  Grove g = Grove::constant(log.front().screens(), log.front().arity(), 0, 0);
  for (const IndexA& a : log) g = eta(a, g);
  return g;
}

void write_index_log(std::ostream& out, std::span<const IndexA> log) {
  const std::size_t m = log.empty() ? 0 : log.front().arity();
  out << "step,v,n_v";
  for (std::size_t i = 1; i <= m; ++i) out << ",v_" << i;
  out << '\n';
  for (std::size_t t = 0; t < log.size(); ++t) {
    for (std::size_t v = 0; v < log[t].screens(); ++v) {
      out << (t + 1) << ',' << (v + 1) << ',' << (log[t].ifs(v) + 1);
      for (Label l : log[t].links(v)) out << ',' << (l + 1);
      out << '\n';
    }
  }
}

std::vector<IndexA> read_index_log(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return {};
  std::vector<IndexA> log;
  std::vector<IndexA::Row> rows;
  std::size_t current = 0;
  std::size_t line_no = 1;
  auto flush = [&] {
    if (!rows.empty()) log.push_back(IndexA::from_one_based(rows));
    rows.clear();
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<long> fields;
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        fields.push_back(std::stol(cell));
      } catch (const std::exception&) {
        throw std::invalid_argument("index log line " + std::to_string(line_no) + ": bad field '" + cell + "'");
      }
    }
    if (fields.size() < 4 || fields[0] < 1 || fields[1] < 1 || fields[2] < 1) {
      throw std::invalid_argument("index log line " + std::to_string(line_no) + ": malformed row");
    }
    const auto step = std::size_t(fields[0]);
    if (step != current) {
      flush();
      if (step != log.size() + 1) {
        throw std::invalid_argument("index log line " + std::to_string(line_no) + ": steps out of order");
      }
      current = step;
    }
    if (std::size_t(fields[1]) != rows.size() + 1) {
      throw std::invalid_argument("index log line " + std::to_string(line_no) + ": screens out of order");
    }
    IndexA::Row row{Label(fields[2]), {}};
    for (std::size_t i = 3; i < fields.size(); ++i) {
      if (fields[i] < 1) throw std::invalid_argument("index log line " + std::to_string(line_no) + ": bad label");
      row.links.push_back(Label(fields[i]));
    }
    rows.push_back(std::move(row));
  }
  flush();
  return log;
}

}  // namespace superfractal
