#include "superfractal/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "superfractal/geometry.hpp"
#include "superfractal/parallel.hpp"

namespace superfractal {

ScaleTable::ScaleTable(std::vector<std::vector<double>> rows) : rows_(std::move(rows)) {
  if (rows_.empty() || rows_.front().empty()) throw std::invalid_argument("scale table is empty");
  for (std::size_t n = 0; n < rows_.size(); ++n) {
    if (rows_[n].size() != rows_.front().size()) throw std::invalid_argument("scale table rows must share M");
    for (double s : rows_[n]) {
      if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("similitude ratios must lie in (0,1)");
    }
  }
}

ScaleTable ScaleTable::from_ifs(const Ifs& f, double tol) {
  std::vector<double> row;
  for (std::size_t m = 0; m < f.size(); ++m) {
    const auto sim = Similitude2::from_map(f.map(m), tol);
    if (!sim) {
      throw std::invalid_argument("map " + std::to_string(m + 1) + (f.name().empty() ? "" : " of " + f.name()) +
                                  " is not a similitude; the dimension formulas need maps s O x + t with O "
                                  "orthonormal (and the open set condition)");
    }
    row.push_back(sim->scale());
  }
  return ScaleTable({row});
}

ScaleTable ScaleTable::from_superifs(const SuperIfs& s, double tol) {
  std::vector<std::vector<double>> rows;
  for (const Ifs& f : s.ifss()) rows.push_back(from_ifs(f, tol).rows_.front());
  return ScaleTable(std::move(rows));
}

double FlowMatrix::row_sum(std::size_t v) const {
  double t = 0.0;
  for (std::size_t w = 0; w < screens; ++w) t += (*this)(v, w);
  return t;
}

namespace {

void check_probs(const ScaleTable& table, std::span<const double> probs) {
  if (probs.size() != table.size()) throw std::invalid_argument("need one probability per IFS");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw std::invalid_argument("IFS probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("IFS probabilities must sum to 1");
}

// Root of a strictly decreasing f on [0, 50]; 0 when f(0) <= 0 already.
template <typename F>
double bisect_decreasing(F&& f) {
  double lo = 0.0;
  double hi = 50.0;
  if (f(lo) <= 0.0) return 0.0;
  if (f(hi) > 0.0) throw NumericalFailure("dimension root lies above 50");
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double power_sum(std::span<const double> scales, double d) {
  double t = 0.0;
  for (double s : scales) t += std::pow(s, d);
  return t;
}

}  // namespace

double moran_objective(std::span<const double> scales, double d) { return power_sum(scales, d) - 1.0; }

double random_objective(const ScaleTable& table, std::span<const double> probs, double d) {
  double t = 0.0;
  for (std::size_t n = 0; n < table.size(); ++n) {
    if (probs[n] > 0.0) t += probs[n] * power_sum(table.row(n), d);
  }
  return t - 1.0;
}

double homogeneous_objective(const ScaleTable& table, std::span<const double> probs, double d) {
  double t = 0.0;
  for (std::size_t n = 0; n < table.size(); ++n) {
    if (probs[n] > 0.0) t += probs[n] * std::log(power_sum(table.row(n), d));
  }
  return t;
}

double moran_dimension(std::span<const double> scales) {
  if (scales.empty()) throw std::invalid_argument("moran_dimension: no scales");
  for (double s : scales) {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("moran_dimension: scales must lie in (0,1)");
  }
  return bisect_decreasing([&](double d) { return moran_objective(scales, d); });
}

double random_dimension(const ScaleTable& table, std::span<const double> probs) {
  check_probs(table, probs);
  return bisect_decreasing([&](double d) { return random_objective(table, probs, d); });
}

double homogeneous_dimension(const ScaleTable& table, std::span<const double> probs) {
  check_probs(table, probs);
  return bisect_decreasing([&](double d) { return homogeneous_objective(table, probs, d); });
}

FlowMatrix flow_matrix(const IndexA& a, const ScaleTable& table, double alpha) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("flow_matrix: alpha must be >= 0");
  if (a.arity() != table.arity()) throw std::invalid_argument("flow_matrix: index arity does not match table");
  const std::size_t v_count = a.screens();
  FlowMatrix f{v_count, alpha, std::vector<double>(v_count * v_count, 0.0)};
  for (std::size_t v = 0; v < v_count; ++v) {
    if (a.ifs(v) >= table.size()) throw std::out_of_range("flow_matrix: index names an unknown IFS");
    for (std::size_t m = 0; m < a.arity(); ++m) {
      f.entries[v * v_count + a.link(v, m)] += std::pow(table.scale(a.ifs(v), m), alpha);
    }
  }
  return f;
}

namespace {

// ln ||product|| / k for one replica. Index draws follow sample_index: for
// each v, n_v from P then the M links. The product is applied to the row
// vector channel by channel, so the flow matrices are never formed.
double lyapunov_replica(const ScaleTable& table, const Categorical& pick, std::size_t screens,
                        const std::vector<double>& powers, Rng rng, const LyapunovOptions& opt) {
  const std::size_t m_count = table.arity();
  std::vector<double> u(screens, 1.0);
  std::vector<double> next(screens);
  double log_norm = 0.0;
  for (std::size_t step = 1; step <= opt.steps; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t v = 0; v < screens; ++v) {
      const std::size_t n = pick(rng);
      const double uv = u[v];
      const double* row = powers.data() + n * m_count;
      for (std::size_t m = 0; m < m_count; ++m) next[rng.index(screens)] += uv * row[m];
    }
    u.swap(next);
    if (step % opt.renormalize_every == 0 || step == opt.steps) {
      double total = 0.0;
      for (double x : u) total += x;
      if (!(total > 0.0) || !std::isfinite(total)) throw NumericalFailure("lyapunov: product norm left range");
      log_norm += std::log(total);
      const double inv = 1.0 / total;
      for (double& x : u) x *= inv;
    }
  }
  return log_norm / double(opt.steps);
}

}  // namespace

LyapunovEstimate lyapunov(const ScaleTable& table, std::span<const double> probs, std::size_t screens, double alpha,
                          std::uint64_t seed, const LyapunovOptions& opt) {
  check_probs(table, probs);
  if (screens == 0) throw std::invalid_argument("lyapunov: V must be >= 1");
  if (opt.steps == 0) throw std::invalid_argument("lyapunov: k must be >= 1");
  if (opt.replicas < 2) throw std::invalid_argument("lyapunov: need at least two replicas for an error bar");
  if (opt.renormalize_every == 0) throw std::invalid_argument("lyapunov: renormalisation interval must be >= 1");
  if (!(alpha >= 0.0)) throw std::invalid_argument("lyapunov: alpha must be >= 0");
  std::vector<double> powers;
  for (std::size_t n = 0; n < table.size(); ++n) {
    for (double s : table.row(n)) powers.push_back(std::pow(s, alpha));
  }
  const Categorical pick(probs);
  LyapunovEstimate e;
  e.replica_values.assign(opt.replicas, 0.0);
  const Rng master(seed);
  parallel_for(opt.replicas, [&](std::size_t r) {
    e.replica_values[r] = lyapunov_replica(table, pick, screens, powers, master.substream(r), opt);
  });
  double mean = 0.0;
  for (double g : e.replica_values) mean += g;
  mean /= double(opt.replicas);
  double ss = 0.0;
  for (double g : e.replica_values) ss += (g - mean) * (g - mean);
  e.gamma = mean;
  e.std_error = std::sqrt(ss / double(opt.replicas - 1) / double(opt.replicas));
  return e;
}

DimensionEstimate vvariable_dimension(const ScaleTable& table, std::span<const double> probs, std::size_t screens,
                                      std::uint64_t seed, const VVariableOptions& opt) {
  if (!(opt.tol > 0.0)) throw std::invalid_argument("vvariable_dimension: tol must be positive");
  DimensionEstimate out;
  auto gamma = [&](double alpha) {
    ++out.evaluations;
    return lyapunov(table, probs, screens, alpha, seed, opt.lyapunov).gamma;
  };
  double lo = 0.0;
  if (gamma(lo) <= 0.0) throw NumericalFailure("vvariable_dimension: gamma(0) <= 0, no positive root to bracket");
  double hi = 1.0;
  while (gamma(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 64.0) throw NumericalFailure("vvariable_dimension: could not bracket the root below 64");
  }
  while (hi - lo > opt.tol) {
    const double mid = 0.5 * (lo + hi);
    (gamma(mid) > 0.0 ? lo : hi) = mid;
  }
  out.dimension = 0.5 * (lo + hi);

  // Independent replication at the root, plus a central slope on the same
  // fresh stream.
  const std::uint64_t check_seed = derive_seed(seed, 0x5eedULL);
  const LyapunovEstimate at = lyapunov(table, probs, screens, out.dimension, check_seed, opt.lyapunov);
  const double h = std::max(0.01, opt.tol);
  const double slope =
      (lyapunov(table, probs, screens, out.dimension + h, check_seed, opt.lyapunov).gamma -
       lyapunov(table, probs, screens, std::max(0.0, out.dimension - h), check_seed, opt.lyapunov).gamma) /
      (out.dimension + h - std::max(0.0, out.dimension - h));
  out.evaluations += 3;
  out.gamma_at_root = at.gamma;
  out.gamma_std_error = at.std_error;
  out.uncertainty = slope < 0.0 ? (std::abs(at.gamma) + at.std_error) / -slope
                                : std::numeric_limits<double>::infinity();
  out.uncertainty = std::max(out.uncertainty, 0.5 * opt.tol);
  return out;
}

void write_lyapunov_csv_header(std::ostream& out) { out << "alpha,gamma_estimate,stderr,k,V,seed\n"; }

void write_lyapunov_csv_row(std::ostream& out, double alpha, const LyapunovEstimate& e, std::size_t k,
                            std::size_t screens, std::uint64_t seed) {
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << std::setprecision(17) << alpha << ',' << e.gamma << ',' << e.std_error << ',' << k << ',' << screens << ','
      << seed << '\n';
  out.flags(flags);
  out.precision(prec);
}

}  // namespace superfractal
