#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "superfractal/superfractal.hpp"
#include "superfractal/trees.hpp"

namespace superfractal {

// Similitude ratios s_m^n, one row per IFS.
class ScaleTable {
 public:
  explicit ScaleTable(std::vector<std::vector<double>> rows);
  // Every map must be a similitude; throws std::invalid_argument naming the
  // first map that is not.
  static ScaleTable from_superifs(const SuperIfs& s, double tol = 1e-9);
  static ScaleTable from_ifs(const Ifs& f, double tol = 1e-9);

  std::size_t size() const { return rows_.size(); }
  std::size_t arity() const { return rows_.front().size(); }
  double scale(std::size_t n, std::size_t m) const { return rows_[n][m]; }
  std::span<const double> row(std::size_t n) const { return rows_[n]; }

 private:
  std::vector<std::vector<double>> rows_;
};

// V x V matrix M^a(alpha), row-major.
struct FlowMatrix {
  std::size_t screens = 0;
  double alpha = 0.0;
  std::vector<double> entries;

  double operator()(std::size_t v, std::size_t w) const { return entries[v * screens + w]; }
  double row_sum(std::size_t v) const;
};

// Root of sum_m s_m^D = 1 by bisection on [0, 50].
double moran_dimension(std::span<const double> scales);
// Root of sum_n P_n sum_m (s_m^n)^D = 1.
double random_dimension(const ScaleTable& table, std::span<const double> probs);
// Root of sum_n P_n ln(sum_m (s_m^n)^D) = 0.
double homogeneous_dimension(const ScaleTable& table, std::span<const double> probs);

// The objective functions whose roots the three solvers return; exposed for
// residual reporting and monotonicity checks.
double moran_objective(std::span<const double> scales, double d);
double random_objective(const ScaleTable& table, std::span<const double> probs, double d);
double homogeneous_objective(const ScaleTable& table, std::span<const double> probs, double d);

FlowMatrix flow_matrix(const IndexA& a, const ScaleTable& table, double alpha);

struct LyapunovOptions {
  std::size_t steps = 100000;      // k
  std::size_t replicas = 8;
  std::size_t renormalize_every = 1;
};

struct LyapunovEstimate {
  double gamma = 0.0;
  double std_error = 0.0;
  std::vector<double> replica_values;
};

// gamma(alpha) = lim k^{-1} ln ||M^{a_1}(alpha) ... M^{a_k}(alpha)||, ||.|| being
// the entry sum. Each replica runs a row vector through the random product
// on substream r of `seed`; the standard error is over replicas.
LyapunovEstimate lyapunov(const ScaleTable& table, std::span<const double> probs, std::size_t screens, double alpha,
                          std::uint64_t seed, const LyapunovOptions& opt = {});

struct VVariableOptions {
  LyapunovOptions lyapunov;
  double tol = 1e-4;  // bisection stops once the bracket is narrower
};

struct DimensionEstimate {
  double dimension = 0.0;
  double uncertainty = 0.0;
  // gamma at the root from an independent replication, and its error.
  double gamma_at_root = 0.0;
  double gamma_std_error = 0.0;
  std::size_t evaluations = 0;
};

// Bisection on alpha for gamma(alpha) = 0. Every bracket evaluation uses the
// same seed, so the estimate is monotone in alpha. A final replication on a
// derived seed checks the root; the uncertainty is (|gamma| + stderr) there
// divided by the local slope.
DimensionEstimate vvariable_dimension(const ScaleTable& table, std::span<const double> probs, std::size_t screens,
                                      std::uint64_t seed, const VVariableOptions& opt = {});

// "alpha,gamma_estimate,stderr,k,V,seed"
void write_lyapunov_csv_header(std::ostream& out);
void write_lyapunov_csv_row(std::ostream& out, double alpha, const LyapunovEstimate& e, std::size_t k,
                            std::size_t screens, std::uint64_t seed);

}  // namespace superfractal
