#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "dbmlab/dbm.hpp"
#include "dbmlab/semicircle.hpp"

namespace dbmlab {
namespace comparison {

// Coefficients of the discrete parabolic operator governing the difference of
// two coupled cutoff systems:
//   (A w)_i = sum_{j != i} B_ij (w_j - w_i) - W_i w_i
// split into a short-range part S (|i-j| <= ell, keeps W) and long-range R.
struct ComparisonOperator {
  Eigen::MatrixXd B;  // symmetric, zero diagonal, nonnegative entries
  Eigen::VectorXd W;  // nonnegative
  std::int64_t ell = 0;
  double eps_ell = 0.0;

  std::int64_t K() const { return B.rows(); }

  // (A w), (S w), (R w)
  Eigen::VectorXd apply_full(const Eigen::VectorXd& w) const;
  Eigen::VectorXd apply_short(const Eigen::VectorXd& w) const;
  Eigen::VectorXd apply_long(const Eigen::VectorXd& w) const;

  // max_i sum_{|i-j| > ell} B_ij  (the ell^p -> ell^p bound on R)
  double long_range_row_sum() const;
  // stability scale: max_i (sum_j B_ij + W_i)
  double max_row_sum() const;
};

// B_ij = [(x_i - x_j + eps_ij)(y_i - y_j + eps_ij)]^{-1},
// W_i  = int_{gamma_c}^{4 N^{2/3}} nu^{(x)}(u) / ((x_i - u)(y_i - u)) du.
// Both states must be ordered and strictly below gamma_c.
ComparisonOperator build_coefficients(const std::vector<double>& x_state,
                                      const std::vector<double>& y_state, double gamma_c,
                                      const RegularizationConfig& reg, double N_effective,
                                      double eps_ell = 0.1,
                                      const SemicircleModel& model = SemicircleModel());

// Piecewise-constant-in-time coefficient path.
struct OperatorPath {
  std::vector<double> times;  // increasing; ops[k] active on [times[k], times[k+1])
  std::vector<ComparisonOperator> ops;

  const ComparisonOperator& at(double t) const;
};

enum class Part { full, short_range };

// Solves dw/du = A(u) w (or S(u) w) from s to t by explicit Euler with
// row-sum substepping, which preserves positivity and ell^p contraction.
Eigen::VectorXd evolve_semigroup(const OperatorPath& path, const Eigen::VectorXd& w0,
                                 double s, double t, Part part = Part::full,
                                 double safety = 0.5);

// U^{(S)}_{ab}(s, t): evolve the delta at b under the short-range dynamics.
double finite_speed_check(const OperatorPath& path, std::int64_t a, std::int64_t b,
                          double s, double t);

struct DecayCurve {
  std::vector<double> times;
  std::vector<double> sup_norm;
  double fitted_slope = 0.0;  // log-log slope over times >= fit_from
  double slope_ci = 0.0;
  double fit_from = 0.0;
};

// ||v(t)||_inf decay of the homogeneous solution from v0, with log-log slope
// fitted over t >= fit_from (one-sided check against the -3/20 bound).
DecayCurve energy_decay_check(const OperatorPath& path, const Eigen::VectorXd& v0,
                              const std::vector<double>& t_grid, double fit_from);

}  // namespace comparison
}  // namespace dbmlab
