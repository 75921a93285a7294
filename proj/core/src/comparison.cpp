#include "dbmlab/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dbmlab/quadrature.hpp"
#include "dbmlab/stats.hpp"

namespace dbmlab {
namespace comparison {

Eigen::VectorXd ComparisonOperator::apply_full(const Eigen::VectorXd& w) const {
  const Eigen::VectorXd row = B.rowwise().sum();
  return B * w - row.cwiseProduct(w) - W.cwiseProduct(w);
}

Eigen::VectorXd ComparisonOperator::apply_short(const Eigen::VectorXd& w) const {
  const auto k = K();
  Eigen::VectorXd out(k);
  for (std::int64_t i = 0; i < k; ++i) {
    const std::int64_t lo = std::max<std::int64_t>(0, i - ell);
    const std::int64_t hi = std::min<std::int64_t>(k - 1, i + ell);
    double acc = 0.0;
    for (std::int64_t j = lo; j <= hi; ++j) {
      if (j == i) continue;
      acc += B(i, j) * (w(j) - w(i));
    }
    out(i) = acc - W(i) * w(i);
  }
  return out;
}

Eigen::VectorXd ComparisonOperator::apply_long(const Eigen::VectorXd& w) const {
  return apply_full(w) - apply_short(w);
}

double ComparisonOperator::long_range_row_sum() const {
  const auto k = K();
  double worst = 0.0;
  for (std::int64_t i = 0; i < k; ++i) {
    double acc = 0.0;
    for (std::int64_t j = 0; j < k; ++j)
      if (std::llabs(i - j) > ell) acc += B(i, j);
    worst = std::max(worst, acc);
  }
  return worst;
}

double ComparisonOperator::max_row_sum() const {
  return (B.rowwise().sum() + W).maxCoeff();
}

ComparisonOperator build_coefficients(const std::vector<double>& x_state,
                                      const std::vector<double>& y_state, double gamma_c,
                                      const RegularizationConfig& reg, double N_effective,
                                      double eps_ell, const SemicircleModel& model) {
  const auto k = static_cast<std::int64_t>(x_state.size());
  if (y_state.size() != x_state.size())
    throw std::invalid_argument("build_coefficients: state size mismatch");
  for (std::int64_t i = 0; i < k; ++i) {
    if (x_state[i] >= gamma_c) throw window_violation(i, x_state[i], gamma_c);
    if (y_state[i] >= gamma_c) throw window_violation(i, y_state[i], gamma_c);
  }

  ComparisonOperator op;
  op.eps_ell = eps_ell;
  op.ell = static_cast<std::int64_t>(
      std::lround(std::pow(static_cast<double>(k), 2.0 / 3.0 + eps_ell)));
  op.B = Eigen::MatrixXd::Zero(k, k);
  for (std::int64_t i = 0; i < k; ++i) {
    for (std::int64_t j = 0; j < i; ++j) {
      // i > j: eps_ij = +eps for both factors
      const double bx = x_state[i] - x_state[j] + reg.epsilon;
      const double by = y_state[i] - y_state[j] + reg.epsilon;
      const double v = 1.0 / (bx * by);
      op.B(i, j) = v;
      op.B(j, i) = v;
    }
  }

  op.W = Eigen::VectorXd(k);
  const double top = 4.0 * std::pow(N_effective, 2.0 / 3.0);
  for (std::int64_t i = 0; i < k; ++i) {
    const double xi = x_state[i], yi = y_state[i];
    auto f = [&](double u) {
      return SemicircleModel::nu_edge(u, N_effective) / ((xi - u) * (yi - u));
    };
    const double split = std::max(gamma_c, 0.75 * top);
    double w = 0.0;
    if (gamma_c < split) w += quad::adaptive(f, gamma_c, split, model.quad_tol(), 1e-300);
    auto g = [&](double v) {
      const double u = top - v * v;
      return 2.0 * v * SemicircleModel::nu_edge(u, N_effective) / ((xi - u) * (yi - u));
    };
    w += quad::adaptive(g, 0.0, std::sqrt(top - split), model.quad_tol(), 1e-300);
    op.W(i) = w;
  }
  return op;
}

const ComparisonOperator& OperatorPath::at(double t) const {
  if (ops.empty()) throw std::invalid_argument("OperatorPath: empty");
  auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t idx = (it == times.begin()) ? 0 : static_cast<std::size_t>(it - times.begin() - 1);
  return ops[std::min(idx, ops.size() - 1)];
}

Eigen::VectorXd evolve_semigroup(const OperatorPath& path, const Eigen::VectorXd& w0,
                                 double s, double t, Part part, double safety) {
  if (!(t >= s)) throw std::invalid_argument("evolve_semigroup: t >= s");
  Eigen::VectorXd w = w0;
  double u = s;
  while (u < t - 1e-15) {
    const ComparisonOperator& op = path.at(u);
    const double dt_stab = safety / op.max_row_sum();
    double dt = std::min(dt_stab, t - u);
    // do not step across a coefficient change
    auto it = std::upper_bound(path.times.begin(), path.times.end(), u + 1e-15);
    if (it != path.times.end()) dt = std::min(dt, *it - u);
    const Eigen::VectorXd dw =
        (part == Part::full) ? op.apply_full(w) : op.apply_short(w);
    w += dt * dw;
    u += dt;
  }
  return w;
}

double finite_speed_check(const OperatorPath& path, std::int64_t a, std::int64_t b,
                          double s, double t) {
  const auto k = path.ops.front().K();
  if (a < 0 || a >= k || b < 0 || b >= k)
    throw std::out_of_range("finite_speed_check: index");
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(k);
  delta(b) = 1.0;
  return evolve_semigroup(path, delta, s, t, Part::short_range)(a);
}

DecayCurve energy_decay_check(const OperatorPath& path, const Eigen::VectorXd& v0,
                              const std::vector<double>& t_grid, double fit_from) {
  DecayCurve curve;
  curve.fit_from = fit_from;
  Eigen::VectorXd v = v0;
  double prev_t = t_grid.empty() ? 0.0 : t_grid.front();
  if (!t_grid.empty() && t_grid.front() > 0.0)
    v = evolve_semigroup(path, v, 0.0, t_grid.front());
  for (std::size_t idx = 0; idx < t_grid.size(); ++idx) {
    if (idx > 0) {
      v = evolve_semigroup(path, v, prev_t, t_grid[idx]);
      prev_t = t_grid[idx];
    }
    curve.times.push_back(t_grid[idx]);
    curve.sup_norm.push_back(v.cwiseAbs().maxCoeff());
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    if (curve.times[i] < fit_from || curve.sup_norm[i] <= 0.0) continue;
    lx.push_back(std::log(curve.times[i]));
    ly.push_back(std::log(curve.sup_norm[i]));
  }
  if (lx.size() >= 3) {
    const auto fit = stats::least_squares(lx, ly);
    curve.fitted_slope = fit.slope;
    curve.slope_ci = 2.0 * fit.slope_se;
  }
  return curve;
}

}  // namespace comparison
}  // namespace dbmlab
