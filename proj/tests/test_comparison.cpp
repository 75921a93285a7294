#include <doctest.h>

#include <cmath>

#include "dbmlab/comparison.hpp"
#include "dbmlab/rng.hpp"

using namespace dbmlab;
using namespace dbmlab::comparison;

namespace {

ComparisonOperator quantile_operator(std::int64_t K, double N_eff, double eps_ell = 0.1) {
  SemicircleModel model;
  const auto n_int = static_cast<std::int64_t>(N_eff);
  std::vector<double> x(static_cast<std::size_t>(K));
  for (std::int64_t i = 1; i <= K; ++i)
    x[static_cast<std::size_t>(i - 1)] = model.edge_quantile(i, n_int);
  const double gc = model.edge_quantile(K + 2, n_int);
  RegularizationConfig reg = RegularizationConfig::defaults(n_int);
  return build_coefficients(x, x, gc, reg, N_eff, eps_ell, model);
}

Eigen::VectorXd random_vec(std::int64_t K, std::uint64_t tag, bool nonneg) {
  Eigen::VectorXd v(K);
  for (std::int64_t i = 0; i < K; ++i) {
    const double z = counter_gaussian(501, RngDomain::synthetic, tag, i);
    v(i) = nonneg ? std::fabs(z) : z;
  }
  return v;
}

}  // namespace

TEST_CASE("coefficients: symmetry, positivity, squares on identical states") {
  const auto op = quantile_operator(32, 1e6);
  CHECK(op.B.rows() == 32);
  for (int i = 0; i < 32; ++i) {
    CHECK(op.B(i, i) == 0.0);
    CHECK(op.W(i) > 0.0);
    for (int j = 0; j < 32; ++j) {
      CHECK(op.B(i, j) == op.B(j, i));
      if (i != j) CHECK(op.B(i, j) > 0.0);
    }
  }
  // x = y: B_ij = (gap + eps)^{-2}
  SemicircleModel model;
  const double g1 = model.edge_quantile(1, 1000000), g2 = model.edge_quantile(2, 1000000);
  RegularizationConfig reg = RegularizationConfig::defaults(1000000);
  CHECK(op.B(1, 0) == doctest::Approx(1.0 / ((g2 - g1 + reg.epsilon) * (g2 - g1 + reg.epsilon)))
                          .epsilon(1e-12));
}

TEST_CASE("W matches the killing-rate shape up to a bounded factor") {
  const std::int64_t K = 64;
  const auto op = quantile_operator(K, 1e6);
  double rmin = 1e300, rmax = 0.0;
  for (std::int64_t i = 1; i <= K; ++i) {
    const double shape = std::cbrt(static_cast<double>(K)) /
                         (std::pow(K + 1.0, 2.0 / 3.0) - std::pow(i, 2.0 / 3.0));
    const double r = op.W(i - 1) / shape;
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  // a single b makes W within a factor 2 of b * shape when the spread is <= 4
  CHECK(rmax / rmin <= 4.0);
}

TEST_CASE("window violation on states at the cutoff") {
  SemicircleModel model;
  std::vector<double> x = {1.0, 2.0, 50.0};
  RegularizationConfig reg = RegularizationConfig::defaults(1000000);
  CHECK_THROWS_AS(build_coefficients(x, x, 10.0, reg, 1e6, 0.1, model), window_violation);
}

TEST_CASE("conservation: with W = 0 constants are invariant") {
  auto op = quantile_operator(24, 1e6);
  op.W.setZero();
  OperatorPath path;
  path.times = {0.0};
  path.ops.push_back(op);
  const Eigen::VectorXd w0 = Eigen::VectorXd::Constant(24, 3.25);
  const Eigen::VectorXd w1 = evolve_semigroup(path, w0, 0.0, 0.3);
  for (int i = 0; i < 24; ++i) CHECK(w1(i) == doctest::Approx(3.25).epsilon(1e-12));
}

TEST_CASE("positivity and lp contraction of the evolved semigroup") {
  const auto op = quantile_operator(32, 1e6);
  OperatorPath path;
  path.times = {0.0};
  path.ops.push_back(op);
  for (std::uint64_t inst = 0; inst < 100; ++inst) {
    const Eigen::VectorXd w0 = random_vec(32, 600 + inst, true);
    const Eigen::VectorXd w1 = evolve_semigroup(path, w0, 0.0, 0.2);
    CHECK(w1.minCoeff() >= -1e-10);
    CHECK(w1.cwiseAbs().sum() <= w0.cwiseAbs().sum() + 1e-10);
    CHECK(w1.cwiseAbs().maxCoeff() <= w0.cwiseAbs().maxCoeff() + 1e-10);
    // signed vectors contract too
    const Eigen::VectorXd v0 = random_vec(32, 700 + inst, false);
    const Eigen::VectorXd v1 = evolve_semigroup(path, v0, 0.0, 0.2);
    CHECK(v1.cwiseAbs().sum() <= v0.cwiseAbs().sum() + 1e-10);
    CHECK(v1.squaredNorm() <= v0.squaredNorm() + 1e-10);
  }
}

TEST_CASE("short-range plus long-range recomposes the full operator") {
  const auto op = quantile_operator(48, 1e6);
  for (std::uint64_t inst = 0; inst < 5; ++inst) {
    const Eigen::VectorXd w = random_vec(48, 800 + inst, false);
    const Eigen::VectorXd full = op.apply_full(w);
    const Eigen::VectorXd sum = op.apply_short(w) + op.apply_long(w);
    for (int i = 0; i < 48; ++i) CHECK(full(i) == doctest::Approx(sum(i)).epsilon(1e-10));
  }
}

TEST_CASE("long-range row sums obey the C K^{-eps_ell} bound") {
  // The raw max row sum is nearly flat over one decade of K (the 1/ell - 1/K
  // cancellation offsets the K^{-0.1} decay at this scale); what holds is the
  // uniform bound.
  for (std::int64_t K : {64, 256, 1024}) {
    const auto op = quantile_operator(K, 1e6);
    const double bound = 0.25 * std::pow(static_cast<double>(K), -0.1);
    CHECK(op.long_range_row_sum() < bound);
    CHECK(op.long_range_row_sum() > 0.0);
    // independent recomputation through apply_long on the constant vector:
    // (R 1)_i = 0, so check entry sums directly instead
    double direct = 0.0;
    for (std::int64_t j = 0; j < K; ++j)
      if (std::llabs((K - 1) - j) > op.ell) direct += op.B(K - 1, j);
    CHECK(direct <= op.long_range_row_sum() + 1e-15);
  }
}

TEST_CASE("finite speed: identity at t = s, decay away from the source") {
  const std::int64_t K = 128;
  const auto op = quantile_operator(K, 1e6);
  OperatorPath path;
  path.times = {0.0};
  path.ops.push_back(op);
  const std::int64_t b = K / 2;
  CHECK(finite_speed_check(path, b, b, 0.1, 0.1) == doctest::Approx(1.0));
  CHECK(finite_speed_check(path, b - 7, b, 0.1, 0.1) == 0.0);

  const double near = finite_speed_check(path, b + 2, b, 0.0, 0.01);
  const double mid = finite_speed_check(path, b + 20, b, 0.0, 0.01);
  const double far = finite_speed_check(path, b + 60, b, 0.0, 0.01);
  CHECK(near > mid);
  CHECK(mid > far);
  CHECK(far < 1e-8);
  CHECK(near > 0.0);

  // removing the short-range restriction fattens the tail
  auto wide = op;
  wide.ell = K;
  OperatorPath pw;
  pw.times = {0.0};
  pw.ops.push_back(wide);
  const double far_wide = finite_speed_check(pw, b + 60, b, 0.0, 0.01);
  CHECK(far_wide > far);
}

TEST_CASE("energy decay: zero stays zero, doubling W speeds decay") {
  const std::int64_t K = 64;
  const auto op = quantile_operator(K, 1e6);
  OperatorPath path;
  path.times = {0.0};
  path.ops.push_back(op);

  std::vector<double> grid;
  for (int g = 0; g <= 16; ++g) grid.push_back(0.05 * std::pow(400.0, g / 16.0));

  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(K);
  const auto flat = energy_decay_check(path, zero, grid, 1.0);
  for (double v : flat.sup_norm) CHECK(v == 0.0);

  Eigen::VectorXd v0(K);
  for (std::int64_t i = 0; i < K; ++i)
    v0(i) = counter_gaussian(900, RngDomain::synthetic, 1, i) *
            std::pow(static_cast<double>(i + 1), -1.0 / 3.0);
  const auto base = energy_decay_check(path, v0, grid, 1.0);
  auto harder = op;
  harder.W *= 2.0;
  OperatorPath ph;
  ph.times = {0.0};
  ph.ops.push_back(harder);
  const auto fast = energy_decay_check(ph, v0, grid, 1.0);
  CHECK(fast.fitted_slope < base.fitted_slope);
  CHECK(base.fitted_slope < 0.0);
}
