#include <doctest.h>

#include <cmath>
#include <numeric>

#include "dbmlab/dbm.hpp"
#include "dbmlab/gbe.hpp"

using namespace dbmlab;

TEST_CASE("drift: single particle is pure confinement") {
  ParticleState st = state_from_values({4.0}, 2.0);
  RegularizationConfig reg = RegularizationConfig::defaults(1);
  const auto d = drift(st, reg);
  CHECK(d[0] == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("drift: two symmetric particles") {
  ParticleState st = state_from_values({-1.0, 1.0}, 2.0);
  RegularizationConfig reg = RegularizationConfig::defaults(2);
  reg.epsilon = 0.0;
  const auto d = drift(st, reg);
  // 1/(lam_0 - lam_1) - lam_0 / (2 N^{1/3}) = -1/2 + 1/(2 * 2^{1/3})
  const double expect = -0.5 + 1.0 / (2.0 * std::cbrt(2.0));
  CHECK(d[0] == doctest::Approx(expect).epsilon(1e-12));
  CHECK(d[1] == doctest::Approx(-expect).epsilon(1e-12));
}

TEST_CASE("interaction part sums to zero exactly") {
  GbeSample s = sample_gbe(64, 2.0, 5);
  ParticleState st = state_from_values(std::move(s.values), 2.0);
  RegularizationConfig reg = RegularizationConfig::defaults(64);
  const auto d = drift(st, reg);
  double total = 0.0;
  const double conf = 0.5 / std::cbrt(64.0);
  for (std::size_t i = 0; i < d.size(); ++i) total += d[i] + st.lambdas[i] * conf;
  CHECK(std::fabs(total) < 1e-9);
}

TEST_CASE("step determinism") {
  GbeSample s = sample_gbe(16, 2.0, 9);
  ParticleState st = state_from_values(std::move(s.values), 2.0);
  RegularizationConfig reg = RegularizationConfig::defaults(16, 1e-3);
  NoiseSource noise(42, 1e-3);
  const auto a = step(st, 1e-3, noise, reg);
  const auto b = step(st, 1e-3, noise, reg);
  for (std::size_t i = 0; i < a.lambdas.size(); ++i) CHECK(a.lambdas[i] == b.lambdas[i]);
  CHECK(a.t == doctest::Approx(1e-3));
}

TEST_CASE("N=1 matches exact Ornstein-Uhlenbeck moments") {
  // rate 1/2, stationary variance 2/beta; from lambda(0)=4 at t=1:
  // mean 4 e^{-1/2}, variance (2/beta)(1 - e^{-1})
  const double beta = 2.0;
  const int paths = 10000;
  const double dt = 5e-3;
  RegularizationConfig reg = RegularizationConfig::defaults(1, dt);
  double s = 0, s2 = 0;
  for (int p = 0; p < paths; ++p) {
    ParticleState st = state_from_values({4.0}, beta);
    NoiseSource noise(1000 + p, dt);
    const auto traj = simulate(st, 1.0, noise, reg, 1 << 20);
    const double v = traj.snapshots.back()[0];
    s += v;
    s2 += v * v;
  }
  const double mean = s / paths;
  const double var = s2 / paths - mean * mean;
  const double exact_mean = 4.0 * std::exp(-0.5);
  const double exact_var = (2.0 / beta) * (1.0 - std::exp(-1.0));
  const double se_mean = std::sqrt(exact_var / paths);
  const double se_var = exact_var * std::sqrt(2.0 / paths);
  CHECK(std::fabs(mean - exact_mean) < 3.0 * se_mean + 4.0 * dt);
  CHECK(std::fabs(var - exact_var) < 3.0 * se_var + 4.0 * dt);
}

TEST_CASE("pure drift grows a small symmetric gap monotonically") {
  // equilibrium gap for two particles is 2 * 2^{1/6}; start well below it
  std::vector<double> x = {-0.5, 0.5};
  RegularizationConfig reg = RegularizationConfig::defaults(2, 1e-3);
  reg.epsilon = 0.0;
  double gap = 1.0;
  for (int k = 0; k < 200; ++k) {
    ParticleState st = state_from_values({x[0], x[1]}, 2.0);
    const auto d = drift(st, reg);
    x[0] += 1e-3 * d[0];
    x[1] += 1e-3 * d[1];
    const double g = x[1] - x[0];
    CHECK(g > gap);
    gap = g;
  }
  CHECK(gap < 2.0 * std::pow(2.0, 1.0 / 6.0));
}

TEST_CASE("grid refinement with a fixed Brownian path converges") {
  // same noise source, integration at dt = dt_noise / 2^L
  const double dt_noise = 1e-2;
  NoiseSource noise(77, dt_noise);
  GbeSample s = sample_gbe(8, 2.0, 3);
  const ParticleState st0 = state_from_values(std::move(s.values), 2.0);

  auto run = [&](int L) {
    RegularizationConfig reg = RegularizationConfig::defaults(8, dt_noise / (1 << L));
    return simulate(st0, 0.1, noise, reg, 1 << 20).snapshots.back();
  };
  const auto ref = run(4);
  auto err = [&](const std::vector<double>& v) {
    double e = 0;
    for (std::size_t i = 0; i < v.size(); ++i) e = std::max(e, std::fabs(v[i] - ref[i]));
    return e;
  };
  const double e0 = err(run(0)), e1 = err(run(1)), e2 = err(run(2));
  CHECK(e1 < e0);
  CHECK(e2 < e1);
  CHECK(e2 < 0.6 * e0);  // at least strong order ~1/2 on this smooth regime
}

TEST_CASE("simulate with T=0 returns only the initial snapshot") {
  GbeSample s = sample_gbe(4, 2.0, 1);
  ParticleState st = state_from_values(std::move(s.values), 2.0);
  RegularizationConfig reg = RegularizationConfig::defaults(4, 1e-3);
  NoiseSource noise(5, 1e-3);
  const auto traj = simulate(st, 0.0, noise, reg);
  CHECK(traj.size() == 1);
  CHECK(traj.times[0] == 0.0);
}

TEST_CASE("sum of particles decays like the exact OU mean") {
  const std::int64_t N = 32;
  const double beta = 2.0, T = 0.5, dt = 1e-2, shift = 5.0;
  RegularizationConfig reg = RegularizationConfig::defaults(N, dt);
  const double theta = 0.5 / std::cbrt(static_cast<double>(N));
  const int reps = 200;
  double acc = 0, acc0 = 0;
  for (int r = 0; r < reps; ++r) {
    GbeSample s = sample_gbe(N, beta, 4000 + r);
    for (auto& v : s.values) v += shift;
    ParticleState st = state_from_values(std::move(s.values), beta);
    NoiseSource noise(9000 + r, dt);
    const auto traj = simulate(st, T, noise, reg, 1 << 20);
    acc0 += std::accumulate(st.lambdas.begin(), st.lambdas.end(), 0.0);
    acc += std::accumulate(traj.snapshots.back().begin(), traj.snapshots.back().end(), 0.0);
  }
  const double expect = std::exp(-theta * T) * (acc0 / reps);
  // stationary sd of the particle sum is ~N^{2/3} sqrt(2/beta); SE over reps
  const double se = std::pow(static_cast<double>(N), 2.0 / 3.0) / std::sqrt(1.0 * reps);
  CHECK(std::fabs(acc / reps - expect) < 4.0 * se);
}

TEST_CASE("ordering is preserved and crossings get resolved under violent stepping") {
  GbeSample s = sample_gbe(8, 1.0, 11);
  ParticleState st = state_from_values(std::move(s.values), 1.0);
  RegularizationConfig reg;
  reg.dt_base = 0.5;
  reg.dt_min = 0.5 / 4.0;
  reg.epsilon = 1e-8;
  NoiseSource noise(13, 0.5);
  const auto traj = simulate(st, 5.0, noise, reg, 1);
  for (const auto& snap : traj.snapshots)
    for (std::size_t i = 1; i < snap.size(); ++i) CHECK(snap[i] >= snap[i - 1]);
  CHECK(traj.stats.rejections + traj.stats.forced_sorts > 0);
}

TEST_CASE("invalid arguments are rejected") {
  GbeSample s = sample_gbe(4, 2.0, 1);
  ParticleState st = state_from_values(std::move(s.values), 2.0);
  RegularizationConfig reg = RegularizationConfig::defaults(4, 1e-3);
  NoiseSource noise(5, 1e-3);
  CHECK_THROWS_AS(step(st, 0.0, noise, reg), std::invalid_argument);
  CHECK_THROWS_AS(step(st, 3e-3, noise, reg), std::invalid_argument);  // not dyadic
  CHECK_THROWS_AS(simulate(st, 0.00037, noise, reg), std::invalid_argument);
  CHECK_THROWS_AS(state_from_values({1.0, 1.0}, 2.0), std::invalid_argument);
}
