#include "dbmlab/dbm.hpp"

#include <cmath>
#include <stdexcept>

namespace dbmlab {

double ParticleState::edge_coord(std::size_t i) const {
  return lambdas[i] + 2.0 * std::pow(static_cast<double>(N), 2.0 / 3.0);
}

ParticleState state_from_values(std::vector<double> lambdas, double beta, double t) {
  ParticleState s;
  s.N = static_cast<std::int64_t>(lambdas.size());
  s.lambdas = std::move(lambdas);
  s.beta = beta;
  s.t = t;
  for (std::size_t i = 1; i < s.lambdas.size(); ++i)
    if (!(s.lambdas[i] > s.lambdas[i - 1]))
      throw std::invalid_argument("ParticleState: values must be strictly increasing");
  return s;
}

RegularizationConfig RegularizationConfig::defaults(std::int64_t N, double dt_base) {
  RegularizationConfig reg;
  reg.epsilon = 1e-8 * std::pow(static_cast<double>(N), -1.0 / 3.0);
  reg.dt_base = dt_base;
  reg.dt_min = dt_base / 1024.0;
  return reg;
}

namespace {

// Pairwise interaction + confinement.  The pair force 1/(gap + eps) is added
// antisymmetrically so the interaction cancels exactly in the sum.
struct DbmDrift {
  double eps;
  double confinement;  // 1/(2 N^{1/3})
  void operator()(const std::vector<double>& x, std::vector<double>& out) const {
    const std::size_t n = x.size();
    out.assign(n, 0.0);
    for (std::size_t j = 1; j < n; ++j) {
      const double xj = x[j];
      double acc = 0.0;
      for (std::size_t i = 0; i < j; ++i) {
        const double f = 1.0 / (xj - x[i] + eps);
        acc += f;
        out[i] -= f;
      }
      out[j] += acc;
    }
    for (std::size_t i = 0; i < n; ++i) out[i] -= x[i] * confinement;
  }
};

}  // namespace

std::vector<double> drift(const ParticleState& state, const RegularizationConfig& reg) {
  DbmDrift d{reg.epsilon, 0.5 * std::pow(static_cast<double>(state.N), -1.0 / 3.0)};
  std::vector<double> out;
  d(state.lambdas, out);
  return out;
}

ParticleState step(const ParticleState& state, double dt, const NoiseSource& noise,
                   const RegularizationConfig& reg, StepStats* stats) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
  const int level = detail::grid_level(dt, noise);
  const std::uint64_t g = detail::grid_index(state.t, dt);
  DbmDrift d{reg.epsilon, 0.5 * std::pow(static_cast<double>(state.N), -1.0 / 3.0)};
  ParticleState next = state;
  StepStats local;
  std::vector<double> dB, drift_buf, trial_buf;
  detail::grid_step(next.lambdas, d, dt, reg.dt_min, std::sqrt(2.0 / state.beta), noise, g,
                    level, local, dB, drift_buf, trial_buf);
  next.t = state.t + dt;
  if (stats) *stats += local;
  return next;
}

Trajectory simulate(const ParticleState& initial, double T, const NoiseSource& noise,
                    const RegularizationConfig& reg, std::int64_t decimation,
                    std::size_t keep_lowest) {
  if (!(T >= 0.0)) throw std::invalid_argument("simulate: T >= 0");
  if (decimation < 1) throw std::invalid_argument("simulate: decimation >= 1");
  const double dt = reg.dt_base;
  const auto n_steps = static_cast<std::int64_t>(std::llround(T / dt));
  if (std::fabs(static_cast<double>(n_steps) * dt - T) > 1e-9 * std::max(1.0, T))
    throw std::invalid_argument("simulate: T must be a multiple of dt_base");

  const int level = detail::grid_level(dt, noise);
  std::uint64_t g = detail::grid_index(initial.t, dt);
  const std::size_t keep =
      keep_lowest == 0 ? initial.lambdas.size()
                       : std::min(keep_lowest, initial.lambdas.size());

  Trajectory traj;
  traj.N = initial.N;
  traj.beta = initial.beta;
  traj.keep_lowest = keep;
  auto snap = [&](double t, const std::vector<double>& x) {
    traj.times.push_back(t);
    traj.snapshots.emplace_back(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(keep));
  };
  snap(initial.t, initial.lambdas);

  DbmDrift d{reg.epsilon, 0.5 * std::pow(static_cast<double>(initial.N), -1.0 / 3.0)};
  std::vector<double> x = initial.lambdas;
  std::vector<double> dB, drift_buf, trial_buf;
  const double amp = std::sqrt(2.0 / initial.beta);
  for (std::int64_t k = 0; k < n_steps; ++k) {
    detail::grid_step(x, d, dt, reg.dt_min, amp, noise, g, level, traj.stats, dB, drift_buf,
                      trial_buf);
    ++g;
    if ((k + 1) % decimation == 0 || k + 1 == n_steps)
      snap(initial.t + static_cast<double>(k + 1) * dt, x);
  }
  return traj;
}

}  // namespace dbmlab
