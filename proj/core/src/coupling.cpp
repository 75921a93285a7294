#include "dbmlab/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dbmlab/cutoff.hpp"
#include "dbmlab/gbe.hpp"
#include "dbmlab/rng.hpp"
#include "dbmlab/semicircle.hpp"

namespace dbmlab {

namespace {

Trajectory to_edge_coords(Trajectory traj) {
  const double shift = 2.0 * std::pow(static_cast<double>(traj.N), 2.0 / 3.0);
  for (auto& snap : traj.snapshots)
    for (double& v : snap) v += shift;
  return traj;
}

}  // namespace

CoupledRunResult coupled_run(const std::vector<std::int64_t>& N_list, double beta, double T,
                             std::uint64_t seed, CoupledMode mode,
                             const CoupledRunOptions& opts) {
  CoupledRunResult result;
  result.T_burn = opts.T_burn;
  result.T = T;
  NoiseSource noise(seed, opts.dt_base);
  SemicircleModel model;
  for (std::int64_t N : N_list) {
    if (result.trajectories.count(N) ||
        std::count(result.violations.begin(), result.violations.end(), N))
      continue;  // duplicate sizes share one trajectory (they would be identical)
    // initial data independent across N: per-N sampler seed
    const std::uint64_t init_seed =
        derive_seed(derive_seed(seed, opts.init_seed_tag), static_cast<std::uint64_t>(N));
    try {
      if (mode == CoupledMode::full) {
        GbeSample init = sample_gbe(N, beta, init_seed);
        RegularizationConfig reg = RegularizationConfig::defaults(N, opts.dt_base);
        ParticleState st = state_from_values(std::move(init.values), beta, 0.0);
        Trajectory traj =
            simulate(st, opts.T_burn + T, noise, reg, opts.decimation, opts.keep);
        result.trajectories.emplace(N, to_edge_coords(std::move(traj)));
      } else {
        const auto K = static_cast<std::int64_t>(
            std::lround(std::pow(static_cast<double>(N), opts.omega)));
        RegularizationConfig reg = RegularizationConfig::defaults(N, opts.dt_base);
        EdgeWindow window = EdgeWindow::create(K, N, beta, reg, opts.delta_c, model);
        auto lowest = sample_gbe_lowest(N, beta, init_seed, static_cast<std::size_t>(K));
        const double shift = 2.0 * std::pow(static_cast<double>(N), 2.0 / 3.0);
        for (double& v : lowest) v += shift;
        Trajectory traj = simulate_window(lowest, 0.0, opts.T_burn + T, noise, window,
                                          opts.decimation);
        result.trajectories.emplace(N, std::move(traj));
      }
    } catch (const window_violation&) {
      result.violations.push_back(N);
    }
  }
  return result;
}

double sup_difference(const Trajectory& a, const Trajectory& b, std::size_t i_max,
                      double t_lo, double t_hi) {
  if (a.size() != b.size()) throw std::invalid_argument("sup_difference: mismatched grids");
  double sup = 0.0;
  bool any = false;
  for (std::size_t s = 0; s < a.size(); ++s) {
    if (std::fabs(a.times[s] - b.times[s]) > 1e-9)
      throw std::invalid_argument("sup_difference: mismatched snapshot times");
    const double t = a.times[s];
    if (t < t_lo - 1e-12 || t > t_hi + 1e-12) continue;
    any = true;
    const std::size_t m = std::min({i_max, a.snapshots[s].size(), b.snapshots[s].size()});
    if (m < i_max) throw std::invalid_argument("sup_difference: i_max exceeds stored columns");
    for (std::size_t i = 0; i < m; ++i)
      sup = std::max(sup, std::fabs(a.snapshots[s][i] - b.snapshots[s][i]));
  }
  if (!any) throw std::invalid_argument("sup_difference: empty time window");
  return sup;
}

}  // namespace dbmlab
