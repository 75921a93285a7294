#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "dbmlab/dbm.hpp"
#include "dbmlab/noise.hpp"

namespace dbmlab {

enum class CoupledMode { full, window };

struct CoupledRunOptions {
  double T_burn = 4.0;       // shared-noise relaxation before the window
  double dt_base = 1e-4;
  std::int64_t decimation = 10;
  std::size_t keep = 16;     // trajectory columns kept (>= i_max probed later)
  double omega = 0.5;        // window mode: K = round(N^omega)
  double delta_c = 0.5;      // window mode: cutoff buffer exponent
  std::uint64_t init_seed_tag = 0;  // vary to re-draw initial data only
};

// Edge trajectories (x coordinates) of one coupled family.  Systems that
// aborted on a window violation are listed in `violations` and carry no
// trajectory.
struct CoupledRunResult {
  std::map<std::int64_t, Trajectory> trajectories;
  std::vector<std::int64_t> violations;
  double T_burn = 0.0;
  double T = 0.0;
};

// Runs every N in N_list with the same NoiseSource (one seed; increments per
// particle index are bit-identical across N) from independent equilibrium
// samples, burn-in T_burn, then a measurement window of length T.  Snapshots
// share one grid so trajectories are directly comparable.
CoupledRunResult coupled_run(const std::vector<std::int64_t>& N_list, double beta, double T,
                             std::uint64_t seed, CoupledMode mode,
                             const CoupledRunOptions& opts = {});

// max over snapshot times in [t_lo, t_hi] and particles i < i_max of
// |x_i^A(t) - x_i^B(t)|.  Grids must agree.
double sup_difference(const Trajectory& a, const Trajectory& b, std::size_t i_max,
                      double t_lo, double t_hi);

struct CouplingReport {
  struct PairEntry {
    std::int64_t N, M;
    std::uint64_t seed;
    std::optional<double> sup_diff;  // empty when a side aborted
  };
  std::vector<PairEntry> entries;
  std::size_t i_max = 0;
  double window_lo = 0.0, window_hi = 0.0;
};

}  // namespace dbmlab
