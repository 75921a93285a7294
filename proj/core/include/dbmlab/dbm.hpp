#pragma once

#include <cstdint>
#include <vector>

#include "dbmlab/noise.hpp"
#include "dbmlab/stepper.hpp"

namespace dbmlab {

// Ordered particle configuration of the N-particle system, in the scaling
// where the equilibrium edges sit near +-2 N^{2/3}.
struct ParticleState {
  std::vector<double> lambdas;  // strictly increasing
  double t = 0.0;
  std::int64_t N = 0;
  double beta = 0.0;

  // Edge-shifted view x_i = lambda_i + 2 N^{2/3}.
  double edge_coord(std::size_t i) const;
};

ParticleState state_from_values(std::vector<double> lambdas, double beta, double t = 0.0);

struct RegularizationConfig {
  double epsilon;   // |eps_jk|; sign is +eps for j > k, -eps for j < k
  double dt_base;   // base integration step
  double dt_min;    // rejection-refinement floor

  // eps = 1e-8 N^{-1/3} sits far below typical edge gaps ~ i^{-1/3}; the
  // N^{-10^6} of the source analysis underflows and is a proof device only.
  static RegularizationConfig defaults(std::int64_t N, double dt_base = 1e-4);
};

// Trajectory snapshots on the decimated base grid.  Only the lowest
// keep_lowest particles are stored (edge experiments rarely need more).
struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> snapshots;
  std::int64_t N = 0;
  double beta = 0.0;
  std::size_t keep_lowest = 0;
  StepStats stats;

  std::size_t size() const { return times.size(); }
};

// drift_i = sum_{j != i} 1/(lambda_i - lambda_j + eps_ij) - lambda_i / (2 N^{1/3})
std::vector<double> drift(const ParticleState& state, const RegularizationConfig& reg);

// One Euler-Maruyama base step with rejection-and-halve bridge refinement.
// dt must be noise.dt_base / 2^L and state.t must lie on that grid.
ParticleState step(const ParticleState& state, double dt, const NoiseSource& noise,
                   const RegularizationConfig& reg, StepStats* stats = nullptr);

Trajectory simulate(const ParticleState& initial, double T, const NoiseSource& noise,
                    const RegularizationConfig& reg, std::int64_t decimation = 1,
                    std::size_t keep_lowest = 0 /* 0 = all */);

}  // namespace dbmlab
