#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "dbmlab/dbm.hpp"
#include "dbmlab/noise.hpp"
#include "dbmlab/semicircle.hpp"

namespace dbmlab {

// Top-K window dynamics in edge coordinates: explicit interactions among the
// lowest K particles, the deterministic mean-field tail integral against
// nu^{(x)} above the cutoff quantile gamma_c, and the constant N^{1/3}.
//
// Unlike the source construction (a comparison device evaluated on the full
// process), this window is self-closed: interactions use the window's own
// particles.  The pathwise-accuracy tests quantify the cost of that choice.
class EdgeWindow {
 public:
  enum class TailMode {
    // the integral against nu^{(x)} above gamma_c, verbatim.  As a standalone
    // system this is not stationary near the window top: the buffer quantiles'
    // repulsion and the confinement remainder x/(2 N^{1/3}) are both dropped,
    // biasing the top particle upward by O(K^{1/3}) at desk-scale K.
    mean_field,
    // mean_field plus the two dropped pieces: static pins at the buffer
    // quantiles gamma_{K+1..K+m} and the confinement remainder.  At quantile
    // states the drift balances to ~0.2 across the whole window, so windows
    // survive long runs.  Default for simulations.
    mean_field_balanced,
    // -x/(2 N^{1/3}); K = N testing mode, no cutoff
    exact_confinement,
  };

  static EdgeWindow create(std::int64_t K, std::int64_t N_effective, double beta,
                           const RegularizationConfig& reg, double delta_c = 0.1,
                           const SemicircleModel& model = SemicircleModel(),
                           TailMode mode = TailMode::mean_field_balanced);

  // K = N mode: the tail term is the exact x-coordinate confinement remainder,
  // making the window dynamics identical to the full dynamics in edge
  // coordinates.  Used by the cutoff-vs-full pathwise agreement tests.
  static EdgeWindow exact_confinement(std::int64_t N, double beta,
                                      const RegularizationConfig& reg);

  std::int64_t K() const { return K_; }
  std::int64_t N_effective() const { return N_eff_; }
  double beta() const { return beta_; }
  double gamma_c() const { return gamma_c_; }
  double delta_c() const { return delta_c_; }
  const RegularizationConfig& reg() const { return reg_; }
  TailMode tail_mode() const { return tail_mode_; }
  // true when K exceeds N^{1/10} (outside the regime the analysis assumes)
  bool regime_warning() const { return regime_warning_; }

  // Tail term at x per the window's mode.  The integral part is interpolated
  // (quadrature fallback below the interpolation range); pins and the
  // confinement remainder are evaluated directly.
  double tail(double x) const;

  // Just the integral against nu^{(x)} above gamma_c.
  double mean_field_part(double x) const;

  // Largest interpolation error of tail() against direct quadrature on a
  // probe grid; construction keeps it under ~1e-6.
  double interpolation_error_bound() const { return interp_err_; }

 private:
  std::int64_t K_ = 0;
  std::int64_t N_eff_ = 0;
  double beta_ = 0.0;
  double delta_c_ = 0.0;
  double gamma_c_ = 0.0;
  RegularizationConfig reg_{};
  TailMode tail_mode_ = TailMode::mean_field;
  bool regime_warning_ = false;
  double n13_ = 0.0;

  // Chebyshev coefficients in w = log(gamma_c - x); the log pulls the
  // cutoff singularity to w = -inf so a short expansion is uniformly accurate.
  std::vector<double> cheb_;
  double w_lo_ = 0.0, w_hi_ = 0.0, x_lo_ = 0.0;
  double interp_err_ = 0.0;
  std::vector<double> pins_;  // buffer quantiles gamma^{(x)}_{K+1..K+m}
  SemicircleModel model_;
};

// drift_j = sum_{k != j} 1/(x_j - x_k + eps_jk) + tail(x_j) + N^{1/3}
// Throws window_violation if any particle sits at or above gamma_c.
std::vector<double> cutoff_drift(const std::vector<double>& window_state,
                                 const EdgeWindow& window);

// Same stepping contract as dbm::simulate, with cutoff_drift and noise
// indices 0..K-1 (identical to the indices the full dynamics would use, so
// coupled full-vs-window runs are pathwise comparable).  State is in edge
// coordinates.  Throws window_violation when a particle reaches gamma_c.
Trajectory simulate_window(const std::vector<double>& initial_edge, double t0, double T,
                           const NoiseSource& noise, const EdgeWindow& window,
                           std::int64_t decimation = 1);

}  // namespace dbmlab
