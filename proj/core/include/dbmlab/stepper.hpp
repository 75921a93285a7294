#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dbmlab/noise.hpp"

namespace dbmlab {

struct StepStats {
  std::int64_t rejections = 0;    // ordering-violating trials retried at dt/2
  std::int64_t forced_sorts = 0;  // crossings resolved by sorting at the dt_min floor
  std::int64_t crossings = 0;     // adjacent inversions seen at the floor
  void operator+=(const StepStats& o) {
    rejections += o.rejections;
    forced_sorts += o.forced_sorts;
    crossings += o.crossings;
  }
};

namespace detail {

inline bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

// One Euler-Maruyama step over the dyadic subinterval (level, pos) of base
// noise interval kb.  On an ordering violation the step is retried as two
// half steps with bridge-refined noise, recursing until dt_min; at the floor
// the crossing is resolved by sorting and counted.
//
// Drift must be callable as drift(x, out) filling out with dx/dt.
template <class Drift>
void dyadic_step(std::vector<double>& x, const Drift& drift, double dt, double dt_min,
                 double noise_amp, const NoiseSource& noise, std::uint64_t kb, int level,
                 std::uint64_t pos, std::vector<double>& dB, StepStats& stats,
                 std::vector<double>& drift_buf, std::vector<double>& trial_buf) {
  const std::size_t n = x.size();
  drift(x, drift_buf);
  trial_buf.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    trial_buf[i] = x[i] + drift_buf[i] * dt + noise_amp * dB[i];
  if (strictly_increasing(trial_buf) || n <= 1) {
    x = trial_buf;
    return;
  }
  if (dt <= dt_min * (1.0 + 1e-12)) {
    std::int64_t inv = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (!(trial_buf[i] > trial_buf[i - 1])) ++inv;
    std::sort(trial_buf.begin(), trial_buf.end());
    stats.forced_sorts += 1;
    stats.crossings += inv;
    x = trial_buf;
    return;
  }
  stats.rejections += 1;
  std::vector<double> left(n), right(n);
  for (std::size_t i = 0; i < n; ++i) {
    left[i] = noise.bridge_left(dB[i], static_cast<std::uint64_t>(i), kb, level + 1, pos);
    right[i] = dB[i] - left[i];
  }
  dyadic_step(x, drift, 0.5 * dt, dt_min, noise_amp, noise, kb, level + 1, 2 * pos, left,
              stats, drift_buf, trial_buf);
  dyadic_step(x, drift, 0.5 * dt, dt_min, noise_amp, noise, kb, level + 1, 2 * pos + 1, right,
              stats, drift_buf, trial_buf);
}

// Base-grid step at absolute fine index g, where the integration grid is
// noise.dt_base / 2^base_level.
template <class Drift>
void grid_step(std::vector<double>& x, const Drift& drift, double dt, double dt_min,
               double noise_amp, const NoiseSource& noise, std::uint64_t g, int base_level,
               StepStats& stats, std::vector<double>& dB, std::vector<double>& drift_buf,
               std::vector<double>& trial_buf) {
  const std::uint64_t kb = g >> base_level;
  const std::uint64_t pos = g & ((1ull << base_level) - 1ull);
  dB.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    dB[i] = noise.increment_at(static_cast<std::uint64_t>(i), kb, base_level, pos);
  dyadic_step(x, drift, dt, dt_min, noise_amp, noise, kb, base_level, pos, dB, stats,
              drift_buf, trial_buf);
}

// Integration grid must be a dyadic refinement of the noise base grid.
inline int grid_level(double dt, const NoiseSource& noise) {
  const double ratio = noise.dt_base() / dt;
  const int level = static_cast<int>(std::lround(std::log2(ratio)));
  if (level < 0 || std::fabs(ratio - std::ldexp(1.0, level)) > 1e-9 * ratio)
    throw std::invalid_argument("dt_base must equal noise dt_base / 2^L");
  return level;
}

inline std::uint64_t grid_index(double t, double dt) {
  const auto g = static_cast<std::int64_t>(std::llround(t / dt));
  if (g < 0 || std::fabs(t - static_cast<double>(g) * dt) > 1e-9 * std::max(1.0, std::fabs(t)))
    throw std::invalid_argument("state time is not aligned to the integration grid");
  return static_cast<std::uint64_t>(g);
}

}  // namespace detail
}  // namespace dbmlab
