#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dbmlab/rng.hpp"

namespace dbmlab {

// Shared Brownian motions {B_i}.  Increments are addressed by
// (particle index i, base interval index k) and do not depend on N, so
// systems of any size driven by the same NoiseSource see identical paths.
// Dyadic refinement of a base increment is a pure function of
// (seed, i, k, level, position), consistent with the Brownian bridge, which
// keeps step-rejection refinement reproducible and N-independent.
class NoiseSource {
 public:
  NoiseSource(std::uint64_t seed, double dt_base) : seed_(seed), dt_base_(dt_base) {
    if (!(dt_base > 0.0)) throw std::invalid_argument("NoiseSource: dt_base must be > 0");
  }

  std::uint64_t seed() const { return seed_; }
  double dt_base() const { return dt_base_; }

  // Increment of B_i over the base interval [k*dt_base, (k+1)*dt_base).
  double increment(std::uint64_t i, std::uint64_t k) const {
    return std::sqrt(dt_base_) * counter_gaussian(seed_, RngDomain::noise_base, i, k);
  }

  // Increment over the dyadic subinterval (level, pos) of base interval k,
  // i.e. [k*dt + pos*dt/2^level, k*dt + (pos+1)*dt/2^level).
  // level 0, pos 0 is the base increment itself.
  double increment_at(std::uint64_t i, std::uint64_t k, int level, std::uint64_t pos) const {
    if (level == 0) return increment(i, k);
    const double parent = increment_at(i, k, level - 1, pos >> 1);
    const double half = bridge_left(parent, i, k, level, pos >> 1);
    return (pos & 1) ? parent - half : half;
  }

  // Splits a parent increment (at level-1, position parent_pos) in two.
  // The midpoint displacement is keyed by the child level and even-child
  // position so it is unique per split.
  double bridge_left(double parent, std::uint64_t i, std::uint64_t k, int child_level,
                     std::uint64_t parent_pos) const {
    const double h_parent = dt_base_ / static_cast<double>(1ull << (child_level - 1));
    const double z = counter_gaussian(seed_, RngDomain::noise_bridge, i, k,
                                      static_cast<std::uint64_t>(child_level), 2 * parent_pos);
    return 0.5 * parent + 0.5 * std::sqrt(h_parent) * z;
  }

  // B_i at base grid times j*dt_base for j = 0..n (B_i(0) = 0).
  std::vector<double> path(std::uint64_t i, std::uint64_t n) const {
    std::vector<double> b(n + 1, 0.0);
    for (std::uint64_t k = 0; k < n; ++k) b[k + 1] = b[k] + increment(i, k);
    return b;
  }

  // Increment of B_i over [t0, t1] for endpoints on a dyadic refinement of
  // the base grid (t = g * dt_base / 2^level for integer g).
  double increment_between(std::uint64_t i, double t0, double t1) const {
    if (!(t1 >= t0)) throw std::invalid_argument("increment_between: t1 < t0");
    int level = 0;
    std::int64_t g0 = 0, g1 = 0;
    for (;; ++level) {
      if (level > 40) throw std::invalid_argument("increment_between: times not dyadic");
      const double h = dt_base_ / static_cast<double>(1ull << level);
      g0 = std::llround(t0 / h);
      g1 = std::llround(t1 / h);
      const double tol = 1e-9 * dt_base_;
      if (std::fabs(t0 - g0 * h) < tol && std::fabs(t1 - g1 * h) < tol) break;
    }
    double acc = 0.0;
    for (std::int64_t g = g0; g < g1; ++g) {
      const auto gu = static_cast<std::uint64_t>(g);
      acc += increment_at(i, gu >> level, level, gu & ((1ull << level) - 1ull));
    }
    return acc;
  }

 private:
  std::uint64_t seed_;
  double dt_base_;
};

}  // namespace dbmlab
