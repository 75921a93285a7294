#pragma once

#include <cstdint>

namespace dbmlab {

// Stochastic Airy operator -d^2/dx^2 + x + (2/sqrt(beta)) * white noise on
// [0, L], Dirichlet ends, central finite differences, cell-averaged noise
// (variance 1/h per cell).  -(smallest eigenvalue) is one Tracy-Widom_beta
// sample; beta = inf turns the noise off and recovers the deterministic Airy
// ground state.
struct SaoConfig {
  double L = 20.0;
  double h = 0.005;
  double beta = 2.0;

  void validate() const;  // L >= 10, h <= 0.01 L; beta >= 1 or inf
};

double sample_tw(const SaoConfig& config, std::uint64_t seed);

}  // namespace dbmlab
