#include "dbmlab/sao.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dbmlab/rng.hpp"
#include "dbmlab/tridiag.hpp"

namespace dbmlab {

void SaoConfig::validate() const {
  if (!(L >= 10.0)) throw std::invalid_argument("SaoConfig: L >= 10 (Dirichlet truncation)");
  if (!(h > 0.0 && h <= 0.01 * L)) throw std::invalid_argument("SaoConfig: h <= 0.01 L");
  if (!(beta >= 1.0))  // inf compares true
    throw std::invalid_argument("SaoConfig: beta >= 1");
}

double sample_tw(const SaoConfig& config, std::uint64_t seed) {
  config.validate();
  const auto n = static_cast<std::size_t>(std::llround(config.L / config.h)) - 1;
  std::vector<double> diag(n), off(n - 1, -1.0 / (config.h * config.h));
  const double inv_h2 = 1.0 / (config.h * config.h);
  const bool noisy = std::isfinite(config.beta);
  const double noise_amp = noisy ? 2.0 / std::sqrt(config.beta * config.h) : 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double x = config.h * static_cast<double>(j + 1);
    diag[j] = 2.0 * inv_h2 + x;
    if (noisy)
      diag[j] += noise_amp * counter_gaussian(seed, RngDomain::sao_noise, j);
  }
  const auto ev = tridiag::lowest_eigenvalues(diag, off, 1, 1e-12);
  return -ev[0];
}

}  // namespace dbmlab
