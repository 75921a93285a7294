#include "dbmlab/gbe.hpp"

#include <cmath>
#include <stdexcept>

#include "dbmlab/rng.hpp"
#include "dbmlab/tridiag.hpp"

namespace dbmlab {

namespace detail {

void gbe_tridiagonal(std::int64_t N, double beta, std::uint64_t seed,
                     std::vector<double>& diag, std::vector<double>& offdiag) {
  if (N < 1) throw std::invalid_argument("sample_gbe: N >= 1");
  if (!(beta >= 1.0)) throw std::invalid_argument("sample_gbe: beta >= 1 required");
  diag.resize(static_cast<std::size_t>(N));
  offdiag.resize(static_cast<std::size_t>(N - 1));
  const double scale = 1.0 / std::sqrt(static_cast<double>(N) * beta);
  for (std::int64_t k = 0; k < N; ++k) {
    diag[static_cast<std::size_t>(k)] =
        std::sqrt(2.0) *
        counter_gaussian(seed, RngDomain::gbe_sampler, static_cast<std::uint64_t>(k), 0) * scale;
  }
  for (std::int64_t k = 1; k < N; ++k) {
    CounterStream stream(seed, RngDomain::gbe_sampler, static_cast<std::uint64_t>(k), 1);
    offdiag[static_cast<std::size_t>(k - 1)] =
        stream.chi(beta * static_cast<double>(N - k)) * scale;
  }
}

}  // namespace detail

GbeSample sample_gbe(std::int64_t N, double beta, std::uint64_t seed) {
  std::vector<double> diag, offdiag;
  detail::gbe_tridiagonal(N, beta, seed, diag, offdiag);
  GbeSample s;
  s.N = N;
  s.beta = beta;
  s.seed = seed;
  s.values = tridiag::full_spectrum(diag, offdiag);
  const double n23 = std::pow(static_cast<double>(N), 2.0 / 3.0);
  for (double& v : s.values) v *= n23;
  for (std::size_t i = 1; i < s.values.size(); ++i) {
    if (!(s.values[i] > s.values[i - 1]))
      throw std::runtime_error("sample_gbe: non-increasing eigenvalues (numerical failure)");
  }
  return s;
}

std::vector<double> sample_gbe_lowest(std::int64_t N, double beta, std::uint64_t seed,
                                      std::size_t m) {
  std::vector<double> diag, offdiag;
  detail::gbe_tridiagonal(N, beta, seed, diag, offdiag);
  auto vals = tridiag::lowest_eigenvalues(diag, offdiag, m, 1e-13);
  const double n23 = std::pow(static_cast<double>(N), 2.0 / 3.0);
  for (double& v : vals) v *= n23;
  return vals;
}

double edge_statistic(const GbeSample& sample) {
  const double n23 = std::pow(static_cast<double>(sample.N), 2.0 / 3.0);
  return -2.0 * n23 - sample.values.front();
}

}  // namespace dbmlab
