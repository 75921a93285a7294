#pragma once

#include <cstdint>
#include <vector>

namespace dbmlab {

// One equilibrium draw in the dynamics' own scaling: edges near +-2 N^{2/3}so
// the configuration is stationary for the particle SDE.
struct GbeSample {
  std::vector<double> values;  // strictly increasing
  std::int64_t N = 0;
  double beta = 0.0;
  std::uint64_t seed = 0;
};

// Gaussian beta-ensemble sampler via the tridiagonal matrix model: exact for
// every beta >= 1, deterministic per seed, no Markov chain.  The eigenvalues
// of T/sqrt(N beta) (diag sqrt(2)*g_k, offdiag chi_{beta (N-k)}) follow the
// |Delta|^beta exp(-beta N sum x^2/4) density on ~[-2,2]; they are then
// scaled by N^{2/3}.
GbeSample sample_gbe(std::int64_t N, double beta, std::uint64_t seed);

// Only the m lowest particles of the same sample, via Sturm bisection on the
// same matrix.  Fast path for high-replica edge statistics; agrees with
// sample_gbe's lowest entries to solver tolerance.
std::vector<double> sample_gbe_lowest(std::int64_t N, double beta, std::uint64_t seed,
                                      std::size_t m);

// Left-edge fluctuation statistic -2 N^{2/3} - mu_1; Tracy-Widom_beta in the
// large-N limit.
double edge_statistic(const GbeSample& sample);

namespace detail {
// The tridiagonal model in the [-2,2]-support normalization (pre N^{2/3}).
void gbe_tridiagonal(std::int64_t N, double beta, std::uint64_t seed,
                     std::vector<double>& diag, std::vector<double>& offdiag);
}  // namespace detail

}  // namespace dbmlab
