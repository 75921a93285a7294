#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dbmlab {

// A particle reached or passed the cutoff quantile; the experiment that owns
// the replica decides whether to abort or record it.
class window_violation : public std::runtime_error {
 public:
  window_violation(std::size_t index, double value, double gamma_c)
      : std::runtime_error("window violation: particle " + std::to_string(index) +
                           " at " + std::to_string(value) + " >= gamma_c " +
                           std::to_string(gamma_c)),
        index(index), value(value), gamma_c(gamma_c) {}
  std::size_t index;
  double value;
  double gamma_c;
};

struct DriftConstant {
  double oracle;  // quadrature value of the tail compensator per K^{1/3}
  double paper;   // (16/(3 pi^2))^{1/3}
};

// Deterministic spectral-measure computations for the semicircle law:
// density / CDF / quantiles, Stieltjes transform, the edge measure
// nu^{(x)}(u) = N^{1/3} rho_sc(N^{-2/3} u - 2) on [0, 4 N^{2/3}], its
// mean-field tail integrals, and the K^{1/3} drift compensator.
//
// Quantiles come from bisection on a quadrature CDF, not from the closed-form
// asymptotic (the two candidate asymptotic constants disagree; the quadrature
// is authoritative and tests check which candidate it selects).
class SemicircleModel {
 public:
  explicit SemicircleModel(double quad_rel_tol = 1e-8, double root_tol = 1e-10)
      : quad_tol_(quad_rel_tol), root_tol_(root_tol) {}

  static double density(double E);

  // int_{-2}^{E} rho_sc, by Gauss-Legendre panels in sqrt(2+E) coordinates.
  double cdf(double E) const;

  // gamma_i^{(N)}: CDF(gamma) = i/N, 1 <= i <= N.
  double quantile(std::int64_t i, std::int64_t N) const;

  // gamma^{(x)}_i = N^{2/3} (gamma_i^{(N)} + 2).
  double edge_quantile(std::int64_t i, std::int64_t N) const;

  // m_sc(z) for Im z > 0: the root of m^2 + z m + 1 = 0 with Im m > 0.
  static std::complex<double> stieltjes(std::complex<double> z);

  // nu^{(x)} density in edge coordinates u in [0, 4 N^{2/3}].
  static double nu_edge(double u, double N);

  // int_{gamma_c}^{4 N^{2/3}} nu^{(x)}(u) / (a - u) du, for a strictly below
  // gamma_c.  Negative, increasing in a.
  double mean_field_tail(double a, double gamma_c, double N) const;

  // Tail compensator constant of the weak SDE: the quadrature value
  // K^{-1/3} * int_0^{u_K} nu^{(x)}(u)/u du at N = n_ref >> K, alongside the
  // closed form claimed in the source theorem.  The two disagree; both are
  // reported everywhere.
  DriftConstant drift_constant(std::int64_t K, double n_ref = 1e9) const;

  // Quantile table (i, gamma_i, edge_quantile_i) for debugging dumps.
  struct QuantileRow { std::int64_t i; double gamma; double edge; };
  std::vector<QuantileRow> tabulate(std::int64_t N, std::int64_t stride = 1) const;

  double quad_tol() const { return quad_tol_; }
  double root_tol() const { return root_tol_; }

 private:
  double quad_tol_;
  double root_tol_;
};

}  // namespace dbmlab
