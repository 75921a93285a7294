#include "dbmlab/tridiag.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dbmlab {
namespace tridiag {

std::vector<double> full_spectrum(const std::vector<double>& diag,
                                  const std::vector<double>& offdiag) {
  const auto n = static_cast<Eigen::Index>(diag.size());
  if (offdiag.size() + 1 != diag.size())
    throw std::invalid_argument("tridiag: offdiag size must be n-1");
  Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(diag.data(), n);
  Eigen::VectorXd e = n > 1 ? Eigen::Map<const Eigen::VectorXd>(offdiag.data(), n - 1)
                            : Eigen::VectorXd();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("tridiag: eigensolver did not converge");
  std::vector<double> ev(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  std::sort(ev.begin(), ev.end());
  return ev;
}

std::int64_t count_below(const std::vector<double>& diag,
                         const std::vector<double>& offdiag, double x) {
  const std::size_t n = diag.size();
  const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  std::int64_t count = 0;
  double d = diag[0] - x;
  if (d < 0) ++count;
  for (std::size_t k = 1; k < n; ++k) {
    double denom = d;
    if (std::fabs(denom) < tiny) denom = (denom < 0 ? -tiny : tiny);
    d = diag[k] - x - offdiag[k - 1] * offdiag[k - 1] / denom;
    if (d < 0) ++count;
  }
  return count;
}

std::vector<double> lowest_eigenvalues(const std::vector<double>& diag,
                                       const std::vector<double>& offdiag,
                                       std::size_t m, double tol) {
  const std::size_t n = diag.size();
  if (m > n) throw std::invalid_argument("lowest_eigenvalues: m > n");
  // Gershgorin bracket
  double lo = diag[0], hi = diag[0];
  for (std::size_t k = 0; k < n; ++k) {
    double r = 0.0;
    if (k > 0) r += std::fabs(offdiag[k - 1]);
    if (k + 1 < n) r += std::fabs(offdiag[k]);
    lo = std::min(lo, diag[k] - r);
    hi = std::max(hi, diag[k] + r);
  }
  std::vector<double> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    double a = (j == 0) ? lo : out[j - 1] - tol;
    double b = hi;
    while (b - a > tol * std::max(1.0, std::max(std::fabs(a), std::fabs(b)))) {
      const double mid = 0.5 * (a + b);
      if (count_below(diag, offdiag, mid) >= static_cast<std::int64_t>(j + 1))
        b = mid;
      else
        a = mid;
    }
    out[j] = 0.5 * (a + b);
  }
  return out;
}

}  // namespace tridiag
}  // namespace dbmlab
