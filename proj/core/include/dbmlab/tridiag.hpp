#pragma once

#include <cstdint>
#include <vector>

namespace dbmlab {

// Symmetric tridiagonal eigenvalue helpers.
//
// full_spectrum wraps Eigen's QL-with-implicit-shifts solver; lowest_eigenvalues
// is a Sturm-count bisection that extracts only the m smallest eigenvalues,
// which is what the high-replica edge experiments need (O(m N log(1/tol))
// instead of O(N^2) per sample).
namespace tridiag {

std::vector<double> full_spectrum(const std::vector<double>& diag,
                                  const std::vector<double>& offdiag);

// Number of eigenvalues strictly below x (LDL^T sign count, safeguarded).
std::int64_t count_below(const std::vector<double>& diag,
                         const std::vector<double>& offdiag, double x);

// The m smallest eigenvalues, ascending, to absolute tolerance tol.
std::vector<double> lowest_eigenvalues(const std::vector<double>& diag,
                                       const std::vector<double>& offdiag,
                                       std::size_t m, double tol = 1e-12);

}  // namespace tridiag
}  // namespace dbmlab
