#include "dbmlab/semicircle.hpp"

#include <algorithm>
#include <cmath>

#include "dbmlab/quadrature.hpp"

namespace dbmlab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double SemicircleModel::density(double E) {
  if (!(E > -2.0 && E < 2.0)) return 0.0;
  return std::sqrt(4.0 - E * E) / (2.0 * kPi);
}

double SemicircleModel::cdf(double E) const {
  if (E <= -2.0) return 0.0;
  if (E >= 2.0) return 1.0;
  if (E > 0.0) return 1.0 - cdf(-E);  // density is even
  // substitute x = u^2 - 2: rho dx = (1/pi) u^2 sqrt(4 - u^2) du, smooth on [0, sqrt2]
  const double top = std::sqrt(2.0 + E);
  auto f = [](double u) { return u * u * std::sqrt(4.0 - u * u) / kPi; };
  return quad::adaptive(f, 0.0, top, quad_tol_ * 1e-2, 1e-300);
}

double SemicircleModel::quantile(std::int64_t i, std::int64_t N) const {
  if (N < 1 || i < 1 || i > N) throw std::out_of_range("quantile: need 1 <= i <= N");
  if (2 * i == N) return 0.0;
  if (i == N) return 2.0;
  const double p = static_cast<double>(i) / static_cast<double>(N);
  double lo = -2.0, hi = 2.0;
  while (hi - lo > root_tol_) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double SemicircleModel::edge_quantile(std::int64_t i, std::int64_t N) const {
  // bisect directly on the edge coordinate so the result keeps absolute
  // precision ~root_tol in u even when gamma+2 underflows double spacing at -2
  if (N < 1 || i < 1 || i > N) throw std::out_of_range("edge_quantile: need 1 <= i <= N");
  const double n = static_cast<double>(N);
  const double n23 = std::pow(n, 2.0 / 3.0);
  if (i == N) return 4.0 * n23;
  const double p = static_cast<double>(i) / n;
  // CDF in u-coordinates: F(-2 + u/n23).  Working with u directly keeps full
  // precision where gamma+2 would be absorbed by the -2.
  auto cdf_u = [&](double u) {
    if (u >= 2.0 * n23) return 1.0 - cdf(2.0 - u / n23);
    const double top = std::sqrt(u / n23);
    auto f = [](double v) { return v * v * std::sqrt(4.0 - v * v) / kPi; };
    return top == 0.0 ? 0.0 : quad::adaptive(f, 0.0, top, quad_tol_ * 1e-2, 1e-300);
  };
  double lo = 0.0, hi = 4.0 * n23;
  for (int it = 0; it < 200 && hi - lo > root_tol_ * std::max(1.0, lo); ++it) {
    const double mid = 0.5 * (lo + hi);
    (cdf_u(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::complex<double> SemicircleModel::stieltjes(std::complex<double> z) {
  if (!(z.imag() > 0.0)) throw std::domain_error("stieltjes: need Im z > 0");
  // sqrt(z-2)*sqrt(z+2) with principal square roots has the branch cut on
  // [-2,2] and behaves like z at infinity, so m ~ -1/z in the far field.
  const std::complex<double> w = std::sqrt(z - 2.0) * std::sqrt(z + 2.0);
  std::complex<double> m = 0.5 * (-z + w);
  if (!(m.imag() > 0.0)) m = 0.5 * (-z - w);
  return m;
}

double SemicircleModel::nu_edge(double u, double N) {
  const double n23 = std::pow(N, 2.0 / 3.0);
  const double E = u / n23 - 2.0;
  if (!(E > -2.0 && E < 2.0)) return 0.0;
  return std::cbrt(N) * density(E);
}

double SemicircleModel::mean_field_tail(double a, double gamma_c, double N) const {
  if (!(a < gamma_c))
    throw window_violation(0, a, gamma_c);
  const double top = 4.0 * std::pow(N, 2.0 / 3.0);
  if (gamma_c >= top) return 0.0;
  auto f = [&](double u) { return nu_edge(u, N) / (a - u); };
  // sqrt vanishing of nu at the upper support endpoint: substitute v = sqrt(top - u)
  const double split = std::max(gamma_c, 0.75 * top);
  double result = 0.0;
  if (gamma_c < split)
    result += quad::adaptive(f, gamma_c, split, quad_tol_, 1e-300);
  auto g = [&](double v) {
    const double u = top - v * v;
    return 2.0 * v * nu_edge(u, N) / (a - u);
  };
  result += quad::adaptive(g, 0.0, std::sqrt(top - split), quad_tol_, 1e-300);
  return result;
}

DriftConstant SemicircleModel::drift_constant(std::int64_t K, double n_ref) const {
  if (K < 1) throw std::out_of_range("drift_constant: K >= 1");
  // u_K: edge coordinate of the K-th n_ref-quantile; nu integrates to K below it.
  // Solve N * F(u/n23 - 2) = K by bisection in u.
  const double n23 = std::pow(n_ref, 2.0 / 3.0);
  auto count_below = [&](double u) {
    if (u >= 2.0 * n23) return n_ref * (1.0 - cdf(2.0 - u / n23));
    const double top = std::sqrt(u / n23);
    auto f = [](double s) { return s * s * std::sqrt(4.0 - s * s) / kPi; };
    return top == 0.0 ? 0.0 : n_ref * quad::adaptive(f, 0.0, top, quad_tol_ * 1e-2, 1e-300);
  };
  double lo = 0.0, hi = 4.0 * n23;
  while (hi - lo > 1e-12 * std::max(1.0, lo)) {
    const double mid = 0.5 * (lo + hi);
    (count_below(mid) < static_cast<double>(K) ? lo : hi) = mid;
  }
  const double u_k = 0.5 * (lo + hi);
  // integral of nu(u)/u over (0, u_K]: substitute u = s^2 to absorb the
  // 1/sqrt(u) singularity at the lower edge
  auto f = [&](double s) { return 2.0 * nu_edge(s * s, n_ref) / s; };
  const double val = quad::adaptive(f, 0.0, std::sqrt(u_k), quad_tol_, 1e-300);
  return DriftConstant{val / std::cbrt(static_cast<double>(K)),
                       std::cbrt(16.0 / (3.0 * kPi * kPi))};
}

std::vector<SemicircleModel::QuantileRow> SemicircleModel::tabulate(std::int64_t N,
                                                                    std::int64_t stride) const {
  std::vector<QuantileRow> rows;
  for (std::int64_t i = 1; i <= N; i += stride) {
    rows.push_back({i, quantile(i, N), edge_quantile(i, N)});
  }
  return rows;
}

}  // namespace dbmlab
