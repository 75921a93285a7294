#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dbmlab/gbe.hpp"
#include "dbmlab/semicircle.hpp"

using namespace dbmlab;

namespace {
constexpr double kPi = 3.14159265358979323846;

double sc_cdf(double E) {
  if (E <= -2) return 0.0;
  if (E >= 2) return 1.0;
  return 0.5 + E * std::sqrt(4 - E * E) / (4 * kPi) + std::asin(E / 2) / kPi;
}
}  // namespace

TEST_CASE("determinism: identical (N, beta, seed) gives bit-identical output") {
  const auto a = sample_gbe(64, 2.0, 123);
  const auto b = sample_gbe(64, 2.0, 123);
  REQUIRE(a.values.size() == b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
  const auto c = sample_gbe(64, 2.0, 124);
  CHECK(a.values[0] != c.values[0]);
}

TEST_CASE("output strictly ascending") {
  const auto s = sample_gbe(256, 1.0, 7);
  for (std::size_t i = 1; i < s.values.size(); ++i) CHECK(s.values[i] > s.values[i - 1]);
}

TEST_CASE("N=1 marginal is a centered Gaussian with variance 2/beta") {
  const int n = 20000;
  for (double beta : {1.0, 2.0}) {
    double s = 0, s2 = 0;
    for (int k = 0; k < n; ++k) {
      const auto smp = sample_gbe(1, beta, 1000 + k);
      s += smp.values[0];
      s2 += smp.values[0] * smp.values[0];
    }
    const double mean = s / n, var = s2 / n - mean * mean;
    CHECK(std::fabs(mean) < 4.0 * std::sqrt(2.0 / beta / n));
    CHECK(var == doctest::Approx(2.0 / beta).epsilon(0.05));
  }
}

TEST_CASE("N=1024 beta=2: empirical law is close to the semicircle") {
  const std::int64_t N = 1024;
  const auto s = sample_gbe(N, 2.0, 99);
  const double n23 = std::pow(static_cast<double>(N), 2.0 / 3.0);
  double ks = 0.0;
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    const double F = sc_cdf(s.values[i] / n23);
    ks = std::max(ks, std::fabs(F - static_cast<double>(i + 1) / N));
    ks = std::max(ks, std::fabs(F - static_cast<double>(i) / N));
  }
  CHECK(ks < 0.05);
}

TEST_CASE("N=2 mean gap matches the exact two-particle integral") {
  // separating center of mass: mu2 - mu1 = sqrt(2) d with
  // d ~ d^beta exp(-beta 2^{-1/3} d^2 / 4),
  // so E[mu2-mu1] = sqrt(2) * Gamma((beta+2)/2)/Gamma((beta+1)/2) / sqrt(c),
  // c = beta 2^{-1/3} / 4.
  const double beta = 2.0;
  const double c = beta * std::pow(2.0, -1.0 / 3.0) / 4.0;
  const double exact = std::sqrt(2.0) * (std::tgamma(2.0) / std::tgamma(1.5)) / std::sqrt(c);

  const int n = 20000;
  double s = 0, s2 = 0;
  for (int k = 0; k < n; ++k) {
    const auto smp = sample_gbe(2, beta, 5000 + k);
    const double g = smp.values[1] - smp.values[0];
    s += g;
    s2 += g * g;
  }
  const double mean = s / n;
  const double se = std::sqrt((s2 / n - mean * mean) / n);
  CHECK(std::fabs(mean - exact) < 4.0 * se);
}

TEST_CASE("reflection symmetry: E[mu_1] = -E[mu_N]") {
  const int n = 2000;
  double s1 = 0, sN = 0;
  for (int k = 0; k < n; ++k) {
    const auto smp = sample_gbe(64, 2.0, 31000 + k);
    s1 += smp.values.front();
    sN += smp.values.back();
  }
  const double scale = std::pow(64.0, 2.0 / 3.0);
  CHECK(std::fabs(s1 / n + sN / n) / scale < 0.02);
}

TEST_CASE("edge statistic definition and variance ordering in beta") {
  GbeSample s;
  s.N = 100;
  s.beta = 2.0;
  s.values = {-2.0 * std::pow(100.0, 2.0 / 3.0), 0.0, 1.0};
  CHECK(edge_statistic(s) == 0.0);

  const int n = 800;
  auto var_of = [&](double beta) {
    double a = 0, a2 = 0;
    for (int k = 0; k < n; ++k) {
      const auto low = sample_gbe_lowest(256, beta, 77000 + k, 1);
      const double stat = -2.0 * std::pow(256.0, 2.0 / 3.0) - low[0];
      a += stat;
      a2 += stat * stat;
    }
    return a2 / n - (a / n) * (a / n);
  };
  CHECK(var_of(1.0) > var_of(4.0));
}

TEST_CASE("fast lowest-eigenvalue path agrees with the full solve") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const auto full = sample_gbe(128, 2.0, seed);
    const auto low = sample_gbe_lowest(128, 2.0, seed, 3);
    for (int i = 0; i < 3; ++i)
      CHECK(low[i] == doctest::Approx(full.values[i]).epsilon(1e-9));
  }
}

TEST_CASE("beta < 1 rejected") {
  CHECK_THROWS_AS(sample_gbe(8, 0.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_gbe(0, 2.0, 1), std::invalid_argument);
}
