#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace dbmlab {

// Counter-based randomness: every variate is a pure function of
// (seed, domain, key words).  No generator state is ever stored, which is
// what makes the cross-N noise coupling and dyadic refinement exact.

// Separate streams for unrelated consumers.  Initial data, driving noise and
// oracle noise must be independently re-seedable (same numeric seed, different
// domain -> unrelated variates).
enum class RngDomain : std::uint64_t {
  noise_base    = 0xA1,
  noise_bridge  = 0xA2,
  gbe_sampler   = 0xB1,
  sao_noise     = 0xC1,
  synthetic     = 0xD1,
  derive_seed   = 0xE1,
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t absorb(std::uint64_t h, std::uint64_t w) {
  return splitmix64(h ^ (w * 0xff51afd7ed558ccdull));
}

}  // namespace detail

inline std::uint64_t counter_hash(std::uint64_t seed, RngDomain dom,
                                  std::uint64_t a = 0, std::uint64_t b = 0,
                                  std::uint64_t c = 0, std::uint64_t d = 0) {
  using detail::absorb;
  std::uint64_t h = detail::splitmix64(seed);
  h = absorb(h, static_cast<std::uint64_t>(dom));
  h = absorb(h, a);
  h = absorb(h, b);
  h = absorb(h, c);
  h = absorb(h, d);
  return h;
}

// Uniform on (0,1), excluding the endpoints.
inline double counter_uniform(std::uint64_t seed, RngDomain dom,
                              std::uint64_t a = 0, std::uint64_t b = 0,
                              std::uint64_t c = 0, std::uint64_t d = 0) {
  const std::uint64_t h = counter_hash(seed, dom, a, b, c, d);
  return static_cast<double>(h >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

// Wichura's PPND16 (algorithm AS 241): inverse of the standard normal CDF,
// accurate to ~1e-16 over the full open interval.
inline double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("inverse_normal_cdf: p outside (0,1)");
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double v;
  if (r <= 5.0) {
    r -= 1.6;
    v = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    v = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -v : v;
}

inline double counter_gaussian(std::uint64_t seed, RngDomain dom,
                               std::uint64_t a = 0, std::uint64_t b = 0,
                               std::uint64_t c = 0, std::uint64_t d = 0) {
  return inverse_normal_cdf(counter_uniform(seed, dom, a, b, c, d));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return counter_hash(seed, RngDomain::derive_seed, tag);
}

// Stateful view of one counter-addressed substream.  Used where a rejection
// sampler needs a variable number of draws (gamma variates); the sequence is
// still a pure function of the key.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, RngDomain dom, std::uint64_t a = 0,
                std::uint64_t b = 0, std::uint64_t c = 0)
      : seed_(seed), dom_(dom), a_(a), b_(b), c_(c) {}

  double uniform() { return counter_uniform(seed_, dom_, a_, b_, c_, ctr_++); }
  double gaussian() { return inverse_normal_cdf(uniform()); }

  // Marsaglia-Tsang for shape >= 1; boosted for shape < 1.  Unit scale.
  double gamma(double shape) {
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double cc = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = gaussian();
        v = 1.0 + cc * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double chi(double dof) { return std::sqrt(2.0 * gamma(0.5 * dof)); }

 private:
  std::uint64_t seed_;
  RngDomain dom_;
  std::uint64_t a_, b_, c_;
  std::uint64_t ctr_ = 0;
};

}  // namespace dbmlab
