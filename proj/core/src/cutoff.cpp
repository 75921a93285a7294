#include "dbmlab/cutoff.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dbmlab/stepper.hpp"

namespace dbmlab {

namespace {

double clenshaw(const std::vector<double>& c, double t) {
  // t in [-1, 1]
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) {
    const double b0 = 2.0 * t * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + c[0];
}

}  // namespace

EdgeWindow EdgeWindow::create(std::int64_t K, std::int64_t N_effective, double beta,
                              const RegularizationConfig& reg, double delta_c,
                              const SemicircleModel& model, TailMode mode) {
  if (K < 1 || K > N_effective) throw std::invalid_argument("EdgeWindow: need 1 <= K <= N");
  if (mode == TailMode::exact_confinement)
    throw std::invalid_argument("EdgeWindow: use exact_confinement() for that mode");
  EdgeWindow w;
  w.K_ = K;
  w.N_eff_ = N_effective;
  w.beta_ = beta;
  w.delta_c_ = delta_c;
  w.reg_ = reg;
  w.model_ = model;
  w.tail_mode_ = mode;
  w.n13_ = std::cbrt(static_cast<double>(N_effective));
  w.regime_warning_ =
      static_cast<double>(K) > std::pow(static_cast<double>(N_effective), 0.1);

  const double buffer = std::max(2.0, std::pow(static_cast<double>(K), delta_c));
  const auto idx_c = std::min<std::int64_t>(
      N_effective, static_cast<std::int64_t>(std::floor(static_cast<double>(K) + buffer)));
  w.gamma_c_ = model.edge_quantile(idx_c, N_effective);
  if (mode == TailMode::mean_field_balanced) {
    for (std::int64_t p = K + 1; p <= idx_c; ++p)
      w.pins_.push_back(model.edge_quantile(p, N_effective));
  }

  const double n = static_cast<double>(N_effective);
  w.x_lo_ = model.edge_quantile(1, N_effective) - 10.0;
  const double x_hi = w.gamma_c_ - 1e-10 * (w.gamma_c_ - w.x_lo_);
  w.w_lo_ = std::log(w.gamma_c_ - x_hi);
  w.w_hi_ = std::log(w.gamma_c_ - w.x_lo_);

  const int deg = 160;
  std::vector<double> nodes(deg), vals(deg);
  for (int j = 0; j < deg; ++j) {
    const double theta = 3.14159265358979323846 * (j + 0.5) / deg;
    const double t = std::cos(theta);
    const double wv = 0.5 * (w.w_lo_ + w.w_hi_) + 0.5 * (w.w_hi_ - w.w_lo_) * t;
    const double x = w.gamma_c_ - std::exp(wv);
    nodes[j] = t;
    vals[j] = model.mean_field_tail(x, w.gamma_c_, n);
  }
  w.cheb_.assign(deg, 0.0);
  for (int k = 0; k < deg; ++k) {
    double s = 0.0;
    for (int j = 0; j < deg; ++j)
      s += vals[j] * std::cos(3.14159265358979323846 * k * (j + 0.5) / deg);
    w.cheb_[k] = 2.0 * s / deg;
  }
  w.cheb_[0] *= 0.5;

  // verify on off-node probes
  double err = 0.0;
  for (int j = 1; j < 24; ++j) {
    const double x = w.x_lo_ + (w.gamma_c_ - 0.01 * (w.gamma_c_ - w.x_lo_) - w.x_lo_) * j / 24.0;
    err = std::max(err, std::fabs(w.mean_field_part(x) - model.mean_field_tail(x, w.gamma_c_, n)));
  }
  w.interp_err_ = err;
  return w;
}

EdgeWindow EdgeWindow::exact_confinement(std::int64_t N, double beta,
                                         const RegularizationConfig& reg) {
  EdgeWindow w;
  w.K_ = N;
  w.N_eff_ = N;
  w.beta_ = beta;
  w.reg_ = reg;
  w.tail_mode_ = TailMode::exact_confinement;
  w.gamma_c_ = std::numeric_limits<double>::infinity();
  w.n13_ = std::cbrt(static_cast<double>(N));
  return w;
}

double EdgeWindow::mean_field_part(double x) const {
  if (x >= gamma_c_) throw window_violation(0, x, gamma_c_);
  if (x < x_lo_)
    return model_.mean_field_tail(x, gamma_c_, static_cast<double>(N_eff_));
  const double wv = std::log(gamma_c_ - x);
  const double t = (2.0 * wv - (w_lo_ + w_hi_)) / (w_hi_ - w_lo_);
  return clenshaw(cheb_, std::min(1.0, std::max(-1.0, t)));
}

double EdgeWindow::tail(double x) const {
  if (tail_mode_ == TailMode::exact_confinement) return -x / (2.0 * n13_);
  double v = mean_field_part(x);
  if (tail_mode_ == TailMode::mean_field_balanced) {
    for (double pin : pins_) v += 1.0 / (x - pin - reg_.epsilon);
    v -= x / (2.0 * n13_);
  }
  return v;
}

namespace {

struct CutoffDrift {
  const EdgeWindow* w;
  void operator()(const std::vector<double>& x, std::vector<double>& out) const {
    const std::size_t n = x.size();
    const double eps = w->reg().epsilon;
    out.assign(n, 0.0);
    for (std::size_t j = 1; j < n; ++j) {
      const double xj = x[j];
      double acc = 0.0;
      for (std::size_t i = 0; i < j; ++i) {
        const double f = 1.0 / (xj - x[i] + eps);
        acc += f;
        out[i] -= f;
      }
      out[j] += acc;
    }
    const double n13 = std::cbrt(static_cast<double>(w->N_effective()));
    for (std::size_t i = 0; i < n; ++i) out[i] += w->tail(x[i]) + n13;
  }
};

void check_window(const std::vector<double>& x, const EdgeWindow& w) {
  if (w.tail_mode() == EdgeWindow::TailMode::exact_confinement) return;
  // ordered state: only the top particle can violate
  if (!x.empty() && x.back() >= w.gamma_c())
    throw window_violation(x.size() - 1, x.back(), w.gamma_c());
}

}  // namespace

std::vector<double> cutoff_drift(const std::vector<double>& window_state,
                                 const EdgeWindow& window) {
  check_window(window_state, window);
  CutoffDrift d{&window};
  std::vector<double> out;
  d(window_state, out);
  return out;
}

Trajectory simulate_window(const std::vector<double>& initial_edge, double t0, double T,
                           const NoiseSource& noise, const EdgeWindow& window,
                           std::int64_t decimation) {
  if (!(T >= 0.0)) throw std::invalid_argument("simulate_window: T >= 0");
  if (decimation < 1) throw std::invalid_argument("simulate_window: decimation >= 1");
  if (static_cast<std::int64_t>(initial_edge.size()) != window.K())
    throw std::invalid_argument("simulate_window: initial size != K");
  const RegularizationConfig& reg = window.reg();
  const double dt = reg.dt_base;
  const auto n_steps = static_cast<std::int64_t>(std::llround(T / dt));
  if (std::fabs(static_cast<double>(n_steps) * dt - T) > 1e-9 * std::max(1.0, T))
    throw std::invalid_argument("simulate_window: T must be a multiple of dt_base");

  const int level = detail::grid_level(dt, noise);
  std::uint64_t g = detail::grid_index(t0, dt);

  Trajectory traj;
  traj.N = window.N_effective();
  traj.beta = window.beta();
  traj.keep_lowest = initial_edge.size();
  std::vector<double> x = initial_edge;
  check_window(x, window);
  traj.times.push_back(t0);
  traj.snapshots.push_back(x);

  CutoffDrift d{&window};
  std::vector<double> dB, drift_buf, trial_buf;
  const double amp = std::sqrt(2.0 / window.beta());
  for (std::int64_t k = 0; k < n_steps; ++k) {
    detail::grid_step(x, d, dt, reg.dt_min, amp, noise, g, level, traj.stats, dB, drift_buf,
                      trial_buf);
    ++g;
    check_window(x, window);
    if ((k + 1) % decimation == 0 || k + 1 == n_steps) {
      traj.times.push_back(t0 + static_cast<double>(k + 1) * dt);
      traj.snapshots.push_back(x);
    }
  }
  return traj;
}

}  // namespace dbmlab
