#pragma once

#include <cmath>
#include <stdexcept>

namespace dbmlab {

// Adaptive Gauss-Legendre quadrature.  15-point panels, error estimated by
// one bisection; panels are split until the local estimate meets the
// (relative + tiny absolute) tolerance.
namespace quad {

// 15-point Gauss-Legendre nodes/weights on [-1, 1] (positive half; symmetric).
inline constexpr double kGL15Nodes[8] = {
    0.0,
    0.2011940939974345223006283,
    0.3941513470775633698972074,
    0.5709721726085388475372267,
    0.7244177313601700474161861,
    0.8482065834104272162006483,
    0.9372733924007059043077589,
    0.9879925180204854284895657};
inline constexpr double kGL15Weights[8] = {
    0.2025782419255612728806202,
    0.1984314853271115764561183,
    0.1861610000155622110268006,
    0.1662692058169939335532009,
    0.1395706779261543144478048,
    0.1071592204671719350118695,
    0.0703660474881081247092674,
    0.0307532419961172683546284};

template <class F>
double gl15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = kGL15Weights[0] * f(c);
  for (int j = 1; j < 8; ++j) {
    const double dx = h * kGL15Nodes[j];
    s += kGL15Weights[j] * (f(c + dx) + f(c - dx));
  }
  return s * h;
}

template <class F>
double adaptive_impl(const F& f, double a, double b, double whole, double rel_tol,
                     double abs_floor, int depth) {
  const double m = 0.5 * (a + b);
  const double left = gl15(f, a, m), right = gl15(f, m, b);
  const double sum = left + right;
  const double err = std::fabs(sum - whole);
  if (err <= rel_tol * std::fabs(sum) + abs_floor || depth >= 48) return sum;
  return adaptive_impl(f, a, m, left, rel_tol, 0.5 * abs_floor, depth + 1) +
         adaptive_impl(f, m, b, right, rel_tol, 0.5 * abs_floor, depth + 1);
}

template <class F>
double adaptive(const F& f, double a, double b, double rel_tol = 1e-10,
                double abs_floor = 1e-300) {
  if (!(a < b)) {
    if (a == b) return 0.0;
    throw std::invalid_argument("quad::adaptive: a > b");
  }
  return adaptive_impl(f, a, b, gl15(f, a, b), rel_tol, abs_floor, 0);
}

}  // namespace quad
}  // namespace dbmlab
