#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's quadrature driver: integrals use Boost's double-exponential
// rules, series are summed by hand.

#include <cmath>
#include <complex>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace ref {

inline constexpr double pi = std::numbers::pi;

template <class F>
double tanh_sinh(const F& f, double a, double b, double tol = 1e-13) {
  boost::math::quadrature::tanh_sinh<double> q;
  return q.integrate(f, a, b, tol);
}

template <class F>
double exp_sinh(const F& f, double a, double tol = 1e-13) {
  boost::math::quadrature::exp_sinh<double> q;
  return q.integrate([&](double x) { return f(x); }, a, INFINITY, tol);
}

/// Re of the integral of (1 - xi z)/(z^2 - s^2)^n along s + rho e^{i th},
/// th from 0 to pi (upper) or from 0 to -pi (lower).
inline double semicircle(double s, double xi, int n, double rho, bool upper) {
  auto f = [&](double th) {
    const std::complex<double> e = std::polar(1.0, th);
    const std::complex<double> z = s + rho * e;
    std::complex<double> d = z * z - s * s;
    std::complex<double> p = d;
    for (int i = 1; i < n; ++i) p *= d;
    const std::complex<double> dz = std::complex<double>(0.0, 1.0) * rho * e;
    return std::real((1.0 - xi * z) / p * dz);
  };
  return upper ? tanh_sinh(f, 0.0, pi) : -tanh_sinh(f, -pi, 0.0);
}

/// atan by Taylor series with argument halving.
inline double atan_series(double x) {
  int halvings = 0;
  while (std::abs(x) > 0.1) {
    x = x / (1.0 + std::sqrt(1.0 + x * x));
    ++halvings;
  }
  double sum = 0.0;
  double term = x;
  for (int k = 0; k < 60; ++k) {
    sum += term / (2 * k + 1);
    term *= -x * x;
  }
  return std::ldexp(sum, halvings);
}

/// ln(1 + y) for y >= 0: square roots bring 1 + y near 1, then
/// ln x = 2 atanh((x - 1)/(x + 1)) by series.
inline double log1p_series(double y) {
  if (y < 0.5) {
    const double u = y / (2.0 + y);
    double sum = 0.0;
    double term = u;
    for (int k = 0; k < 60; ++k) {
      sum += term / (2 * k + 1);
      term *= u * u;
    }
    return 2.0 * sum;
  }
  double x = 1.0 + y;
  int roots = 0;
  while (x > 1.1) {
    x = std::sqrt(x);
    ++roots;
  }
  return std::ldexp(log1p_series(x - 1.0), roots);
}

/// (1 - 1/(chi^2 + 4)) atan chi - ln(1 + chi^2)/(chi (chi^2 + 4)) by series.
inline double f_shape_series(double chi) {
  const double c2 = chi * chi;
  return (1.0 - 1.0 / (c2 + 4.0)) * atan_series(chi) - log1p_series(c2) / (chi * (c2 + 4.0));
}

/// Bare ZZ kernel written out independently.
inline double zz(double T, double z) {
  const double d = T * T - 4.0 * z * z;
  return 1.0 / (pi * pi * d * d);
}

inline double xx(double T, double z) {
  const double d = T * T - 4.0 * z * z;
  return -(T * T + 4.0 * z * z) / (pi * pi * d * d * d);
}

}  // namespace ref
