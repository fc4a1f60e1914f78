#pragma once

// Asymptotic principal values.
//
// An integral with an excised window of half-width rho around each pole
// behaves like A/rho + B + C1 rho + C3 rho^3 + ... (symmetric excision kills
// the even powers and the odd-order pole terms). These routines compute the
// raw excised value at a given rho, or A and B directly.

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/differentiation/finite_difference.hpp>

#include "vswitch/core.hpp"
#include "vswitch/kernels.hpp"
#include "vswitch/quadrature.hpp"

namespace vswitch {

struct PoleSpec {
  double sigma = 0.0;
  int order = 2;
  double rho = 0.0;
};

namespace detail {

inline std::vector<double> inside(const std::vector<double>& pts, double a, double b) {
  std::vector<double> out;
  for (double p : pts) {
    if (p > a && p < b) out.push_back(p);
  }
  return out;
}

inline void check_poles(const std::vector<double>& poles, double a, double b, double rho) {
  if (!(rho > 0.0)) throw Error(ErrorCode::NonPositiveInput, "excision radius must be positive");
  std::vector<double> sorted = poles;
  std::sort(sorted.begin(), sorted.end());
  double prev = a;
  for (double s : sorted) {
    if (!(s > a && s < b)) {
      throw Error(ErrorCode::PoleOutsideInterval, "pole outside the open integration interval");
    }
    if (s - rho <= prev) {
      throw Error(ErrorCode::ExcisionTooWide, "excision window reaches the interval end or a neighbour");
    }
    prev = s + rho;
  }
  if (prev >= b) {
    throw Error(ErrorCode::ExcisionTooWide, "excision window reaches the interval end");
  }
}

}  // namespace detail

/// Integral of f over [a,b] with (s - rho, s + rho) removed around each pole.
///
/// b may be +infinity. features are extra breakpoints where f changes scale.
template <class F>
double apv_integrate(const F& f, double a, double b, const std::vector<double>& poles, double rho,
                     const std::vector<double>& features = {}, QuadOptions opt = {}) {
  detail::check_poles(poles, a, b, rho);
  std::vector<double> breaks{a, b};
  for (double s : poles) {
    breaks.push_back(s - rho);
    breaks.push_back(s + rho);
  }
  for (double x : detail::inside(features, a, b)) breaks.push_back(x);
  breaks = refine_decades(breaks);
  if (std::isinf(b) && opt.tail_scale == 1.0) {
    opt.tail_scale = std::max(1.0, std::abs(breaks[breaks.size() - 2]));
  }
  auto excised = [&](double x) {
    for (double s : poles) {
      if (std::abs(x - s) < rho) return 0.0;
    }
    return f(x);
  };
  return integrate_breaks(excised, breaks, opt).value;
}

/// Single-pole form.
template <class F>
double apv_integrate(const F& f, double a, double b, const PoleSpec& pole, QuadOptions opt = {}) {
  if (!(pole.sigma > a && pole.sigma < b)) {
    throw Error(ErrorCode::PoleOutsideInterval, "pole outside the open integration interval");
  }
  if (!(pole.rho > 0.0)) throw Error(ErrorCode::NonPositiveInput, "excision radius must be positive");
  if (pole.rho >= std::min(pole.sigma - a, b - pole.sigma)) {
    throw Error(ErrorCode::ExcisionTooWide, "excision window reaches the interval end");
  }
  return apv_integrate(f, a, b, std::vector<double>{pole.sigma}, pole.rho, {}, opt);
}

/// A pole of the integrand together with its (x - x0)^-2 Laurent coefficient.
struct PoleTerm {
  double x0 = 0.0;
  double c_minus2 = 0.0;
};

namespace detail {

/// f(x0 + u) + f(x0 - u) straight from f.
template <class F>
struct PlainFold {
  const F& f;
  double operator()(double x0, std::size_t, double u) const { return f(x0 + u) + f(x0 - u); }
};

}  // namespace detail

/// (A, B) of the excised integral of f over [a,b], b possibly infinite.
///
/// Around each pole the two sides are folded together,
///   int_0^d [f(x0+u) + f(x0-u) - 2 c/u^2] du - 2c/d,
/// which is regular and even in u because the odd Laurent terms cancel.
/// Outside the folding windows f is integrated directly. A = sum of 2c.
///
/// fold(x0, i, u) must return f(x0+u) + f(x0-u) for pole i; callers that can
/// evaluate it without rounding the pole position pass their own. Close to
/// u = 0 the subtraction cancels, so on [0, u_min] the fold is replaced by
/// the even quartic through its values at u_min, 2 u_min, 3 u_min.
template <class F, class Fold>
RegularizedValue finite_part_integral(const F& f, double a, double b, std::vector<PoleTerm> poles,
                                      const std::vector<double>& features, QuadOptions opt,
                                      const Fold& fold) {
  std::vector<std::size_t> order(poles.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return poles[x].x0 < poles[y].x0; });
  std::vector<double> half(poles.size());
  for (std::size_t j = 0; j < order.size(); ++j) {
    const std::size_t i = order[j];
    const double x0 = poles[i].x0;
    if (!(x0 > a && x0 < b)) {
      throw Error(ErrorCode::PoleOutsideInterval, "pole outside the open integration interval");
    }
    double room = std::min(x0 - a, b - x0);
    if (j > 0) room = std::min(room, 0.5 * (x0 - poles[order[j - 1]].x0));
    if (j + 1 < order.size()) room = std::min(room, 0.5 * (poles[order[j + 1]].x0 - x0));
    double d = 0.5 * room;
    // Shrink towards nearby features so the window sees a smooth remainder.
    for (double s : features) {
      const double gap = std::abs(s - x0);
      if (gap > 0.0 && gap < d) d = std::max(gap, 0.1 * d);
    }
    half[i] = d;
  }

  std::vector<double> breaks{a, b};
  for (std::size_t i = 0; i < poles.size(); ++i) {
    breaks.push_back(poles[i].x0 - half[i]);
    breaks.push_back(poles[i].x0 + half[i]);
  }
  for (double s : detail::inside(features, a, b)) {
    bool in_window = false;
    for (std::size_t i = 0; i < poles.size(); ++i) {
      if (std::abs(s - poles[i].x0) < half[i]) in_window = true;
    }
    if (!in_window) breaks.push_back(s);
  }
  breaks = refine_decades(breaks);
  if (std::isinf(b) && opt.tail_scale == 1.0) {
    opt.tail_scale = std::max(1.0, std::abs(breaks[breaks.size() - 2]));
  }
  auto outside = [&](double x) {
    for (std::size_t i = 0; i < poles.size(); ++i) {
      if (std::abs(x - poles[i].x0) < half[i]) return 0.0;
    }
    return f(x);
  };
  RegularizedValue out;
  out.finite_part = integrate_breaks(outside, breaks, opt).value;
  for (std::size_t i = 0; i < poles.size(); ++i) {
    const double x0 = poles[i].x0;
    const double c = poles[i].c_minus2;
    const double d = half[i];
    const double u_min = 0.02 * d;
    auto folded = [&](double u) { return fold(x0, i, u) - 2.0 * c / (u * u); };
    std::vector<double> ubreaks{u_min, d};
    for (double s : features) {
      const double u = std::abs(s - x0);
      if (u > u_min && u < d) ubreaks.push_back(u);
    }
    const double body = integrate_breaks(folded, refine_decades(ubreaks), opt).value;
    // Even quartic alpha + beta u^2 + gamma u^4 through u_min {1, 2, 3}.
    const double g1 = folded(u_min);
    const double g2 = folded(2.0 * u_min);
    const double g3 = folded(3.0 * u_min);
    const double h = u_min * u_min;
    const double gamma = ((g3 - g1) / 8.0 - (g2 - g1) / 3.0) / (5.0 * h * h);
    const double beta = (g2 - g1) / (3.0 * h) - 5.0 * gamma * h;
    const double alpha = g1 - beta * h - gamma * h * h;
    const double head = u_min * (alpha + beta * h / 3.0 + gamma * h * h / 5.0);
    out.finite_part += body + head - 2.0 * c / d;
    out.pole_coeff += 2.0 * c;
  }
  return out;
}

template <class F>
RegularizedValue finite_part_integral(const F& f, double a, double b, std::vector<PoleTerm> poles,
                                      const std::vector<double>& features = {},
                                      QuadOptions opt = {}) {
  return finite_part_integral(f, a, b, std::move(poles), features, opt, detail::PlainFold<F>{f});
}

/// (x - x0)^-2 coefficient of w(x) K(lambda (x + shift)) at the pole
/// lambda (x0 + shift) = p, with w smooth at x0.
template <class W>
double pole_coefficient(const W& w, double x0, const PoleLaurent& k, double lambda) {
  double c = w(x0) * k.k2 / (lambda * lambda);
  if (k.k3 != 0.0) {
    const double dw = boost::math::differentiation::finite_difference_derivative<W, double, 8>(w, x0);
    c += dw * k.k3 / (lambda * lambda * lambda);
  }
  return c;
}

/// Re of the contour integral of (1 - xi z)/(z^2 - sigma^2)^2 over the
/// upper semicircle of radius rho about sigma: leading 1/rho coefficient.
inline RegularizedValue semicircle_I2(double sigma, double xi, double rho) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::NonPositiveSigma, "sigma must be positive");
  if (!(rho > 0.0)) throw Error(ErrorCode::NonPositiveInput, "rho must be positive");
  return {(1.0 - xi * sigma) / (2.0 * sigma * sigma), 0.0, rho};
}

/// Same for (1 - xi z)/(z^2 - sigma^2)^3.
inline RegularizedValue semicircle_I3(double sigma, double xi, double rho) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::NonPositiveSigma, "sigma must be positive");
  if (!(rho > 0.0)) throw Error(ErrorCode::NonPositiveInput, "rho must be positive");
  return {-(3.0 - xi * sigma) / (8.0 * std::pow(sigma, 4)), 0.0, rho};
}

/// Exact value of the I2 semicircle integral for finite rho < 2 sigma.
inline double semicircle_I2_exact(double sigma, double xi, double rho) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::NonPositiveSigma, "sigma must be positive");
  if (!(rho > 0.0) || rho >= 2.0 * sigma) {
    throw Error(ErrorCode::ExcisionTooWide, "need 0 < rho < 2 sigma");
  }
  const double beta = 1.0 - xi * sigma;
  const double s2 = sigma * sigma;
  const double p = beta / (4.0 * s2);
  const double q = rho * rho / (2.0 * s2);
  const double r = beta * (std::pow(rho, 4) / (4.0 * s2) - rho * rho) +
                   xi * (std::pow(rho, 4) / (2.0 * sigma) - 2.0 * sigma * rho * rho);
  const double e = rho / (2.0 * sigma);
  const double lg = 2.0 * std::log((1.0 + e) / (1.0 - e));
  const double rho_i2 = 2.0 * p - q / (4.0 * sigma * rho) * lg +
                        r / (8.0 * s2 * s2) / ((1.0 - e * e) * (1.0 - e * e));
  return rho_i2 / rho;
}

/// Excised integral of (1 - x)/(x^2 - sigma^2)^2 over [0,1], 0 < sigma < 1.
inline RegularizedValue pv_canonical(double sigma, double rho) {
  if (!(sigma > 0.0 && sigma < 1.0)) {
    throw Error(ErrorCode::SigmaOutOfRange, "need 0 < sigma < 1");
  }
  const double finite = 2.0 * std::log((1.0 + sigma) / (1.0 - sigma)) / (8.0 * std::pow(sigma, 3));
  return {(1.0 - sigma) / (2.0 * sigma * sigma), finite, rho};
}

/// Collapses A/rho + B to a number.
///
/// ComptonCutoff sets rho = 1/(m tau): the excised window is one Compton
/// time wide in T.
inline double evaluate(const RegularizedValue& v, Regularization mode,
                       std::optional<double> mass = std::nullopt,
                       std::optional<double> tau = std::nullopt) {
  if (mode == Regularization::DropDivergence || v.pole_coeff == 0.0) return v.finite_part;
  if (!mass || !tau || !(*mass > 0.0) || !(*tau > 0.0)) {
    throw Error(ErrorCode::MissingCutoffData, "Compton cutoff needs a mass and a time scale");
  }
  return v.pole_coeff * (*mass) * (*tau) + v.finite_part;
}

struct LaurentFit {
  RegularizedValue value;
  /// RMS residual of the least-squares fit; 0 when exactly determined.
  double residual = 0.0;
  /// Coefficients of [1/rho, 1, rho, rho^3] (as many as were fitted).
  std::vector<double> coeffs;
};

/// Least-squares fit of v(rho) = A/rho + B + C1 rho + C3 rho^3, using as many
/// of these terms as there are points (at least A and B).
inline LaurentFit fit_laurent(const std::vector<double>& rhos, const std::vector<double>& values,
                              int max_terms = 4) {
  if (rhos.size() != values.size() || rhos.size() < 2) {
    throw Error(ErrorCode::IllConditionedFit, "need at least two (rho, value) pairs");
  }
  const auto [lo, hi] = std::minmax_element(rhos.begin(), rhos.end());
  if (!(*lo > 0.0)) throw Error(ErrorCode::NonPositiveInput, "rho must be positive");
  if (*hi < 2.0 * *lo * (1.0 - 1e-12)) {
    throw Error(ErrorCode::IllConditionedFit, "rho values must span at least a factor of 2");
  }
  const int n = static_cast<int>(rhos.size());
  const int terms = std::clamp(std::min(n, max_terms), 2, 4);
  const double scale = *hi;
  Eigen::MatrixXd M(n, terms);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const double r = rhos[i] / scale;
    const double cols[4] = {1.0 / r, 1.0, r, r * r * r};
    for (int j = 0; j < terms; ++j) M(i, j) = cols[j];
    y(i) = values[i];
  }
  Eigen::VectorXd c = M.colPivHouseholderQr().solve(y);
  LaurentFit fit;
  const double unscale[4] = {scale, 1.0, 1.0 / scale, 1.0 / (scale * scale * scale)};
  for (int j = 0; j < terms; ++j) fit.coeffs.push_back(c(j) * unscale[j]);
  fit.value = {fit.coeffs[0], fit.coeffs[1], std::nullopt};
  fit.residual = n > terms ? std::sqrt((M * c - y).squaredNorm() / n) : 0.0;
  return fit;
}

}  // namespace vswitch
