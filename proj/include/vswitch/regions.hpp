#pragma once

// Region decomposition of the double correlation integral
//   I = int int F(t') F(t'') K(t' - t'') dt' dt''
// for the Lorentz-plateau weight. The (t', t'') plane splits by which piece
// of F each argument falls in: M (both on the plateau), MS (one on the
// plateau, one in a tail; 4 regions), S1 (both in the same tail; 2 regions)
// and S2 (one in each tail; 2 regions). Each single region reduces to a
// one-dimensional integral over the separation, scaled by tau = tau1.
//
// Every result is a RegularizedValue whose pole coefficient refers to an
// excision of half-width rho * tau around each light-cone pole in T.

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "vswitch/core.hpp"
#include "vswitch/kernels.hpp"
#include "vswitch/quadrature.hpp"
#include "vswitch/singular.hpp"

namespace vswitch {

struct RegionOptions {
  /// When set, integrals are returned as raw excised values at this rho
  /// (finite_part holds the number, pole_coeff is 0, rho_used is set).
  std::optional<double> rho;
  QuadOptions quad;
};

struct RegionBreakdown {
  /// Single-region integrals.
  RegularizedValue i_m;
  RegularizedValue i_ms;
  RegularizedValue i_s1;
  RegularizedValue i_s2;
  /// Regrouped totals: tails-only part and plateau-tail cross part.
  RegularizedValue i_s;
  RegularizedValue i_ms_total;
  /// i_m + i_s + i_ms_total.
  RegularizedValue combined;
  /// i_m + 4 i_ms + 2 i_s1 + 2 i_s2, for consistency checks.
  RegularizedValue region_sum;
};

/// F-shape of the regrouped cross term.
inline double f_shape(double chi) {
  if (chi < 0.0) throw Error(ErrorCode::NonPositiveInput, "f_shape needs chi >= 0");
  if (chi < 0.05) {
    const double c2 = chi * chi;
    const double c4 = c2 * c2;
    return chi * (0.5 + c4 * (-1.0 / 60.0 + c2 * (1.0 / 105.0 + c2 * (-1.0 / 210.0 + c2 * 17.0 / 6930.0))));
  }
  const double q = chi * chi + 4.0;
  return (1.0 - 1.0 / q) * std::atan(chi) - std::log1p(chi * chi) / (chi * q);
}

namespace detail {

/// One term w(v) K(lambda (v + shift)) of a region integrand.
struct KernelTerm {
  std::function<double(double)> w;
  double shift = 0.0;
};

/// Integral over v in [a, b] of sum_i w_i(v) K(lambda (v + shift_i)).
///
/// tau_ref converts the excision: a half-width rho*tau_ref in T is
/// rho*tau_ref/lambda in v.
template <EvenKernel K>
RegularizedValue kernel_terms_integral(const K& k, double lambda, double tau_ref,
                                       const std::vector<KernelTerm>& terms, double a, double b,
                                       std::vector<double> features, const RegionOptions& opt) {
  auto f = [&](double v) {
    double s = 0.0;
    for (const auto& t : terms) s += t.w(v) * k(lambda * (v + t.shift));
    return s;
  };
  std::vector<PoleTerm> poles;
  // (pole index, term index, sign) for each term singular at that pole.
  struct Hit {
    std::size_t pole;
    std::size_t term;
    double sign;
  };
  std::vector<Hit> hits;
  if (auto pl = k.pole()) {
    for (std::size_t ti = 0; ti < terms.size(); ++ti) {
      const auto& t = terms[ti];
      for (double sign : {1.0, -1.0}) {
        const double v0 = sign * pl->location / lambda - t.shift;
        if (v0 == a || v0 == b) {
          throw Error(ErrorCode::LightConeCoincidence, "light-cone pole on an integration boundary");
        }
        if (!(v0 > a && v0 < b)) continue;
        PoleLaurent lp = *pl;
        if (sign < 0.0) {
          // K even: K(T) near -p has k3 -> -k3, k2 -> k2, k1 -> -k1 in (T + p).
          lp.k3 = -lp.k3;
          lp.k1 = -lp.k1;
        }
        const double c = pole_coefficient(t.w, v0, lp, lambda);
        std::size_t at = poles.size();
        for (std::size_t pi_ = 0; pi_ < poles.size(); ++pi_) {
          if (poles[pi_].x0 == v0) at = pi_;
        }
        if (at == poles.size()) poles.push_back({v0, 0.0});
        poles[at].c_minus2 += c;
        hits.push_back({at, ti, sign});
      }
    }
  }
  for (const auto& p : poles) features.push_back(p.x0);
  QuadOptions q = opt.quad;
  if (std::isinf(b)) {
    double s = 1.0;
    for (double x : features) {
      if (std::isfinite(x)) s = std::max(s, x);
    }
    q.tail_scale = s;
  }
  if (opt.rho) {
    std::vector<double> xs;
    for (const auto& p : poles) xs.push_back(p.x0);
    const double r = *opt.rho * tau_ref / lambda;
    const double v = xs.empty() ? integrate_breaks(f, refine_decades([&] {
                                     std::vector<double> br{a, b};
                                     for (double x : detail::inside(features, a, b)) br.push_back(x);
                                     return br;
                                   }()), q).value
                                : apv_integrate(f, a, b, xs, r, features, q);
    return {0.0, v, *opt.rho};
  }
  if (poles.empty()) {
    std::vector<double> br{a, b};
    for (double x : detail::inside(features, a, b)) br.push_back(x);
    return RegularizedValue::regular(integrate_breaks(f, refine_decades(br), q).value);
  }
  // finite_part_integral sorts nothing in place, so pole indices stay valid.
  auto fold = [&](double x0, std::size_t i, double u) {
    double s = 0.0;
    for (std::size_t ti = 0; ti < terms.size(); ++ti) {
      const auto& t = terms[ti];
      const Hit* h = nullptr;
      for (const auto& hh : hits) {
        if (hh.pole == i && hh.term == ti) h = &hh;
      }
      if (h && NearPoleKernel<K>) {
        if constexpr (NearPoleKernel<K>) {
          // T = sign*p + lambda*(+-u); K even so K(-p + e) = K(p - e).
          s += t.w(x0 + u) * k.near_pole(h->sign * lambda * u);
          s += t.w(x0 - u) * k.near_pole(-h->sign * lambda * u);
        }
      } else {
        s += t.w(x0 + u) * k(lambda * (x0 + u + t.shift));
        s += t.w(x0 - u) * k(lambda * (x0 - u + t.shift));
      }
    }
    return s;
  };
  RegularizedValue v = finite_part_integral(f, a, b, poles, features, q, fold);
  v.pole_coeff *= lambda / tau_ref;
  return v;
}

inline std::vector<double> positive(std::vector<double> xs) {
  std::vector<double> out;
  for (double x : xs) {
    if (x > 0.0 && std::isfinite(x)) out.push_back(x);
  }
  return out;
}

}  // namespace detail

/// M region: 2 tau^2 int_0^1 (1 - x) K(tau x) dx.
template <EvenKernel K>
RegularizedValue integral_M(const K& k, double tau, const RegionOptions& opt = {}) {
  if (!(tau > 0.0)) throw Error(ErrorCode::NonPositiveInput, "tau must be positive");
  const double c = 2.0 * tau * tau;
  std::vector<detail::KernelTerm> terms{{[c](double x) { return c * (1.0 - x); }, 0.0}};
  return detail::kernel_terms_integral(k, tau, tau, terms, 0.0, 1.0, {0.5}, opt);
}

/// One MS region: tau^2 mu int_0^inf (K(tau x) - K(tau (x + 1))) atan(x/mu) dx.
template <EvenKernel K>
RegularizedValue integral_MS(const K& k, double tau, double mu, const RegionOptions& opt = {}) {
  if (!(tau > 0.0)) throw Error(ErrorCode::NonPositiveInput, "tau must be positive");
  if (!(mu > 0.0)) throw Error(ErrorCode::NonPositiveInput, "MS region needs mu > 0");
  const double c = tau * tau * mu;
  auto w = [c, mu](double x) { return c * std::atan(x / mu); };
  auto wm = [c, mu](double x) { return -c * std::atan(x / mu); };
  std::vector<detail::KernelTerm> terms{{w, 0.0}, {wm, 1.0}};
  std::vector<double> feats{mu, 1.0};
  if (auto pl = k.pole()) {
    feats.push_back(pl->location / tau);
    feats.push_back(pl->location / tau - 1.0);
  }
  return detail::kernel_terms_integral(k, tau, tau, terms, 0.0, INFINITY,
                                       detail::positive(feats), opt);
}

namespace detail {

/// (mu/x) ln(1 + x^2/mu^2), continuous at x = 0.
inline double log_ratio(double x, double mu) {
  if (x == 0.0) return 0.0;
  const double r = x / mu;
  return std::log1p(r * r) / r;
}

}  // namespace detail

/// One S1 region (both arguments in the same tail).
template <EvenKernel K>
RegularizedValue integral_S1(const K& k, double tau, double mu, const RegionOptions& opt = {}) {
  if (!(tau > 0.0)) throw Error(ErrorCode::NonPositiveInput, "tau must be positive");
  if (!(mu > 0.0)) throw Error(ErrorCode::NonPositiveInput, "S1 region needs mu > 0");
  const double c = 2.0 * tau * tau * mu * mu * mu;
  auto w = [c, mu](double x) {
    return c / (x * x + 4.0 * mu * mu) *
           (pi - std::atan(x / mu) - detail::log_ratio(x, mu));
  };
  std::vector<double> feats{mu, 2.0 * mu};
  if (auto pl = k.pole()) feats.push_back(pl->location / tau);
  return detail::kernel_terms_integral(k, tau, tau, {{w, 0.0}}, 0.0, INFINITY,
                                       detail::positive(feats), opt);
}

/// One S2 region (arguments in opposite tails).
template <EvenKernel K>
RegularizedValue integral_S2(const K& k, double tau, double mu, const RegionOptions& opt = {}) {
  if (!(tau > 0.0)) throw Error(ErrorCode::NonPositiveInput, "tau must be positive");
  if (!(mu > 0.0)) throw Error(ErrorCode::NonPositiveInput, "S2 region needs mu > 0");
  const double c = 2.0 * tau * tau * mu * mu * mu;
  auto w = [c, mu](double x) {
    return c / (x * x + 4.0 * mu * mu) * (std::atan(x / mu) + detail::log_ratio(x, mu));
  };
  std::vector<double> feats{mu, 2.0 * mu, 1.0};
  if (auto pl = k.pole()) feats.push_back(pl->location / tau - 1.0);
  return detail::kernel_terms_integral(k, tau, tau, {{w, 1.0}}, 0.0, INFINITY,
                                       detail::positive(feats), opt);
}

/// Tails-only total: 4 pi mu^2 tau^2 int_0^inf K(mu tau chi)/(chi^2 + 4) dchi.
template <EvenKernel K>
RegularizedValue integral_S_total(const K& k, double tau, double mu, const RegionOptions& opt = {}) {
  if (mu == 0.0) return RegularizedValue::regular(0.0);
  const double c = 4.0 * pi * mu * mu * tau * tau;
  auto w = [c](double chi) { return c / (chi * chi + 4.0); };
  std::vector<double> feats{2.0};
  if (auto pl = k.pole()) feats.push_back(pl->location / (mu * tau));
  return detail::kernel_terms_integral(k, mu * tau, tau, {{w, 0.0}}, 0.0, INFINITY,
                                       detail::positive(feats), opt);
}

/// Plateau-tail cross total:
/// 4 mu^2 tau^2 int_0^inf (K(mu tau chi) - K(mu tau (chi + 1/mu))) F(chi) dchi.
template <EvenKernel K>
RegularizedValue integral_MS_total(const K& k, double tau, double mu, const RegionOptions& opt = {}) {
  if (mu == 0.0) return RegularizedValue::regular(0.0);
  const double c = 4.0 * mu * mu * tau * tau;
  auto w = [c](double chi) { return c * f_shape(chi); };
  auto wm = [c](double chi) { return -c * f_shape(chi); };
  std::vector<double> feats{1.0, 1.0 / mu};
  if (auto pl = k.pole()) {
    const double s2 = pl->location / (mu * tau);
    feats.push_back(s2);
    feats.push_back(s2 - 1.0 / mu);
  }
  return detail::kernel_terms_integral(k, mu * tau, tau, {{w, 0.0}, {wm, 1.0 / mu}}, 0.0,
                                       INFINITY, detail::positive(feats), opt);
}

/// All single-region integrals and their regrouped total.
template <EvenKernel K>
RegionBreakdown combine(const K& k, double tau, double mu, const RegionOptions& opt = {}) {
  RegionBreakdown r;
  r.i_m = integral_M(k, tau, opt);
  if (mu > 0.0) {
    r.i_ms = integral_MS(k, tau, mu, opt);
    r.i_s1 = integral_S1(k, tau, mu, opt);
    r.i_s2 = integral_S2(k, tau, mu, opt);
  } else {
    r.i_ms = r.i_s1 = r.i_s2 = RegularizedValue::regular(0.0);
  }
  r.i_s = integral_S_total(k, tau, mu, opt);
  r.i_ms_total = integral_MS_total(k, tau, mu, opt);
  r.combined = r.i_m + r.i_s + r.i_ms_total;
  r.region_sum = r.i_m + 4.0 * r.i_ms + 2.0 * r.i_s1 + 2.0 * r.i_s2;
  return r;
}

/// tau1 -> 0 limit at fixed tau2:
/// (2 tau2^2/pi^2) int_{-inf}^{inf} K(tau2 xi)/(xi^2 + 4/pi^2) dxi, evaluated on
/// the half line with the factor doubled.
/// The excision refers to the Lorentzian scale tau2/pi.
template <EvenKernel K>
RegularizedValue lorentzian_limit(const K& k, double tau2, const RegionOptions& opt = {}) {
  if (!(tau2 > 0.0)) throw Error(ErrorCode::NonPositiveInput, "tau2 must be positive");
  const double c = 4.0 * tau2 * tau2 / (pi * pi);
  auto w = [c](double xi) { return c / (xi * xi + 4.0 / (pi * pi)); };
  std::vector<double> feats{2.0 / pi};
  if (auto pl = k.pole()) feats.push_back(pl->location / tau2);
  return detail::kernel_terms_integral(k, tau2, tau2 / pi, {{w, 0.0}}, 0.0, INFINITY,
                                       detail::positive(feats), opt);
}

}  // namespace vswitch
