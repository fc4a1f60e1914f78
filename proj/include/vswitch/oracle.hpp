#pragma once

// Brute-force reference values.
//
// The double integral over (t', t'') is done as nested one-dimensional
// adaptive quadrature directly in the original time coordinates, with
// diagonal strips |t' - t'' -+ 2z| < rho*tau_ref removed. Nothing here goes
// through the region change of variables.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <future>
#include <optional>
#include <thread>
#include <vector>

#include "vswitch/core.hpp"
#include "vswitch/kernels.hpp"
#include "vswitch/quadrature.hpp"
#include "vswitch/singular.hpp"
#include "vswitch/switching.hpp"

namespace vswitch {

enum class OraclePart { All, Plateau, LeftTail, RightTail };

struct OracleOptions {
  QuadOptions inner{1e-10, 1e-15, 4000, 1.0};
  QuadOptions outer{1e-9, 1e-15, 4000, 1.0};
  /// Restrict the first and second argument to one piece of F.
  OraclePart first = OraclePart::All;
  OraclePart second = OraclePart::All;
  /// Upper limit on worker threads for multi-rho fits; 0 reads VSWITCH_THREADS.
  unsigned threads = 0;
  /// Evaluate F(t - shift) instead of F(t).
  double shift = 0.0;
};

/// Worker count: explicit request, else VSWITCH_THREADS, else hardware.
inline unsigned oracle_threads(unsigned requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("VSWITCH_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

struct Support {
  double lo;
  double hi;
};

inline double oracle_eval(const SwitchingSpec& spec, OraclePart part, double t) {
  switch (part) {
    case OraclePart::All: return eval_switch(spec, t);
    case OraclePart::Plateau: return eval_part(spec, SwitchPart::Plateau, t);
    case OraclePart::LeftTail: return eval_part(spec, SwitchPart::LeftTail, t);
    case OraclePart::RightTail: return eval_part(spec, SwitchPart::RightTail, t);
  }
  return 0.0;
}

inline Support oracle_support(const SwitchingSpec& spec, OraclePart part) {
  const double inf = INFINITY;
  const double h = 0.5 * spec.tau1;
  const bool tails = spec.variant != Variant::Step && spec.tau2 > 0.0;
  if (spec.variant == Variant::Lorentzian) {
    return part == OraclePart::All || part == OraclePart::Plateau ? Support{-inf, inf}
                                                                  : Support{0.0, 0.0};
  }
  const double left = eval_part(spec, SwitchPart::LeftTail, -h - 1.0) > 0.0 ? -inf : -h;
  const double right = eval_part(spec, SwitchPart::RightTail, h + 1.0) > 0.0 ? inf : h;
  const bool plateau = eval_part(spec, SwitchPart::Plateau, 0.0) > 0.0;
  switch (part) {
    case OraclePart::All:
      if (!tails) return {-h, h};
      return {left, right};
    case OraclePart::Plateau:
      return plateau ? Support{-h, h} : Support{0.0, 0.0};
    case OraclePart::LeftTail:
      return std::isinf(left) ? Support{-inf, -h} : Support{0.0, 0.0};
    case OraclePart::RightTail:
      return std::isinf(right) ? Support{h, inf} : Support{0.0, 0.0};
  }
  return {0.0, 0.0};
}

/// Integral over breakpoints that may start at -inf and/or end at +inf.
template <class F>
double integrate_line(const F& f, std::vector<double> breaks, const QuadOptions& opt) {
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  if (breaks.size() < 2) return 0.0;
  double total = 0.0;
  std::vector<double> right;
  if (std::isinf(breaks.front())) {
    // Reflect the left-infinite piece onto [-b1, inf).
    const double b1 = breaks[1];
    auto g = [&](double x) { return f(-x); };
    QuadOptions o = opt;
    total += integrate_breaks(g, {-b1, INFINITY}, o).value;
    right.assign(breaks.begin() + 1, breaks.end());
  } else {
    right = breaks;
  }
  if (right.size() >= 2) total += integrate_breaks(f, right, opt).value;
  return total;
}

inline std::vector<double> clip(const std::vector<double>& pts, Support s) {
  std::vector<double> out{s.lo, s.hi};
  for (double p : pts) {
    if (p > s.lo && p < s.hi) out.push_back(p);
  }
  return out;
}

}  // namespace detail

/// Double integral of F(t') F(t'') K(t' - t'') with the light-cone strips
/// excised at half-width rho * tau_ref (tau_ref = spec.reference_time()).
template <EvenKernel K>
double brute_double_integral(const SwitchingSpec& spec, const K& kernel,
                             std::optional<double> rho, const OracleOptions& opt = {}) {
  detail::Support sa = detail::oracle_support(spec, opt.first);
  detail::Support sb = detail::oracle_support(spec, opt.second);
  for (auto* s : {&sa, &sb}) {
    s->lo += opt.shift;
    s->hi += opt.shift;
  }
  if (!(sa.hi > sa.lo) || !(sb.hi > sb.lo)) return 0.0;

  const double tref = spec.reference_time();
  std::optional<double> p;
  if (auto pl = kernel.pole()) p = pl->location;
  double r = 0.0;
  if (p) {
    const double tmax = sa.hi - sb.lo;
    const double tmin = sa.lo - sb.hi;
    if (std::abs(tmax) == *p || std::abs(tmin) == *p) {
      throw Error(ErrorCode::LightConeCoincidence, "light-cone pole on the edge of the support");
    }
    const bool hits = (*p < tmax && *p > tmin) || (-*p < tmax && -*p > tmin);
    if (hits) {
      if (!rho || !(*rho > 0.0)) {
        throw Error(ErrorCode::NonPositiveInput, "kernel poles meet the support: rho required");
      }
      r = *rho * tref;
      if (r >= *p) throw Error(ErrorCode::ExcisionCoversSupport, "excision strip reaches T = 0");
    } else {
      p.reset();
    }
  }

  std::vector<double> kinks = switch_kinks(spec);
  for (double& k : kinks) k += opt.shift;
  double scale = std::max({tref, spec.tau1, spec.mu() * spec.tau1, p ? *p : 0.0});
  if (!(scale > 0.0)) scale = 1.0;
  QuadOptions inner_opt = opt.inner;
  inner_opt.tail_scale = scale;
  QuadOptions outer_opt = opt.outer;
  outer_opt.tail_scale = scale;

  auto inner = [&](double t1) {
    auto g = [&](double t2) {
      const double T = t1 - t2;
      if (p && (std::abs(T - *p) < r || std::abs(T + *p) < r)) return 0.0;
      return detail::oracle_eval(spec, opt.second, t2 - opt.shift) * kernel(T);
    };
    std::vector<double> pts = kinks;
    pts.push_back(t1);
    if (p) {
      for (double s : {-*p, *p}) {
        pts.push_back(t1 - s - r);
        pts.push_back(t1 - s + r);
      }
    }
    return detail::integrate_line(g, detail::clip(pts, sb), inner_opt);
  };
  auto outer = [&](double t1) {
    const double w = detail::oracle_eval(spec, opt.first, t1 - opt.shift);
    return w == 0.0 ? 0.0 : w * inner(t1);
  };
  std::vector<double> pts = kinks;
  pts.push_back(opt.shift);
  if (p) {
    for (double k : kinks) {
      for (double s : {-*p, *p}) {
        for (double e : {-r, 0.0, r}) pts.push_back(k + s + e);
      }
    }
  }
  return detail::integrate_line(outer, detail::clip(pts, sa), outer_opt);
}

/// Excision radii for fit_regularized. The remainder is a series in
/// rho * tau_ref / p, so the base set {4, 2, 1, 0.5} x 1e-3 is shrunk until
/// the widest strip is at most 0.04 p.
template <EvenKernel K>
std::vector<double> fit_rhos(const SwitchingSpec& spec, const K& kernel) {
  std::vector<double> r{4e-3, 2e-3, 1e-3, 5e-4};
  if (auto pl = kernel.pole()) {
    const double s = std::min(1.0, 10.0 * pl->location / spec.reference_time());
    for (double& x : r) x *= s;
  }
  return r;
}

/// (A, B) from excised brute-force values at several rho.
template <EvenKernel K>
LaurentFit fit_regularized(const SwitchingSpec& spec, const K& kernel,
                           const std::vector<double>& rhos, const OracleOptions& opt = {}) {
  if (rhos.size() < 2) throw Error(ErrorCode::IllConditionedFit, "need at least two rho values");
  std::vector<double> values(rhos.size());
  const unsigned workers = std::min<unsigned>(oracle_threads(opt.threads), rhos.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < rhos.size(); ++i) {
      values[i] = brute_double_integral(spec, kernel, rhos[i], opt);
    }
  } else {
    for (std::size_t start = 0; start < rhos.size(); start += workers) {
      std::vector<std::future<double>> jobs;
      const std::size_t stop = std::min(rhos.size(), start + workers);
      for (std::size_t i = start; i < stop; ++i) {
        jobs.push_back(std::async(std::launch::async, [&, i] {
          return brute_double_integral(spec, kernel, rhos[i], opt);
        }));
      }
      for (std::size_t i = start; i < stop; ++i) values[i] = jobs[i - start].get();
    }
  }
  return fit_laurent(rhos, values);
}

/// Numerical Re of the contour integral of (1 - xi z)/(z^2 - sigma^2)^order
/// over the half circle sigma + rho e^{+-i theta}, theta in [0, pi].
inline double semicircle_contour(double sigma, double xi, int order, double rho, bool upper = true) {
  const double sgn = upper ? 1.0 : -1.0;
  auto f = [&](double th) {
    const std::complex<double> e = std::polar(1.0, sgn * th);
    const std::complex<double> z = sigma + rho * e;
    const std::complex<double> dz = std::complex<double>(0.0, sgn) * rho * e;
    std::complex<double> den = z * z - sigma * sigma;
    den = order == 2 ? den * den : den * den * den;
    return std::real((1.0 - xi * z) / den * dz);
  };
  return integrate(f, 0.0, pi, QuadOptions{1e-13, 1e-16, 4000, 1.0}).value;
}

}  // namespace vswitch
