#pragma once

// Globally adaptive Gauss-Kronrod integration.
//
// Panels use Boost's 21-point Kronrod rule (embedded 10-point Gauss error
// estimate). The driver keeps every panel in a max-heap keyed by error and
// bisects the worst one until the summed error drops below
// max(rel_tol * |I|, abs_floor * L1), where L1 is the integral of |f|.
// The floor is taken relative to L1 so that it is independent of the
// physical units of the integrand.

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "vswitch/core.hpp"

namespace vswitch {

struct QuadOptions {
  double rel_tol = 1e-10;
  double abs_floor = 1e-14;
  int max_panels = 20000;
  /// Length scale s of the map x = a + s u/(1-u) used for [a, inf).
  double tail_scale = 1.0;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
  int panels = 0;
};

namespace detail {

using GK21 = boost::math::quadrature::gauss_kronrod<double, 21>;

struct Panel {
  double a;
  double b;
  double value;
  double error;
  double l1;
  bool operator<(const Panel& o) const { return error < o.error; }
};

/// One 21-point Kronrod panel with its embedded 10-point Gauss estimate.
/// Boost's own integrate() floors the error at 2 eps |K| in [-1,1] units,
/// which does not shrink with the panel, so the rule is applied directly.
template <class F>
Panel gk_panel(const F& f, double a, double b) {
  const auto& x = GK21::abscissa();
  const auto& wk = GK21::weights();
  const auto& wg = boost::math::quadrature::gauss<double, 10>::weights();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double f0 = f(c);
  double k = wk[0] * f0;
  double l1 = wk[0] * std::abs(f0);
  double g = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double fl = f(c - h * x[i]);
    const double fr = f(c + h * x[i]);
    k += wk[i] * (fl + fr);
    l1 += wk[i] * (std::abs(fl) + std::abs(fr));
    // Gauss nodes are the odd-indexed Kronrod nodes.
    if (i % 2 == 1) g += wg[i / 2] * (fl + fr);
  }
  const double err = std::max(std::abs(k - g), 2.0 * std::numeric_limits<double>::epsilon() * l1);
  return {a, b, h * k, h * err, h * l1};
}

}  // namespace detail

/// Integrates f over the finite breakpoint-delimited intervals [p0,p1],[p1,p2],...
///
/// The last breakpoint may be +infinity; that piece is mapped onto [0,1).
template <class F>
QuadResult integrate_breaks(const F& f, std::vector<double> breaks,
                            const QuadOptions& opt = {}) {
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  QuadResult out;
  if (breaks.size() < 2) return out;

  const bool infinite_tail = std::isinf(breaks.back());
  const double tail_a = infinite_tail ? breaks[breaks.size() - 2] : 0.0;
  const double s = opt.tail_scale;
  auto mapped = [&](double u) {
    const double om = 1.0 - u;
    const double x = tail_a + s * u / om;
    return f(x) * s / (om * om);
  };

  auto eval_panel = [&](double a, double b, bool tail) {
    return tail ? detail::gk_panel(mapped, a, b) : detail::gk_panel(f, a, b);
  };
  // Tail panels live in u-coordinates.
  struct Tagged {
    detail::Panel p;
    bool tail;
    bool operator<(const Tagged& o) const { return p.error < o.p.error; }
  };
  std::priority_queue<Tagged> work;
  double total = 0.0;
  double total_err = 0.0;
  double total_l1 = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const bool tail = infinite_tail && i + 2 == breaks.size();
    const double a = tail ? 0.0 : breaks[i];
    const double b = tail ? 1.0 : breaks[i + 1];
    if (!(b > a)) continue;
    Tagged t{eval_panel(a, b, tail), tail};
    total += t.p.value;
    total_err += t.p.error;
    total_l1 += t.p.l1;
    work.push(t);
  }
  int panels = static_cast<int>(work.size());
  auto target = [&] {
    return std::max(opt.rel_tol * std::abs(total), opt.abs_floor * total_l1);
  };
  while (!work.empty() && total_err > target()) {
    Tagged worst = work.top();
    const double mid = 0.5 * (worst.p.a + worst.p.b);
    if (!(mid > worst.p.a && mid < worst.p.b) || panels >= opt.max_panels) {
      break;
    }
    work.pop();
    Tagged left{eval_panel(worst.p.a, mid, worst.tail), worst.tail};
    Tagged right{eval_panel(mid, worst.p.b, worst.tail), worst.tail};
    total += left.p.value + right.p.value - worst.p.value;
    total_err += left.p.error + right.p.error - worst.p.error;
    total_l1 += left.p.l1 + right.p.l1 - worst.p.l1;
    work.push(left);
    work.push(right);
    ++panels;
  }
  // Re-sum in a fixed order so the result does not carry the running
  // updates' rounding history.
  std::vector<detail::Panel> all;
  all.reserve(work.size());
  while (!work.empty()) {
    all.push_back(work.top().p);
    work.pop();
  }
  std::sort(all.begin(), all.end(), [](const detail::Panel& x, const detail::Panel& y) {
    return x.a < y.a;
  });
  out = {};
  for (const auto& p : all) {
    out.value += p.value;
    out.error += p.error;
    out.l1 += p.l1;
  }
  out.panels = panels;
  if (out.error > 1e3 * std::max(opt.rel_tol * std::abs(out.value), opt.abs_floor * out.l1) &&
      panels >= opt.max_panels) {
    throw Error(ErrorCode::BudgetExceeded,
                "quadrature did not converge within " + std::to_string(opt.max_panels) + " panels");
  }
  return out;
}

template <class F>
QuadResult integrate(const F& f, double a, double b, const QuadOptions& opt = {}) {
  return integrate_breaks(f, {a, b}, opt);
}

/// Adds decade-spaced points between consecutive positive breakpoints so
/// that integrands with features on very different scales start well
/// resolved. Intervals starting at or below zero are left alone; callers put
/// their small-scale features in the breakpoint list themselves.
inline std::vector<double> refine_decades(std::vector<double> breaks) {
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  std::vector<double> out;
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    out.push_back(breaks[i]);
    if (i + 1 == breaks.size()) break;
    const double a = breaks[i];
    const double b = breaks[i + 1];
    if (!(a > 0.0) || std::isinf(b)) continue;
    for (double x = a * 10.0; x < b / 1.5; x *= 10.0) out.push_back(x);
  }
  return out;
}

}  // namespace vswitch
