#pragma once

// Renormalized field correlation kernels near a perfect mirror.
//
// T is the time separation t' - t''. Both components have their light-cone
// poles at |T| = 2z, where the reflected signal arrives.

#include <cmath>
#include <concepts>
#include <optional>
#include <utility>

#include "vswitch/core.hpp"

namespace vswitch {

enum class KernelComponent { ZZ, XX };

/// Laurent data of an even kernel at its positive pole T = p:
///   K(T) = k3/(T-p)^3 + k2/(T-p)^2 + k1/(T-p) + regular.
struct PoleLaurent {
  double location = 0.0;
  double k3 = 0.0;
  double k2 = 0.0;
  double k1 = 0.0;
};

/// An even kernel, optionally with a single pair of poles at T = +-p.
template <class K>
concept EvenKernel = requires(const K& k, double T) {
  { k(T) } -> std::convertible_to<double>;
  { k.pole() } -> std::convertible_to<std::optional<PoleLaurent>>;
};

struct Kernel {
  KernelComponent component = KernelComponent::ZZ;
  ProbeConfig probe;
};

/// Bare kernel, without the e^2/m^2 factor.
inline double kernel_eval(const Kernel& k, double T) {
  const double p = 2.0 * k.probe.distance_z;
  const double T2 = T * T;
  const double p2 = p * p;
  if (std::abs(T) == p) {
    throw Error(ErrorCode::OnLightConeSingularity, "kernel evaluated at |T| = 2z");
  }
  const double d = T2 - p2;
  if (k.component == KernelComponent::ZZ) return 1.0 / (pi * pi * d * d);
  return -(T2 + p2) / (pi * pi * d * d * d);
}

/// Bare kernel at T = 2z + delta, without forming T first.
inline double kernel_near_pole(const Kernel& k, double delta) {
  const double p = 2.0 * k.probe.distance_z;
  if (delta == 0.0) {
    throw Error(ErrorCode::OnLightConeSingularity, "kernel evaluated at |T| = 2z");
  }
  const double d = delta * (2.0 * p + delta);
  if (k.component == KernelComponent::ZZ) return 1.0 / (pi * pi * d * d);
  const double T = p + delta;
  return -(T * T + p * p) / (pi * pi * d * d * d);
}

/// Laurent coefficients of the bare kernel at T = 2z.
inline PoleLaurent kernel_laurent(const Kernel& k) {
  const double p = 2.0 * k.probe.distance_z;
  const double c = 1.0 / (pi * pi);
  if (k.component == KernelComponent::ZZ) {
    return {p, 0.0, c / (4.0 * p * p), -c / (4.0 * p * p * p)};
  }
  return {p, -c / (4.0 * p), c / (8.0 * p * p), -c / (8.0 * p * p * p)};
}

/// The kernel scaled by e^2/m^2, the form entering every dispersion.
class WeightedKernel {
 public:
  explicit WeightedKernel(Kernel k) : k_(k), coupling_(k.probe.coupling()) {}
  WeightedKernel(KernelComponent c, const ProbeConfig& probe)
      : WeightedKernel(Kernel{c, probe}) {}

  double operator()(double T) const { return coupling_ * kernel_eval(k_, T); }

  std::optional<PoleLaurent> pole() const {
    auto l = kernel_laurent(k_);
    l.k3 *= coupling_;
    l.k2 *= coupling_;
    l.k1 *= coupling_;
    return l;
  }

  /// K(p + delta) with the offset from the pole kept exact.
  double near_pole(double delta) const { return coupling_ * kernel_near_pole(k_, delta); }

  const Kernel& kernel() const { return k_; }
  double coupling() const { return coupling_; }

 private:
  Kernel k_;
  double coupling_;
};

inline WeightedKernel weighted_kernel(const Kernel& k) { return WeightedKernel(k); }

/// ZZ kernel in the plateau variable x = T/tau, sigma1 = 2z/tau.
inline double zz_x_form(const ProbeConfig& probe, double tau, double x) {
  const double s1 = 2.0 * probe.distance_z / tau;
  const double d = x * x - s1 * s1;
  return probe.coupling() / (pi * pi * std::pow(tau, 4)) / (d * d);
}

/// ZZ kernel in the tail variable chi = T/(mu tau), sigma2 = sigma1/mu.
inline double zz_chi_form(const ProbeConfig& probe, double tau, double mu, double chi) {
  const double s2 = 2.0 * probe.distance_z / (mu * tau);
  const double d = chi * chi - s2 * s2;
  return probe.coupling() / (pi * pi * std::pow(mu * tau, 4)) / (d * d);
}

/// Kernels that can be evaluated relative to their pole.
template <class K>
concept NearPoleKernel = EvenKernel<K> && requires(const K& k, double d) {
  { k.near_pole(d) } -> std::convertible_to<double>;
};

/// Wraps any even callable without poles as an EvenKernel.
template <class F>
class RegularKernel {
 public:
  explicit RegularKernel(F f) : f_(std::move(f)) {}
  double operator()(double T) const { return f_(T); }
  std::optional<PoleLaurent> pole() const { return std::nullopt; }

 private:
  F f_;
};

/// c/(T^2 + a^2)^2: bounded, even, decays like the physical kernels.
inline auto bounded_kernel(double c, double a) {
  return RegularKernel([c, a](double T) {
    const double d = T * T + a * a;
    return c / (d * d);
  });
}

}  // namespace vswitch
