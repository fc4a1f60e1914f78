#pragma once

// The switching-function family.
//
// Every plateau-bearing member uses the symmetric convention: the plateau
// occupies |t| <= tau1/2 and the Lorentzian tails are glued at the plateau
// edges with matching value and zero slope.

#include <cmath>
#include <vector>

#include "vswitch/core.hpp"

namespace vswitch {

/// Which piece of a switching function a time belongs to.
enum class SwitchPart { Plateau, LeftTail, RightTail };

namespace detail {

/// Half-Lorentzian tail at distance d >= 0 beyond a plateau edge.
inline double tail_shape(double d, double tau, double mu) {
  if (mu == 0.0) return 0.0;
  const double u = d / tau;
  return mu * mu / (u * u + mu * mu);
}

inline bool has_left_tail(Variant v) {
  return v == Variant::LorentzPlateau || v == Variant::VariantA || v == Variant::VariantB ||
         v == Variant::VariantC;
}
inline bool has_right_tail(Variant v) {
  return v == Variant::LorentzPlateau || v == Variant::VariantAPrime ||
         v == Variant::VariantBPrime || v == Variant::VariantC;
}
inline bool has_plateau_part(Variant v) {
  return v == Variant::Step || v == Variant::LorentzPlateau || v == Variant::VariantA ||
         v == Variant::VariantAPrime;
}

}  // namespace detail

/// Restriction of the switching function to one of its pieces.
///
/// The Lorentzian has no pieces; it is reported entirely as Plateau.
inline double eval_part(const SwitchingSpec& spec, SwitchPart part, double t) {
  if (spec.variant == Variant::Lorentzian) {
    if (part != SwitchPart::Plateau) return 0.0;
    const double s = spec.lorentzian_scale();
    return s * s / (pi * (t * t + s * s));
  }
  const double h = 0.5 * spec.tau1;
  const double mu = spec.mu();
  switch (part) {
    case SwitchPart::Plateau:
      return detail::has_plateau_part(spec.variant) && std::abs(t) <= h ? 1.0 : 0.0;
    case SwitchPart::LeftTail:
      return detail::has_left_tail(spec.variant) && t < -h
                 ? detail::tail_shape(-h - t, spec.tau1, mu)
                 : 0.0;
    case SwitchPart::RightTail:
      return detail::has_right_tail(spec.variant) && t > h
                 ? detail::tail_shape(t - h, spec.tau1, mu)
                 : 0.0;
  }
  return 0.0;
}

/// F(t) for any member of the family.
inline double eval_switch(const SwitchingSpec& spec, double t) {
  return eval_part(spec, SwitchPart::Plateau, t) + eval_part(spec, SwitchPart::LeftTail, t) +
         eval_part(spec, SwitchPart::RightTail, t);
}

/// Points where F or its derivative has a jump (plateau edges).
inline std::vector<double> switch_kinks(const SwitchingSpec& spec) {
  if (spec.variant == Variant::Lorentzian) return {};
  return {-0.5 * spec.tau1, 0.5 * spec.tau1};
}

/// Total weight carried by the tails; the whole area for a Lorentzian.
inline double tail_area(const SwitchingSpec& spec) {
  const double full = pi * spec.mu() * spec.tau1;
  switch (spec.variant) {
    case Variant::Step:
      throw Error(ErrorCode::UnsupportedVariant, "step function has no tails");
    case Variant::Lorentzian:
      return spec.lorentzian_scale();
    case Variant::LorentzPlateau:
    case Variant::VariantC:
      return full;
    case Variant::VariantA:
    case Variant::VariantAPrime:
    case Variant::VariantB:
    case Variant::VariantBPrime:
      return 0.5 * full;
  }
  return 0.0;
}

/// Weight carried by the flat part; the normalization for a Lorentzian.
inline double plateau_area(const SwitchingSpec& spec) {
  if (spec.variant == Variant::Lorentzian) return spec.lorentzian_scale();
  return detail::has_plateau_part(spec.variant) ? spec.tau1 : 0.0;
}

}  // namespace vswitch
