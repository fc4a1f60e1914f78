#pragma once

// Shared domain types for the switched-measurement dispersion library.
//
// Units: natural units c = hbar = 1. Distances are stored as times (light
// travel time), so the probe distance z is directly comparable with the
// measurement durations.

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vswitch {

enum class ErrorCode {
  NonPositiveMass,
  NonPositiveDistance,
  NonFiniteCharge,
  NonPositiveInput,
  InconsistentScales,
  VariantScaleMismatch,
  UnsupportedVariant,
  OnLightConeSingularity,
  LightConeCoincidence,
  ShortMeasurementBranch,
  PoleOutsideInterval,
  ExcisionTooWide,
  NonPositiveSigma,
  SigmaOutOfRange,
  MissingCutoffData,
  BudgetExceeded,
  ExcisionCoversSupport,
  IllConditionedFit,
  EmptyGrid,
  ConfigError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveMass: return "NonPositiveMass";
    case ErrorCode::NonPositiveDistance: return "NonPositiveDistance";
    case ErrorCode::NonFiniteCharge: return "NonFiniteCharge";
    case ErrorCode::NonPositiveInput: return "NonPositiveInput";
    case ErrorCode::InconsistentScales: return "InconsistentScales";
    case ErrorCode::VariantScaleMismatch: return "VariantScaleMismatch";
    case ErrorCode::UnsupportedVariant: return "UnsupportedVariant";
    case ErrorCode::OnLightConeSingularity: return "OnLightConeSingularity";
    case ErrorCode::LightConeCoincidence: return "LightConeCoincidence";
    case ErrorCode::ShortMeasurementBranch: return "ShortMeasurementBranch";
    case ErrorCode::PoleOutsideInterval: return "PoleOutsideInterval";
    case ErrorCode::ExcisionTooWide: return "ExcisionTooWide";
    case ErrorCode::NonPositiveSigma: return "NonPositiveSigma";
    case ErrorCode::SigmaOutOfRange: return "SigmaOutOfRange";
    case ErrorCode::MissingCutoffData: return "MissingCutoffData";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::ExcisionCoversSupport: return "ExcisionCoversSupport";
    case ErrorCode::IllConditionedFit: return "IllConditionedFit";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// True for errors caused by bad input (as opposed to numerical failure).
constexpr bool is_config_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::BudgetExceeded:
    case ErrorCode::IllConditionedFit:
      return false;
    default:
      return true;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline constexpr double pi = std::numbers::pi;

/// Classical charged probe near the mirror.
struct ProbeConfig {
  double charge_e = 1.0;
  double mass_m = 1.0;
  double distance_z = 1.0;

  /// e^2/m^2, the overall prefactor of every dispersion.
  double coupling() const { return charge_e * charge_e / (mass_m * mass_m); }
};

/// A dimensionless quantity that may be exactly +infinity.
///
/// Used for sigma2 = sigma1/mu, which is infinite in the sudden-switching
/// limit mu = 0. Never produced by a floating-point overflow.
class ExtendedReal {
 public:
  static constexpr ExtendedReal finite(double v) { return ExtendedReal(v, false); }
  static constexpr ExtendedReal infinity() { return ExtendedReal(0.0, true); }

  constexpr bool is_infinite() const { return infinite_; }
  /// Finite value; throws on the infinity marker.
  double value() const {
    if (infinite_) {
      throw Error(ErrorCode::NonPositiveInput, "value() on the infinity marker");
    }
    return value_;
  }

  friend constexpr bool operator==(const ExtendedReal&, const ExtendedReal&) = default;

 private:
  constexpr ExtendedReal(double v, bool inf) : value_(v), infinite_(inf) {}
  double value_;
  bool infinite_;
};

/// Time scales of a Lorentz-plateau style measurement.
///
/// Only (tau1, tau2, z) are stored. mu, sigma1 and sigma2 are recomputed on
/// every call so that they can never drift from the primary parameters.
class TimeScales {
 public:
  double tau1() const { return tau1_; }
  double tau2() const { return tau2_; }
  double distance_z() const { return z_; }

  /// Switching-duration parameter tau2 / (pi tau1).
  double mu() const { return tau2_ / (pi * tau1_); }
  /// 2z / tau1: position of the kernel pole in units of the plateau length.
  double sigma1() const { return 2.0 * z_ / tau1_; }
  /// sigma1 / mu, or the infinity marker when mu = 0.
  ExtendedReal sigma2() const {
    if (tau2_ == 0.0) return ExtendedReal::infinity();
    return ExtendedReal::finite(sigma1() / mu());
  }

  friend TimeScales derive_scales(double tau1, double tau2, double z);

 private:
  TimeScales(double tau1, double tau2, double z) : tau1_(tau1), tau2_(tau2), z_(z) {}
  double tau1_;
  double tau2_;
  double z_;
};

inline TimeScales derive_scales(double tau1, double tau2, double z) {
  if (!(tau1 > 0.0) || !std::isfinite(tau1)) {
    throw Error(ErrorCode::NonPositiveInput, "tau1 must be positive and finite");
  }
  if (!(tau2 >= 0.0) || !std::isfinite(tau2)) {
    throw Error(ErrorCode::NonPositiveInput, "tau2 must be non-negative and finite");
  }
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw Error(ErrorCode::NonPositiveInput, "z must be positive and finite");
  }
  return TimeScales(tau1, tau2, z);
}

enum class Variant {
  Step,
  Lorentzian,
  LorentzPlateau,
  VariantA,
  VariantAPrime,
  VariantB,
  VariantBPrime,
  VariantC,
};

constexpr std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Step: return "step";
    case Variant::Lorentzian: return "lorentzian";
    case Variant::LorentzPlateau: return "lorentz-plateau";
    case Variant::VariantA: return "A";
    case Variant::VariantAPrime: return "A'";
    case Variant::VariantB: return "B";
    case Variant::VariantBPrime: return "B'";
    case Variant::VariantC: return "C";
  }
  return "?";
}

/// Parses the names accepted on the command line and in config files.
inline std::optional<Variant> parse_variant(std::string_view name) {
  if (name == "step") return Variant::Step;
  if (name == "lorentzian") return Variant::Lorentzian;
  if (name == "lorentz-plateau" || name == "plateau") return Variant::LorentzPlateau;
  if (name == "A" || name == "a") return Variant::VariantA;
  if (name == "A'" || name == "a'" || name == "A-prime" || name == "a-prime") return Variant::VariantAPrime;
  if (name == "B" || name == "b") return Variant::VariantB;
  if (name == "B'" || name == "b'" || name == "B-prime" || name == "b-prime") return Variant::VariantBPrime;
  if (name == "C" || name == "c") return Variant::VariantC;
  return std::nullopt;
}

/// Switching function family member with its time-scale parameters.
///
/// tau1 is the plateau duration (and the offset of the tails for the
/// tail-only variants); tau2 = pi * mu * tau1 is the total tail weight.
/// A Lorentzian has tau1 = 0 and stores its scale as tau2 = pi * scale.
struct SwitchingSpec {
  Variant variant = Variant::Step;
  double tau1 = 1.0;
  double tau2 = 0.0;

  static SwitchingSpec step(double tau) { return {Variant::Step, tau, 0.0}; }
  static SwitchingSpec lorentzian(double scale) { return {Variant::Lorentzian, 0.0, pi * scale}; }
  static SwitchingSpec lorentz_plateau(double tau1, double tau2) {
    return {Variant::LorentzPlateau, tau1, tau2};
  }
  static SwitchingSpec with_mu(Variant v, double tau1, double mu) {
    return {v, tau1, pi * mu * tau1};
  }

  double mu() const { return tau1 > 0.0 ? tau2 / (pi * tau1) : 0.0; }
  /// Scale of the pure Lorentzian, tau2 / pi.
  double lorentzian_scale() const { return tau2 / pi; }
  /// Time unit used to make the excision radius rho dimensionless.
  double reference_time() const {
    return variant == Variant::Lorentzian ? lorentzian_scale() : tau1;
  }
  bool has_plateau() const {
    return variant == Variant::Step || variant == Variant::LorentzPlateau ||
           variant == Variant::VariantA || variant == Variant::VariantAPrime;
  }
};

/// A / rho + B: a quantity whose value depends on the excision radius rho.
///
/// rho is the half-width of the excised window around each light-cone pole,
/// measured in units of the spec's reference time.
struct RegularizedValue {
  double pole_coeff = 0.0;
  double finite_part = 0.0;
  /// The rho the value was obtained at; empty means symbolic in rho.
  std::optional<double> rho_used;

  static RegularizedValue regular(double v) { return {0.0, v, std::nullopt}; }
  bool is_regular() const { return pole_coeff == 0.0; }

  RegularizedValue& operator+=(const RegularizedValue& o) {
    pole_coeff += o.pole_coeff;
    finite_part += o.finite_part;
    if (!rho_used) rho_used = o.rho_used;
    return *this;
  }
  friend RegularizedValue operator+(RegularizedValue a, const RegularizedValue& b) { return a += b; }
  friend RegularizedValue operator*(double s, RegularizedValue v) {
    v.pole_coeff *= s;
    v.finite_part *= s;
    return v;
  }
  friend RegularizedValue operator-(RegularizedValue a, const RegularizedValue& b) {
    return a += (-1.0 * b);
  }
};

enum class Regularization { DropDivergence, ComptonCutoff };

constexpr std::string_view to_string(Regularization m) {
  return m == Regularization::DropDivergence ? "drop" : "compton";
}

enum class Component { Z, X, Y };

constexpr std::string_view to_string(Component c) {
  switch (c) {
    case Component::Z: return "z";
    case Component::X: return "x";
    case Component::Y: return "y";
  }
  return "?";
}

/// Per-term breakdown of a dispersion (units of velocity squared).
struct DispersionBreakdown {
  RegularizedValue m_term;
  RegularizedValue s_term;
  RegularizedValue ms_term;
  double total = 0.0;
  Regularization mode = Regularization::DropDivergence;
  Component component = Component::Z;
};

enum class CaseId { I, II, III, IV, ShortM, ShortS };
enum class DominantTerm { M, S, MS };
enum class Sign { Positive, Negative };

constexpr std::string_view to_string(CaseId c) {
  switch (c) {
    case CaseId::I: return "I";
    case CaseId::II: return "II";
    case CaseId::III: return "III";
    case CaseId::IV: return "IV";
    case CaseId::ShortM: return "ShortM";
    case CaseId::ShortS: return "ShortS";
  }
  return "?";
}
constexpr std::string_view to_string(DominantTerm d) {
  switch (d) {
    case DominantTerm::M: return "M";
    case DominantTerm::S: return "S";
    case DominantTerm::MS: return "MS";
  }
  return "?";
}

struct RegimeCase {
  CaseId case_id = CaseId::I;
  DominantTerm dominant_term = DominantTerm::M;
  Sign sign = Sign::Positive;
  /// False when the parameters sit in a gap between the documented
  /// inequalities and the nearest case was chosen.
  bool strict = true;
};

/// Checks the invariants of a probe/switching pair. Returns them unchanged.
inline std::pair<ProbeConfig, SwitchingSpec> validate(const ProbeConfig& config,
                                                      const SwitchingSpec& spec) {
  if (!std::isfinite(config.charge_e)) {
    throw Error(ErrorCode::NonFiniteCharge, "charge must be finite");
  }
  if (!(config.mass_m > 0.0) || !std::isfinite(config.mass_m)) {
    throw Error(ErrorCode::NonPositiveMass, "mass must be positive");
  }
  if (!(config.distance_z > 0.0) || !std::isfinite(config.distance_z)) {
    throw Error(ErrorCode::NonPositiveDistance, "distance must be positive");
  }
  if (!std::isfinite(spec.tau1) || !std::isfinite(spec.tau2) || spec.tau1 < 0.0 ||
      spec.tau2 < 0.0) {
    throw Error(ErrorCode::InconsistentScales, "time scales must be finite and non-negative");
  }
  switch (spec.variant) {
    case Variant::Step:
      if (!(spec.tau1 > 0.0) || spec.tau2 != 0.0) {
        throw Error(ErrorCode::VariantScaleMismatch, "step needs tau1 > 0 and mu = 0");
      }
      break;
    case Variant::Lorentzian:
      if (spec.tau1 != 0.0 || !(spec.tau2 > 0.0)) {
        throw Error(ErrorCode::VariantScaleMismatch, "lorentzian needs tau1 = 0 and tau2 > 0");
      }
      break;
    default:
      if (!(spec.tau1 > 0.0) || !(spec.tau2 > 0.0)) {
        throw Error(ErrorCode::VariantScaleMismatch,
                    std::string(to_string(spec.variant)) + " needs tau1 > 0 and mu > 0");
      }
      break;
  }
  return {config, spec};
}

/// As above, additionally checking caller-held derived scales against the pair.
inline std::pair<ProbeConfig, SwitchingSpec> validate(const ProbeConfig& config,
                                                      const SwitchingSpec& spec,
                                                      const TimeScales& scales) {
  auto checked = validate(config, spec);
  if (scales.tau1() != spec.tau1 || scales.tau2() != spec.tau2 ||
      scales.distance_z() != config.distance_z) {
    throw Error(ErrorCode::InconsistentScales, "derived scales do not match (tau1, tau2, z)");
  }
  return checked;
}

}  // namespace vswitch
