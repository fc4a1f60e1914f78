#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "vswitch/dispersion.hpp"
#include "vswitch/oracle.hpp"

using namespace vswitch;

namespace {

const ProbeConfig unit{1.0, 1.0, 1.0};

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no vswitch::Error thrown";
  return ErrorCode::ConfigError;
}

}  // namespace

TEST(Step, Examples) {
  EXPECT_NEAR(dvz_step(unit, 100.0), 100.0 / (16.0 * pi * pi) * std::log(102.0 / 98.0), 1e-16);
  EXPECT_NEAR(dvz_step(unit, 100.0), 0.0253336740942, 1e-12);
  EXPECT_NEAR(dvz_step(unit, 1.0), std::log(3.0) / (16.0 * pi * pi), 1e-16);
  EXPECT_EQ(code_of([] { dvz_step(unit, 2.0); }), ErrorCode::LightConeCoincidence);
  EXPECT_EQ(code_of([] { dvxy_step(unit, 2.0); }), ErrorCode::LightConeCoincidence);
  EXPECT_EQ(code_of([] { dvz_step(unit, 0.0); }), ErrorCode::NonPositiveInput);
}

TEST(Step, ZMatchesPlateauRegion) {
  const WeightedKernel k(KernelComponent::ZZ, unit);
  for (double tau : {0.5, 1.0, 3.0, 100.0}) {
    EXPECT_NEAR(integral_M(k, tau).finite_part, dvz_step(unit, tau), 1e-10 * dvz_step(unit, tau));
  }
}

TEST(Step, XYMatchesPlateauRegion) {
  const WeightedKernel k(KernelComponent::XX, unit);
  for (double tau : {0.5, 1.0, 3.0, 100.0}) {
    // The closed form is a difference of two terms of size tau^2/(8 pi^2 z^2 |tau^2 - 4z^2|)
    // that nearly cancel for tau >> 2z; the tolerance is set on that scale.
    const double closed = dvxy_step(unit, tau);
    const double scale = tau * tau / (8.0 * pi * pi * std::abs(tau * tau - 4.0));
    EXPECT_NEAR(integral_M(k, tau).finite_part, closed, 1e-9 * scale) << tau;
  }
}

TEST(Step, XYAgainstOracle) {
  const WeightedKernel k(KernelComponent::XX, unit);
  const double tau = 1.0;
  EXPECT_NEAR(brute_double_integral(SwitchingSpec::step(tau), k, std::nullopt), dvxy_step(unit, tau),
              1e-10 * std::abs(dvxy_step(unit, tau)));
}

TEST(Step, XYLongMeasurementAgainstOracleFit) {
  // The finite part is a small residue of cancelling terms; 1e-3 is what
  // the excised fit resolves.
  const WeightedKernel k(KernelComponent::XX, unit);
  const auto spec = SwitchingSpec::step(100.0);
  OracleOptions tight;
  tight.inner.rel_tol = 1e-12;
  tight.outer.rel_tol = 1e-11;
  const auto fit = fit_regularized(spec, k, fit_rhos(spec, k), tight);
  const double closed = dvxy_step(unit, 100.0);
  EXPECT_NEAR(fit.value.finite_part, closed, 1e-3 * std::abs(closed));
}

TEST(Step, SignStructure) {
  for (double tau : {0.1, 1.0, 1.99, 2.01, 10.0, 1e4}) EXPECT_GT(dvz_step(unit, tau), 0.0) << tau;
}

TEST(Lorentzian, Examples) {
  EXPECT_NEAR(dvz_lorentzian(unit, 1.0), 1.0 / (64.0 * pi * pi), 1e-17);
  EXPECT_NEAR(dvz_lorentzian(unit, 1.0), 1.58314e-3, 1e-8);
  EXPECT_EQ(dvxy_lorentzian(unit, 1.0), 0.0);
  EXPECT_GT(dvxy_lorentzian(unit, 0.5), 0.0);
  EXPECT_LT(dvxy_lorentzian(unit, 2.0), 0.0);
}

TEST(Lorentzian, FarFromMirror) {
  const double tau = 1e-2;
  const ProbeConfig far{1.0, 1.0, 10.0};
  const double lead = tau * tau / (16.0 * pi * pi * std::pow(far.distance_z, 4));
  EXPECT_NEAR(dvz_lorentzian(far, tau) / lead, 1.0, 1e-5);
  // Quadrupling tau multiplies the far-field value by 16.
  EXPECT_NEAR(dvz_lorentzian(far, 4.0 * tau) / dvz_lorentzian(far, tau), 16.0, 1e-3);
}

TEST(Lorentzian, AgainstOracle) {
  const WeightedKernel k(KernelComponent::ZZ, unit);
  const auto fit = fit_regularized(SwitchingSpec::lorentzian(1.0), k, {4e-3, 2e-3, 1e-3, 5e-4});
  EXPECT_NEAR(fit.value.finite_part, dvz_lorentzian(unit, 1.0), 1e-6 * dvz_lorentzian(unit, 1.0));
}

TEST(Lorentzian, XYAgainstOracle) {
  const WeightedKernel k(KernelComponent::XX, unit);
  for (double tau : {0.5, 2.0}) {
    const auto spec = SwitchingSpec::lorentzian(tau);
    const auto fit = fit_regularized(spec, k, fit_rhos(spec, k));
    const double closed = dvxy_lorentzian(unit, tau);
    EXPECT_NEAR(fit.value.finite_part, closed, 1e-5 * std::abs(closed)) << tau;
  }
}

TEST(Plateau, SuddenLimitIsStep) {
  const auto d = dvz_plateau(unit, 100.0, 0.0);
  EXPECT_EQ(d.s_term.finite_part, 0.0);
  EXPECT_EQ(d.ms_term.finite_part, 0.0);
  EXPECT_NEAR(d.total, dvz_step(unit, 100.0), 1e-10 * d.total);
}

TEST(Plateau, Branches) {
  EXPECT_EQ(code_of([] { dvz_plateau(unit, 1.0, 1.0); }), ErrorCode::ShortMeasurementBranch);
  EXPECT_EQ(code_of([] { dvz_plateau(unit, 2.0, 1.0); }), ErrorCode::LightConeCoincidence);
  EXPECT_EQ(code_of([] { dvz_plateau_short(unit, 3.0, 1.0); }), ErrorCode::InconsistentScales);
  const auto a = dvz_plateau_any(unit, 1.0, 1.0);
  const auto b = dvz_plateau_short(unit, 1.0, 1.0);
  EXPECT_EQ(a.total, b.total);
  const auto s = dvz_plateau_short(unit, 1.0, 0.1 * pi);
  EXPECT_EQ(s.m_term.pole_coeff, 0.0);
  EXPECT_NEAR(s.m_term.finite_part, dvz_step(unit, 1.0), 1e-15);
  EXPECT_NEAR(s.s_term.finite_part, s_term_closed(unit, 1.0, 0.1 * pi), 1e-10 * s.s_term.finite_part);
}

TEST(Plateau, TailsLowerTheLongMeasurement) {
  double prev = dvz_plateau(unit, 100.0, 0.0).total;
  for (double tau2 : {0.5, 1.0, 2.0, 5.0, 10.0}) {
    const double v = dvz_plateau(unit, 100.0, tau2).total;
    EXPECT_LT(v, prev) << tau2;
    prev = v;
  }
}

TEST(Plateau, ComptonAddsPoleTerm) {
  for (double tau2 : {2.0, 20.0}) {
    const auto drop = dvz_plateau(unit, 100.0, tau2);
    const auto comp = dvz_plateau(unit, 100.0, tau2, Regularization::ComptonCutoff);
    const double a = drop.m_term.pole_coeff + drop.s_term.pole_coeff + drop.ms_term.pole_coeff;
    ASSERT_GT(a, 0.0);
    EXPECT_GE(comp.total, drop.total);
    EXPECT_NEAR(comp.total - drop.total, a * 100.0, 1e-9 * a * 100.0);
  }
}

TEST(Plateau, ChargeScaling) {
  const ProbeConfig neutral{0.0, 1.0, 1.0};
  EXPECT_EQ(dvz_plateau(neutral, 100.0, 2.0).total, 0.0);
  EXPECT_EQ(dvz_variant(Variant::VariantC, neutral, 100.0, 2.0).total, 0.0);
  const ProbeConfig twice{2.0, 1.0, 1.0};
  const double one = dvz_plateau(unit, 100.0, 2.0).total;
  EXPECT_NEAR(dvz_plateau(twice, 100.0, 2.0).total, 4.0 * one, 1e-12 * std::abs(one));
  EXPECT_NEAR(dvz_step(twice, 3.0), 4.0 * dvz_step(unit, 3.0), 1e-16);
}

TEST(Variants, MirrorsAgree) {
  for (double tau2 : {2.0, 20.0}) {
    EXPECT_EQ(dvz_variant(Variant::VariantA, unit, 100.0, tau2).total,
              dvz_variant(Variant::VariantAPrime, unit, 100.0, tau2).total);
    EXPECT_EQ(dvz_variant(Variant::VariantB, unit, 100.0, tau2).total,
              dvz_variant(Variant::VariantBPrime, unit, 100.0, tau2).total);
  }
}

TEST(Variants, BothTailsExceedTwiceOne) {
  for (double tau2 : {2.0, 20.0, 200.0}) {
    const double b = dvz_variant(Variant::VariantB, unit, 100.0, tau2).total;
    const double c = dvz_variant(Variant::VariantC, unit, 100.0, tau2).total;
    EXPECT_GT(b, 0.0);
    EXPECT_GT(c, 2.0 * b) << tau2;
  }
}

TEST(Variants, OneTailAgainstOracle) {
  // Variant B: one tail only, so the oracle works on the LeftTail piece.
  const WeightedKernel k(KernelComponent::ZZ, unit);
  const double tau1 = 10.0, tau2 = 20.0;
  OracleOptions oo;
  oo.first = OraclePart::LeftTail;
  oo.second = OraclePart::LeftTail;
  const auto fit = fit_regularized(SwitchingSpec::lorentz_plateau(tau1, tau2), k,
                                   {4e-3, 2e-3, 1e-3, 5e-4}, oo);
  const auto b = dvz_variant(Variant::VariantB, unit, tau1, tau2);
  EXPECT_NEAR(b.s_term.finite_part, fit.value.finite_part, 1e-6 * std::abs(b.s_term.finite_part));
  EXPECT_NEAR(b.s_term.pole_coeff, fit.value.pole_coeff, 1e-6 * std::abs(b.s_term.pole_coeff));
}

TEST(Variants, Rejects) {
  EXPECT_EQ(code_of([] { dvz_variant(Variant::Step, unit, 100.0, 2.0); }),
            ErrorCode::VariantScaleMismatch);
  EXPECT_EQ(code_of([] { dvz_variant(Variant::LorentzPlateau, unit, 100.0, 2.0); }),
            ErrorCode::UnsupportedVariant);
}

TEST(Regime, Examples) {
  EXPECT_EQ(classify_regime(unit, 100.0, 0.1).case_id, CaseId::I);
  EXPECT_EQ(classify_regime(unit, 100.0, 2.0).case_id, CaseId::II);
  const auto iii = classify_regime(unit, 100.0, 2.5e5);
  EXPECT_EQ(iii.case_id, CaseId::III);
  EXPECT_EQ(iii.dominant_term, DominantTerm::S);
  const auto iv = classify_regime(unit, 100.0, 1e8);
  EXPECT_EQ(iv.case_id, CaseId::IV);
  EXPECT_EQ(iv.sign, Sign::Negative);
  EXPECT_EQ(classify_regime(unit, 1.0, 0.3).case_id, CaseId::ShortM);
  EXPECT_EQ(classify_regime(unit, 1.0, 10.0).case_id, CaseId::ShortS);
}

TEST(Regime, StrictFlag) {
  EXPECT_TRUE(classify_regime(unit, 100.0, 0.1).strict);
  EXPECT_FALSE(classify_regime(unit, 10.0, 0.1).strict);
}

TEST(Validity, ElectronBound) {
  const ProbeConfig electron{std::sqrt(fine_structure), 1.0, 1e3};
  const double b = validity_bound(electron);
  EXPECT_NEAR(b, std::cbrt(3.0 * pi * pi / (2.0 * fine_structure)) * 100.0, 1e-9 * b);
  EXPECT_NEAR(b / 1270.0, 1.0, 1e-2);
}

TEST(Validity, Examples) {
  const auto ok = validity_check(unit, 10.0, 1.0, 0.0);
  EXPECT_TRUE(ok.valid);
  EXPECT_EQ(ok.delta_t, 10.0);
  const auto bad = validity_check(unit, 10.0, 1.0, 1.0);
  EXPECT_FALSE(bad.valid);
  EXPECT_DOUBLE_EQ(bad.displacement, 10.0);
  EXPECT_TRUE(std::isinf(validity_bound({0.0, 1.0, 1.0})));
}

TEST(Brackets, Arithmetic) {
  const auto d = dvz_plateau(unit, 100.0, 20.0);
  const auto b = ms_bracket(unit, 100.0, 20.0, d);
  const double mu = 20.0 / (pi * 100.0);
  EXPECT_DOUBLE_EQ(b.estimate, -2.0 * mu / (3.0 * pi * 1e4));
  EXPECT_DOUBLE_EQ(b.actual, d.ms_term.finite_part);
  EXPECT_DOUBLE_EQ(b.fitted_o1, b.actual / b.estimate);
  const auto r = regime_bracket(unit, 100.0, 0.1, dvz_plateau(unit, 100.0, 0.1));
  EXPECT_EQ(r.name, "total/I");
  EXPECT_NEAR(r.fitted_o1, 1.0, 1e-2);
}

TEST(Brackets, VariantCEnhancementIsReported) {
  const auto d = dvz_plateau(unit, 100.0, 20.0);
  const auto c = dvz_variant(Variant::VariantC, unit, 100.0, 20.0);
  const double z = variant_c_enhancement(unit, 100.0, 20.0, c.total, d.s_term.finite_part);
  EXPECT_TRUE(std::isfinite(z));
  const double mu = 20.0 / (pi * 100.0);
  EXPECT_NEAR(d.s_term.finite_part + z * 4.0 * mu / (3.0 * pi * pi * 1e4), c.total,
              1e-12 * std::abs(c.total));
}
