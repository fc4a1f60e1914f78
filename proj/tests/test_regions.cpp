#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "reference.hpp"
#include "vswitch/dispersion.hpp"
#include "vswitch/oracle.hpp"
#include "vswitch/regions.hpp"

using namespace vswitch;

namespace {

const ProbeConfig unit{1.0, 1.0, 1.0};

WeightedKernel zz() { return WeightedKernel(KernelComponent::ZZ, unit); }

auto constant_kernel(double c) {
  return RegularKernel([c](double) { return c; });
}

struct Point {
  double tau1;
  double tau2;
};

const std::vector<Point> singular_points{{10.0, 2.0}, {10.0, 20.0}, {1.0, 0.314159}};

}  // namespace

TEST(RegionM, BelowLightCone) {
  const auto m = integral_M(zz(), 1.0);
  EXPECT_EQ(m.pole_coeff, 0.0);
  EXPECT_NEAR(m.finite_part, std::log(3.0) / (16.0 * pi * pi), 1e-15);
}

TEST(RegionM, PoleCoefficientAndFinitePart) {
  // Pole at x0 = 2z/tau; the integrand is 2 tau^2 (1 - x) K(tau x) with
  // K ~ (1/(16 pi^2 z^2)) / (tau (x - x0))^2, so A = 2 * 2 (1 - x0)/(16 pi^2).
  const double tau = 100.0;
  const double x0 = 0.02;
  const auto m = integral_M(zz(), tau);
  EXPECT_NEAR(m.pole_coeff, 4.0 * (1.0 - x0) / (16.0 * pi * pi), 1e-13);
  EXPECT_NEAR(m.finite_part, m_term_closed(unit, tau), 1e-10 * m.finite_part);
}

TEST(RegionM, ZeroKernel) {
  const auto m = integral_M(constant_kernel(0.0), 3.0);
  EXPECT_EQ(m.pole_coeff, 0.0);
  EXPECT_EQ(m.finite_part, 0.0);
}

TEST(RegionM, RawModeMatchesExcisedOracle) {
  const double tau = 100.0;
  const double rho = 1e-3;
  RegionOptions raw;
  raw.rho = rho;
  const auto m = integral_M(zz(), tau, raw);
  ASSERT_TRUE(m.rho_used.has_value());
  const double brute = brute_double_integral(SwitchingSpec::step(tau), zz(), rho);
  EXPECT_NEAR(m.finite_part, brute, 1e-8 * std::abs(brute));
  // The excised value is A/rho + B + O(rho): the remainder halves with rho.
  const auto reg = integral_M(zz(), tau);
  raw.rho = rho / 2.0;
  const auto half = integral_M(zz(), tau, raw);
  const double r1 = m.finite_part - reg.pole_coeff / rho - reg.finite_part;
  const double r2 = half.finite_part - reg.pole_coeff / (rho / 2.0) - reg.finite_part;
  EXPECT_NEAR(r1 / r2, 2.0, 1e-2);
}

TEST(RegionMS, ConstantKernelVanishes) {
  const auto ms = integral_MS(constant_kernel(2.5), 1.0, 0.3);
  EXPECT_NEAR(ms.finite_part, 0.0, 1e-14);
  EXPECT_EQ(ms.pole_coeff, 0.0);
}

TEST(RegionMS, SignsAroundLightCone) {
  const auto shortm = integral_MS(zz(), 1.0, 0.1);
  EXPECT_GT(shortm.pole_coeff, 0.0);
  EXPECT_GT(shortm.finite_part, 0.0);
  const auto longm = integral_MS(zz(), 10.0, 2.0 / (pi * 10.0));
  EXPECT_GT(longm.pole_coeff, 0.0);
  EXPECT_LT(longm.finite_part, 0.0);
}

TEST(RegionMS, MatchesOracleFit) {
  OracleOptions oo;
  oo.first = OraclePart::Plateau;
  oo.second = OraclePart::LeftTail;
  for (const auto& p : singular_points) {
    const double mu = p.tau2 / (pi * p.tau1);
    const auto ms = integral_MS(zz(), p.tau1, mu);
    const auto fit = fit_regularized(SwitchingSpec::lorentz_plateau(p.tau1, p.tau2), zz(),
                                     {4e-3, 2e-3, 1e-3, 5e-4}, oo);
    EXPECT_NEAR(ms.pole_coeff, fit.value.pole_coeff, 1e-6 * std::abs(ms.pole_coeff));
    EXPECT_NEAR(ms.finite_part, fit.value.finite_part, 1e-6 * std::abs(ms.finite_part));
  }
}

TEST(RegionS, ConstantKernelIsTailAreaSquared) {
  // Each tail has area pi mu tau / 2 when K is constant.
  const double c = 0.7, tau = 1.3, mu = 0.4;
  const double expect = c * std::pow(pi * mu * tau / 2.0, 2);
  const auto k = constant_kernel(c);
  EXPECT_NEAR(integral_S1(k, tau, mu).finite_part, expect, 1e-10 * expect);
  EXPECT_NEAR(integral_S2(k, tau, mu).finite_part, expect, 1e-10 * expect);
  EXPECT_NEAR(integral_S_total(k, tau, mu).finite_part, 4.0 * expect, 1e-10 * expect);
}

TEST(RegionS, TotalMatchesClosedForm) {
  for (const auto& p : singular_points) {
    const double mu = p.tau2 / (pi * p.tau1);
    const auto s = integral_S_total(zz(), p.tau1, mu);
    const double closed = s_term_closed(unit, p.tau1, p.tau2);
    EXPECT_NEAR(s.finite_part, closed, 1e-8 * closed);
  }
}

TEST(FShape, Values) {
  EXPECT_EQ(f_shape(0.0), 0.0);
  EXPECT_NEAR(f_shape(1.0), 0.8 * pi / 4.0 - std::log(2.0) / 5.0, 1e-15);
  EXPECT_NEAR(f_shape(1e3), pi / 2.0, 2e-3);
  for (double chi : {0.01, 0.049, 0.051, 0.3, 1.0, 4.0, 50.0}) {
    EXPECT_NEAR(f_shape(chi), ref::f_shape_series(chi), 1e-12 * std::max(1e-3, f_shape(chi)))
        << chi;
  }
  EXPECT_THROW(f_shape(-1.0), Error);
}

TEST(FShape, Monotone) {
  double prev = 0.0;
  for (double chi = 0.01; chi < 100.0; chi *= 1.3) {
    const double f = f_shape(chi);
    EXPECT_GT(f, prev);
    prev = f;
  }
}

TEST(Combine, RegroupedEqualsRegionSum) {
  for (const auto& p : singular_points) {
    const auto r = combine(zz(), p.tau1, p.tau2 / (pi * p.tau1));
    EXPECT_NEAR(r.combined.pole_coeff, r.region_sum.pole_coeff, 1e-9 * std::abs(r.region_sum.pole_coeff));
    EXPECT_NEAR(r.combined.finite_part, r.region_sum.finite_part,
                1e-9 * std::abs(r.region_sum.finite_part));
  }
}

TEST(Combine, SingularPlateauMatchesOracle) {
  for (const auto& p : singular_points) {
    const auto r = combine(zz(), p.tau1, p.tau2 / (pi * p.tau1));
    const auto fit = fit_regularized(SwitchingSpec::lorentz_plateau(p.tau1, p.tau2), zz(),
                                     {4e-3, 2e-3, 1e-3, 5e-4});
    EXPECT_NEAR(r.combined.pole_coeff, fit.value.pole_coeff, 1e-6 * r.combined.pole_coeff);
    EXPECT_NEAR(r.combined.finite_part, fit.value.finite_part, 1e-6 * std::abs(r.combined.finite_part));
  }
}

TEST(Combine, RegionMultiplicities) {
  const auto k = bounded_kernel(1.0 / (pi * pi), 2.0);
  for (double mu : {0.1, 1.0}) {
    const double tau = 1.0;
    const auto spec = SwitchingSpec::with_mu(Variant::LorentzPlateau, tau, mu);
    const auto r = combine(k, tau, mu);
    const double all = brute_double_integral(spec, k, std::nullopt);
    EXPECT_NEAR(r.combined.finite_part, all, 1e-12 * all);

    using P = OraclePart;
    auto part = [&](P a, P b) {
      OracleOptions oo;
      oo.first = a;
      oo.second = b;
      return brute_double_integral(spec, k, std::nullopt, oo);
    };
    const double m = part(P::Plateau, P::Plateau);
    const double ms = part(P::Plateau, P::LeftTail) + part(P::Plateau, P::RightTail) +
                      part(P::LeftTail, P::Plateau) + part(P::RightTail, P::Plateau);
    const double s1 = part(P::LeftTail, P::LeftTail) + part(P::RightTail, P::RightTail);
    const double s2 = part(P::LeftTail, P::RightTail) + part(P::RightTail, P::LeftTail);
    EXPECT_NEAR(r.i_m.finite_part, m, 1e-12 * m);
    EXPECT_NEAR(4.0 * r.i_ms.finite_part, ms, 1e-12 * ms);
    EXPECT_NEAR(2.0 * r.i_s1.finite_part, s1, 1e-12 * s1);
    EXPECT_NEAR(2.0 * r.i_s2.finite_part, s2, 1e-12 * s2);
  }
}

TEST(Combine, ZeroMuIsPlateauOnly) {
  const auto r = combine(zz(), 10.0, 0.0);
  const auto m = integral_M(zz(), 10.0);
  EXPECT_EQ(r.combined.finite_part, m.finite_part);
  EXPECT_EQ(r.combined.pole_coeff, m.pole_coeff);
}

TEST(Limits, SmallMuApproachesPlateauOnlyMonotonically) {
  const auto m = integral_M(zz(), 100.0);
  double prev = INFINITY;
  for (double mu : {1e-1, 1e-2, 1e-3}) {
    const auto r = combine(zz(), 100.0, mu);
    const double gap = std::abs(r.combined.finite_part - m.finite_part);
    EXPECT_LT(gap, prev) << mu;
    prev = gap;
  }
}

TEST(Limits, LorentzianLimitMatchesClosedForm) {
  for (double tau2 : {1.0, 10.0}) {
    const auto l = lorentzian_limit(zz(), tau2);
    const double closed = pi * pi * dvz_lorentzian(unit, tau2 / pi);
    EXPECT_NEAR(l.finite_part, closed, 1e-8 * closed);
  }
}

TEST(Limits, LorentzianLimitMatchesOracle) {
  const double tau2 = 2.0;
  const auto l = lorentzian_limit(zz(), tau2);
  const auto fit = fit_regularized(SwitchingSpec::lorentzian(tau2 / pi), zz(), {4e-3, 2e-3, 1e-3, 5e-4});
  // The Lorentzian weight is the plateau limit divided by pi.
  EXPECT_NEAR(l.pole_coeff, pi * pi * fit.value.pole_coeff, 1e-6 * l.pole_coeff);
  EXPECT_NEAR(l.finite_part, pi * pi * fit.value.finite_part, 1e-6 * l.finite_part);
}

TEST(Limits, ShortPlateauApproachesLorentzian) {
  for (double tau2 : {1.0, 10.0}) {
    const double tau1 = 1e-3 * tau2;
    const auto r = combine(zz(), tau1, tau2 / (pi * tau1));
    const auto l = lorentzian_limit(zz(), tau2);
    EXPECT_NEAR(r.combined.finite_part, l.finite_part, 1e-2 * l.finite_part);
  }
}

TEST(Regions, RejectBadScales) {
  EXPECT_THROW(integral_M(zz(), 0.0), Error);
  EXPECT_THROW(integral_MS(zz(), 1.0, 0.0), Error);
  EXPECT_THROW(integral_S1(zz(), 1.0, -1.0), Error);
  EXPECT_THROW(lorentzian_limit(zz(), 0.0), Error);
}
