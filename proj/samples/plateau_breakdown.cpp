// Splits one Lorentz-plateau dispersion into its plateau, tail and cross
// terms and compares it with sudden switching over the same plateau.

#include <cstdio>

#include "vswitch/vswitch.hpp"

int main() {
  using namespace vswitch;
  const ProbeConfig probe{1.0, 1.0, 1.0};
  const double tau1 = 100.0;
  const double tau2 = 2.0;

  const DispersionBreakdown d = dvz_plateau(probe, tau1, tau2);
  std::printf("step     %.8e\n", dvz_step(probe, tau1));
  std::printf("m_term   A=%.6e  B=%.8e\n", d.m_term.pole_coeff, d.m_term.finite_part);
  std::printf("s_term   A=%.6e  B=%.8e\n", d.s_term.pole_coeff, d.s_term.finite_part);
  std::printf("ms_term  A=%.6e  B=%.8e\n", d.ms_term.pole_coeff, d.ms_term.finite_part);
  std::printf("total    %.8e (drop)\n", d.total);

  const auto c = dvz_plateau(probe, tau1, tau2, Regularization::ComptonCutoff);
  std::printf("total    %.8e (compton)\n", c.total);

  const RegimeCase rc = classify_regime(probe, tau1, tau2);
  std::printf("regime   %s, %s dominant%s\n", std::string(to_string(rc.case_id)).c_str(),
              std::string(to_string(rc.dominant_term)).c_str(), rc.strict ? "" : " (marginal)");
  return 0;
}
