// Total z dispersion and the variant split as the tails grow, at a fixed
// plateau of 100 z.

#include <cstdio>
#include <initializer_list>

#include "vswitch/vswitch.hpp"

int main() {
  using namespace vswitch;
  const ProbeConfig probe{1.0, 1.0, 1.0};
  const double tau1 = 100.0;

  std::printf("%8s %14s %14s %14s %14s\n", "tau2", "plateau", "A", "B", "C");
  for (double tau2 : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0}) {
    const double all = dvz_plateau(probe, tau1, tau2).total;
    const double a = dvz_variant(Variant::VariantA, probe, tau1, tau2).total;
    const double b = dvz_variant(Variant::VariantB, probe, tau1, tau2).total;
    const double c = dvz_variant(Variant::VariantC, probe, tau1, tau2).total;
    std::printf("%8.2f %14.6e %14.6e %14.6e %14.6e\n", tau2, all, a, b, c);
  }
  return 0;
}
