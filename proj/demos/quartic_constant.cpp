// Scans lambda(g) = inf spec(-d^2/dt^2 + (t^2/2 + g)^2) and locates its
// minimum c, then prints the uniform-field bottoms c |B|^{2/3}.

#include <cstdio>

#include "heisenmag/fibers.hpp"
#include "heisenmag/spectral1d.hpp"

using namespace heisenmag;

int main() {
  std::printf("%8s %14s\n", "g", "lambda(g)");
  for (double g = -3; g <= 1.0001; g += 0.5) std::printf("%8.2f %14.10f\n", g, quartic_lambda(g, 1));

  const auto U = universal_constant();
  std::printf("\nc = %.10f at g* = %.6f (N = %d, T = %.2f, refinement change %.1e)\n", U.c, U.g_star,
              U.at_min.N, U.at_min.T, U.at_min.rel_change());

  std::printf("\n%8s %14s\n", "|B|", "bottom");
  for (double b : {0.5, 1.0, 2.0, 8.0}) std::printf("%8.2f %14.10f\n", b, uniform_bottom(b, U.c));
}
