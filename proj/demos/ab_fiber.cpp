// Fiber Hardy constants of the Aharonov-Bohm potential alpha dphi on a small
// grid, next to the clamp bound and d(alpha, Z)^2.

#include <cstdio>

#include "heisenmag/fibers.hpp"

using namespace heisenmag;

int main() {
  const Grid2D grid(120, 120, 12, 12);
  std::printf("grid %dx%d, R = %.0f, Z = %.0f\n\n", grid.Nr, grid.Nz, grid.R, grid.Z);
  std::printf("%6s %4s %12s %10s\n", "alpha", "m", "mu", "bound");
  for (double alpha : {0.1, 0.25, 0.5}) {
    for (int m = -1; m <= 1; ++m) {
      const auto r = fiber_hardy(alpha, m, grid);
      std::printf("%6.2f %4d %12.6f %10.6f\n", alpha, m, r.mu, r.bound);
    }
    const double d = dist_to_integers(alpha);
    std::printf("%6s %4s %12s %10.6f  d(alpha, Z)^2\n\n", "", "", "", d * d);
  }
}
