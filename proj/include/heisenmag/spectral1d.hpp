#pragma once
// 1D Schrodinger ground states on a Dirichlet-truncated line and the quartic
// family L_b^g = -d^2/dt^2 + (b t^2 / 2 + g)^2.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "heisenmag/errors.hpp"
#include "heisenmag/parallel.hpp"

namespace heisenmag {

// min_g lambda(g, 1) as established by universal_constant() with default
// options; pinned by the test suite.
inline constexpr double kUniversalConstant = 0.5698203176;
inline constexpr double kUniversalMinimizer = -0.346748;

class ScanRangeError : public ContractError {
 public:
  using ContractError::ContractError;
};

// [-T, T] with N intervals; the N - 1 interior nodes carry the unknowns.
struct Grid1D {
  double T;
  int N;
  Grid1D(double halfwidth, int n) : T(halfwidth), N(n) {
    if (!(halfwidth > 0)) throw ContractError("Grid1D: halfwidth must be positive");
    if (n < 16) throw ContractError("Grid1D: need N >= 16");
  }
  double h() const { return 2 * T / N; }
  int unknowns() const { return N - 1; }
  double node(int i) const { return -T + (i + 1) * h(); }  // i = 0 .. N-2
};

struct SchrodingerOperator1D {
  std::function<double(double)> V;
  Grid1D grid;

  std::vector<double> diagonal() const {
    const double h = grid.h();
    std::vector<double> d(grid.unknowns());
    for (int i = 0; i < grid.unknowns(); ++i) d[i] = 2 / (h * h) + V(grid.node(i));
    return d;
  }
  double offdiagonal() const { return -1 / (grid.h() * grid.h()); }
};

struct EigenResult {
  double value;                // bisection eigenvalue
  double rayleigh;             // Rayleigh quotient of the computed vector
  double residual;             // |(H - value) v| / |v|
  double boundary_mass;        // mass of v in |t| > 0.9 T
  std::vector<double> vector;  // h * sum v^2 = 1
};

// Number of eigenvalues below x (LDL^T inertia of H - x).
inline int sturm_count(const std::vector<double>& d, double off, double x) {
  const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  int count = 0;
  double q = 1;
  const double off2 = off * off;
  for (std::size_t i = 0; i < d.size(); ++i) {
    q = (d[i] - x) - (i ? off2 / q : 0.0);
    if (q == 0) q = -tiny;
    if (q < 0) ++count;
  }
  return count;
}

inline double lowest_eigenvalue_bisection(const std::vector<double>& d, double off) {
  double lo = *std::min_element(d.begin(), d.end()) - 2 * std::abs(off);
  double hi = *std::min_element(d.begin(), d.end());
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(d, off, mid) >= 1)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

namespace detail {

// Solve (tridiag(off, d - s, off)) x = b by the Thomas algorithm.
inline std::vector<double> thomas(const std::vector<double>& d, double off, double s,
                                  std::vector<double> b) {
  const std::size_t n = d.size();
  std::vector<double> c(n);
  double piv = d[0] - s;
  c[0] = off / piv;
  b[0] /= piv;
  for (std::size_t i = 1; i < n; ++i) {
    piv = (d[i] - s) - off * c[i - 1];
    c[i] = off / piv;
    b[i] = (b[i] - off * b[i - 1]) / piv;
  }
  for (std::size_t i = n - 1; i-- > 0;) b[i] -= c[i] * b[i + 1];
  return b;
}

}  // namespace detail

// Ground state of the tridiagonal discretization: Sturm bisection for the
// value, inverse iteration for the vector.
inline EigenResult ground_state(const SchrodingerOperator1D& op) {
  const auto d = op.diagonal();
  const double off = op.offdiagonal();
  const double h = op.grid.h();
  const int n = op.grid.unknowns();
  EigenResult res;
  res.value = lowest_eigenvalue_bisection(d, off);
  const double shift = res.value - 1e-10 * (1 + std::abs(res.value));
  std::vector<double> v(n, 1.0);
  for (int it = 0; it < 50; ++it) {
    auto w = detail::thomas(d, off, shift, v);
    double nrm = 0;
    for (double x : w) nrm += x * x;
    nrm = std::sqrt(nrm * h);
    double change = 0;
    for (int i = 0; i < n; ++i) {
      w[i] /= nrm;
      change = std::max(change, std::abs(w[i] - v[i]));
    }
    v = std::move(w);
    if (it > 0 && change < 1e-13) break;
  }
  double num = 0, den = 0, r2 = 0, tail = 0;
  for (int i = 0; i < n; ++i) {
    const double hv = d[i] * v[i] + off * ((i ? v[i - 1] : 0.0) + (i + 1 < n ? v[i + 1] : 0.0));
    num += v[i] * hv;
    den += v[i] * v[i];
    r2 += (hv - res.value * v[i]) * (hv - res.value * v[i]);
    if (std::abs(op.grid.node(i)) > 0.9 * op.grid.T) tail += v[i] * v[i] * h;
  }
  res.rayleigh = num / den;
  res.residual = std::sqrt(r2 / den);
  res.boundary_mass = tail;
  res.vector = std::move(v);

  const double T = op.grid.T;
  if (res.boundary_mass > 0.01)
    throw TruncationError("ground_state: " + std::to_string(100 * res.boundary_mass) +
                              "% of the mass lies within 10% of the truncation boundary",
                          res.boundary_mass, 2 * T);
  if (std::min(op.V(-T), op.V(T)) < 10 * res.value)
    throw TruncationError("ground_state: potential at the truncation is below 10 x eigenvalue",
                          res.boundary_mass, 2 * T);
  return res;
}

// Richardson extrapolation of a second-order discretization (N and 2N).
inline double richardson(double coarse, double fine) { return (4 * fine - coarse) / 3; }

struct RefinedEigenvalue {
  double value;   // extrapolated
  double coarse;  // raw, N intervals
  double fine;    // raw, 2N intervals
  int N;
  double T;
  double rel_change() const { return std::abs(fine - coarse) / std::abs(fine); }
};

inline RefinedEigenvalue refined_ground_energy(const std::function<double(double)>& V, double T,
                                               int N) {
  const double c = ground_state({V, Grid1D(T, N)}).value;
  const double f = ground_state({V, Grid1D(T, 2 * N)}).value;
  return {richardson(c, f), c, f, N, T};
}

// ---------------------------------------------------------------------------
// Quartic family.

inline std::function<double(double)> quartic_potential(double g, double b) {
  return [g, b](double t) {
    const double q = 0.5 * b * t * t + g;
    return q * q;
  };
}

struct QuarticOptions {
  std::optional<int> N;          // fixed grid; adaptive when empty
  std::optional<double> T;       // fixed halfwidth; adaptive when empty
  double rel_tol = 1e-5;         // raw N vs 2N agreement
  double confinement = 100;      // V(T) >= confinement * lambda
  int min_N = 1000;
  int max_N = 1 << 20;
};

// Ground energy of L_b^g, with the adaptive truncation policy.
inline RefinedEigenvalue quartic_solve(double g, double b, const QuarticOptions& opt = {}) {
  if (!(b > 0)) throw ContractError("quartic_lambda: b must be positive");
  const auto V = quartic_potential(g, b);
  double T;
  if (opt.T) {
    T = *opt.T;
  } else {
    const double well = std::sqrt(2 * std::max(0.0, -g) / b);
    T = std::max(3.0, 1.5 * well + 3 * std::cbrt(1 / b));
    for (int it = 0;; ++it) {
      if (it > 60) throw ConvergenceError("quartic_lambda: truncation search failed", T);
      const int Nc = std::max(400, static_cast<int>(40 * T * std::cbrt(b) * std::sqrt(1 + well)));
      double lam;
      try {
        lam = ground_state({V, Grid1D(T, Nc)}).value;
      } catch (const TruncationError& e) {
        T = e.suggested_halfwidth;
        continue;
      }
      if (V(T) >= opt.confinement * lam) break;
      T *= 1.25;
    }
  }
  if (opt.N) {
    auto r = refined_ground_energy(V, T, *opt.N);
    return r;
  }
  int N = opt.min_N;
  double coarse = ground_state({V, Grid1D(T, N)}).value;
  while (true) {
    if (2 * N > opt.max_N)
      throw ConvergenceError("quartic_lambda: grid refinement did not converge", coarse);
    const double fine = ground_state({V, Grid1D(T, 2 * N)}).value;
    if (std::abs(fine - coarse) <= opt.rel_tol * std::abs(fine))
      return {richardson(coarse, fine), coarse, fine, N, T};
    coarse = fine;
    N *= 2;
  }
}

inline double quartic_lambda(double g, double b, const QuarticOptions& opt = {}) {
  return quartic_solve(g, b, opt).value;
}

struct UniversalConstant {
  double c;
  double g_star;
  RefinedEigenvalue at_min;                       // refinement diagnostics at g*
  std::vector<std::pair<double, double>> scan;    // (g, lambda)
  int evaluations = 0;
};

struct ConstantOptions {
  double gmin = -10;
  double gmax = 2;
  double scan_step = 0.25;
  double g_tol = 1e-4;
  int threads = 1;
  QuarticOptions quartic;
};

// c = min_g lambda(g, 1): coarse scan then golden-section refinement.
inline UniversalConstant universal_constant(const ConstantOptions& opt = {}) {
  if (!(opt.gmax > opt.gmin)) throw ContractError("universal_constant: need gmin < gmax");
  const int n = static_cast<int>(std::floor((opt.gmax - opt.gmin) / opt.scan_step + 1e-9)) + 1;
  if (n < 3) throw ContractError("universal_constant: scan needs at least three points");
  UniversalConstant out;
  const auto vals = parallel_map(n, opt.threads, [&](int i) {
    return quartic_lambda(opt.gmin + i * opt.scan_step, 1.0, opt.quartic);
  });
  for (int i = 0; i < n; ++i) out.scan.emplace_back(opt.gmin + i * opt.scan_step, vals[i]);
  out.evaluations = n;
  const int k = static_cast<int>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  if (k == 0 || k == n - 1)
    throw ScanRangeError("universal_constant: minimum at the scan boundary g = " +
                         std::to_string(out.scan[k].first) + "; widen [gmin, gmax]");
  const double ratio = (std::sqrt(5.0) - 1) / 2;
  double a = out.scan[k - 1].first, b = out.scan[k + 1].first;
  double x1 = b - ratio * (b - a), x2 = a + ratio * (b - a);
  auto f = [&](double g) {
    ++out.evaluations;
    return quartic_lambda(g, 1.0, opt.quartic);
  };
  double f1 = f(x1), f2 = f(x2);
  while (b - a > opt.g_tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      f2 = f(x2);
    }
  }
  out.g_star = 0.5 * (a + b);
  out.at_min = quartic_solve(out.g_star, 1.0, opt.quartic);
  out.c = out.at_min.value;
  return out;
}

}  // namespace heisenmag
