#pragma once
// Angular-Fourier fibers L_m of the Aharonov-Bohm operator on the half-plane
// (r, z) with measure r dr dz, the uniform-field bottom, and the quadratic
// form decomposition on the full group.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#ifdef HEISENMAG_HAVE_CHOLMOD
#include <Eigen/CholmodSupport>
#else
#include <Eigen/SparseCholesky>
#endif

#include "heisenmag/core.hpp"
#include "heisenmag/quadrature.hpp"
#include "heisenmag/spectral1d.hpp"

namespace heisenmag {

// Staggered grid: r_j = (j + 1/2) h_r, z_k = -Z + (k + 1/2) h_z (0-based).
struct Grid2D {
  int Nr, Nz;
  double R, Z;
  Grid2D(int nr = 400, int nz = 400, double rmax = 40, double zmax = 40)
      : Nr(nr), Nz(nz), R(rmax), Z(zmax) {
    if (nr < 16 || nz < 16) throw ContractError("Grid2D: need at least 16 nodes per axis");
    if (!(rmax > 0) || !(zmax > 0)) throw ContractError("Grid2D: box half-widths must be positive");
  }
  double hr() const { return R / Nr; }
  double hz() const { return 2 * Z / Nz; }
  double r(int j) const { return (j + 0.5) * hr(); }
  double z(int k) const { return -Z + (k + 0.5) * hz(); }
  int size() const { return Nr * Nz; }
  int index(int j, int k) const { return j * Nz + k; }
  double weight(int j) const { return r(j) * hr() * hz(); }  // r dr dz
  double measure() const {
    double s = 0;
    for (int j = 0; j < Nr; ++j) s += weight(j);
    return s * Nz;
  }
  // Same spacing, twice the box.
  Grid2D doubled() const { return Grid2D(2 * Nr, 2 * Nz, 2 * R, 2 * Z); }
};

using SpMat = Eigen::SparseMatrix<cplx>;
using CVec = Eigen::VectorXcd;

struct FiberFormLm {
  double alpha;
  int m;
  Grid2D grid;
  SpMat K;               // numerator, Hermitian
  Eigen::VectorXd mass;  // denominator weight h_r h_z / r_j (|u|^2 / r^2 r dr dz)

  double beta() const { return alpha - m; }
  double form(const CVec& u) const { return std::real(u.dot(K * u)); }
  double denominator(const CVec& u) const {
    return (mass.array() * u.array().abs2()).sum();
  }
};

// Discrete Q_m. Radial differences across r-edges (no flux through r = 0,
// zero ghost beyond R). |Phi-hat u|^2 is expanded as
//   (r^2/4)|d_z u|^2 + (beta^2/r^2)|u|^2 + beta Re(i conj(d_z u) u)
// with the first term on z-edges, the second at nodes and the cross term by
// central differences (zero ghosts beyond +-Z). The symbol dominates
// (r sin(theta)/(2 h_z) + beta/r)^2, so the form stays non-negative; the
// edge-averaged alternative loses the beta^2/r^2 barrier on z-checkerboards.
inline FiberFormLm assemble_Qm(double alpha, int m, const Grid2D& g) {
  FiberFormLm F{alpha, m, g, SpMat(g.size(), g.size()), Eigen::VectorXd(g.size())};
  const double beta = alpha - m;
  const double hr = g.hr(), hz = g.hz();
  std::vector<Eigen::Triplet<cplx>> t;
  t.reserve(static_cast<std::size_t>(g.size()) * 9);
  for (int j = 0; j < g.Nr; ++j) {
    const double wr = (j + 1) * hz;  // r_edge h_z / h_r with r_edge = (j + 1) h_r
    for (int k = 0; k < g.Nz; ++k) {
      const int i = g.index(j, k);
      t.emplace_back(i, i, wr);
      if (j + 1 < g.Nr) {
        const int n = g.index(j + 1, k);
        t.emplace_back(n, n, wr);
        t.emplace_back(i, n, -wr);
        t.emplace_back(n, i, -wr);
      }
    }
  }
  for (int j = 0; j < g.Nr; ++j) {
    const double r = g.r(j), w = g.weight(j);
    const double wz = w * r * r / (4 * hz * hz);
    const cplx wc(0, beta * w / (2 * hz));
    for (int k = 0; k < g.Nz; ++k) {
      const int i = g.index(j, k);
      t.emplace_back(i, i, 2 * wz + w * beta * beta / (r * r));
      if (k + 1 < g.Nz) {
        const int n = g.index(j, k + 1);
        t.emplace_back(i, n, -wz - wc);
        t.emplace_back(n, i, -wz + wc);
      }
      F.mass(i) = hr * hz / r;
    }
  }
  F.K.setFromTriplets(t.begin(), t.end());
  F.K.makeCompressed();
  return F;
}

inline double clamp_bound(double alpha, int m) {
  const double c = std::max(-1.0, std::min(1.0, alpha - m));
  return c * c;
}

inline double dist_to_integers(double alpha) { return std::abs(alpha - std::round(alpha)); }

// Nearest integer; ties go down so that the pair (alpha, m*) keeps alpha - m* = +1/2.
inline int nearest_mode(double alpha) {
  const double f = std::floor(alpha);
  return alpha - f <= 0.5 ? static_cast<int>(f) : static_cast<int>(f) + 1;
}

struct EigenOptions {
  double ritz_tol = 1e-9;  // successive Ritz values
  int max_iterations = 120;  // per restart cycle, split over the two stages
  int restarts = 4;          // second-stage restarts from the current Ritz vector
};

struct FiberResult {
  double alpha;
  int m;
  double mu;
  double bound;  // clamp^2
  double shift;
  int iterations;
  double residual;     // shift-invert Lanczos residual, mu scale
  double ritz_change;  // last successive Ritz difference
  CVec vector;         // M-normalized
};

namespace detail {

#ifdef HEISENMAG_HAVE_CHOLMOD
using Factorization = Eigen::CholmodSupernodalLLT<SpMat, Eigen::Lower>;
#else
using Factorization = Eigen::SimplicialLDLT<SpMat, Eigen::Lower>;
#endif

}  // namespace detail

namespace detail {

struct LanczosStage {
  double mu = 0, ritz_change = 0, residual = 0;
  int iterations = 0;
  CVec y;
};

// Shift-invert Lanczos on C^-1 M (C = K - sigma M), self-adjoint in the
// M inner product, full reorthogonalization. Stops when successive Ritz
// values for the smallest mu differ by less than tol.
inline LanczosStage lanczos(const Factorization& chol, const Eigen::VectorXd& M, double sigma,
                            CVec q, double tol, int max_iterations) {
  auto mdot = [&](const CVec& a, const CVec& b) {
    return (a.conjugate().array() * M.array().cast<cplx>() * b.array()).sum();
  };
  q /= std::sqrt(std::real(mdot(q, q)));
  std::vector<CVec> Q{q};
  std::vector<double> al, be;
  LanczosStage out;
  double prev = std::numeric_limits<double>::infinity(), last_beta = 0;
  Eigen::VectorXd s;
  for (int it = 0; it < max_iterations; ++it) {
    CVec w = chol.solve(CVec(M.cast<cplx>().cwiseProduct(Q.back())));
    const double a = std::real(mdot(Q.back(), w));
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& v : Q) w -= mdot(v, w) * v;
    const double b = std::sqrt(std::real(mdot(w, w)));
    al.push_back(a);
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(al.size(), al.size());
    for (std::size_t i = 0; i < al.size(); ++i) {
      T(i, i) = al[i];
      if (i + 1 < al.size()) T(i, i + 1) = T(i + 1, i) = be[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const int top = static_cast<int>(al.size()) - 1;
    s = es.eigenvectors().col(top);
    out.mu = sigma + 1 / es.eigenvalues()(top);
    out.iterations = it + 1;
    out.ritz_change = std::abs(out.mu - prev);
    last_beta = b;
    if (out.ritz_change < tol || b < 1e-14) break;
    prev = out.mu;
    be.push_back(b);
    Q.push_back(w / b);
  }
  out.y = CVec::Zero(q.size());
  for (int i = 0; i < s.size(); ++i) out.y += s(i) * Q[i];
  out.y /= std::sqrt(std::real(mdot(out.y, out.y)));
  // |C^-1 M y - theta y|_M mapped to the mu scale
  out.residual = last_beta * std::abs(s(s.size() - 1)) * (out.mu - sigma) * (out.mu - sigma);
  return out;
}

}  // namespace detail

// Smallest mu of K u = mu M u: shift-invert Lanczos (inverse iteration
// accelerated in its Krylov space). A first pass from `shift` locates mu to
// about 1e-4; the operator is then refactored just below that estimate. A
// second pass from the Ritz vector, restarted if needed, runs until successive
// Ritz values agree to opt.ritz_tol. A shift that is not below the spectrum
// (failed factorization) is lowered.
inline FiberResult smallest_generalized(const FiberFormLm& F, double shift,
                                        const EigenOptions& opt = {}) {
  const int n = F.grid.size();
  const Eigen::VectorXd& M = F.mass;
  detail::Factorization chol;
  auto factor = [&](double sigma) {
    for (int attempt = 0;; ++attempt) {
      SpMat C = F.K;
      for (int i = 0; i < n; ++i) C.coeffRef(i, i) -= sigma * M(i);
      chol.compute(C);
      bool ok = chol.info() == Eigen::Success;
#ifndef HEISENMAG_HAVE_CHOLMOD
      if (ok) ok = (chol.vectorD().array() > 0).all();
#endif
      if (ok) return sigma;
      if (attempt > 20)
        throw ConvergenceError("fiber eigensolver: no positive definite shift", sigma);
      sigma = sigma > 0.2 ? sigma - 0.2 : (sigma > 0 ? 0.0 : sigma - 0.1);
    }
  };
  // Deterministic start: smooth positive profile.
  CVec q(n);
  for (int j = 0; j < F.grid.Nr; ++j)
    for (int k = 0; k < F.grid.Nz; ++k) {
      const double r = F.grid.r(j), z = F.grid.z(k);
      q(F.grid.index(j, k)) = std::sqrt(r) * std::exp(-r / 4) * std::cos(0.5 * kPi * z / F.grid.Z);
    }
  double sigma = factor(shift);
  auto st = detail::lanczos(chol, M, sigma, q, 1e-4, opt.max_iterations / 2);
  int iterations = st.iterations;
  const double gap = 0.002 * std::max(1.0, st.mu);
  if (st.mu - sigma > 2 * gap) sigma = factor(st.mu - gap);
  for (int round = 0; round <= opt.restarts; ++round) {
    st = detail::lanczos(chol, M, sigma, st.y, opt.ritz_tol, opt.max_iterations / 2);
    iterations += st.iterations;
    if (st.ritz_change < opt.ritz_tol) break;
  }
  if (st.ritz_change >= opt.ritz_tol)
    throw ConvergenceError("fiber eigensolver: Ritz values still moving by " +
                               std::to_string(st.ritz_change),
                           st.ritz_change);
  return FiberResult{F.alpha,     F.m,         st.mu,          clamp_bound(F.alpha, F.m), sigma,
                     iterations,  st.residual, st.ritz_change, std::move(st.y)};
}

inline FiberResult fiber_hardy(double alpha, int m, const Grid2D& grid = Grid2D(),
                               const EigenOptions& opt = {}) {
  const FiberFormLm F = assemble_Qm(alpha, m, grid);
  return smallest_generalized(F, std::max(0.0, clamp_bound(alpha, m) - 0.05), opt);
}

inline double fiber_hardy_constant(double alpha, int m, const Grid2D& grid = Grid2D()) {
  return fiber_hardy(alpha, m, grid).mu;
}

// Bottom of the spectrum of the uniform-field sub-Laplacian. The (eta, nu)
// fibers are L_{|B|}^g with g = -eta^2 / (2|B|) - nu covering all of R, so
// the infimum over fibers is min_g and is attained.
inline double uniform_bottom(double Bmag, double c = kUniversalConstant) {
  if (!(Bmag > 0)) throw ContractError("uniform_bottom: |B| must be positive");
  return c * std::pow(Bmag, 2.0 / 3.0);
}

// Phi_k u = (r/2) d_z u + (i k / r) u for a rotation-invariant u(r, z),
// evaluated from u's jet at (r, 0, z).
inline cplx phi_k_fiber(int k, const ScalarField& u, double r, double z) {
  if (!(r > 0)) throw SingularFrameError("phi_k_fiber: r must be positive");
  const auto j = u.jet<1>(Point{r, 0, z});
  return 0.5 * r * j.derivative(0, 0, 1) + kI * (double(k) / r) * j.value();
}

// ---------------------------------------------------------------------------
// Quadratic form decomposition on the group:
//   Q_alpha(u) = <L_alpha u, u> + alpha^2 |u/r|^2 + 2 alpha <-i d_phi u, u / r^2>.

struct CylinderRule {
  Rule1D r, phi, z;
};

inline CylinderRule cylinder_rule(double r0, double r1, double z0, double z1, int panels = 8,
                                  int order = 12, int nphi = 32) {
  return {composite_gauss(r0, r1, panels, order), periodic_trapezoid(nphi),
          composite_gauss(z0, z1, panels, order)};
}

struct DecompositionReport {
  double Q;             // int |R u|^2 + |Phi u + i alpha u / r|^2
  cplx folland_stein;   // <L_alpha u, u> = int |grad u|^2 + alpha (-i d_z u) conj(u)
  double weight_term;   // alpha^2 int |u|^2 / r^2
  cplx cross_term;      // 2 alpha <-i d_phi u, u / r^2>
  double discrepancy;   // |Q - (sum of the three)| / Q
};

inline DecompositionReport quadform_decomposition_check(double alpha, const ScalarField& u,
                                                        const CylinderRule& rule) {
  DecompositionReport rep{0, 0, 0, 0, 0};
  for (std::size_t a = 0; a < rule.r.x.size(); ++a) {
    const double r = rule.r.x[a];
    if (!(r > 0)) throw ContractError("quadform_decomposition_check: rule touches r = 0");
    for (std::size_t b = 0; b < rule.phi.x.size(); ++b)
      for (std::size_t c = 0; c < rule.z.x.size(); ++c) {
        const double w = rule.r.w[a] * rule.phi.w[b] * rule.z.w[c] * r;
        const Point p = Point::cylindrical(r, rule.phi.x[b], rule.z.x[c]);
        const auto j = u.jet<1>(p);
        const cplx u0 = j.value();
        const cplx Ru = op_R(j, p).value(), Phu = op_Phi(j, p).value();
        const cplx Xu = op_X(j, p).value(), Yu = op_Y(j, p).value();
        const cplx dz = j.derivative(0, 0, 1), dphi = op_dphi(j, p).value();
        rep.Q += w * (std::norm(Ru) + std::norm(Phu + kI * alpha * u0 / r));
        rep.folland_stein +=
            w * (std::norm(Xu) + std::norm(Yu) + alpha * (-kI * dz) * std::conj(u0));
        rep.weight_term += w * alpha * alpha * std::norm(u0) / (r * r);
        rep.cross_term += w * 2 * alpha * (-kI * dphi) * std::conj(u0) / (r * r);
      }
  }
  const cplx rhs = rep.folland_stein + rep.weight_term + rep.cross_term;
  rep.discrepancy = std::abs(rep.Q - rhs) / std::max(std::abs(rep.Q), 1e-300);
  return rep;
}

}  // namespace heisenmag
