#include <gtest/gtest.h>

#include <cmath>

#include "heisenmag/harness.hpp"

using namespace heisenmag;

namespace {

QuadOptions tight() {
  QuadOptions o;
  o.abs_tol = 0;
  o.rel_tol = 1e-13;
  o.max_intervals = 20000;
  return o;
}

// int_a^b f(r) dr split at the given breakpoints.
template <class F>
double split_integral(const F& f, std::vector<double> pts) {
  double s = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) s += integrate(f, pts[i], pts[i + 1], tight()).value;
  return s;
}

CylinderRule small_rule() { return cylinder_rule(0, 4.5, -4, 4, 10, 10, 96); }

}  // namespace

TEST(Cutoff, Profile) {
  const CutoffProfile xi;
  EXPECT_EQ(xi(0.0), 0.0);
  EXPECT_EQ(xi(1.0), 1.0);
  EXPECT_EQ(xi(0.05), 0.0);
  EXPECT_EQ(xi(0.95), 1.0);
  EXPECT_DOUBLE_EQ(xi(0.5), 0.5);
  EXPECT_DOUBLE_EQ(xi.sup_derivative(), 2.734375);
  double sup = 0;
  for (int i = 0; i <= 100000; ++i) {
    const double x = i / 100000.0;
    EXPECT_GE(xi.derivative(x), 0.0);
    sup = std::max(sup, xi.derivative(x));
  }
  EXPECT_NEAR(sup, xi.sup_derivative(), 1e-12);
  // derivative against a central difference
  for (double x : {0.2, 0.37, 0.61, 0.85}) {
    const double h = 1e-6;
    EXPECT_NEAR(xi.derivative(x), (xi(x + h) - xi(x - h)) / (2 * h), 1e-8);
  }
}

TEST(Cutoff, EtaIntegralBounds) {
  const CutoffProfile xi;
  const double s2 = std::pow(xi.sup_derivative(), 2);
  for (int n : {4, 16, 256}) {
    const auto eta = eta_n(n, xi);
    EXPECT_EQ(eta(1.0), 1.0);
    EXPECT_EQ(eta(0.99 / (n * n)), 0.0);
    EXPECT_EQ(eta(1.01 * n * n), 0.0);
    const double N = n;
    const std::vector<double> br = {1 / (N * N), 1 / N, N, N * N};
    const double inv_r = split_integral([&](double r) { return eta(r) * eta(r) / r; }, br);
    const double grad = split_integral([&](double r) { return std::pow(eta.df(r), 2) * r; }, br);
    const double r3 = split_integral([&](double r) { return eta(r) * eta(r) * r * r * r; }, br);
    EXPECT_GE(inv_r, 2 * std::log(N));
    EXPECT_LE(grad, 2 * s2 / std::log(N));
    // closed-form plateaus agree with direct quadrature
    const auto E = eta_integrals(n, xi);
    EXPECT_NEAR(E.inv_r, inv_r, 1e-10 * inv_r);
    EXPECT_NEAR(E.grad, grad, 1e-10 * grad);
    EXPECT_NEAR(E.r3, r3, 1e-10 * r3);
  }
  EXPECT_THROW(eta_n(1), ContractError);
}

TEST(Cutoff, ChiIntegralBounds) {
  const CutoffProfile xi;
  const double s2 = std::pow(xi.sup_derivative(), 2);
  for (int n : {4, 16, 256}) {
    const auto chi = chi_n(n, xi);
    EXPECT_EQ(chi(0.0), 1.0);
    const double n4 = std::pow(double(n), 4);
    EXPECT_EQ(chi(2.01 * n4), 0.0);
    const std::vector<double> br = {-2 * n4, -n4, 0, n4, 2 * n4};
    const double mass = split_integral([&](double s) { return chi(s) * chi(s); }, br);
    const double grad = split_integral([&](double s) { return std::pow(chi.df(s), 2); }, br);
    EXPECT_GE(mass, 2 * n4);
    EXPECT_LE(grad, 2 * s2 / n4);
    const auto C = chi_integrals(n, xi);
    EXPECT_NEAR(C.mass, mass, 1e-12 * mass);
    EXPECT_NEAR(C.grad, grad, 1e-10 * grad);
  }
}

TEST(Sharpness, MatchesTwoDimensionalQuadrature) {
  // Oracle: the full (r, z) integrand of Q_{m*}(psi_n) for real psi_n.
  const int n = 3;
  const double alpha = 0.3, beta = alpha - nearest_mode(alpha);
  const auto eta = eta_n(n);
  const auto chi = chi_n(n);
  const double N = n, n4 = std::pow(N, 4);
  const std::vector<double> rb = {1 / (N * N), 1 / N, N, N * N};
  const std::vector<double> zb = {-2 * n4, -n4, 0, n4, 2 * n4};
  auto outer = [&](auto integrand) {
    return split_integral(
        [&](double r) { return split_integral([&](double z) { return integrand(r, z); }, zb); }, rb);
  };
  const double Q = outer([&](double r, double z) {
    const double dr = eta.df(r) * chi(z), dz = eta(r) * chi.df(z), psi = eta(r) * chi(z);
    return (dr * dr + 0.25 * r * r * dz * dz + beta * beta * psi * psi / (r * r)) * r;
  });
  const double den = outer([&](double r, double z) {
    const double psi = eta(r) * chi(z);
    return psi * psi / r;
  });
  const auto rep = sharpness_quotient_lw(alpha, n);
  EXPECT_NEAR(rep.quotient, Q / den, 1e-9 * Q / den);
  EXPECT_NEAR(rep.denominator, den, 1e-9 * den);
}

TEST(Sharpness, ProofBoundsAndLimit) {
  const CutoffProfile xi;
  const double s2 = std::pow(xi.sup_derivative(), 2);
  double prev = INFINITY;
  for (int n : {10, 100, 1000}) {
    const auto r = sharpness_quotient_lw(0.5, n);
    const double ln = std::log(double(n));
    EXPECT_TRUE(r.within_bounds()) << n;
    EXPECT_GE(r.I1, 0);
    EXPECT_GE(r.I3, 0);
    EXPECT_NEAR(r.quotient, (r.I1 + r.I2 + r.I3) / r.denominator, 1e-12 * r.quotient);
    EXPECT_LE(r.quotient - 0.25, s2 * (1 / (ln * ln) + 1 / (32 * ln))) << n;
    EXPECT_GE(r.quotient, 0.25 - 1e-6);
    EXPECT_NEAR(r.I2 / r.denominator, 0.25, 1e-10 * 0.25);
    EXPECT_LT(r.quotient, prev);
    prev = r.quotient;
  }
  for (double a : {0.1, 0.8, 2.3, -1.4}) {
    const auto r = sharpness_quotient_lw(a, 50);
    EXPECT_NEAR(r.target, std::pow(dist_to_integers(a), 2), 1e-15);
    EXPECT_GE(r.quotient, r.target - 1e-6);
  }
  EXPECT_THROW(sharpness_quotient_lw(2.0, 10), ContractError);
}

TEST(FAlpha, Identity) {
  EXPECT_EQ(f_alpha_identity(0.0, Point{1, 0, 1}), 0.0);
  EXPECT_LE(f_alpha_identity(0.7, Point{1, 0, 1}), 1e-9);
  for (double a : {-0.9, -0.3, 0.3, 0.9})
    for (const auto& p : sample_points(5, 50, 0.1, 3, 3)) EXPECT_LE(f_alpha_identity(a, p), 1e-9);
  EXPECT_THROW(f_alpha_identity(0.5, Point{0, 0, 1}), SingularFrameError);
}

TEST(RhoAlpha, GradientIdentities) {
  const Point p{1, 1, 0.5};
  const auto r0 = rho_alpha_gradient_check(0.0, p);
  EXPECT_LE(r0.max(), 1e-15);
  const auto r1 = rho_alpha_gradient_check(1.0, p);
  EXPECT_LE(r1.max(), 1e-8);
  for (const auto& q : sample_points(6, 50, 0.1, 3, 3)) {
    const auto r = rho_alpha_gradient_check(-0.6, q);
    EXPECT_LE(r.max(), 1e-8);
    EXPECT_NEAR(r.w_modulus, 1.0, 1e-15);
  }
}

TEST(FollandStein, QuotientAtK64) {
  const auto r = folland_stein_quotient(0.5, 64);
  EXPECT_GE(r.quotient, 0.75 - 1e-6);
  EXPECT_LE(r.quotient, 0.75 * 1.10);
  EXPECT_DOUBLE_EQ(r.target, 0.75);
}

TEST(FollandStein, ZeroAlphaIsGarofaloLanconelliBitForBit) {
  for (int k : {4, 16, 64}) EXPECT_EQ(folland_stein_quotient(0.0, k).quotient, garofalo_lanconelli_quotient(k));
}

TEST(FollandStein, OneDimensionalOracle) {
  // For v = theta(log rho) / rho the quotient reduces to
  // 1 + int theta_u^2 du / int theta^2 du - alpha^2.
  for (int k : {4, 16, 64}) {
    const FollandSteinSequence s(k);
    const double l = s.L();
    auto th = [&](double u) { return s.theta(u); };
    auto dth = [&](double u) {
      if (u > -2 * l && u < -l) return smoothstep_derivative((u + 2 * l) / l) / l;
      if (u > l && u < 2 * l) return -smoothstep_derivative((2 * l - u) / l) / l;
      return 0.0;
    };
    const std::vector<double> br = {-2 * l, -l, l, 2 * l};
    const double gl = 1 + split_integral([&](double u) { return dth(u) * dth(u); }, br) /
                              split_integral([&](double u) { return th(u) * th(u); }, br);
    EXPECT_NEAR(garofalo_lanconelli_quotient(k), gl, 1e-10 * gl) << k;
    EXPECT_NEAR(folland_stein_quotient(0.3, k).quotient, gl - 0.09, 1e-10) << k;
  }
}

TEST(FollandStein, ReductionMatchesDirectForm) {
  // <L_a u, u> = int |grad u|^2 + a Re((-i d_z u) conj u) for u = v e^{i f_a}
  const double alpha = 0.5;
  const FollandSteinSequence s(4);
  const auto u = s.u_field(alpha);
  const auto R = detail::rho_angle_rule(s);
  double direct = 0;
  for (std::size_t i = 0; i < R.u.size(); ++i)
    for (std::size_t j = 0; j < R.t.size(); ++j) {
      const double rho = std::exp(R.u[i]);
      const Point p{rho * std::sqrt(std::cos(R.t[j])), 0, rho * rho * std::sin(R.t[j]) / 4};
      const auto J = u.jet<1>(p);
      const double dq = 2 * kPi * std::pow(rho, 4) / 4 * R.wu[i] * R.wt[j];
      direct += dq * (std::norm(op_X(J, p).value()) + std::norm(op_Y(J, p).value()) +
                      alpha * std::real(-kI * op_Z(J, p).value() * std::conj(J.value())));
      EXPECT_NEAR(std::abs(J.value()), std::real(s.v_field()(p)), 1e-15);
    }
  const auto rep = folland_stein_quotient(alpha, 4);
  EXPECT_NEAR(direct, rep.numerator, 1e-9 * std::abs(rep.numerator));
}

TEST(FollandStein, LowerBoundAndTrend) {
  for (double a : {-0.8, 0.0, 0.5, 0.9}) {
    double prev = INFINITY;
    for (int k : {2, 8, 32, 128}) {
      const auto r = folland_stein_quotient(a, k);
      EXPECT_GE(r.quotient, 1 - a * a - 1e-6);
      EXPECT_LT(r.quotient, prev);
      prev = r.quotient;
    }
  }
  EXPECT_THROW(folland_stein_quotient(1.0, 8), ContractError);
  EXPECT_THROW(folland_stein_quotient(0.5, 1), ContractError);
}

TEST(FollandStein, ThreadInvariance) {
  EXPECT_EQ(folland_stein_quotient(0.5, 64, 3).quotient, folland_stein_quotient(0.5, 64, 1).quotient);
}

TEST(SquareIdentity, GroundStateAnnihilatesBothFactors) {
  const auto u = ScalarField::analytic(
      [](const auto& x, const auto& y, const auto& z) { return 1.0 / koranyi(x, y, z); });
  for (const auto& p : sample_points(8, 40, 0.1, 3, 2)) {
    const auto d = apply_frame(u, p);
    const double r = p.r(), rho4 = std::pow(koranyi(p), 4);
    const cplx u0 = u(p);
    EXPECT_NEAR(std::abs(d.R + r * r * r / rho4 * u0), 0, 1e-14);
    EXPECT_NEAR(std::abs(d.Phi + 4 * r * p.z / rho4 * u0), 0, 1e-14);
  }
}

TEST(SquareIdentity, RandomBlobs) {
  for (const auto& b : random_blobs(21, 3)) {
    const auto rep = gl_square_identity(b.field(), battery_rule());
    EXPECT_LE(rep.discrepancy, 1e-6);
    EXPECT_GE(rep.p0, 0);
    EXPECT_GT(rep.dirichlet, 0);
  }
}

TEST(ImprovedGL, EvenBlob) {
  const BlobField even{2.2, 0.3, 0.0, 0.45, 0.7, 0.6, 0.0};
  const auto rep = improved_gl_check(0.5, even.field(), small_rule());
  EXPECT_EQ(rep.symmetry, "z-even");
  EXPECT_GE(rep.value, -1e-6 * rep.Q);
  EXPECT_GT(rep.improvement, 0);
}

TEST(ImprovedGL, IntegerAlphaHasNoImprovement) {
  const BlobField even{2.2, 0.3, 0.0, 0.45, 0.7, 0.6, 0.0};
  const auto rep = improved_gl_check(1.0, even.field(), small_rule());
  EXPECT_EQ(rep.improvement, 0.0);
  EXPECT_GE(rep.value, -1e-6 * rep.Q);
}

TEST(ImprovedGL, RotationInvariantField) {
  const auto u = ScalarField::analytic([](const auto& x, const auto& y, const auto& z) {
    const auto r2 = x * x + y * y;
    return r2 * exp(-(r2 - 4.0) * (r2 - 4.0) / 4.0 - (z - 0.4) * (z - 0.4));
  });
  const auto rep = improved_gl_check(0.3, u, small_rule());
  EXPECT_EQ(rep.symmetry, "single-mode");
  EXPECT_GE(rep.value, -1e-6 * rep.Q);
}

TEST(ImprovedGL, RejectsUnsymmetricField) {
  const BlobField odd{2.2, 0.3, 0.5, 0.45, 0.7, 0.6, 0.4};
  EXPECT_THROW(improved_gl_check(0.5, odd.field(), small_rule()), ContractError);
}

TEST(LogHardy, RadialInequality) {
  const double r1 = 1.0;
  const auto a = radial_log_hardy_check(bump_profile(2 * r1, 4 * r1), r1);
  EXPECT_TRUE(a.holds());
  const auto b = radial_log_hardy_check(bump_profile(r1 / 8, r1 / 2), r1);
  EXPECT_TRUE(b.holds());
  const RadialProfile zero{[](double) { return 0.0; }, [](double) { return 0.0; }, 2.0, 3.0};
  const auto c = radial_log_hardy_check(zero, r1);
  EXPECT_EQ(c.lhs, 0.0);
  EXPECT_EQ(c.rhs, 0.0);
  EXPECT_TRUE(c.holds());
  EXPECT_THROW(radial_log_hardy_check(bump_profile(0.5, 2), r1), ContractError);
  // scale invariance of both sides under r -> 3r, r1 -> 3 r1
  const auto d = radial_log_hardy_check(bump_profile(6, 12), 3);
  EXPECT_NEAR(d.lhs, a.lhs, 1e-10 * a.lhs);
  EXPECT_NEAR(d.rhs, a.rhs, 1e-10 * a.rhs);
}

TEST(Laptev, IntervalsAndCharacterization) {
  const auto T = laptev_interval_data(0.5, 0.2, 4);
  ASSERT_GE(T.rows.size(), 2u);
  EXPECT_EQ(T.rows[1].ell, 1);
  EXPECT_DOUBLE_EQ(T.rows[1].alpha, std::sqrt(2.8));
  EXPECT_DOUBLE_EQ(T.rows[1].beta, std::sqrt(3.2));
  for (double g : {0.25, 0.5}) {
    const auto t = laptev_interval_data(g, g / 4, 20);
    EXPECT_EQ(t.mismatches, 0);
    EXPECT_EQ(t.samples, 11 * 10000);
    EXPECT_TRUE(std::isfinite(t.Lambda));
    EXPECT_TRUE(t.ratio_nonincreasing);
    for (const auto& r : t.rows) {
      EXPECT_LE(r.beta, t.Lambda * r.alpha);
      EXPECT_LE(r.length, t.Lambda * r.alpha);
    }
  }
  // negative gamma: I_0 is empty
  const auto neg = laptev_interval_data(2.7, 0.1, 5);
  EXPECT_EQ(neg.m0, 3);
  EXPECT_NEAR(neg.gamma, -0.3, 1e-12);
  EXPECT_EQ(neg.rows.front().ell, 1);
  EXPECT_EQ(neg.mismatches, 0);
  EXPECT_THROW(laptev_interval_data(0.5, 0.3, 3), ContractError);
  EXPECT_THROW(laptev_interval_data(2.0, 0.1, 3), ContractError);
}

TEST(Xiao, GaugeResidualsAndBranches) {
  EXPECT_LE(xiao_gauge_check(Point{1, 0, 1}).max(), 1e-8);
  EXPECT_LE(xiao_gauge_check(Point{1, 0, -1}).max(), 1e-8);
  const auto [up, down] = xiao_gauge_limits(1.0);
  EXPECT_NEAR(up, kPi / 4, 1e-11);
  EXPECT_NEAR(down, kPi / 4, 1e-11);
  EXPECT_EQ(xiao_gauge(Point{1, 0, 0}), kPi / 4);
  EXPECT_NEAR(xiao_gauge(Point{1, 0, -1}), 0.5 * std::atan(-0.25) + kPi / 2, 1e-15);
  for (const auto& p : sample_points(9, 100, 0.05, 4, 3)) EXPECT_LE(xiao_gauge_check(p).max(), 1e-8);
}

TEST(Battery, AllIdentitiesPass) {
  const auto B = identity_battery(7, 200);
  EXPECT_EQ(B.rows.size(), 9u);
  for (const auto& r : B.rows) EXPECT_TRUE(r.pass()) << r.name << " " << r.max_residual;
  EXPECT_TRUE(B.all_pass());
}

TEST(Battery, DeterministicAcrossThreads) {
  const auto a = identity_battery(11, 60, 1);
  const auto b = identity_battery(11, 60, 4);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) EXPECT_EQ(a.rows[i].max_residual, b.rows[i].max_residual);
}
