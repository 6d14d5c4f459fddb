#pragma once
// Quantitative checks behind the Hardy-type results: cutoff sequences and
// Rayleigh quotients for sharpness, closed-form identities, log-Hardy
// ingredients and the gauge function of the Garofalo-Lanconelli weight.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "heisenmag/core.hpp"
#include "heisenmag/fibers.hpp"
#include "heisenmag/forms.hpp"
#include "heisenmag/parallel.hpp"
#include "heisenmag/quadrature.hpp"

namespace heisenmag {

// Polynomial step S(s) = 35 s^4 - 84 s^5 + 70 s^6 - 20 s^7 on [0, 1]; S' is
// the normalized bump 140 s^3 (1 - s)^3, so S is C^3 with S'(1/2) = 35/16.
template <class J>
J smoothstep(const J& s) {
  const J s2 = s * s;
  return s2 * s2 * (35.0 + s * (-84.0 + s * (70.0 - 20.0 * s)));
}
inline double smoothstep_derivative(double s) { return 140 * std::pow(s * (1 - s), 3); }

// xi = 0 on [0, a], 1 on [1 - a, 1], S((x - a) / (1 - 2a)) in between.
struct CutoffProfile {
  double a = 0.1;

  template <class J>
  J operator()(const J& x) const {
    const double x0 = std::real(jet_value(x));
    if (x0 <= a) return x * 0.0;
    if (x0 >= 1 - a) return x * 0.0 + 1.0;
    return smoothstep((x - a) / (1 - 2 * a));
  }
  double derivative(double x) const {
    if (x <= a || x >= 1 - a) return 0;
    return smoothstep_derivative((x - a) / (1 - 2 * a)) / (1 - 2 * a);
  }
  double sup_derivative() const { return 35.0 / 16.0 / (1 - 2 * a); }

 private:
  static double jet_value(double v) { return v; }
  template <class T, int N>
  static T jet_value(const Jet<T, N>& v) {
    return v.value();
  }
};

// Profile on the half line with explicit support [lo, hi].
struct RadialProfile {
  std::function<double(double)> f, df;
  double lo, hi;
  double operator()(double r) const { return f(r); }
};

inline RadialProfile eta_n(int n, const CutoffProfile& xi = {}) {
  if (n < 2) throw ContractError("eta_n: need n >= 2");
  const double N = n, ln = std::log(N);
  auto f = [=](double r) {
    if (r < 1 / (N * N) || r > N * N) return 0.0;
    if (r <= 1 / N) return xi(std::log(N * N * r) / ln);
    if (r < N) return 1.0;
    return xi(std::log(N * N / r) / ln);
  };
  auto df = [=](double r) {
    if (r < 1 / (N * N) || r > N * N) return 0.0;
    if (r <= 1 / N) return xi.derivative(std::log(N * N * r) / ln) / (r * ln);
    if (r < N) return 0.0;
    return -xi.derivative(std::log(N * N / r) / ln) / (r * ln);
  };
  return {f, df, 1 / (N * N), N * N};
}

inline RadialProfile chi_n(int n, const CutoffProfile& xi = {}) {
  if (n < 2) throw ContractError("chi_n: need n >= 2");
  const double n4 = std::pow(double(n), 4);
  auto f = [=](double s) {
    s = std::abs(s);
    if (s < n4) return 1.0;
    if (s > 2 * n4) return 0.0;
    return xi(2 - s / n4);
  };
  auto df = [=](double s) {
    const double sg = s < 0 ? -1.0 : 1.0;
    s = std::abs(s);
    if (s < n4 || s > 2 * n4) return 0.0;
    return -sg * xi.derivative(2 - s / n4) / n4;
  };
  return {f, df, 0.0, 2 * n4};
}

// Integrals of eta_n and chi_n: plateaus in closed form, shells in the
// logarithmic (resp. rescaled) variable s in [0, 1].
struct EtaIntegrals {
  double inv_r;  // int eta^2 / r dr
  double grad;   // int eta'^2 r dr
  double r3;     // int eta^2 r^3 dr
};
struct ChiIntegrals {
  double mass;  // int_R chi(|s|)^2 ds
  double grad;  // int_R chi'(|s|)^2 ds
};

namespace detail {

inline QuadOptions shell_options() {
  QuadOptions o;
  o.abs_tol = 0;
  o.rel_tol = 1e-14;
  return o;
}

inline double xi_square_integral(const CutoffProfile& xi) {
  return integrate([&](double s) { return xi(s) * xi(s); }, 0.0, 1.0, shell_options()).value;
}
inline double xi_grad_integral(const CutoffProfile& xi) {
  return integrate([&](double s) { return std::pow(xi.derivative(s), 2); }, 0.0, 1.0,
                   shell_options())
      .value;
}

}  // namespace detail

inline EtaIntegrals eta_integrals(int n, const CutoffProfile& xi = {}) {
  if (n < 2) throw ContractError("eta_integrals: need n >= 2");
  const double N = n, ln = std::log(N);
  const double A0 = detail::xi_square_integral(xi), A1 = detail::xi_grad_integral(xi);
  // r = n^{s-2} on the inner shell, n^{2-s} on the outer one; dr / r = ln n ds.
  const double shells_r3 =
      ln * integrate(
               [&](double s) {
                 const double x = xi(s);
                 return x * x * (std::pow(N, 4 * (s - 2)) + std::pow(N, 4 * (2 - s)));
               },
               0.0, 1.0, detail::shell_options())
               .value;
  return {2 * ln * (1 + A0), 2 * A1 / ln, (std::pow(N, 4) - std::pow(N, -4)) / 4 + shells_r3};
}

inline ChiIntegrals chi_integrals(int n, const CutoffProfile& xi = {}) {
  if (n < 2) throw ContractError("chi_integrals: need n >= 2");
  const double n4 = std::pow(double(n), 4);
  return {2 * n4 * (1 + detail::xi_square_integral(xi)), 2 * detail::xi_grad_integral(xi) / n4};
}

struct RayleighReport {
  int n;
  double alpha;
  int m_star;
  double I1, I2, I3;
  double denominator;  // |psi_n / r|^2
  double quotient;
  double target;    // d(alpha, Z)^2
  double bound_I1;  // |xi'|^2 / log^2 n
  double bound_I3;  // |xi'|^2 / (32 log n)
  bool within_bounds() const {
    return I1 / denominator <= bound_I1 && I3 / denominator <= bound_I3;
  }
};

// Q_{m*}(psi_n) / |psi_n / r|^2 for psi_n(r, z) = eta_n(r) chi_n(|z|); every
// term factors into r- and z-integrals.
inline RayleighReport sharpness_quotient_lw(double alpha, int n, const CutoffProfile& xi = {}) {
  if (dist_to_integers(alpha) == 0)
    throw ContractError("sharpness_quotient_lw: alpha must not be an integer");
  const auto E = eta_integrals(n, xi);
  const auto C = chi_integrals(n, xi);
  RayleighReport rep;
  rep.n = n;
  rep.alpha = alpha;
  rep.m_star = nearest_mode(alpha);
  const double beta = alpha - rep.m_star;
  rep.I1 = E.grad * C.mass;
  rep.I2 = beta * beta * E.inv_r * C.mass;
  rep.I3 = 0.25 * E.r3 * C.grad;
  rep.denominator = E.inv_r * C.mass;
  rep.quotient = (rep.I1 + rep.I2 + rep.I3) / rep.denominator;
  rep.target = beta * beta;
  const double s2 = xi.sup_derivative() * xi.sup_derivative(), ln = std::log(double(n));
  rep.bound_I1 = s2 / (ln * ln);
  rep.bound_I3 = s2 / (32 * ln);
  return rep;
}

// ---------------------------------------------------------------------------
// Folland-Stein operator L_alpha = -Delta - i alpha d_z.

// f_alpha = -(alpha / 2) arctan(4z / r^2), written through atan2 so that jets
// carry its derivatives.
template <class J>
J f_alpha(double alpha, const J& x, const J& y, const J& z) {
  return -0.5 * alpha * angle(x * x + y * y, 4.0 * z);
}

// | |grad f|^2 + alpha Z f + alpha^2 r^2 / rho^4 |
inline double f_alpha_identity(double alpha, const Point& p) {
  require_off_axis(p, "f_alpha_identity");
  const auto c = coords<1>(p);
  const auto f = f_alpha(alpha, c.x, c.y, c.z);
  const cplx lhs = op_X(f, p).value() * op_X(f, p).value() +
                   op_Y(f, p).value() * op_Y(f, p).value() + alpha * op_Z(f, p).value();
  return std::abs(lhs + alpha * alpha * hardy_weight(p));
}

struct RhoAlphaReport {
  double gradient;  // |grad rho_a - w (grad rho + i a grad_perp rho)|
  double vertical;  // |d_z rho_a - w (d_z rho + 2 i a |grad rho|^2 / rho)|
  double norm;      // ||grad rho_a|^2 - (1 + a^2) |grad rho|^2|
  double w_modulus;
  double max() const { return std::max({gradient, vertical, norm}); }
};

inline RhoAlphaReport rho_alpha_gradient_check(double alpha, const Point& p) {
  require_off_axis(p, "rho_alpha_gradient_check");
  const auto c = coords<1>(p);
  const auto rho = koranyi(c.x, c.y, c.z);
  const auto w = exp(-kI * f_alpha(alpha, c.x, c.y, c.z));
  const auto ra = rho * w;
  const cplx Xr = op_X(rho, p).value(), Yr = op_Y(rho, p).value(), Zr = op_Z(rho, p).value();
  const cplx Xa = op_X(ra, p).value(), Ya = op_Y(ra, p).value(), Za = op_Z(ra, p).value();
  const cplx w0 = w.value(), r0 = rho.value();
  const double g2 = std::norm(Xr) + std::norm(Yr);
  RhoAlphaReport rep;
  // grad_perp rho = (-Y rho) X + (X rho) Y
  rep.gradient = std::hypot(std::abs(Xa - w0 * (Xr - kI * alpha * Yr)),
                            std::abs(Ya - w0 * (Yr + kI * alpha * Xr)));
  rep.vertical = std::abs(Za - w0 * (Zr + 2.0 * kI * alpha * g2 / r0));
  rep.norm = std::abs(std::norm(Xa) + std::norm(Ya) - (1 + alpha * alpha) * g2);
  rep.w_modulus = std::abs(w0);
  return rep;
}

// v_k = theta(log rho) / rho with theta = 1 on [-L, L], L = log k, smooth
// steps over [-2L, -L] and [L, 2L], zero outside: a smoothed truncation of
// rho^-1 on {1/k <= rho <= k}.
struct FollandSteinSequence {
  int k;

  explicit FollandSteinSequence(int kk) : k(kk) {
    if (kk < 2) throw ContractError("FollandSteinSequence: need k >= 2 for a non-empty plateau");
  }
  double L() const { return std::log(double(k)); }

  template <class J>
  J theta(const J& u) const {
    const double u0 = std::real(value_of(u)), l = L();
    if (u0 <= -2 * l || u0 >= 2 * l) return u * 0.0;
    if (u0 < -l) return smoothstep((u + 2 * l) / l);
    if (u0 > l) return smoothstep((2 * l - u) / l);
    return u * 0.0 + 1.0;
  }
  template <class J>
  J v(const J& x, const J& y, const J& z) const {
    const J rho = koranyi(x, y, z);
    return theta(log(rho)) / rho;
  }
  ScalarField v_field() const {
    const FollandSteinSequence s = *this;
    return ScalarField::analytic(
        [s](const auto& x, const auto& y, const auto& z) { return s.v(x, y, z); });
  }
  // u_k = v_k e^{i f_alpha}
  ScalarField u_field(double alpha) const {
    const FollandSteinSequence s = *this;
    return ScalarField::analytic([s, alpha](const auto& x, const auto& y, const auto& z) {
      return s.v(x, y, z) * exp(kI * f_alpha(alpha, x, y, z));
    });
  }

 private:
  static double value_of(double v) { return v; }
  template <class T, int N>
  static T value_of(const Jet<T, N>& v) {
    return v.value();
  }
};

struct FollandSteinReport {
  double alpha;
  int k;
  double numerator;  // int |grad v|^2 + v^2 (|grad f|^2 + alpha Z f)
  double weight;     // int |u|^2 r^2 / rho^4
  double quotient;
  double target;  // 1 - alpha^2
};

namespace detail {

// Tensor rule in (u = log rho, t) with r^2 = rho^2 cos t, 4z = rho^2 sin t,
// r dr dz = (rho^3 / 4) d rho dt; the phi integral contributes 2 pi.
struct RhoAngleRule {
  std::vector<double> u, wu, t, wt;
};

inline RhoAngleRule rho_angle_rule(const FollandSteinSequence& s, int panels = 12, int order = 16,
                                   int angle_panels = 4) {
  RhoAngleRule R;
  const double l = s.L();
  for (auto [a, b] : {std::pair{-2 * l, -l}, std::pair{-l, l}, std::pair{l, 2 * l}}) {
    const auto g = composite_gauss(a, b, panels, order);
    R.u.insert(R.u.end(), g.x.begin(), g.x.end());
    R.wu.insert(R.wu.end(), g.w.begin(), g.w.end());
  }
  const auto g = composite_gauss(-kPi / 2, kPi / 2, angle_panels, order);
  R.t = g.x;
  R.wt = g.w;
  return R;
}

// Rows of (numerator, weight) integrands summed in a fixed order.
inline std::pair<double, double> folland_stein_integrals(const FollandSteinSequence& s,
                                                         double alpha, int threads) {
  const auto R = rho_angle_rule(s);
  const int nu = static_cast<int>(R.u.size());
  const auto rows = parallel_map(nu, threads, [&](int i) {
    const double rho = std::exp(R.u[i]);
    double num = 0, wgt = 0;
    for (std::size_t j = 0; j < R.t.size(); ++j) {
      const double r = rho * std::sqrt(std::cos(R.t[j]));
      const double z = rho * rho * std::sin(R.t[j]) / 4;
      const Point p{r, 0, z};
      const double dq = 2 * kPi * std::pow(rho, 4) / 4 * R.wu[i] * R.wt[j];
      const auto c = coords<1>(p);
      const auto v = s.v(c.x, c.y, c.z);
      const auto f = f_alpha(alpha, c.x, c.y, c.z);
      const double v0 = std::real(v.value());
      const double gv = std::norm(op_X(v, p).value()) + std::norm(op_Y(v, p).value());
      const double gf = std::norm(op_X(f, p).value()) + std::norm(op_Y(f, p).value());
      const double zf = std::real(op_Z(f, p).value());
      num += dq * (gv + v0 * v0 * (gf + alpha * zf));
      wgt += dq * v0 * v0 * hardy_weight(p);
    }
    return std::pair{num, wgt};
  });
  double num = 0, wgt = 0;
  for (const auto& [a, b] : rows) {
    num += a;
    wgt += b;
  }
  return {num, wgt};
}

}  // namespace detail

inline FollandSteinReport folland_stein_quotient(double alpha, int k, int threads = 1) {
  if (!(std::abs(alpha) < 1)) throw ContractError("folland_stein_quotient: need |alpha| < 1");
  const FollandSteinSequence s(k);
  const auto [num, wgt] = detail::folland_stein_integrals(s, alpha, threads);
  return {alpha, k, num, wgt, num / wgt, 1 - alpha * alpha};
}

// int |grad v_k|^2 / int v_k^2 r^2 / rho^4, through the same pipeline.
inline double garofalo_lanconelli_quotient(int k, int threads = 1) {
  const FollandSteinSequence s(k);
  const auto [num, wgt] = detail::folland_stein_integrals(s, 0.0, threads);
  return num / wgt;
}

// ---------------------------------------------------------------------------
// Completed-square form of the Garofalo-Lanconelli quadratic form.

struct SquareIdentityReport {
  double p0;          // int |grad u|^2 - (r^2 / rho^4) |u|^2
  double square;      // int |R u + (r^3/rho^4) u|^2 + |Phi u + (4rz/rho^4) u|^2
  double dirichlet;   // int |grad u|^2
  double discrepancy; // |p0 - square| / dirichlet
};

template <class F>
void for_each_node(const CylinderRule& rule, const F& f) {
  for (std::size_t a = 0; a < rule.r.x.size(); ++a) {
    const double r = rule.r.x[a];
    if (!(r > 0)) throw ContractError("cylinder rule touches r = 0");
    for (std::size_t b = 0; b < rule.phi.x.size(); ++b)
      for (std::size_t c = 0; c < rule.z.x.size(); ++c)
        f(Point::cylindrical(r, rule.phi.x[b], rule.z.x[c]),
          rule.r.w[a] * rule.phi.w[b] * rule.z.w[c] * r);
  }
}

inline SquareIdentityReport gl_square_identity(const ScalarField& u, const CylinderRule& rule) {
  SquareIdentityReport rep{0, 0, 0, 0};
  for_each_node(rule, [&](const Point& p, double w) {
    const auto j = u.jet<1>(p);
    const cplx u0 = j.value();
    const double r = p.r(), rho = koranyi(p), rho4 = std::pow(rho, 4);
    const double g = std::norm(op_X(j, p).value()) + std::norm(op_Y(j, p).value());
    rep.dirichlet += w * g;
    rep.p0 += w * (g - hardy_weight(p) * std::norm(u0));
    rep.square += w * (std::norm(op_R(j, p).value() + r * r * r / rho4 * u0) +
                       std::norm(op_Phi(j, p).value() + 4 * r * p.z / rho4 * u0));
  });
  rep.discrepancy = std::abs(rep.p0 - rep.square) / std::max(rep.dirichlet, 1e-300);
  return rep;
}

// Q_alpha(u) - int (r^2/rho^4)|u|^2 - d(alpha,Z)^2 int (|u|^2/r^2)(1 - |grad rho|^4)
struct ImprovedGLReport {
  double Q;            // int |R u|^2 + |Phi u + i alpha u / r|^2
  double gl_term;      // int (r^2 / rho^4) |u|^2
  double improvement;  // d^2 int (|u|^2 / r^2)(1 - |grad rho|^4)
  double value;        // Q - gl_term - improvement
  cplx phi_inner;      // <-i Phi u, u / r>, exposed raw
  std::string symmetry;  // "z-even" or "single-mode"
};

inline ImprovedGLReport improved_gl_check(double alpha, const ScalarField& u,
                                          const CylinderRule& rule) {
  double umax = 0, even = 0, mode = 0;
  cplx num = 0;
  double den = 0;
  for_each_node(rule, [&](const Point& p, double w) {
    const auto j = u.jet<1>(p);
    umax = std::max(umax, std::abs(j.value()));
    even = std::max(even, std::abs(j.value() - u(Point{p.x, p.y, -p.z})));
    num += w * std::conj(j.value()) * (-kI * op_dphi(j, p).value());
    den += w * std::norm(j.value());
  });
  const double n = std::round(std::real(num / den));
  for_each_node(rule, [&](const Point& p, double) {
    const auto j = u.jet<1>(p);
    mode = std::max(mode, std::abs(-kI * op_dphi(j, p).value() - n * j.value()));
  });
  ImprovedGLReport rep{0, 0, 0, 0, 0, ""};
  if (even <= 1e-10 * umax)
    rep.symmetry = "z-even";
  else if (mode <= 1e-10 * umax)
    rep.symmetry = "single-mode";
  else
    throw ContractError("improved_gl_check: u is neither z-even nor a single angular mode");
  const double d = dist_to_integers(alpha);
  for_each_node(rule, [&](const Point& p, double w) {
    const auto j = u.jet<1>(p);
    const cplx u0 = j.value();
    const double r = p.r(), rho4 = std::pow(koranyi(p), 4);
    const cplx Phu = op_Phi(j, p).value();
    rep.Q += w * (std::norm(op_R(j, p).value()) + std::norm(Phu + kI * alpha * u0 / r));
    rep.gl_term += w * hardy_weight(p) * std::norm(u0);
    rep.improvement += w * d * d * std::norm(u0) / (r * r) * (16 * p.z * p.z / rho4);
    rep.phi_inner += w * (-kI * Phu) * std::conj(u0) / r;
  });
  rep.value = rep.Q - rep.gl_term - rep.improvement;
  return rep;
}

// ---------------------------------------------------------------------------
// Logarithmic Hardy ingredients.

struct LogHardyReport {
  double lhs;  // int |f|^2 / (r^2 log^2(r / r1)) r dr
  double rhs;  // 4 int |f'|^2 r dr
  bool holds() const { return lhs <= rhs; }
};

inline LogHardyReport radial_log_hardy_check(const RadialProfile& f, double r1) {
  if (!(r1 > 0)) throw ContractError("radial_log_hardy_check: r1 must be positive");
  if (f.lo <= r1 && r1 <= f.hi)
    throw ContractError("radial_log_hardy_check: support must stay away from r1");
  QuadOptions o;
  o.abs_tol = 0;
  o.rel_tol = 1e-12;
  const double lhs = integrate(
                         [&](double r) {
                           const double l = std::log(r / r1), v = f(r);
                           return v * v / (r * l * l);
                         },
                         f.lo, f.hi, o)
                         .value;
  const double rhs = 4 * integrate([&](double r) { return std::pow(f.df(r), 2) * r; }, f.lo,
                                   f.hi, o)
                             .value;
  return {lhs, rhs};
}

// ((r - a)(b - r))^p / ((b - a)/2)^{2p} on [a, b].
inline RadialProfile bump_profile(double a, double b, int p = 4) {
  if (!(b > a)) throw ContractError("bump_profile: need a < b");
  const double s = std::pow(0.5 * (b - a), 2 * p);
  auto f = [=](double r) {
    if (r <= a || r >= b) return 0.0;
    return std::pow((r - a) * (b - r), p) / s;
  };
  auto df = [=](double r) {
    if (r <= a || r >= b) return 0.0;
    const double q = (r - a) * (b - r);
    return p * std::pow(q, p - 1) * (a + b - 2 * r) / s;
  };
  return {f, df, a, b};
}

struct LaptevRow {
  int ell;
  double alpha, beta, length;
};

struct LaptevTable {
  double flux, gamma, eps;
  int m0;
  std::vector<LaptevRow> rows;
  double Lambda;             // max over rows of max(beta/alpha, |I|/alpha)
  bool ratio_nonincreasing;  // |I_l| / alpha_l along l
  long samples = 0;
  long mismatches = 0;  // sampled s where (lambda^- < eps^2/4) != (s in I_{m+m0})
};

// lambda_m^-(s) = (m - s^2/2 + F_B)^2 with F_B = m0 + gamma, gamma in (-1/2, 1/2].
inline double laptev_lambda_minus(int m, double s, double flux) {
  const double q = m - 0.5 * s * s + flux;
  return q * q;
}

inline LaptevTable laptev_interval_data(double flux, double eps, int ell_max, int mode_max = 5,
                                        int samples_per_mode = 10000) {
  if (dist_to_integers(flux) == 0)
    throw ContractError("laptev_interval_data: flux must not be an integer");
  LaptevTable T;
  T.flux = flux;
  T.m0 = static_cast<int>(std::ceil(flux - 0.5));
  T.gamma = flux - T.m0;
  T.eps = eps;
  if (!(eps > 0 && eps < std::abs(T.gamma) / 2))
    throw ContractError("laptev_interval_data: need 0 < eps < |gamma| / 2");
  const double g = T.gamma;
  auto interval = [&](int ell, double& a, double& b) {
    if (ell < 0 || (ell == 0 && g < 0)) return false;
    a = std::sqrt(2 * (ell + g) - eps);
    b = std::sqrt(2 * (ell + g) + eps);
    return true;
  };
  T.Lambda = 0;
  T.ratio_nonincreasing = true;
  double prev = INFINITY;
  for (int ell = 0; ell <= ell_max; ++ell) {
    double a, b;
    if (!interval(ell, a, b)) continue;
    T.rows.push_back({ell, a, b, b - a});
    T.Lambda = std::max({T.Lambda, b / a, (b - a) / a});
    if ((b - a) / a > prev) T.ratio_nonincreasing = false;
    prev = (b - a) / a;
  }
  // Half the samples uniform over (0, smax), half concentrated near I_{m+m0}.
  const double smax = std::sqrt(2 * (mode_max + std::abs(T.m0) + 1.0) + 1) + 1;
  for (int m = -mode_max; m <= mode_max; ++m) {
    const int ell = m + T.m0;
    double a = 0, b = 0;
    const bool has = interval(ell, a, b);
    const int half = samples_per_mode / 2;
    for (int i = 0; i < samples_per_mode; ++i) {
      double s;
      if (!has || i < half) {
        s = smax * (i + 0.5) / (has ? half : samples_per_mode);
      } else {
        const double w = b - a;
        s = std::max(1e-12, a - w + 3 * w * (i - half + 0.5) / (samples_per_mode - half));
      }
      const bool small = laptev_lambda_minus(m, s, flux) < eps * eps / 4;
      const bool inside = has && a < s && s < b;
      ++T.samples;
      if (small != inside) ++T.mismatches;
    }
  }
  return T;
}

// ---------------------------------------------------------------------------
// Gauge function with d_H g = -(alpha d phi) / alpha, i.e. X g = Y rho / rho,
// Y g = -X rho / rho: g = (1/2) arctan(r^2 / 4z) on z > 0, pi/4 on z = 0 and
// (1/2) arctan(r^2 / 4z) + pi/2 on z < 0, which is (1/2) atan2(r^2, 4z).

template <class J>
J xiao_gauge(const J& x, const J& y, const J& z) {
  return 0.5 * angle(4.0 * z, x * x + y * y);
}
inline double xiao_gauge(const Point& p) {
  if (p.z > 0) return 0.5 * std::atan((p.x * p.x + p.y * p.y) / (4 * p.z));
  if (p.z == 0) return kPi / 4;
  return 0.5 * std::atan((p.x * p.x + p.y * p.y) / (4 * p.z)) + kPi / 2;
}

struct XiaoReport {
  double x_residual;  // |X g - Y rho / rho|
  double y_residual;  // |Y g + X rho / rho|
  double branch;      // |jet value - piecewise formula|
  double max() const { return std::max({x_residual, y_residual, branch}); }
};

inline XiaoReport xiao_gauge_check(const Point& p) {
  require_off_axis(p, "xiao_gauge_check");
  const auto c = coords<1>(p);
  const auto g = xiao_gauge(c.x, c.y, c.z);
  const auto rho = koranyi(c.x, c.y, c.z);
  const cplx r0 = rho.value();
  XiaoReport rep;
  rep.x_residual = std::abs(op_X(g, p).value() - op_Y(rho, p).value() / r0);
  rep.y_residual = std::abs(op_Y(g, p).value() + op_X(rho, p).value() / r0);
  rep.branch = std::abs(std::real(g.value()) - xiao_gauge(p));
  return rep;
}

// One-sided limits of g at z = 0 along the vertical line through (r, phi).
inline std::pair<double, double> xiao_gauge_limits(double r, double phi = 0, double dz = 1e-12) {
  const Point p = Point::cylindrical(r, phi, 0);
  return {xiao_gauge(Point{p.x, p.y, dz}), xiao_gauge(Point{p.x, p.y, -dz})};
}

// ---------------------------------------------------------------------------
// Identity battery.

struct IdentityRow {
  std::string name;
  double max_residual;
  double tolerance;
  bool pass() const { return max_residual <= tolerance; }
};

struct IdentityBattery {
  std::uint64_t seed;
  int points;
  std::vector<IdentityRow> rows;
  bool all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const IdentityRow& r) { return r.pass(); });
  }
};

// Gaussian blob times a linear complex factor, centred off the axis so that
// it is negligible near the origin and at the edge of `battery_rule()`.
struct BlobField {
  double cx, cy, cz, s, sz, a, b;
  template <class J>
  J operator()(const J& x, const J& y, const J& z) const {
    const J dx = x - cx, dy = y - cy, dz = z - cz;
    return (1.0 + kI * a * x + b * z) * exp(-(dx * dx + dy * dy) / (s * s) - dz * dz / (sz * sz));
  }
  ScalarField field() const {
    const BlobField f = *this;
    return ScalarField::analytic([f](const auto& x, const auto& y, const auto& z) { return f(x, y, z); });
  }
};

inline std::vector<BlobField> random_blobs(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> rc(2.0, 2.5), ph(-kPi, kPi), zc(-1, 1), s(0.35, 0.5),
      sz(0.5, 0.8), c(-1, 1);
  std::vector<BlobField> out;
  for (int i = 0; i < count; ++i) {
    const double r = rc(rng), p = ph(rng);
    out.push_back({r * std::cos(p), r * std::sin(p), zc(rng), s(rng), sz(rng), c(rng), c(rng)});
  }
  return out;
}

inline CylinderRule battery_rule() { return cylinder_rule(0, 5, -6, 6, 10, 10, 96); }

inline IdentityBattery identity_battery(std::uint64_t seed = 7, int points = 200, int threads = 1) {
  IdentityBattery B{seed, points, {}};
  const auto pts = sample_points(seed, points, 0.2, 3.0, 2.0);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> lam(0.1, 10), al(-0.95, 0.95);
  std::vector<double> lams(points), alphas(points);
  for (int i = 0; i < points; ++i) {
    lams[i] = lam(rng);
    alphas[i] = al(rng);
  }
  constexpr int kRows = 8;
  const auto res = parallel_map(points, threads, [&](int i) {
    const Point& p = pts[i];
    const double r = p.r(), rho = koranyi(p), rho4 = std::pow(rho, 4);
    std::array<double, kRows> v{};
    {
      const auto c = coords<1>(p);
      const auto R = koranyi(c.x, c.y, c.z);
      const double g = std::sqrt(std::norm(op_X(R, p).value()) + std::norm(op_Y(R, p).value()));
      v[0] = std::abs(g - r / rho) / (r / rho);
    }
    v[1] = std::abs(koranyi(dilate(p, lams[i])) - lams[i] * rho) / (lams[i] * rho);
    v[2] = std::abs(1 / (r * r) - (r * r / rho4 + 16 * p.z * p.z / (r * r * rho4))) * r * r;
    v[3] = f_alpha_identity(alphas[i], p);
    v[4] = rho_alpha_gradient_check(alphas[i], p).max();
    v[5] = fundamental_harmonicity_check(p) * rho4;
    v[6] = xiao_gauge_check(p).max();
    v[7] = std::abs(rho_alpha_gradient_check(alphas[i], p).w_modulus - 1);
    return v;
  });
  const char* names[kRows] = {"|grad rho| = r/rho",
                              "rho(delta_lambda p) = lambda rho(p)",
                              "1/r^2 = r^2/rho^4 + 16z^2/(r^2 rho^4)",
                              "|grad f_a|^2 + a Z f_a = -a^2 r^2/rho^4",
                              "grad rho_a, d_z rho_a, |grad rho_a|^2",
                              "Delta rho^-2 = 0",
                              "X g = Y rho/rho, Y g = -X rho/rho",
                              "|w_a| = 1"};
  const double tols[kRows] = {1e-12, 1e-12, 1e-12, 1e-9, 1e-8, 1e-8, 1e-8, 1e-12};
  for (int k = 0; k < kRows; ++k) {
    double m = 0;
    for (const auto& v : res) m = std::max(m, v[k]);
    B.rows.push_back({names[k], m, tols[k]});
  }
  const auto blobs = random_blobs(seed, 5);
  const auto rule = battery_rule();
  const auto sq = parallel_map(5, threads, [&](int i) {
    return gl_square_identity(blobs[i].field(), rule).discrepancy;
  });
  B.rows.push_back({"completed-square form, 5 blobs", *std::max_element(sq.begin(), sq.end()), 1e-6});
  return B;
}

}  // namespace heisenmag
