#pragma once
// Horizontal forms of the Rumin complex, the second-order differential D,
// primitives, gauges and the flux of cylinder-supported fields.

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "json.hpp"

#include "heisenmag/core.hpp"
#include "heisenmag/quadrature.hpp"

namespace heisenmag {

// Cartesian:   first dx + second dy            (1-forms)
//              first dx^w + second dy^w        (2-forms, w = omega)
// Cylindrical: first dr + second r dphi
//              first dr^w + second r dphi^w
enum class Representation { Cartesian, Cylindrical };

struct Horizontal1Form {
  Representation rep = Representation::Cartesian;
  ScalarField first, second;
  std::optional<nlohmann::json> descriptor;
};

struct Horizontal2Form {
  Representation rep = Representation::Cartesian;
  ScalarField first, second;
  std::optional<double> support_radius;
  std::optional<nlohmann::json> descriptor;
};

inline constexpr double kRoundTripTol = 1e-6;    // analytic derivatives
inline constexpr double kRoundTripTolFd = 1e-4;  // finite-difference opt-in

// ---------------------------------------------------------------------------
// Representation changes on jets.

template <int N>
struct JetPair {
  CJet<N> first, second;
};

template <int N, class Form>
JetPair<N> cartesian_jets(const Form& f, const Point& p) {
  auto a = f.first.template jet<N>(p);
  auto b = f.second.template jet<N>(p);
  if (f.rep == Representation::Cartesian) return {a, b};
  require_off_axis(p, "cartesian_jets");
  const auto c = coords<N>(p);
  const auto r = radius(c.x, c.y);
  return {(c.x * a - c.y * b) / r, (c.y * a + c.x * b) / r};
}

template <int N, class Form>
JetPair<N> cylindrical_jets(const Form& f, const Point& p) {
  auto a = f.first.template jet<N>(p);
  auto b = f.second.template jet<N>(p);
  if (f.rep == Representation::Cylindrical) return {a, b};
  require_off_axis(p, "cylindrical_jets");
  const auto c = coords<N>(p);
  const auto r = radius(c.x, c.y);
  return {(c.x * a + c.y * b) / r, (c.x * b - c.y * a) / r};
}

inline int form_max_order(const ScalarField& a, const ScalarField& b) {
  return std::min(a.max_order(), b.max_order());
}

inline bool form_uses_fd(const ScalarField& a, const ScalarField& b) {
  return a.mode() == DerivativeMode::FiniteDifference ||
         b.mode() == DerivativeMode::FiniteDifference;
}

// Convert to the requested representation (off the center line).
template <class Form>
Form to_representation(const Form& f, Representation rep) {
  if (f.rep == rep) return f;
  Form out = f;
  out.rep = rep;
  out.descriptor.reset();
  const int order = form_max_order(f.first, f.second);
  const auto mode = form_uses_fd(f.first, f.second) ? DerivativeMode::FiniteDifference
                                                    : DerivativeMode::Analytic;
  auto get = [f, rep](auto tag, const Point& p, int which) {
    constexpr int N = decltype(tag)::value;
    const auto j = rep == Representation::Cartesian ? cartesian_jets<N>(f, p)
                                                    : cylindrical_jets<N>(f, p);
    return which == 0 ? j.first : j.second;
  };
  out.first = ScalarField::from_jets([get](auto t, const Point& p) { return get(t, p, 0); },
                                     order, mode);
  out.second = ScalarField::from_jets([get](auto t, const Point& p) { return get(t, p, 1); },
                                      order, mode);
  return out;
}

// ---------------------------------------------------------------------------
// d_H and D.

inline Horizontal1Form d_H(const ScalarField& f) {
  Horizontal1Form a;
  a.rep = Representation::Cartesian;
  const auto mode = f.mode();
  a.first = ScalarField::from_jets(
      [f](auto tag, const Point& p) {
        constexpr int N = decltype(tag)::value;
        return op_X(f.jet<N + 1>(p), p);
      },
      f.max_order() - 1, mode);
  a.second = ScalarField::from_jets(
      [f](auto tag, const Point& p) {
        constexpr int N = decltype(tag)::value;
        return op_Y(f.jet<N + 1>(p), p);
      },
      f.max_order() - 1, mode);
  return a;
}

struct RuminOptions {
  bool allow_finite_difference = false;
};

// Jets of DA at p, in A's representation.
template <int N>
JetPair<N> rumin_D_jets(const Horizontal1Form& A, const Point& p) {
  const auto a1 = A.first.jet<N + 2>(p);
  const auto a2 = A.second.jet<N + 2>(p);
  if (A.rep == Representation::Cartesian) {
    // b1 = X(X A_y - Y A_x) - Z A_x,  b2 = Y(X A_y - Y A_x) - Z A_y.
    const auto g = op_X(a2, p) - op_Y(a1, p);
    return {op_X(g, p) - truncate<N>(op_Z(a1, p)), op_Y(g, p) - truncate<N>(op_Z(a2, p))};
  }
  // gamma = (1/r) R(r a2) - Phi a1;  DA = (R gamma - Z a1, Phi gamma - Z a2).
  require_off_axis(p, "rumin_D");
  const auto c = coords<N + 2>(p);
  const auto r = radius(c.x, c.y);
  const auto r1 = truncate<N + 1>(r);
  const auto g = op_R(r * a2, p) / r1 - op_Phi(a1, p);
  return {op_R(g, p) - truncate<N>(op_Z(a1, p)), op_Phi(g, p) - truncate<N>(op_Z(a2, p))};
}

inline Horizontal2Form rumin_D(const Horizontal1Form& A, const RuminOptions& opt = {}) {
  const bool fd = form_uses_fd(A.first, A.second);
  if (fd && !opt.allow_finite_difference)
    throw ContractError(
        "rumin_D: second derivatives of a finite-difference potential need "
        "RuminOptions::allow_finite_difference");
  const int order = form_max_order(A.first, A.second) - 2;
  if (order < 0) throw ContractError("rumin_D: potential lacks second derivatives");
  const auto mode = fd ? DerivativeMode::FiniteDifference : DerivativeMode::Analytic;
  Horizontal2Form B;
  B.rep = A.rep;
  B.first = ScalarField::from_jets(
      [A](auto tag, const Point& p) {
        constexpr int N = decltype(tag)::value;
        return rumin_D_jets<N>(A, p).first;
      },
      order, mode);
  B.second = ScalarField::from_jets(
      [A](auto tag, const Point& p) {
        constexpr int N = decltype(tag)::value;
        return rumin_D_jets<N>(A, p).second;
      },
      order, mode);
  return B;
}

// Closedness residual at p, in B's own representation:
//   Cartesian   X b2 - Y b1
//   Cylindrical (1/r) R(r b2) - Phi b1
inline double closedness_residual(const Horizontal2Form& B, const Point& p) {
  const auto b1 = B.first.jet<1>(p);
  const auto b2 = B.second.jet<1>(p);
  if (B.rep == Representation::Cartesian)
    return std::abs((op_X(b2, p) - op_Y(b1, p)).value());
  require_off_axis(p, "closedness_residual");
  const auto c = coords<1>(p);
  const auto r = radius(c.x, c.y);
  return std::abs(op_R(r * b2, p).value() / p.r() - op_Phi(b1, p).value());
}

inline double is_closed_residual(const Horizontal2Form& B, const std::vector<Point>& pts) {
  double m = 0;
  for (const auto& p : pts) m = std::max(m, closedness_residual(B, p));
  return m;
}

inline bool is_closed(const Horizontal2Form& B, const std::vector<Point>& pts,
                      double tol = kRoundTripTol) {
  return is_closed_residual(B, pts) <= tol;
}

// ---------------------------------------------------------------------------
// Radial integrals of the dr-component b1, written as integrals over a unit
// parameter so that jets in the base point pass under the integral sign.

namespace detail {

// Jet of q -> b1(tau x, tau y, z) at p.
template <int N>
CJet<N> b1_scaled(const ScalarField& b1, const Point& p, double tau) {
  const Point q{tau * p.x, tau * p.y, p.z};
  return scale_axes(b1.jet<N>(q), tau, tau, 1.0);
}

// Jet of q -> (Phi b1)(tau x, tau y, z) at p.
template <int N>
CJet<N> phi_b1_scaled(const ScalarField& b1, const Point& p, double tau) {
  const Point q{tau * p.x, tau * p.y, p.z};
  return scale_axes(op_Phi(b1.jet<N + 1>(q), q), tau, tau, 1.0);
}

// Unit horizontal direction (x/r, y/r) as jets at p.
template <int N>
std::pair<CJet<N>, CJet<N>> unit_direction(const Point& p) {
  require_off_axis(p, "unit_direction");
  const auto c = coords<N>(p);
  const auto r = radius(c.x, c.y);
  return {c.x / r, c.y / r};
}

// Jet of q -> F(s u(q), zmap(q)) where F is given through its jet at the
// base image point; used for integrals along the ray at angle phi(q).
template <int N>
CJet<N> along_ray(const CJet<N>& f_at, const Point& image, const std::pair<CJet<N>, CJet<N>>& u,
                  double s, const CJet<N>& zmap) {
  return compose(f_at, s * u.first - image.x, s * u.second - image.y, zmap - image.z);
}

}  // namespace detail

inline QuadOptions jet_quad_options() {
  QuadOptions o;
  o.abs_tol = 1e-11;
  o.max_intervals = 2000;
  return o;
}

// b2 recovered from b1 through closedness:
//   b2 = (1/r) int_0^r (Phi b1)(t, phi, z) t dt = r int_0^1 tau (Phi b1)(tau p) dtau.
inline ScalarField b2_from_b1(const ScalarField& b1) {
  return ScalarField::from_jets(
      [b1](auto tag, const Point& p) {
        constexpr int N = decltype(tag)::value;
        require_off_axis(p, "b2_from_b1");
        const auto c = coords<N>(p);
        const auto r = radius(c.x, c.y);
        auto integrand = [&](double tau) { return tau * detail::phi_b1_scaled<N>(b1, p, tau); };
        return r * integrate(integrand, 0.0, 1.0, jet_quad_options()).value;
      },
      b1.max_order() - 1, b1.mode());
}

// Cylindrical 2-form determined by its dr-component.
inline Horizontal2Form from_b1(const ScalarField& b1, std::optional<double> support_radius = {}) {
  Horizontal2Form B;
  B.rep = Representation::Cylindrical;
  B.first = b1;
  B.second = b2_from_b1(b1);
  B.support_radius = support_radius;
  return B;
}

// The dr-component of B as a field (conversion if B is Cartesian).
inline ScalarField radial_component(const Horizontal2Form& B) {
  if (B.rep == Representation::Cylindrical) return B.first;
  return to_representation(B, Representation::Cylindrical).first;
}

inline double require_support(const Horizontal2Form& B, const char* who) {
  if (!B.support_radius || !(*B.support_radius > 0))
    throw ContractError(std::string(who) + ": B needs a declared support radius");
  return *B.support_radius;
}

// int_0^r b1 dt = r int_0^1 b1(tau p) dtau
template <int N>
CJet<N> radial_integral_jet(const ScalarField& b1, const Point& p) {
  const auto c = coords<N>(p);
  const auto r = radius(c.x, c.y);
  auto f = [&](double tau) { return detail::b1_scaled<N>(b1, p, tau); };
  return r * integrate(f, 0.0, 1.0, jet_quad_options()).value;
}

// b_inf(phi, z) = int_0^{r0} b1(t, phi, z) dt, as a jet in the base point.
template <int N>
CJet<N> b_infinity_jet(const ScalarField& b1, double r0, const Point& p) {
  const auto u = detail::unit_direction<N>(p);
  const auto c = coords<N>(p);
  const double ux = std::real(u.first.value()), uy = std::real(u.second.value());
  auto f = [&](double tau) {
    const double s = r0 * tau;
    const Point q{s * ux, s * uy, p.z};
    return detail::along_ray<N>(b1.jet<N>(q), q, u, s, c.z);
  };
  return r0 * integrate(f, 0.0, 1.0, jet_quad_options()).value;
}

// Primitive b(r, phi, z) = -int_r^{r0} b1 dt = int_0^r b1 dt - b_inf.
inline ScalarField primitive(const Horizontal2Form& B) {
  const double r0 = require_support(B, "primitive");
  const ScalarField b1 = radial_component(B);
  return ScalarField::from_jets(
      [b1, r0](auto tag, const Point& p) {
        constexpr int N = decltype(tag)::value;
        if (p.r() > r0) return CJet<N>(0.0);  // empty integration range
        return radial_integral_jet<N>(b1, p) - b_infinity_jet<N>(b1, r0, p);
      },
      b1.max_order(), b1.mode());
}

// Flux F_B(z) = (1/2pi) int b dxdy = -(1/2pi) int_S1 int_0^{r0} b1 t^2/2 dt dphi.
inline double flux(const Horizontal2Form& B, double z = 0.0) {
  const double r0 = require_support(B, "flux");
  const ScalarField b1 = radial_component(B);
  QuadOptions inner;
  inner.abs_tol = 1e-13;
  QuadOptions outer;
  outer.abs_tol = 1e-12;
  auto ring = [&](double phi) {
    const double cph = std::cos(phi), sph = std::sin(phi);
    auto f = [&](double t) { return std::real(b1(Point{t * cph, t * sph, z})) * t * t * 0.5; };
    return integrate(f, 0.0, r0, inner).value;
  };
  return -integrate(ring, 0.0, 2 * kPi, outer).value / (2 * kPi);
}

// ---------------------------------------------------------------------------
// Support of cylinder fields.

struct SupportReport {
  double outside_max = 0;  // max |b1| sampled on r0 < r <= 2 r0
  double moment_max = 0;   // max |int_0^{r0} Zb t dt - d_phi b_inf|
  double tol = 1e-8;
  bool supported() const { return outside_max <= tol && moment_max <= tol; }
};

// Moment part of the support test at angle phi, height z.
//   int_0^{r0} Zb t dt = -int_0^{r0} (d_z b1)(s) s^2/2 ds
//   d_phi b_inf        =  int_0^{r0} (d_phi b1)(s) ds
inline double support_moment(const ScalarField& b1, double r0, double phi, double z) {
  const double cph = std::cos(phi), sph = std::sin(phi);
  QuadOptions o;
  o.abs_tol = 1e-13;
  auto f = [&](double s) {
    const Point q{s * cph, s * sph, z};
    const auto j = b1.jet<1>(q);
    const cplx dz = op_Z(j, q).value();
    const cplx dphi = op_dphi(j, q).value();
    return -dz * (s * s * 0.5) - dphi;
  };
  return std::abs(integrate(f, 0.0, r0, o).value);
}

inline std::vector<Point> sample_points(std::uint64_t seed, int n, double rmin, double rmax,
                                        double zmax) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ur(rmin, rmax), uphi(-kPi, kPi), uz(-zmax, zmax);
  std::vector<Point> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double r = ur(rng), ph = uphi(rng), z = uz(rng);
    pts.push_back(Point::cylindrical(r, ph, z));
  }
  return pts;
}

inline SupportReport support_check(const Horizontal2Form& B, double r0, std::uint64_t seed = 11,
                                   int samples = 24) {
  const ScalarField b1 = radial_component(B);
  SupportReport rep;
  for (const auto& p : sample_points(seed, samples, r0 * 1.0001, 2 * r0, 2.0))
    rep.outside_max = std::max(rep.outside_max, std::abs(b1(p)));
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> uphi(-kPi, kPi), uz(-2.0, 2.0);
  for (int i = 0; i < samples; ++i) {
    const double ph = uphi(rng), z = uz(rng);
    rep.moment_max = std::max(rep.moment_max, support_moment(b1, r0, ph, z));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Gauges.

inline Horizontal1Form gauge_shift(const Horizontal1Form& A, const ScalarField& f) {
  Horizontal1Form out;
  out.rep = A.rep;
  const int order = std::min(form_max_order(A.first, A.second), f.max_order() - 1);
  const bool fd = form_uses_fd(A.first, A.second) || f.mode() == DerivativeMode::FiniteDifference;
  const auto mode = fd ? DerivativeMode::FiniteDifference : DerivativeMode::Analytic;
  auto comp = [A, f](auto tag, const Point& p, int which) {
    constexpr int N = decltype(tag)::value;
    const auto fj = f.jet<N + 1>(p);
    if (A.rep == Representation::Cartesian)
      return which == 0 ? CJet<N>(A.first.jet<N>(p) + op_X(fj, p))
                        : CJet<N>(A.second.jet<N>(p) + op_Y(fj, p));
    return which == 0 ? CJet<N>(A.first.jet<N>(p) + op_R(fj, p))
                      : CJet<N>(A.second.jet<N>(p) + op_Phi(fj, p));
  };
  out.first = ScalarField::from_jets([comp](auto t, const Point& p) { return comp(t, p, 0); },
                                     order, mode);
  out.second = ScalarField::from_jets([comp](auto t, const Point& p) { return comp(t, p, 1); },
                                      order, mode);
  return out;
}

// Poincare gauge A = alpha dphi with
//   alpha = int_0^r int_0^t b1 ds t dt = (r^3/2) int_0^1 (1 - tau^2) b1(tau p) dtau,
// stored as alpha_1 = 0, alpha_2 = alpha / r.
inline Horizontal1Form poincare_gauge(const Horizontal2Form& B) {
  const ScalarField b1 = radial_component(B);
  Horizontal1Form A;
  A.rep = Representation::Cylindrical;
  A.first = ScalarField::analytic([](const auto&, const auto&, const auto&) { return 0.0; });
  A.second = ScalarField::from_jets(
      [b1](auto tag, const Point& p) {
        constexpr int N = decltype(tag)::value;
        require_off_axis(p, "poincare_gauge");
        const auto c = coords<N>(p);
        const auto r = radius(c.x, c.y);
        auto f = [&](double tau) { return (0.5 * (1 - tau * tau)) * detail::b1_scaled<N>(b1, p, tau); };
        return r * r * integrate(f, 0.0, 1.0, jet_quad_options()).value;
      },
      b1.max_order(), b1.mode());
  return A;
}

namespace detail {

// G(phi, z) = int_0^z d_phi b_inf(phi, z') dz'
//           = z int_0^1 r0 int_0^1 (d_phi b1)(r0 tau u, sigma z) dtau dsigma.
template <int N>
CJet<N> axial_angle_term(const ScalarField& b1, double r0, const Point& p) {
  const auto u = unit_direction<N>(p);
  const auto c = coords<N>(p);
  const double ux = std::real(u.first.value()), uy = std::real(u.second.value());
  auto outer = [&](double sigma) {
    const CJet<N> zmap = sigma * c.z;
    auto inner = [&](double tau) {
      const double s = r0 * tau;
      const Point q{s * ux, s * uy, sigma * p.z};
      return along_ray<N>(op_dphi(b1.jet<N + 1>(q), q), q, u, s, zmap);
    };
    return integrate(inner, 0.0, 1.0, jet_quad_options()).value;
  };
  return r0 * c.z * integrate(outer, 0.0, 1.0, jet_quad_options()).value;
}

// a_ext(phi) = int_0^{r0} b(t, phi, 0) t dt = -(r0^3/2) int_0^1 tau^2 b1(r0 tau u, 0) dtau.
template <int N>
CJet<N> exterior_angle_term(const ScalarField& b1, double r0, const Point& p) {
  const auto u = unit_direction<N>(p);
  const double ux = std::real(u.first.value()), uy = std::real(u.second.value());
  const CJet<N> zero(0.0);
  auto f = [&](double tau) {
    const double s = r0 * tau;
    const Point q{s * ux, s * uy, 0.0};
    return (tau * tau) * along_ray<N>(b1.jet<N>(q), q, u, s, zero);
  };
  return -0.5 * r0 * r0 * r0 * integrate(f, 0.0, 1.0, jet_quad_options()).value;
}

}  // namespace detail

// Gauge equal to F_B dphi outside the cylinder r <= r0:
//   a = alpha_P - (r^2/2) b_inf - G(phi, z) + F_B - a_ext(phi),   A = a dphi.
// The last two terms are the angular gauge psi' that flattens a(phi) to F_B;
// for phi-dependent fields this makes A singular on the center line.
inline Horizontal1Form exterior_ab_gauge(const Horizontal2Form& B, double r0) {
  const SupportReport sup = support_check(B, r0);
  if (!sup.supported())
    throw ContractError("exterior_ab_gauge: B is not supported in the cylinder r <= r0");
  Horizontal2Form Bs = B;
  Bs.support_radius = r0;
  const double F = flux(Bs, 0.0);
  const ScalarField b1 = radial_component(B);
  const Horizontal1Form P = poincare_gauge(B);
  Horizontal1Form A;
  A.rep = Representation::Cylindrical;
  A.first = ScalarField::analytic([](const auto&, const auto&, const auto&) { return 0.0; });
  A.second = ScalarField::from_jets(
      [b1, r0, F, P](auto tag, const Point& p) {
        constexpr int N = decltype(tag)::value;
        const auto c = coords<N>(p);
        const auto r = radius(c.x, c.y);
        const CJet<N> alpha_p = P.second.jet<N>(p) * r;
        const CJet<N> a = alpha_p - 0.5 * r * r * b_infinity_jet<N>(b1, r0, p) -
                          detail::axial_angle_term<N>(b1, r0, p) + F -
                          detail::exterior_angle_term<N>(b1, r0, p);
        return a / r;
      },
      b1.max_order() - 1, b1.mode());
  return A;
}

// Max |DA - B| over points, compared in cylindrical components.
inline double round_trip_error(const Horizontal1Form& A, const Horizontal2Form& B,
                               const std::vector<Point>& pts, const RuminOptions& opt = {}) {
  const Horizontal2Form D = rumin_D(A, opt);
  double m = 0;
  for (const auto& p : pts) {
    const auto d = cylindrical_jets<0>(D, p);
    const auto b = cylindrical_jets<0>(B, p);
    m = std::max({m, std::abs(d.first.value() - b.first.value()),
                  std::abs(d.second.value() - b.second.value())});
  }
  return m;
}

}  // namespace heisenmag
