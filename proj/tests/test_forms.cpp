#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "heisenmag/descriptor.hpp"
#include "heisenmag/forms.hpp"

using namespace heisenmag;

namespace {

json constant(double v) { return {{"builtin", "constant"}, {"value", v}}; }
json mono(double c, int a, int b, int d) {
  return {{"builtin", "monomial"}, {"coef", c}, {"powers", {a, b, d}}};
}
json product(std::vector<json> f) { return {{"builtin", "product"}, {"factors", f}}; }
json sum(std::vector<json> t) { return {{"builtin", "sum"}, {"terms", t}}; }
json rpow(double p) { return {{"builtin", "radius_power"}, {"power", p}}; }
json bump(int p = 6) { return {{"builtin", "cylinder_bump"}, {"radius", 1.0}, {"power", p}}; }
json axial(const std::string& f, double k = 1.0) {
  return {{"builtin", "axial"}, {"function", f}, {"scale", k}};
}
json field2(const json& b1, double r0 = 1.0) {
  return {{"degree", 2},
          {"representation", "cylindrical"},
          {"support_radius", r0},
          {"components", {b1}}};
}

// r (1 - r^2)^6 (r^2 - 2/9): int_0^1 chi t^2 dt = 0
json balanced_radial() { return product({rpow(1), bump(), sum({mono(1, 2, 0, 0), mono(1, 0, 2, 0), constant(-2.0 / 9)})}); }

// F1: 56 r (1 - r^2)^6, flux -1/4.
Horizontal2Form F1() { return form2_from_json(field2(product({constant(56), rpow(1), bump()}))); }
// F2: x (1 - r^2)^6 (r^2 - 1/8), phi-dependent with int chi = 0, flux 0.
Horizontal2Form F2() {
  return form2_from_json(field2(
      product({mono(1, 1, 0, 0), bump(), sum({mono(1, 2, 0, 0), mono(1, 0, 2, 0), constant(-0.125)})})));
}
// F3: F1 + r (1 - r^2)^6 (r^2 - 2/9) cos z, z-dependent with flux -1/4.
Horizontal2Form F3() {
  return form2_from_json(field2(
      sum({product({constant(56), rpow(1), bump()}), product({balanced_radial(), axial("cos")})})));
}

std::vector<Point> interior_points(std::uint64_t seed, int n, double rmin = 0.15,
                                   double rmax = 1.6, double zmax = 1.5) {
  return sample_points(seed, n, rmin, rmax, zmax);
}

double binom(int n, int k) { return std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0)); }

// int_0^r t^a (1 - t^2)^6 dt by binomial expansion
double poly_moment(int a, double r) {
  double s = 0;
  for (int k = 0; k <= 6; ++k)
    s += binom(6, k) * ((k % 2) ? -1.0 : 1.0) * std::pow(r, a + 2 * k + 1) / (a + 2 * k + 1);
  return s;
}

json random_polynomial(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_int_distribution<int> d(0, 3);
  std::vector<json> terms;
  for (int i = 0; i < 6; ++i) terms.push_back(mono(u(rng), d(rng), d(rng), d(rng)));
  return sum(terms);
}

// Smooth 1-form with random polynomial and gaussian coefficients.
Horizontal1Form random_potential(std::mt19937_64& rng) {
  const json g = {{"builtin", "axial"}, {"function", "gaussian"}, {"scale", 0.5}};
  return form1_from_json({{"degree", 1},
                          {"representation", "cartesian"},
                          {"components",
                           {product({random_polynomial(rng), g}), random_polynomial(rng)}}});
}

}  // namespace

TEST(Forms, HorizontalDifferentialOfCoordinates) {
  const auto fx = ScalarField::analytic([](const auto& x, const auto&, const auto&) { return x; });
  const auto fz = ScalarField::analytic([](const auto&, const auto&, const auto& z) { return z; });
  const auto ang = ScalarField::analytic(
      [](const auto& x, const auto& y, const auto&) { return angle(x, y); });
  for (const auto& p : interior_points(1, 20)) {
    const auto a = d_H(fx);
    EXPECT_EQ(a.first(p), cplx(1));
    EXPECT_EQ(a.second(p), cplx(0));
    const auto b = d_H(fz);
    EXPECT_NEAR(std::abs(b.first(p) + p.y / 2), 0, 1e-15);
    EXPECT_NEAR(std::abs(b.second(p) - p.x / 2), 0, 1e-15);
    const auto c = to_representation(d_H(ang), Representation::Cylindrical);
    EXPECT_NEAR(std::abs(c.first(p)), 0, 1e-14);
    EXPECT_NEAR(std::abs(c.second(p) - 1 / p.r()), 0, 1e-13);
  }
}

TEST(Forms, RepresentationRoundTrip) {
  std::mt19937_64 rng(2);
  const auto A = random_potential(rng);
  const auto back = to_representation(to_representation(A, Representation::Cylindrical),
                                      Representation::Cartesian);
  for (const auto& p : interior_points(3, 30)) {
    EXPECT_NEAR(std::abs(back.first(p) - A.first(p)), 0, 1e-9);
    EXPECT_NEAR(std::abs(back.second(p) - A.second(p)), 0, 1e-9);
  }
}

TEST(Forms, UniformGaugeGivesUniformField) {
  const auto B = rumin_D(uniform_gauge(3.0));
  for (const auto& p : interior_points(4, 30, 0.0, 3.0, 3.0)) {
    EXPECT_NEAR(std::abs(B.first(p) - 3.0), 0, 1e-12);
    EXPECT_NEAR(std::abs(B.second(p)), 0, 1e-12);
  }
}

TEST(Forms, AharonovBohmPotentialIsFlat) {
  for (double a : {0.0, 0.37, 0.5, 2.0}) {
    const auto A = ab_potential(a);
    const auto B = rumin_D(A);
    for (const auto& p : interior_points(5, 20)) {
      EXPECT_NEAR(std::abs(B.first(p)), 0, 1e-12);
      EXPECT_NEAR(std::abs(B.second(p)), 0, 1e-12);
    }
  }
  EXPECT_DOUBLE_EQ(std::real(ab_potential(0.5).second(Point{2, 0, 0})), 0.25);
  EXPECT_THROW(rumin_D(ab_potential(0.5)).first(Point{0, 0, 1}), SingularFrameError);
}

TEST(Forms, IntegerAharonovBohmIsPureGauge) {
  for (int n : {-2, 1, 3}) {
    const auto f = ScalarField::analytic(
        [n](const auto& x, const auto& y, const auto&) { return -double(n) * angle(x, y); });
    const auto A = gauge_shift(ab_potential(n), f);
    for (const auto& p : interior_points(6, 20)) {
      EXPECT_NEAR(std::abs(A.first(p)), 0, 1e-13);
      EXPECT_NEAR(std::abs(A.second(p)), 0, 1e-13);
    }
  }
}

TEST(Forms, DOfHorizontalDifferentialVanishes) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const json j = product({random_polynomial(rng), axial("cos", 0.7)});
    const auto f = coefficient_from_json(j);
    const auto B = rumin_D(d_H(f));
    for (const auto& p : interior_points(8 + trial, 10, 0.0, 2.0, 2.0)) {
      EXPECT_NEAR(std::abs(B.first(p)), 0, 1e-9);
      EXPECT_NEAR(std::abs(B.second(p)), 0, 1e-9);
    }
  }
}

TEST(Forms, DLandsInClosedForms) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const auto B = rumin_D(random_potential(rng));
    EXPECT_LE(is_closed_residual(B, interior_points(10 + trial, 20)), 1e-9);
    const auto Bc = to_representation(B, Representation::Cylindrical);
    EXPECT_LE(is_closed_residual(Bc, interior_points(20 + trial, 10)), 1e-9);
  }
}

TEST(Forms, ClosednessDetection) {
  EXPECT_EQ(is_closed_residual(uniform_field(3.0), interior_points(11, 20)), 0.0);
  Horizontal2Form B = form2_from_json(
      {{"degree", 2},
       {"representation", "cylindrical"},
       {"components", {product({mono(1, 0, 0, 1), bump()}), constant(0)}}});
  EXPECT_GT(is_closed_residual(B, interior_points(12, 20, 0.2, 0.8)), 1e-3);
  EXPECT_FALSE(is_closed(B, interior_points(12, 20, 0.2, 0.8)));
}

TEST(Forms, GaugeShiftLeavesDUnchanged) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 3; ++trial) {
    const auto A = random_potential(rng);
    const auto f = coefficient_from_json(product({random_polynomial(rng), axial("sin", 0.3)}));
    const auto B0 = rumin_D(A);
    const auto B1 = rumin_D(gauge_shift(A, f));
    for (const auto& p : interior_points(30 + trial, 10)) {
      EXPECT_NEAR(std::abs(B0.first(p) - B1.first(p)), 0, 1e-6);
      EXPECT_NEAR(std::abs(B0.second(p) - B1.second(p)), 0, 1e-6);
    }
  }
  const auto A = uniform_gauge(2.0);
  const auto zero = ScalarField::analytic([](const auto&, const auto&, const auto&) { return 0.0; });
  const auto S = gauge_shift(A, zero);
  EXPECT_EQ(S.second(Point{1.5, 0.2, 0.1}), A.second(Point{1.5, 0.2, 0.1}));
}

TEST(Forms, B2FromB1Oracles) {
  // phi- and z-independent b1: b2 = 0
  const auto b2a = b2_from_b1(coefficient_from_json(product({rpow(1), bump()})));
  for (const auto& p : interior_points(14, 10)) EXPECT_NEAR(std::abs(b2a(p)), 0, 1e-14);
  // b1 = (1-r^2)^6 cos z:  b2 = -(sin z / (2r)) int_0^r t^2 (1-t^2)^6 dt  (r <= 1)
  const auto b2b = b2_from_b1(coefficient_from_json(product({bump(), axial("cos")})));
  for (const auto& p : interior_points(15, 20, 0.1, 0.99)) {
    const double want = -std::sin(p.z) / (2 * p.r()) * poly_moment(2, p.r());
    EXPECT_NEAR(std::abs(b2b(p) - want), 0, 1e-11);
  }
  const auto B = from_b1(coefficient_from_json(product({bump(), axial("cos")})));
  EXPECT_LE(is_closed_residual(B, interior_points(16, 20)), 1e-8);
}

TEST(Forms, PrimitiveAgainstClosedForm) {
  const auto B = F1();
  const auto b = primitive(B);
  for (double r : {0.1, 0.4, 0.77, 0.95}) {
    const Point p = Point::cylindrical(r, 0.3, -0.4);
    EXPECT_NEAR(std::abs(b(p) + 4 * std::pow(1 - r * r, 7)), 0, 1e-11);
  }
  EXPECT_NEAR(std::abs(b(Point::cylindrical(1.3, 1.0, 0.5))), 0, 1e-14);
  EXPECT_THROW(primitive(from_b1(B.first)), ContractError);
}

TEST(Forms, PrimitiveDifferentiatesBackToB1) {
  for (const auto& B : {F1(), F2(), F3()}) {
    const auto b = primitive(B);
    for (const auto& p : interior_points(17, 15, 0.1, 1.5)) {
      const auto d = apply_frame(b, p);
      EXPECT_NEAR(std::abs(d.R - B.first(p)), 0, 1e-8);
    }
  }
}

TEST(Forms, PrimitiveReproducesB2Formula) {
  // b2 = Phi b - (1/r) int_0^r Z b t dt for a cylinder-supported field
  const auto B = F3();
  const auto b = primitive(B);
  for (const auto& p : interior_points(18, 6, 0.2, 1.4)) {
    const double r = p.r(), ph = p.phi();
    auto integrand = [&](double t) {
      const Point q = Point::cylindrical(t, ph, p.z);
      return apply_frame(b, q, false).Z * t;
    };
    QuadOptions o;
    o.abs_tol = 1e-10;
    const cplx rhs = apply_frame(b, p).Phi - integrate(integrand, 1e-12, r, o).value / r;
    EXPECT_NEAR(std::abs(B.second(p) - rhs), 0, 1e-6);
  }
}

TEST(Forms, FluxValues) {
  EXPECT_NEAR(flux(F1()), -0.25, 1e-12);
  EXPECT_NEAR(flux(F2()), 0.0, 1e-12);
  for (double z : {-2.0, -0.5, 0.0, 0.8, 3.0}) EXPECT_NEAR(flux(F3(), z), -0.25, 1e-12);
  // scaling
  const auto half = form2_from_json(field2(product({constant(28), rpow(1), bump()})));
  EXPECT_NEAR(flux(half), 0.5 * flux(F1()), 1e-13);
  // Compactly supported in r and z: zero flux.
  const auto compact = form2_from_json(field2(product({balanced_radial(), axial("bump", 0.5)})));
  EXPECT_TRUE(support_check(compact, 1.0).supported());
  for (double z : {0.0, 0.7, 1.9}) EXPECT_NEAR(flux(compact, z), 0.0, 1e-13);
  EXPECT_THROW(flux(from_b1(F1().first)), ContractError);
}

TEST(Forms, FluxUnitBumpOracle) {
  // chi normalized so that int_0^inf int_t^inf chi ds t dt = 1: F = -1.
  // For chi = c r (1 - r^2)^6 the double integral equals c / 224.
  const auto B = form2_from_json(field2(product({constant(224), rpow(1), bump()})));
  EXPECT_NEAR(flux(B), -1.0, 1e-12);
}

TEST(Forms, SupportCheck) {
  EXPECT_TRUE(support_check(F1(), 1.0).supported());
  EXPECT_TRUE(support_check(F2(), 1.0).supported());
  EXPECT_TRUE(support_check(F3(), 1.0).supported());
  // chi(r) beta(z) with int chi t^2 != 0 and Z beta != 0
  const auto neg = form2_from_json(field2(product({rpow(1), bump(), axial("cos")})));
  EXPECT_FALSE(support_check(neg, 1.0).supported());
  // phi-dependent with int chi != 0 is not supported even though Z beta = 0.
  const auto neg2 = form2_from_json(field2(product({mono(1, 1, 0, 0), bump()})));
  EXPECT_FALSE(support_check(neg2, 1.0).supported());
}

TEST(Forms, SupportCheckAgreesWithDirectB2) {
  // Direct oracle: b2 outside the cylinder.
  const auto neg2 = form2_from_json(field2(product({mono(1, 1, 0, 0), bump()})));
  for (double ph : {0.3, 1.2, -2.0}) {
    const Point p = Point::cylindrical(1.5, ph, 0.4);
    EXPECT_NEAR(std::real(neg2.second(p)), -std::sin(ph) / (14 * 1.5), 1e-11);
  }
  const auto neg = form2_from_json(field2(product({rpow(1), bump(), axial("cos")})));
  EXPECT_NEAR(std::real(neg.second(Point::cylindrical(2.0, 0.1, 0.9))),
              -std::sin(0.9) / (2 * 2.0) / 112, 1e-12);
  for (const auto& B : {F2(), F3()})
    for (const auto& p : interior_points(19, 10, 1.05, 3.0, 2.0))
      EXPECT_NEAR(std::abs(B.second(p)), 0, 1e-10);
}

TEST(Forms, PoincareGaugeRoundTrip) {
  const auto U = uniform_field(3.0);
  const auto PU = poincare_gauge(U);
  EXPECT_LE(round_trip_error(PU, U, interior_points(20, 20, 0.1, 3.0, 3.0)), 1e-6);
  for (const auto& B : {F1(), F2(), F3()})
    EXPECT_LE(round_trip_error(poincare_gauge(B), B, interior_points(21, 12)), kRoundTripTol);
  const auto Z = form2_from_json(field2(constant(0.0)));
  EXPECT_EQ(poincare_gauge(Z).second(Point{0.5, 0.5, 0.5}), cplx(0));
}

TEST(Forms, PoincareGaugeInheritsAxialSupport) {
  const auto compact = form2_from_json(field2(product({balanced_radial(), axial("bump", 0.5)})));
  const auto A = poincare_gauge(compact);
  for (const auto& p : interior_points(22, 10, 0.1, 3.0, 1.0)) {
    const Point q{p.x, p.y, 2.0 + std::abs(p.z)};
    EXPECT_EQ(A.second(q), cplx(0));
  }
}

TEST(Forms, ExteriorGaugeRoundTripAndExteriorForm) {
  for (const auto& B : {F1(), F2(), F3()}) {
    const double F = flux(B);
    const auto A = exterior_ab_gauge(B, 1.0);
    EXPECT_LE(round_trip_error(A, B, interior_points(23, 10, 0.15, 1.6, 1.2)), kRoundTripTol);
    for (double ph : {0.0, 1.0, 2.5, -1.7})
      for (double z : {-1.0, 0.0, 0.6}) {
        const Point p = Point::cylindrical(2.0, ph, z);
        EXPECT_NEAR(std::abs(A.first(p)), 0, 1e-14);
        EXPECT_NEAR(std::abs(A.second(p) - F / 2.0), 0, 1e-9);
      }
  }
  const auto neg = form2_from_json(field2(product({rpow(1), bump(), axial("cos")})));
  EXPECT_THROW(exterior_ab_gauge(neg, 1.0), ContractError);
  const auto Z = form2_from_json(field2(constant(0.0)));
  EXPECT_NEAR(std::abs(exterior_ab_gauge(Z, 1.0).second(Point{0.3, 0.2, 0.1})), 0, 1e-15);
}

TEST(Forms, GaugesDifferByClosedForm) {
  const auto B = F3();
  const auto P = poincare_gauge(B);
  const auto E = exterior_ab_gauge(B, 1.0);
  Horizontal1Form diff;
  diff.rep = Representation::Cylindrical;
  diff.first = ScalarField::analytic([](const auto&, const auto&, const auto&) { return 0.0; });
  diff.second = ScalarField::from_jets(
      [P, E](auto tag, const Point& p) {
        constexpr int N = decltype(tag)::value;
        return CJet<N>(P.second.jet<N>(p) - E.second.jet<N>(p));
      },
      2);
  const auto D = rumin_D(diff);
  for (const auto& p : interior_points(24, 8)) {
    EXPECT_NEAR(std::abs(D.first(p)), 0, 1e-6);
    EXPECT_NEAR(std::abs(D.second(p)), 0, 1e-6);
  }
}

TEST(Forms, FiniteDifferenceNeedsOptIn) {
  auto a2 = [](const Point& q) { return cplx(1.5 * q.x * q.x); };
  Horizontal1Form A;
  A.rep = Representation::Cartesian;
  A.first = ScalarField::finite_difference([](const Point&) { return cplx(0); });
  A.second = ScalarField::finite_difference(a2);
  EXPECT_THROW(rumin_D(A), ContractError);
  RuminOptions o;
  o.allow_finite_difference = true;
  EXPECT_LE(round_trip_error(A, uniform_field(3.0), interior_points(25, 10), o), kRoundTripTolFd);
}

TEST(Descriptor, RoundTripIsValueIdentical) {
  std::vector<json> descs = {form_to_json(F3()), form_to_json(uniform_gauge(2.0)),
                             form_to_json(ab_potential(0.3))};
  json tab = {{"degree", 1},
              {"representation", "cartesian"},
              {"components",
               {{{"builtin", "tabulated"},
                 {"axes", {{"x", {-1, 0, 1}}, {"y", {-1, 1}}, {"z", {0, 2}}}},
                 {"values", {{"re", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}}}}},
                constant(0.5)}}};
  descs.push_back(tab);
  for (const auto& d : descs) {
    const json again = json::parse(d.dump());
    EXPECT_EQ(again.dump(), d.dump());
    for (const auto& p : interior_points(26, 20, 0.1, 1.2, 1.0)) {
      if (d.at("degree") == 1) {
        const auto a = form1_from_json(d), b = form1_from_json(again);
        EXPECT_EQ(a.first(p), b.first(p));
        EXPECT_EQ(a.second(p), b.second(p));
      } else {
        const auto a = form2_from_json(d), b = form2_from_json(again);
        EXPECT_EQ(a.first(p), b.first(p));
        EXPECT_EQ(a.second(p), b.second(p));
      }
    }
  }
}

TEST(Descriptor, TabulatedInterpolation) {
  json tab = {{"builtin", "tabulated"},
              {"axes", {{"x", {0, 1}}, {"y", {0, 1}}, {"z", {0, 1}}}},
              {"values", {{"re", {0, 1, 2, 3, 4, 5, 6, 7}}}}};
  const auto f = coefficient_from_json(tab);
  // value = 4x + 2y + z on the unit cube
  EXPECT_NEAR(std::real(f(Point{0.25, 0.5, 0.75})), 1 + 1 + 0.75, 1e-15);
  EXPECT_EQ(f(Point{2, 0, 0}), cplx(0));
  EXPECT_EQ(f.mode(), DerivativeMode::FiniteDifference);
  tab["values"]["re"] = {1, 2};
  EXPECT_THROW(coefficient_from_json(tab), ContractError);
}

TEST(Descriptor, RejectsMalformedInput) {
  EXPECT_THROW(coefficient_from_json({{"builtin", "nope"}}).jet<0>(Point{1, 0, 0}), ContractError);
  EXPECT_THROW(form1_from_json(field2(constant(1))), ContractError);
  EXPECT_THROW(form_to_json(poincare_gauge(F1())), ContractError);
}
