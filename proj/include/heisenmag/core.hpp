#pragma once
// Points, the left-invariant frame, the Koranyi gauge and scalar fields.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <tuple>
#include <type_traits>
#include <utility>

#include "heisenmag/errors.hpp"
#include "heisenmag/jet.hpp"

namespace heisenmag {

using cplx = std::complex<double>;
template <int N>
using CJet = Jet<cplx, N>;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = std::numbers::pi;

// Stored in Cartesian form; cylindrical coordinates are derived on demand.
struct Point {
  double x = 0, y = 0, z = 0;

  static Point cylindrical(double r, double phi, double z) {
    return {r * std::cos(phi), r * std::sin(phi), z};
  }
  double r() const { return std::hypot(x, y); }
  double phi() const { return std::atan2(y, x); }
  bool operator==(const Point&) const = default;
};

// Group law (x, y, z) * (x', y', z') with the [X, Y] = Z normalization.
inline Point group_mul(const Point& a, const Point& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z + 0.5 * (a.x * b.y - a.y * b.x)};
}

inline Point dilate(const Point& p, double lambda) {
  return {lambda * p.x, lambda * p.y, lambda * lambda * p.z};
}

// ---------------------------------------------------------------------------
// Gauge functions, generic over double and jets.

template <class J>
J koranyi(const J& x, const J& y, const J& z) {
  using std::pow;
  const J r2 = x * x + y * y;
  return pow(r2 * r2 + 16.0 * z * z, 0.25);
}

inline double koranyi(const Point& p) { return koranyi(p.x, p.y, p.z); }

// r^2 / rho^4, equal to |grad rho|^2 / rho^2.
inline double hardy_weight(const Point& p) {
  const double r2 = p.x * p.x + p.y * p.y;
  const double rho4 = r2 * r2 + 16 * p.z * p.z;
  if (rho4 == 0) throw SingularPointError("hardy_weight: rho vanishes at the origin");
  return r2 / rho4;
}

template <class J>
J radius(const J& x, const J& y) {
  using std::sqrt;
  return sqrt(x * x + y * y);
}

// Polar angle as a jet. The value follows atan2; derivatives come from the
// relative angle to the base direction, which is smooth off the center line.
template <class T, int N>
Jet<T, N> angle(const Jet<T, N>& x, const Jet<T, N>& y) {
  const double x0 = std::real(x.value()), y0 = std::real(y.value());
  if (x0 == 0 && y0 == 0) throw SingularFrameError("angle: undefined on the center line");
  const Jet<T, N> cross = x0 * y - y0 * x;
  const Jet<T, N> dot = x0 * x + y0 * y;
  Jet<T, N> a = atan(cross / dot);
  a.c[0] = T(std::atan2(y0, x0));
  return a;
}
inline double angle(double x, double y) { return std::atan2(y, x); }

template <int N>
struct Coords {
  CJet<N> x, y, z;
};

template <int N>
Coords<N> coords(const Point& p) {
  return {CJet<N>::variable(p.x, 0), CJet<N>::variable(p.y, 1), CJet<N>::variable(p.z, 2)};
}

// ---------------------------------------------------------------------------
// Frame operators on jets. Each consumes one order.
//   X = dx - (y/2) dz,  Y = dy + (x/2) dz,  Z = dz,
//   R = (x X + y Y) / r,  Phi = (x Y - y X) / r.

template <class T, int N>
Jet<T, N - 1> op_X(const Jet<T, N>& u, const Point& p) {
  const auto y = Jet<T, N - 1>::variable(p.y, 1);
  return partial<0>(u) - 0.5 * y * partial<2>(u);
}
template <class T, int N>
Jet<T, N - 1> op_Y(const Jet<T, N>& u, const Point& p) {
  const auto x = Jet<T, N - 1>::variable(p.x, 0);
  return partial<1>(u) + 0.5 * x * partial<2>(u);
}
template <class T, int N>
Jet<T, N - 1> op_Z(const Jet<T, N>& u, const Point&) {
  return partial<2>(u);
}

inline void require_off_axis(const Point& p, const char* who) {
  if (p.x == 0 && p.y == 0)
    throw SingularFrameError(std::string(who) + ": cylindrical frame undefined at r = 0");
}

template <class T, int N>
Jet<T, N - 1> op_R(const Jet<T, N>& u, const Point& p) {
  require_off_axis(p, "R");
  const auto x = Jet<T, N - 1>::variable(p.x, 0);
  const auto y = Jet<T, N - 1>::variable(p.y, 1);
  return (x * partial<0>(u) + y * partial<1>(u)) / radius(x, y);
}
template <class T, int N>
Jet<T, N - 1> op_Phi(const Jet<T, N>& u, const Point& p) {
  require_off_axis(p, "Phi");
  const auto x = Jet<T, N - 1>::variable(p.x, 0);
  const auto y = Jet<T, N - 1>::variable(p.y, 1);
  const auto r = radius(x, y);
  return (x * partial<1>(u) - y * partial<0>(u)) / r + 0.5 * r * partial<2>(u);
}
// d/dphi = x dy - y dx, regular everywhere.
template <class T, int N>
Jet<T, N - 1> op_dphi(const Jet<T, N>& u, const Point& p) {
  const auto x = Jet<T, N - 1>::variable(p.x, 0);
  const auto y = Jet<T, N - 1>::variable(p.y, 1);
  return x * partial<1>(u) - y * partial<0>(u);
}
// Euler field r dr + 2 z dz.
template <class T, int N>
Jet<T, N - 1> op_euler(const Jet<T, N>& u, const Point& p) {
  const auto x = Jet<T, N - 1>::variable(p.x, 0);
  const auto y = Jet<T, N - 1>::variable(p.y, 1);
  const auto z = Jet<T, N - 1>::variable(p.z, 2);
  return x * partial<0>(u) + y * partial<1>(u) + 2.0 * z * partial<2>(u);
}
// Sub-Laplacian X^2 + Y^2.
template <class T, int N>
Jet<T, N - 2> op_sublaplacian(const Jet<T, N>& u, const Point& p) {
  return op_X(op_X(u, p), p) + op_Y(op_Y(u, p), p);
}

// ---------------------------------------------------------------------------
// Scalar fields.

enum class DerivativeMode { Analytic, FiniteDifference };

inline constexpr double kDefaultStep = 1e-5;

// Complex-valued field on the group. Analytic fields carry exact jets up to
// order kMaxOrder; finite-difference fields provide orders 0..2 only.
class ScalarField {
 public:
  static constexpr int kMaxOrder = 4;

  ScalarField() = default;

  template <int N>
  CJet<N> jet(const Point& p) const {
    if constexpr (N > kMaxOrder) {
      (void)p;
      throw ContractError("ScalarField: derivative order " + std::to_string(N) +
                          " exceeds the supported maximum");
    } else {
      const auto& f = std::get<N>(fns_);
      if (!f)
        throw ContractError("ScalarField: order " + std::to_string(N) +
                            " jets unavailable (max order " + std::to_string(max_order_) + ")");
      return f(p);
    }
  }

  cplx operator()(const Point& p) const { return jet<0>(p).value(); }

  DerivativeMode mode() const { return mode_; }
  double step() const { return step_; }
  int max_order() const { return max_order_; }
  bool empty() const { return !std::get<0>(fns_); }

  // f is a generic callable f(x, y, z) over jets (any return convertible
  // to the jet type, constants included).
  template <class F>
  static ScalarField analytic(F f) {
    return from_jets(
        [f](auto tag, const Point& p) {
          constexpr int N = decltype(tag)::value;
          const auto c = coords<N>(p);
          return CJet<N>(f(c.x, c.y, c.z));
        },
        kMaxOrder);
  }

  // g(std::integral_constant<int, N>, const Point&) -> CJet<N>. Orders above
  // max_order are left unavailable.
  template <class G>
  static ScalarField from_jets(G g, int max_order, DerivativeMode mode = DerivativeMode::Analytic) {
    ScalarField s;
    s.max_order_ = std::min(max_order, kMaxOrder);
    s.mode_ = mode;
    s.fill<0>(g);
    return s;
  }

  static ScalarField finite_difference(std::function<cplx(const Point&)> f,
                                       double h = kDefaultStep) {
    if (!(h > 0)) throw ContractError("finite_difference: step must be positive");
    ScalarField s;
    s.mode_ = DerivativeMode::FiniteDifference;
    s.step_ = h;
    s.max_order_ = 2;
    std::get<0>(s.fns_) = [f](const Point& p) { return CJet<0>(f(p)); };
    std::get<1>(s.fns_) = [f, h](const Point& p) { return fd_jet<1>(f, p, h); };
    std::get<2>(s.fns_) = [f, h](const Point& p) { return fd_jet<2>(f, p, h); };
    return s;
  }

  // Step for second differences: sqrt(h)/10, i.e. about 3e-4 at the default.
  static double second_step(double h) { return 0.1 * std::sqrt(h); }

 private:
  template <int N, class G>
  void fill(const G& g) {
    if constexpr (N <= kMaxOrder) {
      if (N <= max_order_)
        std::get<N>(fns_) = [g](const Point& p) {
          return g(std::integral_constant<int, N>{}, p);
        };
      fill<N + 1>(g);
    }
  }

  template <int N>
  static CJet<N> fd_jet(const std::function<cplx(const Point&)>& f, const Point& p, double h) {
    CJet<N> j(f(p));
    auto shifted = [&](int a, double da, int b, double db) {
      Point q = p;
      double* c[3] = {&q.x, &q.y, &q.z};
      *c[a] += da;
      if (b >= 0) *c[b] += db;
      return f(q);
    };
    for (int a = 0; a < 3; ++a) {
      const cplx g = (shifted(a, h, -1, 0) - shifted(a, -h, -1, 0)) / (2 * h);
      int e[3] = {0, 0, 0};
      e[a] = 1;
      j.set_coeff(e[0], e[1], e[2], g);
    }
    if constexpr (N >= 2) {
      const double h2 = second_step(h);
      const cplx f0 = f(p);
      for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) {
          cplx d;
          if (a == b) {
            d = (shifted(a, h2, -1, 0) - 2.0 * f0 + shifted(a, -h2, -1, 0)) / (h2 * h2) / 2.0;
          } else {
            d = (shifted(a, h2, b, h2) - shifted(a, h2, b, -h2) - shifted(a, -h2, b, h2) +
                 shifted(a, -h2, b, -h2)) /
                (4 * h2 * h2);
          }
          int e[3] = {0, 0, 0};
          e[a] += 1;
          e[b] += 1;
          j.set_coeff(e[0], e[1], e[2], d);
        }
    }
    return j;
  }

  std::tuple<std::function<CJet<0>(const Point&)>, std::function<CJet<1>(const Point&)>,
             std::function<CJet<2>(const Point&)>, std::function<CJet<3>(const Point&)>,
             std::function<CJet<4>(const Point&)>>
      fns_;
  DerivativeMode mode_ = DerivativeMode::Analytic;
  double step_ = kDefaultStep;
  int max_order_ = kMaxOrder;
};

// Values of the frame applied to u at p.
struct FrameDerivatives {
  cplx X, Y, Z, R, Phi;
  double grad_norm2 = 0;  // |Xu|^2 + |Yu|^2
  bool has_cylindrical = false;
};

// The cylindrical pair is computed unless cylindrical == false; at r = 0
// that request throws SingularFrameError.
inline FrameDerivatives apply_frame(const ScalarField& u, const Point& p, bool cylindrical = true) {
  const auto j = u.jet<1>(p);
  FrameDerivatives d;
  d.X = op_X(j, p).value();
  d.Y = op_Y(j, p).value();
  d.Z = op_Z(j, p).value();
  d.grad_norm2 = std::norm(d.X) + std::norm(d.Y);
  if (cylindrical) {
    d.R = op_R(j, p).value();
    d.Phi = op_Phi(j, p).value();
    d.has_cylindrical = true;
  }
  return d;
}

// r du/dr + 2 z du/dz, of order one less than u.
inline ScalarField euler_field(const ScalarField& u) {
  return ScalarField::from_jets(
      [u](auto tag, const Point& p) {
        constexpr int N = decltype(tag)::value;
        return op_euler(u.jet<N + 1>(p), p);
      },
      u.max_order() - 1, u.mode());
}

// Discrepancies of the structural commutator identities at one point.
struct CommutatorReport {
  double xy_z = 0;        // |[X,Y]u - Zu|
  double phi_r = 0;       // |[Phi,R]u - (Phi u / r - Zu)|
  double magnetic_b1 = 0; // |[[X_A,Y_A],X_A]u + i b1 u|
  double magnetic_b2 = 0; // |[[X_A,Y_A],Y_A]u + i b2 u|
  double max() const { return std::max({xy_z, phi_r, magnetic_b1, magnetic_b2}); }
};

namespace detail {

// Built-in smooth test field and potential used by commutator_check.
template <class J>
J commutator_test_field(const J& x, const J& y, const J& z) {
  return exp(-0.3 * (x * x + y * y) - 0.2 * z * z) * (1.0 + kI * x * y + 0.5 * z) + x * y * z;
}
template <class J>
J commutator_test_ax(const J& x, const J& y, const J& z) {
  return 0.4 * sin(y + 0.3 * z) + 0.2 * x * z;
}
template <class J>
J commutator_test_ay(const J& x, const J& y, const J& z) {
  return 0.85 * x * x + 0.3 * cos(x * z) * y;
}

}  // namespace detail

inline CommutatorReport commutator_check(const Point& p) {
  constexpr int N = 3;
  const auto c = coords<N>(p);
  const CJet<N> u = detail::commutator_test_field(c.x, c.y, c.z);
  CommutatorReport rep;

  // [X, Y] u = Z u
  {
    const auto xy = op_X(op_Y(u, p), p);
    const auto yx = op_Y(op_X(u, p), p);
    rep.xy_z = std::abs((xy - yx).value() - op_Z(truncate<2>(u), p).value());
  }
  // [Phi, R] u = (1/r) Phi u - Z u
  if (p.x != 0 || p.y != 0) {
    const auto pr = op_Phi(op_R(u, p), p);
    const auto rp = op_R(op_Phi(u, p), p);
    const cplx rhs = op_Phi(u, p).value() / p.r() - op_Z(u, p).value();
    rep.phi_r = std::abs((pr - rp).value() - rhs);
  }
  // Magnetic double commutators with X_A = X + i A_x, Y_A = Y + i A_y.
  {
    const CJet<N> ax = detail::commutator_test_ax(c.x, c.y, c.z);
    const CJet<N> ay = detail::commutator_test_ay(c.x, c.y, c.z);
    auto XA = [&](const auto& v) {
      constexpr int M = std::decay_t<decltype(v)>::order;
      return op_X(v, p) + kI * truncate<M - 1>(ax) * truncate<M - 1>(v);
    };
    auto YA = [&](const auto& v) {
      constexpr int M = std::decay_t<decltype(v)>::order;
      return op_Y(v, p) + kI * truncate<M - 1>(ay) * truncate<M - 1>(v);
    };
    // C = [X_A, Y_A] consumes two orders, X_A and Y_A one each.
    auto C = [&](const auto& v) { return XA(YA(v)) - YA(XA(v)); };
    // b1 = X(X A_y - Y A_x) - Z A_x, b2 = Y(X A_y - Y A_x) - Z A_y.
    const auto gamma = op_X(ay, p) - op_Y(ax, p);
    const cplx b1 = (op_X(gamma, p) - truncate<1>(op_Z(ax, p))).value();
    const cplx b2 = (op_Y(gamma, p) - truncate<1>(op_Z(ay, p))).value();
    const cplx u0 = u.value();
    const cplx cx = (C(XA(u)) - XA(C(u))).value();
    const cplx cy = (C(YA(u)) - YA(C(u))).value();
    rep.magnetic_b1 = std::abs(cx + kI * b1 * u0);
    rep.magnetic_b2 = std::abs(cy + kI * b2 * u0);
  }
  return rep;
}

// |Delta_H rho^-2| at p; zero off the origin.
inline double fundamental_harmonicity_check(const Point& p) {
  if (p.x == 0 && p.y == 0 && p.z == 0)
    throw SingularPointError("fundamental_harmonicity_check: origin");
  const auto c = coords<2>(p);
  const auto rho = koranyi(c.x, c.y, c.z);
  const auto g = recip(rho * rho);
  return std::abs(op_sublaplacian(g, p).value());
}

}  // namespace heisenmag
