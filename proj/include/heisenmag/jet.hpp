#pragma once
// Truncated Taylor polynomials in three variables ("jets").
//
// A Jet<T, N> holds the Taylor coefficients up to total degree N of a
// function at a fixed base point, in the local displacement (dx, dy, dz).
// Arithmetic and elementary functions are exact on truncated series, so a
// generic lambda evaluated on jets returns its exact derivatives up to order
// N (to rounding). Partial derivatives drop one order.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <type_traits>

namespace heisenmag {

namespace detail {

constexpr int jet_size(int n) { return (n + 1) * (n + 2) * (n + 3) / 6; }

constexpr int binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

template <int N>
struct JetLayout {
  static constexpr int size = jet_size(N);
  static constexpr int npairs = binom(N + 6, 6);
  struct Pair {
    int a, b, out;
  };
  std::array<std::array<int, 3>, size> exps{};
  std::array<int, (N + 1) * (N + 1) * (N + 1)> index{};
  std::array<Pair, npairs> pairs{};

  constexpr JetLayout() {
    for (auto& v : index) v = -1;
    int n = 0;
    for (int d = 0; d <= N; ++d)
      for (int i = d; i >= 0; --i)
        for (int j = d - i; j >= 0; --j) {
          const int k = d - i - j;
          exps[n] = {i, j, k};
          index[(i * (N + 1) + j) * (N + 1) + k] = n;
          ++n;
        }
    int p = 0;
    for (int a = 0; a < size; ++a)
      for (int b = 0; b < size; ++b) {
        const int i = exps[a][0] + exps[b][0];
        const int j = exps[a][1] + exps[b][1];
        const int k = exps[a][2] + exps[b][2];
        if (i + j + k <= N) pairs[p++] = {a, b, index[(i * (N + 1) + j) * (N + 1) + k]};
      }
  }
  constexpr int at(int i, int j, int k) const {
    if (i < 0 || j < 0 || k < 0 || i + j + k > N) return -1;
    return index[(i * (N + 1) + j) * (N + 1) + k];
  }
};

template <int N>
inline constexpr JetLayout<N> layout{};

constexpr double factorial(int n) {
  double r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace detail

template <class T, int N>
class Jet;

template <class U>
struct is_jet : std::false_type {};
template <class T, int N>
struct is_jet<Jet<T, N>> : std::true_type {};

// Scalars that may be mixed with Jet<T, N> arithmetic.
template <class U, class T>
concept JetScalar = !is_jet<U>::value && std::is_convertible_v<U, T>;

template <class T, int N>
class Jet {
  static_assert(N >= 0);

 public:
  static constexpr int order = N;
  static constexpr int size = detail::jet_size(N);
  using value_type = T;

  std::array<T, size> c{};

  Jet() = default;
  Jet(const T& v) { c[0] = v; }  // NOLINT: constants convert implicitly
  template <class U>
    requires(std::is_arithmetic_v<U> && !std::is_same_v<U, T>)
  Jet(U v) {  // NOLINT
    c[0] = T(v);
  }
  // Widen a real jet into a complex one.
  template <class U>
    requires(!std::is_same_v<U, T> && std::is_convertible_v<U, T>)
  explicit Jet(const Jet<U, N>& o) {
    for (int i = 0; i < size; ++i) c[i] = T(o.c[i]);
  }

  static Jet variable(const T& base, int axis) {
    Jet j(base);
    if constexpr (N >= 1) j.c[1 + axis] = T(1);
    return j;
  }

  const T& value() const { return c[0]; }
  T coeff(int i, int j, int k) const {
    const int n = detail::layout<N>.at(i, j, k);
    return n < 0 ? T(0) : c[n];
  }
  void set_coeff(int i, int j, int k, const T& v) { c[detail::layout<N>.at(i, j, k)] = v; }
  // Mixed partial derivative d^(i+j+k) / dx^i dy^j dz^k at the base point.
  T derivative(int i, int j, int k) const {
    return coeff(i, j, k) *
           T(detail::factorial(i) * detail::factorial(j) * detail::factorial(k));
  }

  Jet& operator+=(const Jet& o) {
    for (int i = 0; i < size; ++i) c[i] += o.c[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int i = 0; i < size; ++i) c[i] -= o.c[i];
    return *this;
  }
  Jet& operator*=(const T& s) {
    for (auto& v : c) v *= s;
    return *this;
  }

  friend Jet operator-(const Jet& a) {
    Jet r;
    for (int i = 0; i < size; ++i) r.c[i] = -a.c[i];
    return r;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (const auto& p : detail::layout<N>.pairs) r.c[p.out] += a.c[p.a] * b.c[p.b];
    return r;
  }
  friend Jet operator/(const Jet& a, const Jet& b) { return a * recip(b); }

  template <JetScalar<T> U>
  friend Jet operator+(Jet a, const U& s) {
    a.c[0] += T(s);
    return a;
  }
  template <JetScalar<T> U>
  friend Jet operator+(const U& s, Jet a) {
    a.c[0] += T(s);
    return a;
  }
  template <JetScalar<T> U>
  friend Jet operator-(Jet a, const U& s) {
    a.c[0] -= T(s);
    return a;
  }
  template <JetScalar<T> U>
  friend Jet operator-(const U& s, const Jet& a) {
    Jet r = -a;
    r.c[0] += T(s);
    return r;
  }
  template <JetScalar<T> U>
  friend Jet operator*(Jet a, const U& s) {
    return a *= T(s);
  }
  template <JetScalar<T> U>
  friend Jet operator*(const U& s, Jet a) {
    return a *= T(s);
  }
  template <JetScalar<T> U>
  friend Jet operator/(Jet a, const U& s) {
    return a *= T(1) / T(s);
  }
  template <JetScalar<T> U>
  friend Jet operator/(const U& s, const Jet& a) {
    return recip(a) *= T(s);
  }

  // f(a + h) = sum_k f[k] h^k where a is the base value and h the nilpotent part.
  friend Jet compose_series(const std::array<T, N + 1>& f, const Jet& u) {
    Jet h = u;
    h.c[0] = T(0);
    Jet r(f[N]);
    for (int k = N - 1; k >= 0; --k) {
      r = r * h;
      r.c[0] += f[k];
    }
    return r;
  }

  friend Jet recip(const Jet& u) {
    std::array<T, N + 1> f{};
    const T inv = T(1) / u.c[0];
    T p = inv;
    for (int k = 0; k <= N; ++k) {
      f[k] = (k % 2 == 0) ? p : -p;
      p *= inv;
    }
    return compose_series(f, u);
  }
  friend Jet exp(const Jet& u) {
    std::array<T, N + 1> f{};
    const T e = std::exp(u.c[0]);
    for (int k = 0; k <= N; ++k) f[k] = e / T(detail::factorial(k));
    return compose_series(f, u);
  }
  friend Jet log(const Jet& u) {
    std::array<T, N + 1> f{};
    f[0] = std::log(u.c[0]);
    const T inv = T(1) / u.c[0];
    T p = inv;
    for (int k = 1; k <= N; ++k) {
      f[k] = ((k % 2 == 1) ? p : -p) / T(k);
      p *= inv;
    }
    return compose_series(f, u);
  }
  friend Jet pow(const Jet& u, double e) {
    std::array<T, N + 1> f{};
    const T a = u.c[0];
    double coef = 1;
    for (int k = 0; k <= N; ++k) {
      f[k] = T(coef) * std::pow(a, e - k);
      coef *= (e - k) / (k + 1);
    }
    return compose_series(f, u);
  }
  friend Jet sqrt(const Jet& u) { return pow(u, 0.5); }
  friend Jet sin(const Jet& u) {
    std::array<T, N + 1> f{};
    const T s = std::sin(u.c[0]), co = std::cos(u.c[0]);
    for (int k = 0; k <= N; ++k) {
      const T d = (k % 4 == 0) ? s : (k % 4 == 1) ? co : (k % 4 == 2) ? -s : -co;
      f[k] = d / T(detail::factorial(k));
    }
    return compose_series(f, u);
  }
  friend Jet cos(const Jet& u) {
    std::array<T, N + 1> f{};
    const T s = std::sin(u.c[0]), co = std::cos(u.c[0]);
    for (int k = 0; k <= N; ++k) {
      const T d = (k % 4 == 0) ? co : (k % 4 == 1) ? -s : (k % 4 == 2) ? -co : s;
      f[k] = d / T(detail::factorial(k));
    }
    return compose_series(f, u);
  }
  // atan via the series of 1 / (1 + w^2), integrated term by term.
  friend Jet atan(const Jet& u) {
    const T a = u.c[0];
    std::array<T, N + 1> den{}, q{};
    den[0] = T(1) + a * a;
    if constexpr (N >= 1) den[1] = T(2) * a;
    if constexpr (N >= 2) den[2] = T(1);
    for (int k = 0; k <= N; ++k) {
      T s = (k == 0) ? T(1) : T(0);
      for (int j = 0; j < k; ++j) s -= q[j] * den[k - j];
      q[k] = s / den[0];
    }
    std::array<T, N + 1> f{};
    f[0] = std::atan(a);
    for (int k = 1; k <= N; ++k) f[k] = q[k - 1] / T(k);
    return compose_series(f, u);
  }
};

template <class T>
T jet_value(const T& v) {
  return v;
}
template <class T, int N>
T jet_value(const Jet<T, N>& v) {
  return v.value();
}

template <class T, int N>
Jet<T, N> square(const Jet<T, N>& u) {
  return u * u;
}
inline double square(double u) { return u * u; }

// d/d(axis) drops one order.
template <int Axis, class T, int N>
Jet<T, N - 1> partial(const Jet<T, N>& u) {
  static_assert(N >= 1 && Axis >= 0 && Axis < 3);
  Jet<T, N - 1> r;
  const auto& lo = detail::layout<N - 1>;
  const auto& hi = detail::layout<N>;
  for (int n = 0; n < lo.size; ++n) {
    auto e = lo.exps[n];
    const int m = e[Axis] + 1;
    e[Axis] = m;
    r.c[n] = u.c[hi.at(e[0], e[1], e[2])] * T(m);
  }
  return r;
}

template <int M, class T, int N>
Jet<T, M> truncate(const Jet<T, N>& u) {
  static_assert(M <= N);
  Jet<T, M> r;
  for (int n = 0; n < Jet<T, M>::size; ++n) r.c[n] = u.c[n];
  return r;
}

// Jet of q -> f(Sq) with S = diag(sx, sy, sz), given the jet of f at S p.
template <class T, int N>
Jet<T, N> scale_axes(Jet<T, N> u, double sx, double sy, double sz) {
  const auto& lo = detail::layout<N>;
  for (int n = 0; n < lo.size; ++n) {
    const auto& e = lo.exps[n];
    u.c[n] *= T(std::pow(sx, e[0]) * std::pow(sy, e[1]) * std::pow(sz, e[2]));
  }
  return u;
}

// Jet of f(q0 + d(p)) where f is given by its jet at q0 and the displacement
// jets dx, dy, dz vanish at the base point.
template <class T, int N>
Jet<T, N> compose(const Jet<T, N>& f, Jet<T, N> dx, Jet<T, N> dy, Jet<T, N> dz) {
  dx.c[0] = dy.c[0] = dz.c[0] = T(0);
  std::array<Jet<T, N>, N + 1> px, py, pz;
  px[0] = py[0] = pz[0] = Jet<T, N>(T(1));
  for (int k = 1; k <= N; ++k) {
    px[k] = px[k - 1] * dx;
    py[k] = py[k - 1] * dy;
    pz[k] = pz[k - 1] * dz;
  }
  Jet<T, N> r;
  const auto& lo = detail::layout<N>;
  for (int n = 0; n < lo.size; ++n) {
    if (f.c[n] == T(0)) continue;
    const auto& e = lo.exps[n];
    Jet<T, N> term = px[e[0]];
    if (e[1]) term = term * py[e[1]];
    if (e[2]) term = term * pz[e[2]];
    term *= f.c[n];
    r += term;
  }
  return r;
}

// Largest coefficient modulus, used as the error norm in quadrature.
template <class T, int N>
double max_abs(const Jet<T, N>& u) {
  double m = 0;
  for (const auto& v : u.c) m = std::max(m, static_cast<double>(std::abs(v)));
  return m;
}

}  // namespace heisenmag
