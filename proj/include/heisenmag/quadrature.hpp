#pragma once
// Adaptive Gauss-Kronrod (7/15) for scalar, complex and jet-valued integrands,
// plus Gauss-Legendre rules for tensor-product grids.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <queue>
#include <string>
#include <vector>

#include "heisenmag/errors.hpp"
#include "heisenmag/jet.hpp"

namespace heisenmag {

struct QuadOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0;
  int max_intervals = 4000;
};

inline double quad_norm(double v) { return std::abs(v); }
inline double quad_norm(const std::complex<double>& v) { return std::abs(v); }
template <class T, int N>
double quad_norm(const Jet<T, N>& v) {
  return max_abs(v);
}

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct GkSegment {
  double a, b;
  T value;
  double err;
  bool operator<(const GkSegment& o) const { return err < o.err; }
};

template <class F>
auto gk15(const F& f, double a, double b) {
  using T = decltype(f(a));
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const T fc = f(c);
  T kron = fc * kKronrodWeights[7];
  T gauss = fc * kGaussWeights[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kKronrodNodes[i];
    const T s = f(c - dx) + f(c + dx);
    kron += s * kKronrodWeights[i];
    if (i % 2 == 1) gauss += s * kGaussWeights[i / 2];
  }
  kron *= h;
  gauss *= h;
  const double err = quad_norm(T(kron - gauss));
  return GkSegment<T>{a, b, kron, err};
}

}  // namespace detail

template <class T>
struct QuadResult {
  T value;
  double error;
  int intervals;
};

// Globally adaptive GK15 on [a, b]; the largest-error segment is bisected
// until the summed error estimate meets max(abs_tol, rel_tol * |I|).
template <class F>
auto integrate(const F& f, double a, double b, const QuadOptions& opt = {}) {
  using T = decltype(f(a));
  if (a == b) return QuadResult<T>{T{} * 0.0, 0.0, 0};
  std::priority_queue<detail::GkSegment<T>> heap;
  auto first = detail::gk15(f, a, b);
  T total = first.value;
  double err = first.err;
  heap.push(first);
  int n = 1;
  while (err > std::max(opt.abs_tol, opt.rel_tol * quad_norm(total))) {
    if (n >= opt.max_intervals)
      throw IntegrationError("integrate: interval budget exhausted on [" + std::to_string(a) +
                                 ", " + std::to_string(b) + "], error estimate " +
                                 std::to_string(err),
                             err);
    auto worst = heap.top();
    heap.pop();
    const double m = 0.5 * (worst.a + worst.b);
    auto l = detail::gk15(f, worst.a, m);
    auto r = detail::gk15(f, m, worst.b);
    total -= worst.value;
    total += l.value;
    total += r.value;
    err += l.err + r.err - worst.err;
    heap.push(l);
    heap.push(r);
    ++n;
    if (n % 64 == 0) {  // refresh the running sums against drift
      std::priority_queue<detail::GkSegment<T>> copy = heap;
      T t = copy.top().value * 0.0;
      double e = 0;
      while (!copy.empty()) {
        t += copy.top().value;
        e += copy.top().err;
        copy.pop();
      }
      total = t;
      err = e;
    }
  }
  return QuadResult<T>{total, err, n};
}

template <class F>
auto integrate_value(const F& f, double a, double b, const QuadOptions& opt = {}) {
  return integrate(f, a, b, opt).value;
}

// n-point Gauss-Legendre nodes and weights on [-1, 1] (Newton on P_n).
struct GaussRule {
  std::vector<double> nodes, weights;
};

inline GaussRule gauss_legendre(int n) {
  if (n < 1) throw ContractError("gauss_legendre: need at least one node");
  GaussRule g;
  g.nodes.resize(n);
  g.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1;
      dp = n * (x * p1 - p0) / (x * x - 1);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1;
    dp = n * (x * p1 - p0) / (x * x - 1);
    g.nodes[i] = -x;
    g.nodes[n - 1 - i] = x;
    g.weights[i] = g.weights[n - 1 - i] = 2 / ((1 - x * x) * dp * dp);
  }
  return g;
}

// Composite rule: `panels` equal panels of an n-point Gauss rule on [a, b].
struct Rule1D {
  std::vector<double> x, w;
};

inline Rule1D composite_gauss(double a, double b, int panels, int n) {
  const GaussRule g = gauss_legendre(n);
  Rule1D r;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * h;
    for (int i = 0; i < n; ++i) {
      r.x.push_back(c + 0.5 * h * g.nodes[i]);
      r.w.push_back(0.5 * h * g.weights[i]);
    }
  }
  return r;
}

// Periodic trapezoid rule on [0, 2 pi).
inline Rule1D periodic_trapezoid(int n) {
  Rule1D r;
  for (int i = 0; i < n; ++i) {
    r.x.push_back(2 * M_PI * i / n);
    r.w.push_back(2 * M_PI / n);
  }
  return r;
}

}  // namespace heisenmag
