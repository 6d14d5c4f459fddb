#pragma once
// The acceptance battery: criteria 1-9 with pinned parameters. Each criterion
// returns its checks and a results payload; `heisenmag verify` and the
// acceptance binary both run these.

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "heisenmag/descriptor.hpp"
#include "heisenmag/fibers.hpp"
#include "heisenmag/forms.hpp"
#include "heisenmag/harness.hpp"
#include "heisenmag/report.hpp"
#include "heisenmag/spectral1d.hpp"

namespace heisenmag {

struct VerifyOptions {
  int threads = 1;
  std::uint64_t seed = 7;
  double tamper_constant = 0;  // added to the pinned c; only for exercising the verdict logic
};

struct Criterion {
  int id = 0;
  std::string title;
  double budget_seconds = 0;
  std::vector<Check> checks;
  nlohmann::json results = nlohmann::json::object();
  double seconds = 0;  // wall clock, kept out of the byte-stable report

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass()) return false;
    return true;
  }
};

namespace fixtures {

using nlohmann::json;

inline json constant(double v) { return {{"builtin", "constant"}, {"value", v}}; }
inline json mono(double c, int a, int b, int d) {
  return {{"builtin", "monomial"}, {"coef", c}, {"powers", {a, b, d}}};
}
inline json product(std::vector<json> f) { return {{"builtin", "product"}, {"factors", f}}; }
inline json sum(std::vector<json> t) { return {{"builtin", "sum"}, {"terms", t}}; }
inline json rpow(double p) { return {{"builtin", "radius_power"}, {"power", p}}; }
inline json bump() { return {{"builtin", "cylinder_bump"}, {"radius", 1.0}, {"power", 6}}; }
inline json axial(const std::string& f, double k = 1.0) {
  return {{"builtin", "axial"}, {"function", f}, {"scale", k}};
}
inline Horizontal2Form field2(const json& b1) {
  return form2_from_json({{"degree", 2},
                          {"representation", "cylindrical"},
                          {"support_radius", 1.0},
                          {"components", {b1}}});
}

// Three fields supported in the unit cylinder:
//   56 r (1 - r^2)^6                                  flux -1/4
//   x (1 - r^2)^6 (r^2 - 1/8)                         phi-dependent, flux 0
//   56 r (1 - r^2)^6 + r (1 - r^2)^6 (r^2 - 2/9) cos z  z-dependent, flux -1/4
inline std::vector<std::pair<std::string, Horizontal2Form>> cylinder_fields() {
  const json balanced = product({rpow(1), bump(), sum({mono(1, 2, 0, 0), mono(1, 0, 2, 0), constant(-2.0 / 9)})});
  return {
      {"radial", field2(product({constant(56), rpow(1), bump()}))},
      {"angular", field2(product({mono(1, 1, 0, 0), bump(),
                                  sum({mono(1, 2, 0, 0), mono(1, 0, 2, 0), constant(-0.125)})}))},
      {"axial", field2(sum({product({constant(56), rpow(1), bump()}), product({balanced, axial("cos")})}))},
  };
}

// Random polynomial times cos(0.7 z).
inline ScalarField random_gauge_function(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_int_distribution<int> d(0, 3);
  std::vector<json> terms;
  for (int i = 0; i < 6; ++i) terms.push_back(mono(u(rng), d(rng), d(rng), d(rng)));
  return coefficient_from_json(product({sum(terms), axial("cos", 0.7)}));
}

}  // namespace fixtures

namespace detail {

template <class F>
Criterion timed(int id, std::string title, double budget, F&& body) {
  Criterion c{id, std::move(title), budget, {}, nlohmann::json::object(), 0};
  const auto t0 = std::chrono::steady_clock::now();
  body(c);
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return c;
}

}  // namespace detail

inline Criterion criterion_eigensolver_oracle(const VerifyOptions&) {
  return detail::timed(1, "eigensolver oracle", 5, [](Criterion& c) {
    const auto ho = refined_ground_energy([](double t) { return t * t; }, 12, 4800);
    c.checks.push_back(check_abs("harmonic ground energy", ho.value, 1.0, 1e-6, {{"N", 4800}, {"T", 12}}));
    c.results["harmonic"] = {{"value", ho.value}, {"coarse", ho.coarse}, {"fine", ho.fine}};
    for (double g : {-2.0, -8.0, -32.0}) {
      const double w = std::sqrt(std::abs(g) / 2);
      const auto r = refined_ground_energy(
          [=](double t) {
            const double q = w * t - std::abs(g);
            return q * q;
          },
          12, 4800);
      c.checks.push_back(check_abs("shifted harmonic ground energy", r.value, w, 1e-5, {{"g", g}}));
    }
  });
}

inline Criterion criterion_scaling_law(const VerifyOptions& opt) {
  return detail::timed(2, "quartic scaling law", 30, [&](Criterion& c) {
    struct Case {
      double b, g;
    };
    std::vector<Case> cases;
    for (double b : {0.5, 2.0, 8.0})
      for (double g : {-3.0, 0.0, 3.0}) cases.push_back({b, g});
    const auto err = parallel_map(static_cast<int>(cases.size()), opt.threads, [&](int i) {
      const auto [b, g] = cases[i];
      const double lb = quartic_lambda(g, b);
      const double l1 = quartic_lambda(g * std::pow(b, -1.0 / 3), 1);
      return std::abs(lb - std::pow(b, 2.0 / 3) * l1) / lb;
    });
    for (std::size_t i = 0; i < cases.size(); ++i)
      c.checks.push_back(check_at_most("scaling defect (relative)", err[i], 0, 1e-5,
                                       {{"b", cases[i].b}, {"g", cases[i].g}}));
  });
}

inline Criterion criterion_universal_constant(const VerifyOptions& opt) {
  return detail::timed(3, "universal constant", 60, [&](Criterion& c) {
    ConstantOptions o;
    o.threads = opt.threads;
    const auto U = universal_constant(o);
    c.results = {{"c", U.c},
                 {"g_star", U.g_star},
                 {"N", U.at_min.N},
                 {"T", U.at_min.T},
                 {"coarse", U.at_min.coarse},
                 {"fine", U.at_min.fine}};
    c.checks.push_back(check_at_most("grid refinement change (relative)", U.at_min.rel_change(), 0, 1e-5));
    c.checks.push_back(check_true("g_star interior to scan range",
                                  U.g_star > o.gmin + o.scan_step && U.g_star < o.gmax - o.scan_step,
                                  {{"g_star", U.g_star}}));
    c.checks.push_back(check_at_least("c positive", U.c, 0, 0));
    c.checks.push_back(check_abs("c regression pin", U.c, kUniversalConstant + opt.tamper_constant, 1e-9));
  });
}

inline Criterion criterion_fiber_bound(const VerifyOptions& opt) {
  return detail::timed(4, "fiber Hardy bound", 600, [&](Criterion& c) {
    const std::vector<double> alphas = {0.1, 0.25, 0.5, 0.8};
    struct Task {
      double alpha;
      int m;
      bool doubled;
    };
    std::vector<Task> tasks;
    for (double a : alphas) {
      for (int m = -2; m <= 2; ++m) tasks.push_back({a, m, false});
      tasks.push_back({a, nearest_mode(a), true});
    }
    const Grid2D grid;
    const auto mus = parallel_map(static_cast<int>(tasks.size()), opt.threads, [&](int i) {
      return fiber_hardy(tasks[i].alpha, tasks[i].m, tasks[i].doubled ? grid.doubled() : grid).mu;
    });
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      const auto& t = tasks[i];
      rows.push_back({{"alpha", t.alpha}, {"m", t.m}, {"box", t.doubled ? "doubled" : "default"}, {"mu", mus[i]}});
      if (!t.doubled) {
        c.checks.push_back(check_at_least("mu above clamp bound", mus[i], clamp_bound(t.alpha, t.m), 0.02,
                                          {{"alpha", t.alpha}, {"m", t.m}}));
        continue;
      }
      const double d2 = std::pow(dist_to_integers(t.alpha), 2);
      c.checks.push_back(check_rel("mu near d^2 after box doubling", mus[i], d2, 0.10,
                                   {{"alpha", t.alpha}, {"m", t.m}}));
    }
    c.results["rows"] = rows;
  });
}

inline Criterion criterion_sharpness(const VerifyOptions&) {
  return detail::timed(5, "sharpness sequence", 120, [](Criterion& c) {
    const CutoffProfile xi;
    const double s2 = std::pow(xi.sup_derivative(), 2);
    nlohmann::json rows = nlohmann::json::array();
    for (int n : {10, 100, 1000}) {
      const auto r = sharpness_quotient_lw(0.5, n);
      const double ln = std::log(double(n));
      rows.push_back({{"n", n}, {"quotient", r.quotient}, {"target", r.target}, {"I1", r.I1},
                      {"I2", r.I2}, {"I3", r.I3}, {"denominator", r.denominator}});
      c.checks.push_back(check_at_most("quotient excess", r.quotient - 0.25,
                                       s2 * (1 / (ln * ln) + 1 / (32 * ln)), 0, {{"n", n}}));
      c.checks.push_back(check_at_least("quotient lower bound", r.quotient, 0.25, 1e-6, {{"n", n}}));
    }
    for (int n : {4, 16, 256}) {
      const auto E = eta_integrals(n, xi);
      const auto C = chi_integrals(n, xi);
      const double ln = std::log(double(n)), n4 = std::pow(double(n), 4);
      c.checks.push_back(check_at_least("eta: int eta^2/r", E.inv_r, 2 * ln, 0, {{"n", n}}));
      c.checks.push_back(check_at_most("eta: int eta'^2 r", E.grad, 2 * s2 / ln, 0, {{"n", n}}));
      c.checks.push_back(check_at_least("chi: int chi^2", C.mass, 2 * n4, 0, {{"n", n}}));
      c.checks.push_back(check_at_most("chi: int chi'^2", C.grad, 2 * s2 / n4, 0, {{"n", n}}));
    }
    c.results["rows"] = rows;
  });
}

inline Criterion criterion_folland_stein(const VerifyOptions& opt) {
  return detail::timed(6, "Folland-Stein quotient", 120, [&](Criterion& c) {
    const auto r = folland_stein_quotient(0.5, 64, opt.threads);
    c.results = {{"alpha", 0.5}, {"k", 64}, {"quotient", r.quotient}, {"target", r.target}};
    c.checks.push_back(check_at_least("quotient lower end", r.quotient, 0.75, 1e-6, {{"k", 64}}));
    c.checks.push_back(check_at_most("quotient upper end", r.quotient, 0.75 * 1.10, 0, {{"k", 64}}));
    for (int k : {4, 16, 64}) {
      const double fs = folland_stein_quotient(0.0, k, opt.threads).quotient;
      const double gl = garofalo_lanconelli_quotient(k, opt.threads);
      c.checks.push_back(check_true("alpha = 0 equals Garofalo-Lanconelli bit for bit", fs == gl, {{"k", k}}));
    }
  });
}

inline Criterion criterion_identities(const VerifyOptions& opt) {
  return detail::timed(7, "identity battery", 60, [&](Criterion& c) {
    const auto B = identity_battery(opt.seed, 200, opt.threads);
    for (const auto& row : B.rows)
      c.checks.push_back(check_at_most(row.name, row.max_residual, 0, row.tolerance,
                                       {{"seed", B.seed}, {"points", B.points}}));
  });
}

inline Criterion criterion_forms(const VerifyOptions& opt) {
  return detail::timed(8, "forms round trips", 120, [&](Criterion& c) {
    const auto pts = sample_points(opt.seed + 20, 12, 0.15, 1.6, 1.2);
    for (const auto& [name, B] : fixtures::cylinder_fields()) {
      c.checks.push_back(check_at_most("D(poincare_gauge(B)) - B", round_trip_error(poincare_gauge(B), B, pts),
                                       0, kRoundTripTol, {{"field", name}}));
      c.checks.push_back(check_at_most("D(exterior_ab_gauge(B, 1)) - B",
                                       round_trip_error(exterior_ab_gauge(B, 1.0), B, pts), 0,
                                       kRoundTripTol, {{"field", name}}));
      const double f0 = flux(B, 0.0);
      double spread = 0;
      for (double z : {-2.0, -0.5, 0.8, 3.0}) spread = std::max(spread, std::abs(flux(B, z) - f0));
      c.checks.push_back(check_at_most("flux z-dependence", spread, 0, 1e-8, {{"field", name}}));
    }
    std::mt19937_64 rng(opt.seed);
    double worst = 0;
    for (int trial = 0; trial < 10; ++trial) {
      const auto f = fixtures::random_gauge_function(rng);
      const auto D = rumin_D(d_H(f));
      for (const auto& p : sample_points(opt.seed + 100 + trial, 10, 0.0, 2.0, 2.0))
        worst = std::max({worst, std::abs(D.first(p)), std::abs(D.second(p))});
    }
    c.checks.push_back(check_at_most("D(d_H f) on 10 random f", worst, 0, 1e-8));
    const auto U = rumin_D(uniform_gauge(3.0));
    double du = 0;
    for (const auto& p : sample_points(opt.seed + 200, 30, 0.0, 3.0, 3.0))
      du = std::max({du, std::abs(U.first(p) - 3.0), std::abs(U.second(p))});
    c.checks.push_back(check_at_most("D(|B| x^2/2 dy) - |B| dx^w", du, 0, 1e-12, {{"B", 3.0}}));
  });
}

inline Criterion criterion_laptev(const VerifyOptions&) {
  return detail::timed(9, "Laptev interval characterization", 30, [](Criterion& c) {
    nlohmann::json rows = nlohmann::json::array();
    for (double g : {0.25, 0.5}) {
      const auto T = laptev_interval_data(g, g / 4, 20, 5, 10000);
      rows.push_back({{"gamma", T.gamma}, {"eps", T.eps}, {"samples", T.samples},
                      {"mismatches", T.mismatches}, {"Lambda", T.Lambda}});
      c.checks.push_back(check_abs("sampled mismatches", double(T.mismatches), 0, 0,
                                   {{"gamma", g}, {"eps", g / 4}, {"samples", T.samples}}));
    }
    c.results["rows"] = rows;
  });
}

using CriterionFn = std::function<Criterion(const VerifyOptions&)>;

inline const std::vector<CriterionFn>& criteria() {
  static const std::vector<CriterionFn> all = {
      criterion_eigensolver_oracle, criterion_scaling_law, criterion_universal_constant,
      criterion_fiber_bound,        criterion_sharpness,   criterion_folland_stein,
      criterion_identities,         criterion_forms,       criterion_laptev};
  return all;
}

// Runs the selected criteria (1-based ids; empty = all) in order.
inline std::vector<Criterion> run_criteria(const VerifyOptions& opt, std::vector<int> ids = {}) {
  if (ids.empty())
    for (int i = 1; i <= static_cast<int>(criteria().size()); ++i) ids.push_back(i);
  std::vector<Criterion> out;
  for (int id : ids) {
    if (id < 1 || id > static_cast<int>(criteria().size()))
      throw ContractError("verify: criterion ids are 1.." + std::to_string(criteria().size()));
    out.push_back(criteria()[id - 1](opt));
  }
  return out;
}

inline Report verify_report(const VerifyOptions& opt, const std::vector<Criterion>& cs,
                            bool timings = false) {
  Report rep;
  rep.command = "verify";
  nlohmann::json ids = nlohmann::json::array();
  for (const auto& c : cs) ids.push_back(c.id);
  rep.config = {{"seed", opt.seed}, {"threads", opt.threads}, {"criteria", ids},
                {"tamper_constant", opt.tamper_constant}};
  nlohmann::json per = nlohmann::json::array();
  nlohmann::json t = nlohmann::json::object();
  for (const auto& c : cs) {
    per.push_back({{"id", c.id}, {"title", c.title}, {"verdict", c.pass() ? "pass" : "fail"},
                   {"results", c.results}});
    for (auto ch : c.checks) {
      ch.params["criterion"] = c.id;
      rep.add(std::move(ch));
    }
    t["criterion_" + std::to_string(c.id)] = c.seconds;
  }
  rep.results["criteria"] = per;
  if (timings) rep.timings = t;
  return rep;
}

}  // namespace heisenmag
