// heisenmag: command-line front end. Every subcommand writes one report
// (JSON envelope or CSV check table) and exits with
//   0 all verdicts pass, 1 a verdict failed, 2 usage / contract error,
//   3 numerical non-convergence.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "heisenmag/fibers.hpp"
#include "heisenmag/harness.hpp"
#include "heisenmag/report.hpp"
#include "heisenmag/spectral1d.hpp"
#include "heisenmag/verify.hpp"

using namespace heisenmag;

namespace {

struct Common {
  std::string out = "-";
  std::string format = "json";
  int threads = 0;  // 0: HEISENMAG_THREADS, else 1
  std::uint64_t seed = 7;
  bool timings = false;

  int resolved_threads() const { return threads > 0 ? threads : default_threads(); }
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("-o,--out", c.out, "Output path, - for stdout");
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--threads", c.threads, "Worker threads (default: HEISENMAG_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--seed", c.seed, "Random seed, echoed in the report");
  sub->add_flag("--timings", c.timings, "Include wall-clock timings (breaks byte stability)");
}

void emit(const Report& r, const Common& c) {
  const std::string text = c.format == "csv" ? csv_text(r) : r.json_text();
  if (c.out == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw ContractError("cannot open output file " + c.out);
  f << text;
}

nlohmann::json base_config(const Common& c) {
  return {{"seed", c.seed}, {"threads", c.resolved_threads()}, {"format", c.format}};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

struct ConstantArgs {
  std::optional<int> grid;
  std::optional<double> halfwidth;
  double gmin = -10, gmax = 2, scan_step = 0.25;
};

Report run_constant(const ConstantArgs& a, const Common& c) {
  if (a.grid && *a.grid < 16) throw ContractError("constant: --grid must be >= 16");
  ConstantOptions o;
  o.gmin = a.gmin;
  o.gmax = a.gmax;
  o.scan_step = a.scan_step;
  o.threads = c.resolved_threads();
  o.quartic.N = a.grid;
  o.quartic.T = a.halfwidth;
  const auto U = universal_constant(o);
  Report r;
  r.command = "constant";
  r.config = base_config(c);
  r.config.update({{"gmin", o.gmin}, {"gmax", o.gmax}, {"scan_step", o.scan_step},
                   {"grid", a.grid ? nlohmann::json(*a.grid) : nlohmann::json(nullptr)},
                   {"halfwidth", a.halfwidth ? nlohmann::json(*a.halfwidth) : nlohmann::json(nullptr)}});
  r.results = {{"c", U.c},
               {"g_star", U.g_star},
               {"evaluations", U.evaluations},
               {"grid", {{"N", U.at_min.N}, {"T", U.at_min.T}, {"coarse", U.at_min.coarse},
                         {"fine", U.at_min.fine}, {"rel_change", U.at_min.rel_change()}}}};
  r.add(check_at_least("c positive", U.c, 0, 0));
  r.add(check_at_most("grid refinement change (relative)", U.at_min.rel_change(), 0, 1e-5));
  for (double dg : {-0.1, 0.1}) {
    const double l = quartic_lambda(U.g_star + dg, 1, o.quartic);
    r.add(check_at_least("local minimality", l, U.c, 0, {{"g", U.g_star + dg}}));
  }
  return r;
}

struct FiberArgs {
  std::vector<double> alphas;
  int mmin = -2, mmax = 2;
  int nr = 400, nz = 400;
  double rmax = 40, zmax = 40;
  double grid_tol = 0.02;
};

Report run_fiber_hardy(const FiberArgs& a, const Common& c) {
  if (a.mmax < a.mmin) throw ContractError("fiber-hardy: need --mmin <= --mmax");
  const Grid2D grid(a.nr, a.nz, a.rmax, a.zmax);
  std::vector<std::pair<double, int>> tasks;
  for (double al : a.alphas)
    for (int m = a.mmin; m <= a.mmax; ++m) tasks.emplace_back(al, m);
  const auto res = parallel_map(static_cast<int>(tasks.size()), c.resolved_threads(),
                                [&](int i) { return fiber_hardy(tasks[i].first, tasks[i].second, grid); });
  Report r;
  r.command = "fiber-hardy";
  r.config = base_config(c);
  r.config.update({{"alpha", a.alphas}, {"mmin", a.mmin}, {"mmax", a.mmax}, {"nr", a.nr},
                   {"nz", a.nz}, {"rmax", a.rmax}, {"zmax", a.zmax}, {"grid_tol", a.grid_tol}});
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& f : res) {
    rows.push_back({{"alpha", f.alpha}, {"m", f.m}, {"mu", f.mu}, {"bound", f.bound},
                    {"gap", f.mu - f.bound}, {"iterations", f.iterations}, {"residual", f.residual}});
    r.add(check_at_least("mu above clamp bound", f.mu, f.bound, a.grid_tol, {{"alpha", f.alpha}, {"m", f.m}}));
  }
  r.results["rows"] = rows;
  return r;
}

Report run_uniform_bottom(const std::vector<double>& bs, double cval, const Common& c) {
  Report r;
  r.command = "uniform-bottom";
  r.config = base_config(c);
  r.config.update({{"b", bs}, {"c", cval}});
  nlohmann::json rows = nlohmann::json::array();
  for (double b : bs) {
    const double v = uniform_bottom(b, cval);
    rows.push_back({{"b", b}, {"bottom", v}});
    // dilation: bottom(b) = b^{2/3} bottom(1)
    r.add(check_rel("scaling", v, std::pow(b, 2.0 / 3) * uniform_bottom(1, cval), 1e-14, {{"b", b}}));
  }
  r.results = {{"c", cval}, {"rows", rows}};
  return r;
}

Report run_sharpness(const std::vector<double>& alphas, const std::vector<int>& ns, const Common& c) {
  Report r;
  r.command = "sharpness";
  r.config = base_config(c);
  r.config.update({{"alpha", alphas}, {"n", ns}});
  nlohmann::json rows = nlohmann::json::array();
  for (double al : alphas)
    for (int n : ns) {
      const auto q = sharpness_quotient_lw(al, n);
      rows.push_back({{"alpha", al}, {"n", n}, {"m_star", q.m_star}, {"quotient", q.quotient},
                      {"target", q.target}, {"I1", q.I1}, {"I2", q.I2}, {"I3", q.I3},
                      {"denominator", q.denominator}});
      const nlohmann::json p = {{"alpha", al}, {"n", n}};
      r.add(check_at_least("quotient", q.quotient, q.target, 1e-6, p));
      r.add(check_at_most("I1 / denominator", q.I1 / q.denominator, q.bound_I1, 0, p));
      r.add(check_at_most("I3 / denominator", q.I3 / q.denominator, q.bound_I3, 0, p));
    }
  r.results["rows"] = rows;
  return r;
}

Report run_identities(int points, const Common& c) {
  if (points < 1) throw ContractError("identities: --points must be positive");
  const auto B = identity_battery(c.seed, points, c.resolved_threads());
  Report r;
  r.command = "identities";
  r.config = base_config(c);
  r.config["points"] = points;
  for (const auto& row : B.rows) r.add(check_at_most(row.name, row.max_residual, 0, row.tolerance));
  r.results = {{"seed", B.seed}, {"points", B.points}};
  return r;
}

Report run_folland_stein(const std::vector<double>& alphas, const std::vector<int>& ks, const Common& c) {
  Report r;
  r.command = "folland-stein";
  r.config = base_config(c);
  r.config.update({{"alpha", alphas}, {"k", ks}});
  nlohmann::json rows = nlohmann::json::array();
  for (double al : alphas)
    for (int k : ks) {
      const auto q = folland_stein_quotient(al, k, c.resolved_threads());
      rows.push_back({{"alpha", al}, {"k", k}, {"quotient", q.quotient}, {"target", q.target},
                      {"numerator", q.numerator}, {"weight", q.weight}});
      r.add(check_at_least("quotient", q.quotient, q.target, 1e-6, {{"alpha", al}, {"k", k}}));
    }
  r.results["rows"] = rows;
  return r;
}

struct LogHardyArgs {
  double r1 = 1;
  std::vector<double> support;  // pairs lo, hi
  std::vector<double> gammas = {0.25, 0.5};
  std::optional<double> eps;
  int ell_max = 20;
};

Report run_log_hardy(const LogHardyArgs& a, const Common& c) {
  std::vector<double> sup = a.support;
  if (sup.empty()) sup = {2 * a.r1, 4 * a.r1, a.r1 / 8, a.r1 / 2};
  if (sup.size() % 2) throw ContractError("log-hardy: --support takes lo hi pairs");
  Report r;
  r.command = "log-hardy";
  r.config = base_config(c);
  r.config.update({{"r1", a.r1}, {"support", sup}, {"gamma", a.gammas},
                   {"eps", a.eps ? nlohmann::json(*a.eps) : nlohmann::json("gamma/4")},
                   {"ell_max", a.ell_max}});
  nlohmann::json radial = nlohmann::json::array();
  for (std::size_t i = 0; i < sup.size(); i += 2) {
    const auto h = radial_log_hardy_check(bump_profile(sup[i], sup[i + 1]), a.r1);
    radial.push_back({{"lo", sup[i]}, {"hi", sup[i + 1]}, {"lhs", h.lhs}, {"rhs", h.rhs}});
    r.add(check_at_most("radial log-Hardy", h.lhs, h.rhs, 0, {{"lo", sup[i]}, {"hi", sup[i + 1]}}));
  }
  nlohmann::json lap = nlohmann::json::array();
  for (double g : a.gammas) {
    const double eps = a.eps.value_or(std::abs(g) / 4);
    const auto T = laptev_interval_data(g, eps, a.ell_max);
    nlohmann::json iv = nlohmann::json::array();
    for (const auto& row : T.rows)
      iv.push_back({{"ell", row.ell}, {"alpha", row.alpha}, {"beta", row.beta}, {"length", row.length}});
    lap.push_back({{"flux", T.flux}, {"gamma", T.gamma}, {"eps", T.eps}, {"m0", T.m0},
                   {"Lambda", number(T.Lambda)}, {"ratio_nonincreasing", T.ratio_nonincreasing},
                   {"samples", T.samples}, {"mismatches", T.mismatches}, {"intervals", iv}});
    r.add(check_abs("interval characterization mismatches", double(T.mismatches), 0, 0,
                    {{"flux", g}, {"eps", eps}}));
  }
  r.results = {{"radial", radial}, {"laptev", lap}};
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Magnetic sub-Laplacian calculus on the Heisenberg group"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));
  Common common;

  ConstantArgs ca;
  auto* constant = app.add_subcommand("constant", "Universal constant c = min_g inf spec(L_1^g)");
  constant->add_option("--grid", ca.grid, "Fixed interval count N (adaptive when absent)");
  constant->add_option("--halfwidth", ca.halfwidth, "Fixed truncation halfwidth T")->check(CLI::PositiveNumber);
  constant->add_option("--gmin", ca.gmin, "Scan start");
  constant->add_option("--gmax", ca.gmax, "Scan end");
  constant->add_option("--scan-step", ca.scan_step, "Coarse scan step")->check(CLI::PositiveNumber);
  add_common(constant, common);

  FiberArgs fa;
  auto* fiber = app.add_subcommand("fiber-hardy", "Fiber Hardy constants mu(alpha, m)");
  fiber->add_option("--alpha", fa.alphas, "Flux values")->required()->expected(1, -1);
  fiber->add_option("--mmin", fa.mmin, "Lowest mode");
  fiber->add_option("--mmax", fa.mmax, "Highest mode");
  fiber->add_option("--nr", fa.nr, "Radial nodes");
  fiber->add_option("--nz", fa.nz, "Vertical nodes");
  fiber->add_option("--rmax", fa.rmax, "Radial box size");
  fiber->add_option("--zmax", fa.zmax, "Vertical box half-width");
  fiber->add_option("--grid-tol", fa.grid_tol, "Allowed shortfall below the clamp bound");
  add_common(fiber, common);

  std::vector<double> bs;
  double cval = kUniversalConstant;
  auto* ub = app.add_subcommand("uniform-bottom", "Spectral bottom c |B|^{2/3} of the uniform field");
  ub->add_option("--b", bs, "Field strengths |B|")->required()->expected(1, -1);
  ub->add_option("--c", cval, "Universal constant")->check(CLI::PositiveNumber);
  add_common(ub, common);

  std::vector<double> sh_alpha = {0.5};
  std::vector<int> sh_n = {10, 100, 1000};
  auto* sharp = app.add_subcommand("sharpness", "Rayleigh quotients of the sharpness sequence");
  sharp->add_option("--alpha", sh_alpha, "Flux values")->expected(1, -1);
  sharp->add_option("--n-list", sh_n, "Sequence indices n >= 2")->expected(1, -1);
  add_common(sharp, common);

  int points = 200;
  auto* ids = app.add_subcommand("identities", "Seeded identity battery");
  ids->add_option("--points", points, "Random points");
  add_common(ids, common);

  std::vector<double> fs_alpha = {0.5};
  std::vector<int> fs_k = {4, 16, 64};
  auto* fs = app.add_subcommand("folland-stein", "Folland-Stein quotients along u_k");
  fs->add_option("--alpha", fs_alpha, "Values with |alpha| < 1")->expected(1, -1);
  fs->add_option("--k-list", fs_k, "Sequence indices k >= 2")->expected(1, -1);
  add_common(fs, common);

  LogHardyArgs la;
  auto* lh = app.add_subcommand("log-hardy", "Radial log-Hardy inequality and interval data");
  lh->add_option("--r1", la.r1, "Singular radius")->check(CLI::PositiveNumber);
  lh->add_option("--support", la.support, "Bump supports as lo hi pairs")->expected(2, -1);
  lh->add_option("--flux", la.gammas, "Non-integer fluxes F_B")->expected(1, -1);
  lh->add_option("--eps", la.eps, "Interval half-width parameter (default |gamma|/4)");
  lh->add_option("--ell-max", la.ell_max, "Largest interval index");
  add_common(lh, common);

  std::vector<int> crit;
  double tamper = 0;
  auto* ver = app.add_subcommand("verify", "Run the acceptance battery with pinned parameters");
  ver->add_option("--criteria", crit, "Subset of criterion ids 1-9")->expected(1, -1);
  ver->add_option("--tamper-constant", tamper, "Offset added to the pinned constant (verdict self-test)");
  add_common(ver, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::kUsage);
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    Report rep;
    if (*constant) rep = run_constant(ca, common);
    else if (*fiber) rep = run_fiber_hardy(fa, common);
    else if (*ub) rep = run_uniform_bottom(bs, cval, common);
    else if (*sharp) rep = run_sharpness(sh_alpha, sh_n, common);
    else if (*ids) rep = run_identities(points, common);
    else if (*fs) rep = run_folland_stein(fs_alpha, fs_k, common);
    else if (*lh) rep = run_log_hardy(la, common);
    else {
      VerifyOptions vo;
      vo.threads = common.resolved_threads();
      vo.seed = common.seed;
      vo.tamper_constant = tamper;
      const auto cs = run_criteria(vo, crit);
      rep = verify_report(vo, cs, common.timings);
      for (const auto& c : cs)
        std::fprintf(stderr, "criterion %d (%s): %s\n", c.id, c.title.c_str(), c.pass() ? "pass" : "FAIL");
    }
    if (common.timings) {
      if (rep.timings.is_null()) rep.timings = nlohmann::json::object();
      rep.timings["total_seconds"] = seconds_since(t0);
    }
    emit(rep, common);
    for (const auto* f : rep.failures())
      std::fprintf(stderr, "failed: %s %s value=%.17g target=%.17g tol=%.3g\n", f->name.c_str(),
                   f->params.dump().c_str(), f->value, f->target, f->tolerance);
    return static_cast<int>(rep.all_pass() ? ExitCode::kPass : ExitCode::kVerdictFailure);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(exit_code_for(e));
  }
}
