#pragma once
// JSON descriptors for scalar coefficients and horizontal forms.
//
// A coefficient is an expression tree of named built-ins, or a tabulated
// grid (trilinear interpolation, finite-difference derivatives). Forms list
// their coefficients together with the representation and support radius.
// Rebuilding from a descriptor reproduces the same values bit for bit.

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "heisenmag/core.hpp"
#include "heisenmag/forms.hpp"

namespace heisenmag {

using nlohmann::json;

namespace detail {

template <int N>
CJet<N> ipow(const CJet<N>& u, int k) {
  CJet<N> r(1.0);
  for (int i = 0; i < k; ++i) r = r * u;
  return r;
}

inline cplx json_complex(const json& v) {
  if (v.is_array()) return {v.at(0).get<double>(), v.at(1).get<double>()};
  return {v.get<double>(), 0.0};
}

// Expression node evaluated on jets of any order.
struct CoefNode {
  std::string kind;
  json params;
  std::vector<CoefNode> children;

  template <int N>
  CJet<N> eval(const Coords<N>& c) const {
    if (kind == "constant") return CJet<N>(json_complex(params.at("value")));
    if (kind == "monomial") {
      const auto pw = params.at("powers");
      return json_complex(params.at("coef")) * ipow(c.x, pw.at(0).get<int>()) *
             ipow(c.y, pw.at(1).get<int>()) * ipow(c.z, pw.at(2).get<int>());
    }
    if (kind == "sum") {
      CJet<N> r(0.0);
      for (const auto& ch : children) r += ch.eval<N>(c);
      return r;
    }
    if (kind == "product") {
      CJet<N> r(1.0);
      for (const auto& ch : children) r = r * ch.eval<N>(c);
      return r;
    }
    if (kind == "radius_power") return pow(radius(c.x, c.y), params.at("power").get<double>());
    if (kind == "cylinder_bump") {
      // (1 - r^2/R^2)^p inside r < R, zero outside
      const double R = params.at("radius").get<double>();
      const int p = params.at("power").get<int>();
      const CJet<N> s = 1.0 - (c.x * c.x + c.y * c.y) / (R * R);
      if (std::real(s.value()) <= 0) return CJet<N>(0.0);
      return ipow(s, p);
    }
    if (kind == "axial") {
      const std::string f = params.at("function").get<std::string>();
      const double k = params.value("scale", 1.0);
      if (f == "cos") return cos(k * c.z);
      if (f == "sin") return sin(k * c.z);
      if (f == "gaussian") return exp(-(k * c.z) * (k * c.z));
      if (f == "bump") {  // (1 - (k z)^2)^6 on |k z| < 1
        const CJet<N> s = 1.0 - (k * c.z) * (k * c.z);
        if (std::real(s.value()) <= 0) return CJet<N>(0.0);
        return ipow(s, 6);
      }
      throw ContractError("descriptor: unknown axial function " + f);
    }
    if (kind == "angular") {
      const int k = params.at("k").get<int>();
      const std::string f = params.at("function").get<std::string>();
      const CJet<N> ph = angle(c.x, c.y);
      if (f == "cos") return cos(double(k) * ph);
      if (f == "sin") return sin(double(k) * ph);
      throw ContractError("descriptor: unknown angular function " + f);
    }
    throw ContractError("descriptor: unknown builtin '" + kind + "'");
  }
};

inline CoefNode parse_node(const json& j) {
  CoefNode n;
  n.kind = j.at("builtin").get<std::string>();
  n.params = j;
  if (j.contains("terms"))
    for (const auto& t : j.at("terms")) n.children.push_back(parse_node(t));
  if (j.contains("factors"))
    for (const auto& t : j.at("factors")) n.children.push_back(parse_node(t));
  return n;
}

// Tensor grid with trilinear interpolation, zero outside.
struct Tabulated {
  std::vector<double> x, y, z, re, im;

  static const std::vector<double>& check_axis(const std::vector<double>& a, const char* name) {
    if (a.size() < 2 || !std::is_sorted(a.begin(), a.end()))
      throw ContractError(std::string("tabulated: axis ") + name + " needs >= 2 sorted nodes");
    return a;
  }
  cplx at(std::size_t i, std::size_t j, std::size_t k) const {
    const std::size_t n = (i * y.size() + j) * z.size() + k;
    return {re[n], im.empty() ? 0.0 : im[n]};
  }
  cplx operator()(const Point& p) const {
    auto locate = [](const std::vector<double>& a, double v, std::size_t& i, double& t) {
      if (v < a.front() || v > a.back()) return false;
      auto it = std::upper_bound(a.begin(), a.end(), v);
      i = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - a.begin() - 1, 0), a.size() - 2);
      t = (v - a[i]) / (a[i + 1] - a[i]);
      return true;
    };
    std::size_t i, j, k;
    double tx, ty, tz;
    if (!locate(x, p.x, i, tx) || !locate(y, p.y, j, ty) || !locate(z, p.z, k, tz)) return 0.0;
    cplx v = 0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) {
          const double w = (a ? tx : 1 - tx) * (b ? ty : 1 - ty) * (c ? tz : 1 - tz);
          if (w != 0) v += w * at(i + a, j + b, k + c);
        }
    return v;
  }
};

}  // namespace detail

inline ScalarField coefficient_from_json(const json& j) {
  if (j.at("builtin").get<std::string>() == "tabulated") {
    auto t = std::make_shared<detail::Tabulated>();
    const auto& ax = j.at("axes");
    t->x = detail::Tabulated::check_axis(ax.at("x").get<std::vector<double>>(), "x");
    t->y = detail::Tabulated::check_axis(ax.at("y").get<std::vector<double>>(), "y");
    t->z = detail::Tabulated::check_axis(ax.at("z").get<std::vector<double>>(), "z");
    t->re = j.at("values").at("re").get<std::vector<double>>();
    if (j.at("values").contains("im")) t->im = j.at("values").at("im").get<std::vector<double>>();
    const std::size_t n = t->x.size() * t->y.size() * t->z.size();
    if (t->re.size() != n || (!t->im.empty() && t->im.size() != n))
      throw ContractError("tabulated: value count does not match the grid");
    return ScalarField::finite_difference([t](const Point& p) { return (*t)(p); },
                                          j.value("step", kDefaultStep));
  }
  const detail::CoefNode node = detail::parse_node(j);
  return ScalarField::from_jets(
      [node](auto tag, const Point& p) {
        constexpr int N = decltype(tag)::value;
        return node.eval<N>(coords<N>(p));
      },
      ScalarField::kMaxOrder);
}

inline Representation representation_from_json(const json& j) {
  const std::string s = j.at("representation").get<std::string>();
  if (s == "cartesian") return Representation::Cartesian;
  if (s == "cylindrical") return Representation::Cylindrical;
  throw ContractError("descriptor: unknown representation " + s);
}

inline std::string representation_name(Representation r) {
  return r == Representation::Cartesian ? "cartesian" : "cylindrical";
}

inline Horizontal1Form form1_from_json(const json& j) {
  if (j.at("degree").get<int>() != 1) throw ContractError("descriptor: expected a 1-form");
  Horizontal1Form A;
  A.rep = representation_from_json(j);
  const auto& comps = j.at("components");
  if (comps.size() != 2) throw ContractError("descriptor: 1-forms need two components");
  A.first = coefficient_from_json(comps.at(0));
  A.second = coefficient_from_json(comps.at(1));
  A.descriptor = j;
  return A;
}

// A cylindrical 2-form may list only its dr-component; the other one is then
// recovered from closedness.
inline Horizontal2Form form2_from_json(const json& j) {
  if (j.at("degree").get<int>() != 2) throw ContractError("descriptor: expected a 2-form");
  const auto rep = representation_from_json(j);
  const auto& comps = j.at("components");
  std::optional<double> support;
  if (j.contains("support_radius")) support = j.at("support_radius").get<double>();
  Horizontal2Form B;
  if (comps.size() == 1) {
    if (rep != Representation::Cylindrical)
      throw ContractError("descriptor: a single component needs the cylindrical representation");
    B = from_b1(coefficient_from_json(comps.at(0)), support);
  } else if (comps.size() == 2) {
    B.rep = rep;
    B.first = coefficient_from_json(comps.at(0));
    B.second = coefficient_from_json(comps.at(1));
    B.support_radius = support;
  } else {
    throw ContractError("descriptor: 2-forms need one or two components");
  }
  B.descriptor = j;
  return B;
}

// A_alpha = alpha dphi, i.e. alpha_1 = 0, alpha_2 = alpha / r.
inline Horizontal1Form ab_potential(double alpha) {
  const json j = {
      {"degree", 1},
      {"representation", "cylindrical"},
      {"components",
       {{{"builtin", "constant"}, {"value", 0.0}},
        {{"builtin", "product"},
         {"factors",
          {{{"builtin", "constant"}, {"value", alpha}},
           {{"builtin", "radius_power"}, {"power", -1.0}}}}}}}};
  return form1_from_json(j);
}

// A = |B| x^2 / 2 dy, whose D is |B| dx^w.
inline Horizontal1Form uniform_gauge(double strength) {
  const json j = {{"degree", 1},
                  {"representation", "cartesian"},
                  {"components",
                   {{{"builtin", "constant"}, {"value", 0.0}},
                    {{"builtin", "monomial"}, {"coef", 0.5 * strength}, {"powers", {2, 0, 0}}}}}};
  return form1_from_json(j);
}

// Uniform field |B| dx^w.
inline Horizontal2Form uniform_field(double strength) {
  const json j = {{"degree", 2},
                  {"representation", "cartesian"},
                  {"components",
                   {{{"builtin", "constant"}, {"value", strength}},
                    {{"builtin", "constant"}, {"value", 0.0}}}}};
  return form2_from_json(j);
}

template <class Form>
json form_to_json(const Form& f) {
  if (!f.descriptor)
    throw ContractError("form_to_json: form was not built from a descriptor");
  return *f.descriptor;
}

}  // namespace heisenmag
