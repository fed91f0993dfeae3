#pragma once

// Closed-form test functions with metadata (convexity, Lipschitz constants,
// exact moduli of continuity where known).

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "kantorov/errors.hpp"
#include "kantorov/field.hpp"
#include "kantorov/geometry.hpp"
#include "kantorov/kantorovich.hpp"

namespace kantorov {

struct HolderClass {
  double constant;
  double exponent;
};

struct CatalogMeta {
  std::optional<AffineForm> affine;
  bool convex = false;
  bool coordinate_convex = false;
  bool axially_convex = false;
  /// Lipschitz constants for the l1 and l2 metrics.
  std::optional<double> lipschitz_l1;
  std::optional<double> lipschitz_l2;
  /// Euclidean modulus of continuity on the domain, when known in closed form.
  std::function<double(double)> exact_omega;
  std::optional<HolderClass> holder;
  std::vector<Kink> kinks;
};

struct CatalogFunction {
  std::string name;
  std::vector<double> params;
  Domain domain = Domain::interval();
  std::function<double(const Point&)> eval;
  CatalogMeta meta;

  double operator()(const Point& x) const { return eval(x); }
  Field field() const { return Field(eval, meta.kinks); }
};

inline const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = {"constant",       "affine",     "monomial", "product12",
                                                 "abs_dist_coord", "abs_dist",   "exp_sum",  "runge",
                                                 "abs_diff12",     "sq_norm",    "holder_coord"};
  return names;
}

namespace detail {

inline void require_arity(const std::string& name, const std::vector<double>& params, std::size_t n) {
  if (params.size() != n)
    throw config_error("function '" + name + "' takes " + std::to_string(n) + " parameter(s), got " +
                       std::to_string(params.size()));
}

inline int coordinate_param(const std::string& name, double v, const Domain& domain) {
  if (v != std::floor(v) || v < 1 || v > domain.dim())
    throw config_error("function '" + name + "': coordinate index must be an integer in [1, " +
                       std::to_string(domain.dim()) + "]");
  return static_cast<int>(v) - 1;
}

inline void require_unit(const std::string& name, double c) {
  if (!(c >= 0.0 && c <= 1.0)) throw config_error("function '" + name + "': center must lie in [0, 1]");
}

inline void require_finite(const std::string& name, const std::vector<double>& params) {
  for (double v : params)
    if (!std::isfinite(v)) throw config_error("function '" + name + "': non-finite parameter");
}

// sup |u| - |v| style modulus for a coordinate distance to c in [0, 1].
inline double coordinate_reach(double c) { return std::max(c, 1.0 - c); }

}  // namespace detail

/// Builds a catalog function by name. Coordinate indices in params count
/// from 1.
inline CatalogFunction lookup(const std::string& name, const std::vector<double>& params, const Domain& domain) {
  using detail::require_arity;
  detail::require_finite(name, params);
  const int d = domain.dim();
  CatalogFunction f;
  f.name = name;
  f.params = params;
  f.domain = domain;
  CatalogMeta& m = f.meta;
  auto all_convex = [&] { m.convex = m.coordinate_convex = m.axially_convex = true; };

  if (name == "constant") {
    require_arity(name, params, 1);
    const double c = params[0];
    f.eval = [c](const Point&) { return c; };
    m.affine = AffineForm(c, Point(d));
    all_convex();
    m.lipschitz_l1 = m.lipschitz_l2 = 0.0;
    m.exact_omega = [](double) { return 0.0; };
    m.holder = HolderClass{0.0, 1.0};
  } else if (name == "affine") {
    require_arity(name, params, 1 + d);
    Point g(d);
    double linf = 0.0, l2 = 0.0;
    for (int i = 0; i < d; ++i) {
      g[i] = params[1 + i];
      linf = std::max(linf, std::abs(g[i]));
      l2 += g[i] * g[i];
    }
    l2 = std::sqrt(l2);
    const AffineForm h(params[0], g);
    f.eval = [h](const Point& x) { return h(x); };
    m.affine = h;
    all_convex();
    m.lipschitz_l1 = linf;
    m.lipschitz_l2 = l2;
    if (d == 1) m.exact_omega = [l2](double delta) { return l2 * std::min(delta, 1.0); };
    m.holder = HolderClass{l2, 1.0};
  } else if (name == "monomial") {
    require_arity(name, params, 2);
    const int i = detail::coordinate_param(name, params[0], domain);
    if (params[1] != std::floor(params[1]) || params[1] < 0 || params[1] > 64)
      throw config_error("function 'monomial': degree must be an integer in [0, 64]");
    const int k = static_cast<int>(params[1]);
    f.eval = [i, k](const Point& x) { return std::pow(x[i], k); };
    if (k <= 1) {
      Point g(d);
      if (k == 1) g[i] = 1.0;
      m.affine = AffineForm(k == 0 ? 1.0 : 0.0, g);
    }
    all_convex();
    m.lipschitz_l1 = m.lipschitz_l2 = static_cast<double>(k);
    m.exact_omega = [k](double delta) { return k == 0 ? 0.0 : 1.0 - std::pow(std::max(0.0, 1.0 - delta), k); };
  } else if (name == "product12") {
    require_arity(name, params, 0);
    if (d < 2) throw config_error("function 'product12' needs dimension >= 2");
    f.eval = [](const Point& x) { return x[0] * x[1]; };
    m.coordinate_convex = true;
    m.lipschitz_l1 = 1.0;
    m.lipschitz_l2 = domain.is_box() ? std::sqrt(2.0) : 1.0;
  } else if (name == "abs_dist_coord") {
    require_arity(name, params, 2);
    const int i = detail::coordinate_param(name, params[0], domain);
    const double c = params[1];
    detail::require_unit(name, c);
    f.eval = [i, c](const Point& x) { return std::abs(x[i] - c); };
    all_convex();
    m.lipschitz_l1 = m.lipschitz_l2 = 1.0;
    const double reach = detail::coordinate_reach(c);
    m.exact_omega = [reach](double delta) { return std::min(delta, reach); };
    m.holder = HolderClass{1.0, 1.0};
    m.kinks = {{i, c}};
  } else if (name == "abs_dist") {
    require_arity(name, params, d);
    Point c(d);
    for (int i = 0; i < d; ++i) c[i] = params[i];
    if (!contains(domain, c)) throw config_error("function 'abs_dist': center " + to_string(c) + " outside " + domain.name());
    f.eval = [c, d](const Point& x) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += std::abs(x[i] - c[i]);
      return s;
    };
    all_convex();
    m.lipschitz_l1 = 1.0;
    m.lipschitz_l2 = std::sqrt(static_cast<double>(d));
    if (d == 1) {
      const double reach = detail::coordinate_reach(c[0]);
      m.exact_omega = [reach](double delta) { return std::min(delta, reach); };
    }
    for (int i = 0; i < d; ++i) m.kinks.push_back({i, c[i]});
  } else if (name == "exp_sum") {
    require_arity(name, params, 0);
    f.eval = [](const Point& x) { return std::exp(x.sum()); };
    all_convex();
    const double smax = domain.is_box() ? d : 1.0;
    m.lipschitz_l1 = std::exp(smax);
    m.lipschitz_l2 = std::sqrt(static_cast<double>(d)) * std::exp(smax);
    if (domain.kind() == DomainKind::interval)
      m.exact_omega = [](double delta) { return std::exp(1.0) - std::exp(1.0 - std::min(delta, 1.0)); };
  } else if (name == "runge") {
    require_arity(name, params, 0);
    f.eval = [d](const Point& x) {
      double r2 = 0.0;
      for (int i = 0; i < d; ++i) r2 += x[i] * x[i];
      return 1.0 / (1.0 + 25.0 * r2);
    };
    // max of 50 r / (1 + 25 r^2)^2, attained at r = 1 / (5 sqrt 3)
    m.lipschitz_l1 = m.lipschitz_l2 = 15.0 * std::numbers::sqrt3 / 8.0;
  } else if (name == "abs_diff12") {
    require_arity(name, params, 0);
    if (d < 2) throw config_error("function 'abs_diff12' needs dimension >= 2");
    f.eval = [](const Point& x) { return std::abs(x[0] - x[1]); };
    all_convex();
    m.lipschitz_l1 = 1.0;
    m.lipschitz_l2 = std::sqrt(2.0);
  } else if (name == "sq_norm") {
    require_arity(name, params, 0);
    f.eval = [d](const Point& x) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += x[i] * x[i];
      return s;
    };
    all_convex();
    m.lipschitz_l1 = 2.0;
    m.lipschitz_l2 = 2.0 * radius(domain);
    if (domain.kind() == DomainKind::interval)
      m.exact_omega = [](double delta) { return 1.0 - std::pow(std::max(0.0, 1.0 - delta), 2); };
  } else if (name == "holder_coord") {
    require_arity(name, params, 3);
    const int i = detail::coordinate_param(name, params[0], domain);
    const double c = params[1];
    const double alpha = params[2];
    detail::require_unit(name, c);
    if (!(alpha > 0.0 && alpha <= 1.0)) throw config_error("function 'holder_coord': exponent must lie in (0, 1]");
    f.eval = [i, c, alpha](const Point& x) { return std::pow(std::abs(x[i] - c), alpha); };
    if (alpha == 1.0) {
      all_convex();
      m.lipschitz_l1 = m.lipschitz_l2 = 1.0;
    }
    const double reach = detail::coordinate_reach(c);
    m.exact_omega = [reach, alpha](double delta) { return std::pow(std::min(delta, reach), alpha); };
    m.holder = HolderClass{1.0, alpha};
    m.kinks = {{i, c, alpha < 1.0}};
  } else {
    throw config_error("unknown function '" + name + "'");
  }
  return f;
}

}  // namespace kantorov
