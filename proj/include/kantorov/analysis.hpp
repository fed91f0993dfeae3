#pragma once

// Convergence experiments, bound checks, the test-function errors lambda_n
// and shape-preservation checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "kantorov/bernstein.hpp"
#include "kantorov/catalog.hpp"
#include "kantorov/errors.hpp"
#include "kantorov/geometry.hpp"
#include "kantorov/kantorovich.hpp"
#include "kantorov/markov.hpp"
#include "kantorov/moduli.hpp"
#include "kantorov/parallel.hpp"
#include "kantorov/summation.hpp"

namespace kantorov {

/// L^p norm (1 <= p < inf) or the sup norm.
struct Norm {
  bool sup = false;
  double p = 1.0;

  static Norm sup_norm() { return {true, std::numeric_limits<double>::infinity()}; }
  static Norm lp(double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw invalid_argument("p must be a finite number >= 1");
    return {false, p};
  }
};

struct ErrorRow {
  int n = 0;
  // Empty for rows that only measure an L^p quantity.
  std::optional<double> sup_error;
  std::optional<double> lp_error;
  std::optional<double> bound_value;
  std::optional<double> ratio;
  std::optional<bool> pass;
  std::string bound_id;
};

struct BoundReport {
  std::string bound_id;
  int n_min = 0;
  int n_max = 0;
  double max_ratio = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  std::vector<ErrorRow> rows;
};

// ---------------------------------------------------------------------------
// Errors and norms

/// Evaluator of C_n(f): the cell form when it applies (a > 0, Lebesgue
/// measures), the inner-integral form otherwise.
inline Field operator_field(const OperatorConfig& cfg, int n, const Field& f, bool prefer_cells = false) {
  if (prefer_cells && cfg.a > 0.0 && cfg.lebesgue()) {
    auto ev = std::make_shared<CellEvaluator>(cfg, n, f);
    return Field([ev](const Point& x) { return (*ev)(x); });
  }
  auto ev = std::make_shared<KantorovichEvaluator>(cfg, n, f);
  return Field([ev](const Point& x) { return (*ev)(x); });
}

/// Values of g on uniform_grid(domain, m).
inline std::vector<double> grid_values(const Field& g, const Domain& domain, int m) {
  const auto grid = uniform_grid(domain, m);
  std::vector<double> out(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) { out[k] = g(grid[k]); });
  return out;
}

/// max over uniform_grid(m) of |C_n(f)(x) - f(x)|.
inline double sup_error(const OperatorConfig& cfg, int n, const Field& f, int m) {
  const KantorovichEvaluator ev(cfg, n, f);
  const auto grid = uniform_grid(cfg.domain, m);
  std::vector<double> err(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) { err[k] = std::abs(ev(grid[k]) - f(grid[k])); });
  return *std::max_element(err.begin(), err.end());
}

/// (integral over the domain of |g|^p)^(1/p), Lebesgue measure, composite
/// rule split along g's kinks on boxes.
inline double lp_norm(const Field& g, const Domain& domain, double p, int level = 8, int panels = 16) {
  if (!(p >= 1.0)) throw invalid_argument("p must be >= 1");
  const Field h([&](const Point& x) { return std::pow(std::abs(g(x)), p); },
                std::vector<Kink>(g.kinks().begin(), g.kinks().end()));
  return std::pow(std::max(0.0, integrate_field(domain, h, level, panels)), 1.0 / p);
}

/// ||C_n(f) - f||_p; the cell form is used when a > 0 and the measures are
/// Lebesgue.
inline double lp_error(const OperatorConfig& cfg, int n, const Field& f, double p, int level = 8, int panels = 16) {
  const Field cn = operator_field(cfg, n, f, true);
  const Field diff([&](const Point& x) { return cn(x) - f(x); }, std::vector<Kink>(f.kinks().begin(), f.kinks().end()));
  return lp_norm(diff, cfg.domain, p, level, panels);
}

/// Step sqrt((3n + a^2) / (12 (n+a)^2)) at which the averaged modulus enters
/// the L^p estimates.
inline double tau_step(int n, double a) { return std::sqrt((3.0 * n + a * a) / (12.0 * (n + a) * (n + a))); }

// ---------------------------------------------------------------------------
// lambda_n

/// q(x) = sum_i (A_i + B_i x_i + C x_i^2).
struct SeparableQuadratic {
  int dim = 1;
  std::array<double, max_dim> A{};
  std::array<double, max_dim> B{};
  double C = 0.0;

  double operator()(const Point& x) const {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += A[i] + B[i] * x[i] + C * x[i] * x[i];
    return s;
  }
};

/// Exact minimum and maximum of q over the domain, from the critical points
/// of q restricted to every face.
inline std::pair<double, double> extrema(const SeparableQuadratic& q, const Domain& domain) {
  const int d = domain.dim();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  auto consider = [&](const Point& x) {
    const double v = q(x);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  };
  if (domain.is_box()) {
    double sum_lo = 0.0, sum_hi = 0.0;
    for (int i = 0; i < d; ++i) {
      std::vector<double> cand = {0.0, 1.0};
      if (q.C != 0.0) {
        const double t = -q.B[i] / (2.0 * q.C);
        if (t > 0.0 && t < 1.0) cand.push_back(t);
      }
      double l = std::numeric_limits<double>::infinity(), h = -l;
      for (double t : cand) {
        const double v = q.A[i] + q.B[i] * t + q.C * t * t;
        l = std::min(l, v);
        h = std::max(h, v);
      }
      sum_lo += l;
      sum_hi += h;
    }
    return {sum_lo, sum_hi};
  }
  for (int mask = 0; mask < (1 << d); ++mask) {
    std::vector<int> free;
    for (int i = 0; i < d; ++i)
      if (mask >> i & 1) free.push_back(i);
    // Relative interior of the face {x_i = 0, i not free}.
    if (free.empty()) {
      consider(Point(d));
    } else if (q.C != 0.0) {
      Point x(d);
      bool ok = true;
      double s = 0.0;
      for (int i : free) {
        x[i] = -q.B[i] / (2.0 * q.C);
        ok = ok && x[i] >= 0.0;
        s += x[i];
      }
      if (ok && s <= 1.0) consider(x);
    }
    if (free.empty()) continue;
    // The part of that face on sum x_i = 1.
    Point x(d);
    if (free.size() == 1) {
      x[free[0]] = 1.0;
      consider(x);
      continue;
    }
    if (q.C == 0.0) continue;
    double sb = 0.0;
    for (int i : free) sb += q.B[i];
    const double lambda = (2.0 * q.C + sb) / static_cast<double>(free.size());
    bool ok = true;
    for (int i : free) {
      x[i] = (lambda - q.B[i]) / (2.0 * q.C);
      ok = ok && x[i] >= 0.0;
    }
    if (ok) consider(x);
  }
  return {lo, hi};
}

inline double sup_abs(const SeparableQuadratic& q, const Domain& domain) {
  const auto [lo, hi] = extrema(q, domain);
  return std::max(std::abs(lo), std::abs(hi));
}

namespace detail {

struct MeasureMoments {
  std::array<double, max_dim> first{};
  std::array<double, max_dim> second{};
};

inline MeasureMoments measure_moments(const OperatorConfig& cfg, int n) {
  MeasureMoments mm;
  const MeasureSpec mu = resolve(cfg.measures, cfg.domain, n);
  for (int i = 0; i < cfg.domain.dim(); ++i) {
    mm.first[i] = integrate_measure(mu, cfg.domain, Field([i](const Point& x) { return x[i]; }), cfg.quad_level);
    mm.second[i] =
        integrate_measure(mu, cfg.domain, Field([i](const Point& x) { return x[i] * x[i]; }), cfg.quad_level);
  }
  return mm;
}

// integral over the domain of |c - x_i|^p, through the marginal density of
// x_i: 1 on boxes, (1-t)^(d-1)/(d-1)! on the simplex.
inline double coordinate_lp_integral(const Domain& domain, double c, double p) {
  const int d = domain.dim();
  std::vector<double> breaks;
  if (c > 0.0 && c < 1.0) breaks.push_back(c);
  const GaussRule rule = composite_line(breaks, 24, 2);
  CompensatedSum s;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double t = rule.nodes[j];
    const double density = domain.is_box() ? 1.0 : std::pow(1.0 - t, d - 1) / factorial(d - 1);
    s.add(rule.weights[j] * std::pow(std::abs(c - t), p) * density);
  }
  return s.get();
}


// int_0^hi |A + B t + C t^2|^p dt, split at the real roots.
inline double quadratic_line_lp(double A, double B, double C, double hi, double p) {
  if (!(hi > 0.0)) return 0.0;
  std::vector<double> ends{0.0};
  if (C != 0.0) {
    const double disc = B * B - 4.0 * A * C;
    if (disc > 0.0) {
      // stable root pair
      const double r = -0.5 * (B + std::copysign(std::sqrt(disc), B));
      for (double t : {r / C, r != 0.0 ? A / r : -B / C})
        if (t > 0.0 && t < hi) ends.push_back(t);
    }
  } else if (B != 0.0) {
    const double t = -A / B;
    if (t > 0.0 && t < hi) ends.push_back(t);
  }
  std::sort(ends.begin(), ends.end());
  ends.push_back(hi);
  const GaussRule& g = gauss_legendre(24);
  CompensatedSum s;
  for (std::size_t k = 0; k + 1 < ends.size(); ++k) {
    const double lo = ends[k], w = ends[k + 1] - ends[k];
    for (std::size_t j = 0; j < g.nodes.size(); ++j) {
      const double t = lo + w * g.nodes[j];
      s.add(w * g.weights[j] * std::pow(std::abs(A + t * (B + C * t)), p));
    }
  }
  return s.get();
}

// int over the domain of |q|^p: exact along the last axis, composite Gauss
// over the remaining ones.
inline double quadratic_lp_integral(const SeparableQuadratic& q, const Domain& domain, double p, int level) {
  const int d = domain.dim();
  const int last = d - 1;
  if (d == 1) return quadratic_line_lp(q.A[0], q.B[0], q.C, 1.0, p);
  const Domain sub = domain.is_box() ? Domain::hypercube(d - 1) : Domain::simplex(d - 1);
  const QuadratureRule& rule = composite_rule(sub, std::max(level, 12), d == 2 ? 192 : 24);
  CompensatedSum s;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const Point& y = rule.nodes[j];
    double k = q.A[last], used = 0.0;
    for (int i = 0; i < last; ++i) {
      k += q.A[i] + y[i] * (q.B[i] + q.C * y[i]);
      used += y[i];
    }
    const double hi = domain.is_box() ? 1.0 : std::max(0.0, 1.0 - used);
    s.add(rule.weights[j] * quadratic_line_lp(k, q.B[last], q.C, hi, p));
  }
  return s.get();
}
}  // namespace detail

/// The errors ||C_n(phi_i) - phi_i|| for phi_0 = 1, phi_i = pr_i and
/// phi_{d+1} = sum of pr_i^2, from the closed-form moments. The L^p norms are
/// taken with respect to Lebesgue measure on the domain.
inline std::vector<double> lambda_terms(const OperatorConfig& cfg, int n, Norm norm, int level = 8) {
  if (n < 1) throw invalid_argument("n must be >= 1");
  cfg.validate();
  const Domain& domain = cfg.domain;
  const int d = domain.dim();
  const double a = cfg.a;
  const double na = n + a;
  const auto mm = detail::measure_moments(cfg, n);
  std::vector<double> out(d + 2, 0.0);
  for (int i = 0; i < d; ++i) {
    // C_n(pr_i) - pr_i = a/(n+a) (m_i - x_i)
    if (a == 0.0) continue;
    if (norm.sup) {
      SeparableQuadratic q;
      q.dim = d;
      q.A[i] = a / na * mm.first[i];
      q.B[i] = -a / na;
      out[1 + i] = sup_abs(q, domain);
    } else {
      out[1 + i] = a / na * std::pow(detail::coordinate_lp_integral(domain, mm.first[i], norm.p), 1.0 / norm.p);
    }
  }
  SeparableQuadratic q;
  q.dim = d;
  q.C = n * (n - 1.0) / (na * na) - 1.0;
  for (int i = 0; i < d; ++i) {
    q.A[i] = a * a / (na * na) * mm.second[i];
    q.B[i] = (2.0 * n * a * mm.first[i] + n) / (na * na);
  }
  if (norm.sup) {
    out[d + 1] = sup_abs(q, domain);
  } else {
    out[d + 1] = std::pow(detail::quadratic_lp_integral(q, domain, norm.p, level), 1.0 / norm.p);
  }
  return out;
}

inline double lambda_n(const OperatorConfig& cfg, int n, Norm norm, int level = 8) {
  const auto t = lambda_terms(cfg, n, norm, level);
  return *std::max_element(t.begin(), t.end());
}

/// 3 d (a+1)^2 / (n+a) on boxes, 3 (a+1)^2 / ((d!)^(1/p) (n+a)) on the
/// simplex.
inline double lambda_p_bound(const Domain& domain, double a, int n, double p) {
  const double d = domain.dim();
  if (domain.is_box()) return 3.0 * d * (a + 1.0) * (a + 1.0) / (n + a);
  return 3.0 * (a + 1.0) * (a + 1.0) / (std::pow(factorial(domain.dim()), 1.0 / p) * (n + a));
}

/// max{2 a r(K), (2a + 2ad + 2) r(K)^2} / (n + a).
inline double lambda_inf_bound(const Domain& domain, double a, int n) {
  const double r = radius(domain);
  const double d = domain.dim();
  return std::max(2.0 * a * r, (2.0 * a + 2.0 * a * d + 2.0) * r * r) / (n + a);
}

/// sup_n ((n+a) / (a (n+1)))^d, times d! on the simplex.
inline double equibound_constant(const Domain& domain, double a) {
  if (!(a > 0.0)) throw invalid_argument("the L^p bound needs a > 0");
  double m = std::pow(std::max((1.0 + a) / (2.0 * a), 1.0 / a), domain.dim());
  if (!domain.is_box()) m *= factorial(domain.dim());
  return m;
}

/// sup over x of T(e_2)(x) - e_2(x) = sum_i (x_i - x_i^2) for the canonical
/// operators.
inline double markov_e2_gap(const Domain& domain) {
  SeparableQuadratic q;
  q.dim = domain.dim();
  for (int i = 0; i < q.dim; ++i) q.B[i] = 1.0;
  q.C = -1.0;
  return sup_abs(q, domain);
}

// ---------------------------------------------------------------------------
// Bound checks

struct BoundOptions {
  int grid = 200;          // sup-norm evaluation grid
  int modulus_grid = 400;  // grid for moduli when no exact modulus is known
  int level = 8;
  int panels = 16;
  double p = 1.0;
};

inline const std::vector<std::string>& bound_ids() {
  static const std::vector<std::string> ids = {"omega_total",    "omega_pointwise",  "omega_uniform",
                                               "lambda_p_bound", "lambda_inf_bound", "lp_equibounded"};
  return ids;
}

constexpr double closed_form_tolerance = 1e-6;
constexpr double grid_modulus_tolerance = 0.02;
constexpr double grid_modulus_inflation = 1.02;

namespace detail {

// omega(f, .) for bound checks: the exact modulus if the catalog has one,
// otherwise the grid modulus inflated by 2%.
class ModulusSide {
 public:
  ModulusSide(const CatalogFunction& f, const Domain& domain, int m) : f_(f), domain_(domain), m_(m) {}

  bool exact() const { return static_cast<bool>(f_.meta.exact_omega); }

  double operator()(double delta) const {
    if (delta <= 0.0) return 0.0;
    if (exact()) return f_.meta.exact_omega(delta);
    if (delta * m_ < 1.0)
      throw invalid_argument("modulus grid of resolution " + std::to_string(m_) + " is too coarse for delta = " +
                             std::to_string(delta));
    return grid_modulus_inflation * omega1(f_.field(), domain_, delta, m_);
  }

 private:
  const CatalogFunction& f_;
  Domain domain_;
  int m_;
};

inline ErrorRow ratio_row(int n, const std::string& id, double measured, double bound, bool lp, double tol) {
  ErrorRow row;
  row.n = n;
  row.bound_id = id;
  if (lp)
    row.lp_error = measured;
  else
    row.sup_error = measured;
  row.bound_value = bound;
  row.ratio = bound > 0.0 ? measured / bound : (measured > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  row.pass = *row.ratio <= 1.0 + tol;
  return row;
}

}  // namespace detail

/// Measured quantity against the bound named by bound_id for every n.
/// Pass iff each ratio is <= 1 + 1e-6 (closed-form bounds) or <= 1 + 0.02
/// (bounds built from a grid modulus).
inline BoundReport check_bound(const OperatorConfig& cfg, const CatalogFunction& f, std::span<const int> n_list,
                               const std::string& bound_id, const BoundOptions& opt = {}) {
  cfg.validate();
  if (n_list.empty()) throw invalid_argument("empty n list");
  if (std::find(bound_ids().begin(), bound_ids().end(), bound_id) == bound_ids().end())
    throw config_error("unknown bound id '" + bound_id + "'");
  const Domain& domain = cfg.domain;
  if (!(f.domain == domain)) throw config_error("function domain differs from the operator domain");
  const bool needs_lebesgue = bound_id == "lambda_p_bound" || bound_id == "lp_equibounded";
  if (needs_lebesgue && !cfg.lebesgue()) throw config_error("bound '" + bound_id + "' requires Lebesgue measures");
  if (bound_id == "lp_equibounded" && !(cfg.a > 0.0)) throw config_error("bound 'lp_equibounded' requires a > 0");
  const double a = cfg.a;

  BoundReport rep;
  rep.bound_id = bound_id;
  rep.n_min = *std::min_element(n_list.begin(), n_list.end());
  rep.n_max = *std::max_element(n_list.begin(), n_list.end());
  const detail::ModulusSide omega(f, domain, opt.modulus_grid);
  const bool uses_modulus = bound_id.rfind("omega_", 0) == 0;
  rep.tolerance = uses_modulus && !omega.exact() ? grid_modulus_tolerance : closed_form_tolerance;
  const Field fd = f.field();

  std::vector<int> ns(n_list.begin(), n_list.end());
  std::sort(ns.begin(), ns.end());
  for (int n : ns) {
    if (n < 1) throw invalid_argument("n must be >= 1");
    ErrorRow row;
    if (bound_id == "omega_total") {
      const double err = sup_error(cfg, n, fd, opt.grid);
      const double delta = std::sqrt((4.0 * a * a + 1.0) / (n + a));
      row = detail::ratio_row(n, bound_id, err, 2.0 * omega(delta * radius(domain)), false, rep.tolerance);
    } else if (bound_id == "omega_pointwise") {
      // Worst pointwise ratio; the bound column holds the bound at that point.
      const KantorovichEvaluator ev(cfg, n, fd);
      const auto mm = detail::measure_moments(cfg, n);
      const double na = n + a;
      double worst = 0.0, worst_err = 0.0, worst_bound = 0.0;
      for (const Point& x : uniform_grid(domain, opt.grid)) {
        // a^2 int d_x^2 dmu_n + n (T(e_2)(x) - e_2(x))
        double dx2 = 0.0, gap = 0.0;
        for (int i = 0; i < domain.dim(); ++i) {
          dx2 += mm.second[i] - 2.0 * x[i] * mm.first[i] + x[i] * x[i];
          gap += x[i] - x[i] * x[i];
        }
        const double delta = std::sqrt(std::max(0.0, a * a * dx2 + n * gap)) / na;
        const double err = std::abs(ev(x) - fd(x));
        const double bound = delta > 0.0 ? 2.0 * omega(delta) : 0.0;
        const double r = bound > 0.0 ? err / bound : (err > 1e-13 ? std::numeric_limits<double>::infinity() : 0.0);
        if (r >= worst) {
          worst = r;
          worst_err = err;
          worst_bound = bound;
        }
      }
      row = detail::ratio_row(n, bound_id, worst_err, worst_bound, false, rep.tolerance);
      row.ratio = worst;
      row.pass = worst <= 1.0 + rep.tolerance;
    } else if (bound_id == "omega_uniform") {
      const double err = sup_error(cfg, n, fd, opt.grid);
      const double diam = diameter(domain);
      const double delta = std::max(a * diam * diam, markov_e2_gap(domain)) / std::sqrt(n + a);
      row = detail::ratio_row(n, bound_id, err, 2.0 * omega(delta), false, rep.tolerance);
    } else if (bound_id == "lambda_p_bound") {
      const double lam = lambda_n(cfg, n, Norm::lp(opt.p), opt.level);
      row = detail::ratio_row(n, bound_id, lam, lambda_p_bound(domain, a, n, opt.p), true, rep.tolerance);
    } else if (bound_id == "lambda_inf_bound") {
      const double lam = lambda_n(cfg, n, Norm::sup_norm(), opt.level);
      row = detail::ratio_row(n, bound_id, lam, lambda_inf_bound(domain, a, n), false, rep.tolerance);
    } else {
      const double lhs = lp_norm(operator_field(cfg, n, fd, true), domain, opt.p, opt.level, opt.panels);
      const double rhs = std::pow(equibound_constant(domain, a), 1.0 / opt.p) * lp_norm(fd, domain, opt.p, opt.level, opt.panels);
      row = detail::ratio_row(n, bound_id, lhs, rhs, true, rep.tolerance);
    }
    rep.max_ratio = std::max(rep.max_ratio, *row.ratio);
    rep.pass = rep.pass && *row.pass;
    rep.rows.push_back(row);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Shape preservation

enum class ConvexityMode { convex, coordinate_convex, axially_convex };

inline std::string to_string(ConvexityMode m) {
  switch (m) {
    case ConvexityMode::convex: return "convex";
    case ConvexityMode::coordinate_convex: return "coordinate_convex";
    case ConvexityMode::axially_convex: return "axially_convex";
  }
  return {};
}

struct ConvexityReport {
  bool pass = true;
  /// max of g((x+y)/2) - (g(x)+g(y))/2 over the checked pairs.
  double worst = 0.0;
  std::optional<Point> x, y;
};

/// Midpoint convexity of g over pairs of the resolution-m lattice, using
/// values on the 2m lattice so that every midpoint is a lattice point.
/// coordinate_convex restricts to pairs differing in one coordinate;
/// axially_convex to pairs along e_i and e_i - e_j.
inline ConvexityReport convexity_report(const Field& g, const Domain& domain, ConvexityMode mode, int m,
                                        double tol) {
  if (m < 2) throw invalid_argument("grid resolution must be >= 2");
  const int d = domain.dim();
  const auto t = detail::tabulate(domain, g, 2 * m);
  // Offsets in units of the coarse lattice.
  std::vector<detail::Offset> offs;
  if (mode == ConvexityMode::convex) {
    offs = detail::offsets_within(d, double(m) * d, Metric::l1, m, true);
  } else {
    for (int i = 0; i < d; ++i)
      for (int s = 1; s <= m; ++s) {
        detail::Offset o{};
        o[i] = s;
        offs.push_back(o);
      }
    if (mode == ConvexityMode::axially_convex)
      for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
          for (int s = 1; s <= m; ++s) {
            detail::Offset o{};
            o[i] = s;
            o[j] = -s;
            offs.push_back(o);
          }
  }
  std::vector<double> worst(t.index.size(), -std::numeric_limits<double>::infinity());
  std::vector<std::size_t> partner(t.index.size(), 0);
  parallel_for(t.index.size(), [&](std::size_t k) {
    if (!t.valid[k]) return;
    const auto idx = t.index.unflatten(k);
    for (int i = 0; i < d; ++i)
      if (idx[i] % 2) return;
    std::size_t mid, far;
    for (const auto& o : offs) {
      if (!detail::shifted(t.index, k, o, 2, far)) continue;
      detail::shifted(t.index, k, o, 1, mid);
      const double v = t.values[mid] - 0.5 * (t.values[k] + t.values[far]);
      if (v > worst[k]) {
        worst[k] = v;
        partner[k] = far;
      }
    }
  });
  ConvexityReport rep;
  rep.worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < worst.size(); ++k)
    if (worst[k] > rep.worst) {
      rep.worst = worst[k];
      rep.x = t.index.point(t.index.unflatten(k));
      rep.y = t.index.point(t.index.unflatten(partner[k]));
    }
  if (!std::isfinite(rep.worst)) rep.worst = 0.0;
  rep.pass = rep.worst <= tol;
  return rep;
}

struct SandwichReport {
  bool pass = true;
  double lower_violation = 0.0;   // max of f - B_n(f)
  double upper_violation = 0.0;   // max of B_n(f) - T(f)
  double operator_violation = 0.0;  // max of C_n(f) - C_n(T(f))
  std::optional<Point> worst;
};

/// T(f) for the configured Markov operator.
inline Field markov_image(const MarkovOperator& op, const Field& f) {
  return Field([op, f](const Point& x) { return apply_markov(op, f, clamp_to_domain(op.domain(), x)); });
}

/// Grid check of f <= B_n(f) <= T(f) and C_n(f) <= C_n(T(f)).
inline SandwichReport sandwich_check(const OperatorConfig& cfg, int n, const Field& f, int m, double tol) {
  cfg.validate();
  const Field tf = markov_image(cfg.markov, f);
  const BernsteinEvaluator bn(cfg.domain, n, f);
  const KantorovichEvaluator cn(cfg, n, f), cnt(cfg, n, tf);
  SandwichReport rep;
  double worst = -std::numeric_limits<double>::infinity();
  for (const Point& x : uniform_grid(cfg.domain, m)) {
    const double b = bn(x);
    const double lo = f(x) - b, hi = b - tf(x), op = cn(x) - cnt(x);
    rep.lower_violation = std::max(rep.lower_violation, lo);
    rep.upper_violation = std::max(rep.upper_violation, hi);
    rep.operator_violation = std::max(rep.operator_violation, op);
    const double w = std::max({lo, hi, op});
    if (w > worst) {
      worst = w;
      rep.worst = x;
    }
  }
  rep.pass = rep.lower_violation <= tol && rep.upper_violation <= tol && rep.operator_violation <= tol;
  return rep;
}

struct LipschitzReport {
  bool pass = true;
  double estimate = 0.0;
  double constant = 0.0;
};

/// l1-Lipschitz estimate of C_n(f) on the grid against the catalog constant.
inline LipschitzReport lipschitz_preservation(const OperatorConfig& cfg, int n, const CatalogFunction& f, int m) {
  if (!f.meta.lipschitz_l1) throw config_error("function '" + f.name + "' has no l1 Lipschitz constant");
  const KantorovichEvaluator ev(cfg, n, f.field());
  LipschitzReport rep;
  rep.constant = *f.meta.lipschitz_l1;
  rep.estimate = lipschitz_estimate(Field([&](const Point& x) { return ev(x); }), cfg.domain, m, Metric::l1);
  rep.pass = rep.estimate <= rep.constant + 1e-6;
  return rep;
}

// ---------------------------------------------------------------------------
// Moment oracle

/// Uniformly distributed point of the domain.
inline Point random_point(const Domain& domain, std::mt19937_64& rng) {
  const int d = domain.dim();
  Point x(d);
  if (domain.is_box()) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < d; ++i) x[i] = u(rng);
    return x;
  }
  std::exponential_distribution<double> e(1.0);
  std::array<double, max_dim + 1> g{};
  double s = 0.0;
  for (int i = 0; i <= d; ++i) s += (g[i] = e(rng));
  for (int i = 0; i < d; ++i) x[i] = g[i] / s;
  return clamp_to_domain(domain, x);
}

/// Affine form with coefficients uniform in [-1, 1].
inline AffineForm random_affine(int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double c = u(rng);
  Point g(dim);
  for (int i = 0; i < dim; ++i) g[i] = u(rng);
  return {c, g};
}

struct MomentCheck {
  double affine_deviation = 0.0;
  double quadratic_deviation = 0.0;
};

/// Largest deviations of C_n on random affine forms and on pr_i^2 from the
/// closed-form moments, over random points.
inline MomentCheck moment_oracle_check(const OperatorConfig& cfg, int n, int forms, int points, std::mt19937_64& rng) {
  const Domain& domain = cfg.domain;
  std::vector<Point> xs;
  for (int j = 0; j < points; ++j) xs.push_back(random_point(domain, rng));
  MomentCheck out;
  for (int r = 0; r < forms; ++r) {
    const AffineForm h = random_affine(domain.dim(), rng);
    const KantorovichEvaluator ev(cfg, n, h.field());
    for (const Point& x : xs)
      out.affine_deviation = std::max(out.affine_deviation, std::abs(ev(x) - cn_affine_moment(cfg, n, h, x)));
  }
  for (int i = 0; i < domain.dim(); ++i) {
    const KantorovichEvaluator ev(cfg, n, Field([i](const Point& x) { return x[i] * x[i]; }));
    for (const Point& x : xs)
      out.quadratic_deviation = std::max(out.quadratic_deviation, std::abs(ev(x) - cn_quadratic_moment(cfg, n, i, x)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rate diagnostics

/// Least-squares slope of log(err) against log(n).
inline double loglog_slope(std::span<const int> ns, std::span<const double> errs) {
  if (ns.size() != errs.size() || ns.size() < 2) throw invalid_argument("need at least two (n, error) pairs");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(errs[i] > 0.0)) throw invalid_argument("log-log slope needs positive errors");
    const double x = std::log(double(ns[i])), y = std::log(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

/// Every value is at most (1 + slack) times its predecessor.
inline bool nearly_decreasing(std::span<const double> values, double slack = 0.05) {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[i - 1] * (1.0 + slack)) return false;
  return true;
}

}  // namespace kantorov
