#pragma once

// Generalized Kantorovich operators C_n = B_n o I_n with blend parameter a
// and a sequence of probability measures mu_n.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "kantorov/bernstein.hpp"
#include "kantorov/errors.hpp"
#include "kantorov/field.hpp"
#include "kantorov/geometry.hpp"
#include "kantorov/markov.hpp"
#include "kantorov/measures.hpp"
#include "kantorov/parallel.hpp"
#include "kantorov/summation.hpp"

namespace kantorov {

/// h(x) = constant + sum_i gradient_i x_i.
struct AffineForm {
  double constant = 0.0;
  Point gradient;

  AffineForm() = default;
  AffineForm(double c, Point g) : constant(c), gradient(g) {
    if (!std::isfinite(c)) throw invalid_argument("affine form with non-finite constant");
    for (double v : g.coords())
      if (!std::isfinite(v)) throw invalid_argument("affine form with non-finite gradient");
  }

  static AffineForm one(int dim) { return {1.0, Point(dim)}; }
  static AffineForm coordinate(int dim, int i) {
    Point g(dim);
    g[i] = 1.0;
    return {0.0, g};
  }

  double operator()(const Point& x) const {
    double v = constant;
    for (int i = 0; i < gradient.dim(); ++i) v += gradient[i] * x[i];
    return v;
  }

  Field field() const {
    return Field([h = *this](const Point& x) { return h(x); });
  }
};

struct OperatorConfig {
  Domain domain = Domain::interval();
  MarkovOperator markov = MarkovOperator::canonical(Domain::interval());
  double a = 1.0;
  MeasureSeq measures = ConstantLebesgue{};
  int quad_level = 8;

  static OperatorConfig canonical(const Domain& domain, double a, MeasureSeq measures = ConstantLebesgue{},
                                  int quad_level = 8) {
    OperatorConfig cfg{domain, MarkovOperator::canonical(domain), a, std::move(measures), quad_level};
    cfg.validate();
    return cfg;
  }

  bool lebesgue() const noexcept { return std::holds_alternative<ConstantLebesgue>(measures); }

  void validate() const {
    if (!std::isfinite(a) || a < 0.0) throw config_error("a must be a finite number >= 0");
    if (quad_level < 1 || quad_level > 64) throw config_error("quad_level must lie in [1, 64]");
    if (!(markov.domain() == domain))
      throw config_error("Markov operator acts on " + markov.domain().name() + ", configured domain is " +
                         domain.name());
    auto check_power = [&](int exponent) {
      if (a != std::floor(a) || a < 1.0)
        throw config_error("power measures need a positive integer a, got a = " + std::to_string(a));
      if (exponent != static_cast<int>(a))
        throw config_error("power measure exponent " + std::to_string(exponent) + " differs from a = " +
                           std::to_string(static_cast<int>(a)));
    };
    if (std::holds_alternative<DiracShift>(measures)) {
      if (!(a > 0.0)) throw config_error("Dirac shift measures require a > 0");
      if (!std::get<DiracShift>(measures).point_at) throw config_error("Dirac shift without a point rule");
    }
    if (const auto* p = std::get_if<PowerOfBase>(&measures)) check_power(p->exponent);
    if (const auto* l = std::get_if<ExplicitList>(&measures)) {
      if (l->list.empty()) throw config_error("explicit measure list is empty");
      for (const auto& mu : l->list)
        if (const auto* p = std::get_if<PowerMeasure>(&mu)) check_power(p->exponent);
    }
  }
};

namespace detail {

constexpr double inner_tolerance = 1e-11;
constexpr int inner_level_cap = 32;

// integral of f(offset + scale * s) d mu(s). Quadrature-based measures are
// refined by doubling the level until two successive values agree.
inline double blended_integral(const OperatorConfig& cfg, const MeasureSpec& mu, const Field& f,
                               const Point& offset, double scale) {
  const Domain& domain = cfg.domain;
  const int d = domain.dim();
  auto g = [&](const Point& s) {
    Point y(d);
    for (int i = 0; i < d; ++i) y[i] = offset[i] + scale * s[i];
    if (!contains(domain, y)) y = clamp_to_domain(domain, y);
    return f(y);
  };
  if (const auto* disc = std::get_if<DiscreteMeasure>(&mu)) return disc->integrate(g);

  std::vector<Kink> kinks;
  if (domain.is_box())
    for (const Kink& k : f.kinks()) kinks.push_back({k.axis, (k.at - offset[k.axis]) / scale});

  int cap = std::max(inner_level_cap, cfg.quad_level);
  if (const auto* p = std::get_if<PowerMeasure>(&mu)) {
    const bool reduced = domain.is_box() && std::holds_alternative<LebesgueMeasure>(p->base);
    if (!reduced && p->exponent * d > 3) cap = cfg.quad_level;
  }
  double prev = integrate_spec(mu, domain, g, cfg.quad_level, kinks);
  for (int level = 2 * cfg.quad_level; level <= cap; level *= 2) {
    const double cur = integrate_spec(mu, domain, g, level, kinks);
    if (std::abs(cur - prev) <= inner_tolerance * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

}  // namespace detail

/// I_n(f)(x) = integral of f((n x + a t) / (n + a)) d mu_n(t).
inline double eval_In(const OperatorConfig& cfg, int n, const Field& f, const Point& x) {
  if (n < 1) throw invalid_argument("n must be >= 1");
  require_inside(cfg.domain, x);
  if (cfg.a == 0.0) return f(x);
  const double na = n + cfg.a;
  Point offset(cfg.domain.dim());
  for (int i = 0; i < offset.dim(); ++i) offset[i] = n * x[i] / na;
  return detail::blended_integral(cfg, resolve(cfg.measures, cfg.domain, n), f, offset, cfg.a / na);
}

/// C_n(f) with the inner integrals J_{n,h} = integral of f((h + a s)/(n + a))
/// d mu_n(s) tabulated once; evaluation is a basis sweep.
class KantorovichEvaluator {
 public:
  KantorovichEvaluator(const OperatorConfig& cfg, int n, const Field& f) : basis_(cfg.domain, n) {
    cfg.validate();
    const auto& idx = basis_.indices();
    table_.assign(idx.size(), 0.0);
    if (cfg.a == 0.0) {
      parallel_for(idx.size(), [&](std::size_t k) {
        const Point node = lattice_node(cfg.domain, n, idx[k]);
        const double v = f(node);
        if (!std::isfinite(v)) throw numeric_error("non-finite function value", node);
        table_[k] = v;
      });
      return;
    }
    const MeasureSpec mu = resolve(cfg.measures, cfg.domain, n);
    const double na = n + cfg.a;
    parallel_for(idx.size(), [&](std::size_t k) {
      Point offset(cfg.domain.dim());
      for (int i = 0; i < offset.dim(); ++i) offset[i] = idx[k][i] / na;
      table_[k] = detail::blended_integral(cfg, mu, f, offset, cfg.a / na);
    });
  }

  double operator()(const Point& x) const { return basis_.combine(x, table_); }

  std::span<const double> coefficients() const noexcept { return table_; }
  const BernsteinBasis& basis() const noexcept { return basis_; }

 private:
  BernsteinBasis basis_;
  std::vector<double> table_;
};

inline double eval_Cn(const OperatorConfig& cfg, int n, const Field& f, const Point& x) {
  require_inside(cfg.domain, x);
  return KantorovichEvaluator(cfg, n, f)(x);
}

/// C_n(f) written as basis-weighted averages of f over the cells
/// h/(n+a) + (a/(n+a)) K. Requires a > 0 and Lebesgue measures. The cell
/// rule is a composite rule (two panels, quad_level + 4 nodes) placed
/// directly on each cell.
class CellEvaluator {
 public:
  CellEvaluator(const OperatorConfig& cfg, int n, const Field& f) : basis_(cfg.domain, n) {
    cfg.validate();
    if (!(cfg.a > 0.0)) throw config_error("cell form requires a > 0");
    if (!cfg.lebesgue()) throw config_error("cell form requires Lebesgue measures");
    const Domain& domain = cfg.domain;
    const int d = domain.dim();
    const int level = cfg.quad_level + 4;
    const double na = n + cfg.a;
    const double width = cfg.a / na;
    const auto& idx = basis_.indices();
    table_.assign(idx.size(), 0.0);
    parallel_for(idx.size(), [&](std::size_t k) {
      Point lo(d);
      for (int i = 0; i < d; ++i) lo[i] = idx[k][i] / na;
      QuadratureRule local;
      const QuadratureRule* rule = &composite_rule(domain, level, 2);
      if (domain.is_box()) {
        auto breaks = kink_breaks(f.kinks(), d, lo, width);
        if (has_breaks(breaks)) {
          local = split_box_rule(d, breaks, level, 2);
          rule = &local;
        }
      }
      // Cell average: the reference weights sum to the reference volume.
      const double inv_ref = 1.0 / lebesgue_volume(domain);
      CompensatedSum s;
      for (std::size_t j = 0; j < rule->nodes.size(); ++j) {
        Point v(d);
        for (int i = 0; i < d; ++i) v[i] = lo[i] + width * rule->nodes[j][i];
        if (!contains(domain, v)) v = clamp_to_domain(domain, v);
        const double fv = f(v);
        if (!std::isfinite(fv)) throw numeric_error("non-finite function value", v);
        s.add(rule->weights[j] * fv);
      }
      table_[k] = s.get() * inv_ref;
    });
  }

  double operator()(const Point& x) const { return basis_.combine(x, table_); }
  std::span<const double> coefficients() const noexcept { return table_; }

 private:
  BernsteinBasis basis_;
  std::vector<double> table_;
};

inline double eval_Cn_cells(const OperatorConfig& cfg, int n, const Field& f, const Point& x) {
  require_inside(cfg.domain, x);
  return CellEvaluator(cfg, n, f)(x);
}

// ---------------------------------------------------------------------------
// Closed-form moments on affine and quadratic test functions.

namespace detail {

inline double measure_integral(const OperatorConfig& cfg, int n, const Field& f) {
  return integrate_measure(resolve(cfg.measures, cfg.domain, n), cfg.domain, f, cfg.quad_level);
}

}  // namespace detail

/// C_n(h)(x) = a/(n+a) * integral of h d mu_n + n/(n+a) * h(x).
inline double cn_affine_moment(const OperatorConfig& cfg, int n, const AffineForm& h, const Point& x) {
  if (n < 1) throw invalid_argument("n must be >= 1");
  require_inside(cfg.domain, x);
  const double na = n + cfg.a;
  if (cfg.a == 0.0) return h(x);
  return cfg.a / na * detail::measure_integral(cfg, n, h.field()) + n / na * h(x);
}

/// C_n(hk)(x) from the measure moments of h, k, hk and
/// B_n(hk) = T(hk)/n + (n-1)/n * hk.
inline double cn_bilinear_moment(const OperatorConfig& cfg, int n, const AffineForm& h, const AffineForm& k,
                                 const Point& x) {
  if (n < 1) throw invalid_argument("n must be >= 1");
  require_inside(cfg.domain, x);
  const double a = cfg.a;
  const double na = n + a;
  const Field hk([&](const Point& y) { return h(y) * k(y); });
  const double bn = apply_markov(cfg.markov, hk, x) / n + (n - 1.0) / n * h(x) * k(x);
  if (a == 0.0) return bn;
  const double ihk = detail::measure_integral(cfg, n, hk);
  const double ih = detail::measure_integral(cfg, n, h.field());
  const double ik = detail::measure_integral(cfg, n, k.field());
  return a * a / (na * na) * ihk + n * a / (na * na) * (ih * k(x) + ik * h(x)) + n * n / (na * na) * bn;
}

namespace detail {

inline void require_coordinate(const Domain& domain, int i) {
  if (i < 0 || i >= domain.dim())
    throw invalid_argument("coordinate index " + std::to_string(i) + " out of range for " + domain.name());
}

// C_n(pr_i^2) for Lebesgue measures on Q_d (and the interval) or K_d.
inline double quadratic_moment_lebesgue(const Domain& domain, double a, int n, double xi) {
  const double na = n + a;
  const double na2 = na * na;
  const double lin = n * (n - 1.0) / na2 * xi * xi;
  if (domain.is_box()) return a * a / (3.0 * na2) + n * (a + 1.0) / na2 * xi + lin;
  const double d = domain.dim();
  return 2.0 * a * a / (na2 * (d + 2.0) * (d + 1.0)) + n * (2.0 * a + d + 1.0) / (na2 * (d + 1.0)) * xi + lin;
}

}  // namespace detail

/// C_n(pr_i^2)(x), coordinate i counted from 0. Lebesgue measures use the
/// explicit polynomial in x_i; other measures go through the bilinear form.
inline double cn_quadratic_moment(const OperatorConfig& cfg, int n, int i, const Point& x) {
  if (n < 1) throw invalid_argument("n must be >= 1");
  detail::require_coordinate(cfg.domain, i);
  require_inside(cfg.domain, x);
  if (cfg.lebesgue()) return detail::quadratic_moment_lebesgue(cfg.domain, cfg.a, n, x[i]);
  const AffineForm pr = AffineForm::coordinate(cfg.domain.dim(), i);
  return cn_bilinear_moment(cfg, n, pr, pr, x);
}

/// The bilinear-form route for C_n(pr_i^2), for any measure sequence.
inline double cn_quadratic_moment_generic(const OperatorConfig& cfg, int n, int i, const Point& x) {
  detail::require_coordinate(cfg.domain, i);
  const AffineForm pr = AffineForm::coordinate(cfg.domain.dim(), i);
  return cn_bilinear_moment(cfg, n, pr, pr, x);
}

}  // namespace kantorov
