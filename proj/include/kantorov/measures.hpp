#pragma once

// Probability measures on the canonical domains and the per-n measure
// sequences that parameterize the generalized Kantorovich operators.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "kantorov/combinatorics.hpp"
#include "kantorov/errors.hpp"
#include "kantorov/field.hpp"
#include "kantorov/geometry.hpp"
#include "kantorov/summation.hpp"

namespace kantorov {

/// Finitely supported probability measure.
class DiscreteMeasure {
 public:
  /// Validates: one weight per atom, weights >= 0, total mass 1 within 1e-12,
  /// atoms inside the domain. Drift is an error, never renormalized.
  DiscreteMeasure(const Domain& domain, std::vector<Point> atoms, std::vector<double> weights)
      : atoms_(std::move(atoms)), weights_(std::move(weights)) {
    if (atoms_.empty()) throw invalid_argument("discrete measure needs at least one atom");
    if (atoms_.size() != weights_.size())
      throw invalid_argument("discrete measure: " + std::to_string(atoms_.size()) + " atoms but " +
                             std::to_string(weights_.size()) + " weights");
    CompensatedSum mass;
    for (std::size_t j = 0; j < atoms_.size(); ++j) {
      if (!(weights_[j] >= 0.0) || !std::isfinite(weights_[j]))
        throw invalid_argument("discrete measure: weight " + std::to_string(j) + " is negative or not finite");
      if (!contains(domain, atoms_[j]))
        throw invalid_argument("discrete measure: atom " + to_string(atoms_[j]) + " lies outside " + domain.name());
      mass.add(weights_[j]);
    }
    if (std::abs(mass.get() - 1.0) > 1e-12)
      throw invalid_argument("discrete measure: total mass " + std::to_string(mass.get()) + " differs from 1");
  }

  static DiscreteMeasure dirac(const Domain& domain, const Point& at) {
    return DiscreteMeasure(domain, {at}, {1.0});
  }

  const std::vector<Point>& atoms() const noexcept { return atoms_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  template <class F>
  double integrate(const F& f) const {
    CompensatedSum s;
    for (std::size_t j = 0; j < atoms_.size(); ++j) {
      if (weights_[j] == 0.0) continue;
      const double v = f(atoms_[j]);
      if (!std::isfinite(v)) throw numeric_error("non-finite integrand value", atoms_[j]);
      s.add(weights_[j] * v);
    }
    return s.get();
  }

 private:
  struct unchecked_t {};
  DiscreteMeasure(unchecked_t, std::vector<Point> atoms, std::vector<double> weights)
      : atoms_(std::move(atoms)), weights_(std::move(weights)) {}

  friend DiscreteMeasure make_unchecked_measure(std::vector<Point>, std::vector<double>);

  std::vector<Point> atoms_;
  std::vector<double> weights_;
};

// For selections whose weights are a probability vector by construction.
inline DiscreteMeasure make_unchecked_measure(std::vector<Point> atoms, std::vector<double> weights) {
  return DiscreteMeasure(DiscreteMeasure::unchecked_t{}, std::move(atoms), std::move(weights));
}

/// Lebesgue measure normalized to mass 1 (d! * lambda_d on the simplex).
struct LebesgueMeasure {};

using BaseMeasure = std::variant<LebesgueMeasure, DiscreteMeasure>;

/// Image of the `exponent`-fold product of `base` under the averaging map
/// (y_1 + ... + y_a) / a. Kept lazy: only ever integrated against.
struct PowerMeasure {
  BaseMeasure base;
  int exponent = 1;
};

using MeasureSpec = std::variant<LebesgueMeasure, DiscreteMeasure, PowerMeasure>;

// Measure sequences n -> mu_n.

struct ConstantLebesgue {};

/// mu_n = Dirac at point_at(n); point_at returns b_n / a.
struct DiracShift {
  std::function<Point(int)> point_at;
};

struct PowerOfBase {
  BaseMeasure base;
  int exponent = 1;
};

/// mu_n = list[n - 1].
struct ExplicitList {
  std::vector<MeasureSpec> list;
};

using MeasureSeq = std::variant<ConstantLebesgue, DiracShift, PowerOfBase, ExplicitList>;

inline MeasureSpec resolve(const MeasureSeq& seq, const Domain& domain, int n) {
  if (n < 1) throw invalid_argument("measure index n must be >= 1");
  struct Visitor {
    const Domain& domain;
    int n;
    MeasureSpec operator()(const ConstantLebesgue&) const { return LebesgueMeasure{}; }
    MeasureSpec operator()(const DiracShift& s) const {
      if (!s.point_at) throw config_error("Dirac shift without a point rule");
      return DiscreteMeasure::dirac(domain, s.point_at(n));
    }
    MeasureSpec operator()(const PowerOfBase& p) const {
      if (p.exponent < 1) throw config_error("power measure exponent must be >= 1");
      return PowerMeasure{p.base, p.exponent};
    }
    MeasureSpec operator()(const ExplicitList& l) const {
      if (static_cast<std::size_t>(n) > l.list.size())
        throw std::out_of_range("explicit measure list has " + std::to_string(l.list.size()) +
                                " entries, requested n = " + std::to_string(n));
      return l.list[n - 1];
    }
  };
  return std::visit(Visitor{domain, n}, seq);
}

namespace detail {

// d! on the simplex, 1 on boxes.
inline double lebesgue_normalization(const Domain& domain) { return 1.0 / lebesgue_volume(domain); }

template <class F>
double integrate_lebesgue(const Domain& domain, const F& f, int level, std::span<const Kink> kinks = {}) {
  const double norm = lebesgue_normalization(domain);
  if (domain.is_box() && !kinks.empty()) {
    auto breaks = kink_breaks(kinks, domain.dim(), Point(domain.dim()), 1.0);
    if (has_breaks(breaks))
      return norm * integrate(domain, f, split_box_rule(domain.dim(), breaks, level));
  }
  return norm * integrate(domain, f, quadrature_rule(domain, level));
}

constexpr int max_power_dims = 6;

// Calls visit(counts) for every vector of `parts` nonnegative integers
// summing to `total`.
template <class Visit>
void for_each_composition(int total, std::size_t parts, Visit&& visit) {
  std::vector<int> counts(parts, 0);
  auto rec = [&](auto& self, std::size_t j, int left) -> void {
    if (j + 1 == parts) {
      counts[j] = left;
      visit(std::span<const int>(counts));
      return;
    }
    for (int k = left; k >= 0; --k) {
      counts[j] = k;
      self(self, j + 1, left - k);
    }
  };
  rec(rec, 0, total);
}

template <class F>
double power_average(const BaseMeasure& base, int a, const Domain& domain, const F& f, int level) {
  if (a < 1) throw invalid_argument("power exponent must be >= 1");
  const int d = domain.dim();
  if (const auto* disc = std::get_if<DiscreteMeasure>(&base)) {
    // Sum over multisets: counts k_j with sum a, weight multinomial * prod w_j^k_j.
    CompensatedSum s;
    for_each_composition(a, disc->size(), [&](std::span<const int> counts) {
      double w = multinomial(counts);
      Point y(d);
      for (std::size_t j = 0; j < counts.size(); ++j) {
        if (counts[j] == 0) continue;
        w *= std::pow(disc->weights()[j], counts[j]);
        for (int i = 0; i < d; ++i) y[i] += counts[j] * disc->atoms()[j][i];
      }
      if (w == 0.0) return;
      for (int i = 0; i < d; ++i) y[i] /= a;
      const double v = f(y);
      if (!std::isfinite(v)) throw numeric_error("non-finite integrand value", y);
      s.add(w * v);
    });
    return s.get();
  }
  if (a * d > max_power_dims)
    throw unsupported_error("power of Lebesgue measure with a*d = " + std::to_string(a * d) +
                            " exceeds the supported " + std::to_string(max_power_dims) + " dimensions");
  const QuadratureRule& rule = quadrature_rule(domain, level);
  const double norm = lebesgue_normalization(domain);
  const std::size_t q = rule.nodes.size();
  std::vector<std::size_t> idx(a, 0);
  CompensatedSum s;
  while (true) {
    Point y(d);
    double w = 1.0;
    for (int r = 0; r < a; ++r) {
      w *= norm * rule.weights[idx[r]];
      for (int i = 0; i < d; ++i) y[i] += rule.nodes[idx[r]][i];
    }
    for (int i = 0; i < d; ++i) y[i] /= a;
    const double v = f(y);
    if (!std::isfinite(v)) throw numeric_error("non-finite integrand value", y);
    s.add(w * v);
    int r = a - 1;
    for (; r >= 0; --r) {
      if (++idx[r] < q) break;
      idx[r] = 0;
    }
    if (r < 0) break;
  }
  return s.get();
}

// Density of the mean of a independent uniforms on [0,1] (scaled
// Irwin-Hall), piecewise polynomial with breaks at k/a.
inline double uniform_mean_density(int a, double s) {
  if (s < 0.0 || s > 1.0) return 0.0;
  if (a == 1) return 1.0;
  const double u = a * s;
  const int top = std::min(a - 1, static_cast<int>(std::floor(u)));
  double acc = 0.0;
  for (int k = 0; k <= top; ++k) acc += ((k % 2) ? -1.0 : 1.0) * binomial(a, k) * std::pow(u - k, a - 1);
  return a * acc / factorial(a - 1);
}

// The a-th power of normalized Lebesgue measure on a box is the product of
// per-axis uniform-mean densities, so it reduces to a d-dimensional
// piecewise rule.
template <class F>
double power_lebesgue_box(int a, const Domain& domain, const F& f, int level, std::span<const Kink> kinks) {
  const int d = domain.dim();
  auto breaks = kink_breaks(kinks, d, Point(d), 1.0);
  for (int i = 0; i < d; ++i) {
    for (int k = 1; k < a; ++k) breaks[i].push_back(static_cast<double>(k) / a);
    std::sort(breaks[i].begin(), breaks[i].end());
    breaks[i].erase(std::unique(breaks[i].begin(), breaks[i].end()), breaks[i].end());
  }
  // The density has degree a - 1 on each piece.
  const QuadratureRule rule = split_box_rule(d, breaks, level + (a + 1) / 2);
  return integrate(domain, [&](const Point& s) {
    double w = 1.0;
    for (int i = 0; i < d; ++i) w *= uniform_mean_density(a, s[i]);
    return w == 0.0 ? 0.0 : w * f(s);
  }, rule);
}

template <class F>
double integrate_spec(const MeasureSpec& mu, const Domain& domain, const F& f, int level,
                      std::span<const Kink> kinks = {}) {
  if (std::holds_alternative<LebesgueMeasure>(mu)) return integrate_lebesgue(domain, f, level, kinks);
  if (const auto* disc = std::get_if<DiscreteMeasure>(&mu)) return disc->integrate(f);
  const auto& p = std::get<PowerMeasure>(mu);
  if (domain.is_box() && std::holds_alternative<LebesgueMeasure>(p.base))
    return power_lebesgue_box(p.exponent, domain, f, level, kinks);
  return power_average(p.base, p.exponent, domain, f, level);
}

}  // namespace detail

/// Integral of f against mu. Lebesgue uses the level-`level` rule of the
/// domain (split along the field's kinks on boxes); discrete measures sum
/// over atoms. Powers of Lebesgue measure on boxes are integrated against
/// their product density; other powers go through power_average_integral.
inline double integrate_measure(const MeasureSpec& mu, const Domain& domain, const Field& f, int level) {
  return detail::integrate_spec(mu, domain, f, level, f.kinks());
}

/// a-fold iterated integral of f((y_1 + ... + y_a) / a) against base.
/// Discrete bases are enumerated exactly; Lebesgue bases use tensor
/// quadrature over a*d dimensions, limited to a*d <= 6.
inline double power_average_integral(const BaseMeasure& base, int a, const Domain& domain, const Field& f,
                                     int level) {
  return detail::power_average(base, a, domain, f, level);
}

}  // namespace kantorov
