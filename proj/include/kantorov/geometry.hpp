#pragma once

// Canonical domains (unit interval, hypercube Q_d, simplex K_d), extreme
// points, uniform lattices and Gauss-type quadrature on them.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "kantorov/errors.hpp"
#include "kantorov/field.hpp"
#include "kantorov/point.hpp"
#include "kantorov/summation.hpp"

namespace kantorov {

enum class DomainKind { interval, hypercube, simplex };

class Domain {
 public:
  static Domain interval() { return Domain(DomainKind::interval, 1); }
  static Domain hypercube(int d) { return Domain(DomainKind::hypercube, d); }
  static Domain simplex(int d) { return Domain(DomainKind::simplex, d); }

  Domain(DomainKind kind, int dim) : kind_(kind), dim_(dim) {
    if (dim < 1 || dim > max_dim)
      throw invalid_argument("domain dimension must be in [1, 3], got " + std::to_string(dim));
    if (kind == DomainKind::interval && dim != 1)
      throw invalid_argument("the interval domain has dimension 1");
  }

  DomainKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }

  /// True for the interval and the hypercube: the domain is a box.
  bool is_box() const noexcept { return kind_ != DomainKind::simplex; }

  std::string name() const {
    switch (kind_) {
      case DomainKind::interval: return "interval";
      case DomainKind::hypercube: return "hypercube(" + std::to_string(dim_) + ")";
      case DomainKind::simplex: return "simplex(" + std::to_string(dim_) + ")";
    }
    return {};
  }

  friend bool operator==(const Domain&, const Domain&) = default;

 private:
  DomainKind kind_;
  int dim_;
};

inline void require_dim(const Domain& domain, const Point& x) {
  if (x.dim() != domain.dim())
    throw invalid_argument("point " + to_string(x) + " has dimension " + std::to_string(x.dim()) +
                           ", domain " + domain.name() + " has dimension " +
                           std::to_string(domain.dim()));
}

/// Exact membership test (no tolerance).
inline bool contains(const Domain& domain, const Point& x) {
  require_dim(domain, x);
  for (int i = 0; i < x.dim(); ++i)
    if (!(x[i] >= 0.0)) return false;
  if (domain.is_box()) {
    for (int i = 0; i < x.dim(); ++i)
      if (!(x[i] <= 1.0)) return false;
    return true;
  }
  return x.sum() <= 1.0;
}

inline void require_inside(const Domain& domain, const Point& x) {
  if (!contains(domain, x))
    throw invalid_argument("point " + to_string(x) + " lies outside " + domain.name());
}

/// Projects a point carrying rounding noise back into the domain: negative
/// coordinates go to 0, box coordinates are capped at 1, and a simplex point
/// whose coordinate sum exceeds 1 is shrunk until the exact test passes.
inline Point clamp_to_domain(const Domain& domain, Point x) {
  require_dim(domain, x);
  for (int i = 0; i < x.dim(); ++i) x[i] = std::clamp(x[i], 0.0, 1.0);
  if (domain.is_box()) return x;
  double s = x.sum();
  if (s > 1.0) {
    for (int i = 0; i < x.dim(); ++i) x[i] /= s;
    // division can leave the sum one ulp above 1
    while (x.sum() > 1.0) {
      int big = 0;
      for (int i = 1; i < x.dim(); ++i)
        if (x[i] > x[big]) big = i;
      x[big] = std::nextafter(x[big], 0.0);
    }
  }
  return x;
}

/// Extreme points. Interval: 0, 1. Hypercube: binary vectors in
/// lexicographic order. Simplex: 0 first, then e_1, ..., e_d.
inline std::vector<Point> vertices(const Domain& domain) {
  const int d = domain.dim();
  std::vector<Point> out;
  if (domain.kind() == DomainKind::simplex) {
    out.emplace_back(d);
    for (int i = 0; i < d; ++i) {
      Point e(d);
      e[i] = 1.0;
      out.push_back(e);
    }
    return out;
  }
  for (int mask = 0; mask < (1 << d); ++mask) {
    Point v(d);
    for (int i = 0; i < d; ++i) v[i] = (mask >> (d - 1 - i)) & 1;
    out.push_back(v);
  }
  return out;
}

inline double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

/// Lebesgue measure |K|: 1 for boxes, 1/d! for the simplex.
inline double lebesgue_volume(const Domain& domain) {
  return domain.is_box() ? 1.0 : 1.0 / factorial(domain.dim());
}

/// r(K) = max ||x||_2 over the domain.
inline double radius(const Domain& domain) {
  return domain.is_box() ? std::sqrt(static_cast<double>(domain.dim())) : 1.0;
}

/// delta(K) = sup ||x - y||_2 over the domain.
inline double diameter(const Domain& domain) {
  if (domain.is_box()) return std::sqrt(static_cast<double>(domain.dim()));
  return domain.dim() == 1 ? 1.0 : std::numbers::sqrt2;
}

// ---------------------------------------------------------------------------
// Quadrature

/// Gauss-Legendre rule mapped to [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

// Legendre P_n(z) and P_n'(z) by the three-term recurrence.
inline void legendre(int n, double z, double& p, double& dp) {
  double p0 = 1.0, p1 = z;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = n * (z * p1 - p0) / (z * z - 1.0);
}

inline GaussRule compute_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      legendre(n, z, p, dp);
      const double dz = p / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    legendre(n, z, p, dp);
    const double w = 1.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = 0.5 * (1.0 - z);
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + z);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.5;
  return rule;
}

}  // namespace detail

/// Cached n-point Gauss-Legendre rule on [0, 1].
inline const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw invalid_argument("Gauss rule needs at least one node");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(detail::compute_gauss_legendre(n));
  return *slot;
}

struct QuadratureRule {
  std::vector<Point> nodes;
  std::vector<double> weights;
};

namespace detail {

// Composite Gauss rule on [0, 1] over the pieces delimited by `breaks`
// (sorted, inside (0, 1)). `panels` counts panels per unit length: a piece
// of length w gets ceil(panels * w) equal panels, at least one.
inline GaussRule composite_line(std::span<const double> breaks, int nodes, int panels) {
  const GaussRule& g = gauss_legendre(nodes);
  std::vector<double> ends{0.0};
  ends.insert(ends.end(), breaks.begin(), breaks.end());
  ends.push_back(1.0);
  GaussRule out;
  for (std::size_t k = 0; k + 1 < ends.size(); ++k) {
    const double piece = ends[k + 1] - ends[k];
    if (!(piece > 0.0)) continue;
    const int count = std::max(1, static_cast<int>(std::ceil(panels * piece - 1e-9)));
    const double lo = ends[k], width = piece / count;
    for (int p = 0; p < count; ++p) {
      const double a = lo + p * width;
      for (int j = 0; j < nodes; ++j) {
        out.nodes.push_back(a + width * g.nodes[j]);
        out.weights.push_back(width * g.weights[j]);
      }
    }
  }
  return out;
}

// Tensor product of per-axis rules on [0, 1]^d.
inline QuadratureRule tensor(std::span<const GaussRule> axes) {
  const int d = static_cast<int>(axes.size());
  QuadratureRule rule;
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.nodes.size();
  rule.nodes.reserve(total);
  rule.weights.reserve(total);
  std::array<std::size_t, max_dim> idx{};
  for (std::size_t k = 0; k < total; ++k) {
    Point p(d);
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      p[i] = axes[i].nodes[idx[i]];
      w *= axes[i].weights[idx[i]];
    }
    rule.nodes.push_back(p);
    rule.weights.push_back(w);
    for (int i = d - 1; i >= 0; --i) {
      if (++idx[i] < axes[i].nodes.size()) break;
      idx[i] = 0;
    }
  }
  return rule;
}

// Collapsed-coordinate (Duffy) map from [0, 1]^d onto K_d.
inline Point duffy(const Point& u, double& jacobian) {
  const int d = u.dim();
  Point x(d);
  double rest = 1.0;
  jacobian = 1.0;
  for (int i = 0; i < d; ++i) {
    x[i] = rest * u[i];
    if (i + 1 < d) {
      rest *= 1.0 - u[i];
    }
  }
  // jacobian = prod_{i<d} (1 - u_i)^{d-1-i}
  for (int i = 0; i + 1 < d; ++i) jacobian *= std::pow(1.0 - u[i], d - 1 - i);
  return x;
}

// Pulls a point with sum(x) > 1 from rounding back onto the simplex.
inline void settle_in_simplex(Point& x) {
  while (x.sum() > 1.0) {
    int big = 0;
    for (int i = 1; i < x.dim(); ++i)
      if (x[i] > x[big]) big = i;
    x[big] = std::nextafter(x[big], 0.0);
  }
}

inline QuadratureRule build_rule(const Domain& domain, int level, int panels) {
  const int d = domain.dim();
  std::vector<GaussRule> axes;
  if (domain.is_box()) {
    for (int i = 0; i < d; ++i) axes.push_back(composite_line({}, level, panels));
    return tensor(axes);
  }
  // Collapsed axes carry a (1 - u)^k Jacobian factor of degree <= 2; one
  // extra node keeps exactness for total degree 2*level - 1.
  for (int i = 0; i < d; ++i)
    axes.push_back(composite_line({}, i + 1 < d ? level + 1 : level, panels));
  QuadratureRule box = tensor(axes);
  QuadratureRule rule;
  rule.nodes.reserve(box.nodes.size());
  rule.weights.reserve(box.nodes.size());
  for (std::size_t k = 0; k < box.nodes.size(); ++k) {
    double jac = 1.0;
    Point x = duffy(box.nodes[k], jac);
    settle_in_simplex(x);
    rule.nodes.push_back(x);
    rule.weights.push_back(box.weights[k] * jac);
  }
  return rule;
}

}  // namespace detail

/// Composite rule: `panels` equal panels per axis (in collapsed coordinates
/// for the simplex), Gauss rule with `level` nodes in each.
inline const QuadratureRule& composite_rule(const Domain& domain, int level, int panels) {
  if (level < 1) throw invalid_argument("quadrature level must be >= 1");
  if (panels < 1) throw invalid_argument("panel count must be >= 1");
  using Key = std::tuple<int, int, int, int>;
  static std::mutex mutex;
  static std::map<Key, std::unique_ptr<QuadratureRule>> cache;
  const Key key{static_cast<int>(domain.kind()), domain.dim(), level, panels};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return *it->second;
  }
  auto rule = std::make_unique<QuadratureRule>(detail::build_rule(domain, level, panels));
  std::lock_guard lock(mutex);
  auto& slot = cache[key];
  if (!slot) slot = std::move(rule);
  return *slot;
}

/// Tensor Gauss rule on boxes, Duffy-collapsed tensor rule on the simplex.
/// Exact for total degree <= 2*level - 1.
inline const QuadratureRule& quadrature_rule(const Domain& domain, int level) {
  return composite_rule(domain, level, 1);
}

/// Tensor rule on [0,1]^d with per-axis break points (each sorted, inside
/// (0, 1)); every piece gets `panels` Gauss panels of `level` nodes.
inline QuadratureRule split_box_rule(int dim, std::span<const std::vector<double>> breaks,
                                     int level, int panels = 1) {
  std::vector<GaussRule> axes;
  for (int i = 0; i < dim; ++i) axes.push_back(detail::composite_line(breaks[i], level, panels));
  return detail::tensor(axes);
}

inline constexpr double kink_grading_ratio = 0.35;
inline constexpr int kink_grading_layers = 14;

/// Collects the kinks of a field that cut the open unit box in the
/// coordinates s, where the field is evaluated at offset + scale * s.
inline std::vector<std::vector<double>> kink_breaks(std::span<const Kink> kinks, int dim,
                                                    const Point& offset, double scale) {
  std::vector<std::vector<double>> breaks(dim);
  if (!(scale > 0.0)) return breaks;
  for (const Kink& k : kinks) {
    if (k.axis < 0 || k.axis >= dim) continue;
    const double s = (k.at - offset[k.axis]) / scale;
    auto add = [&](double t) {
      if (t > 1e-14 && t < 1.0 - 1e-14) breaks[k.axis].push_back(t);
    };
    add(s);
    if (!k.singular) continue;
    for (int j = 1; j <= kink_grading_layers; ++j) {
      const double step = std::pow(kink_grading_ratio, j);
      add(s - step);
      add(s + step);
    }
  }
  for (auto& b : breaks) {
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
  }
  return breaks;
}

inline bool has_breaks(const std::vector<std::vector<double>>& breaks) {
  return std::any_of(breaks.begin(), breaks.end(), [](const auto& b) { return !b.empty(); });
}

/// Sum of w_j f(x_j), compensated. Throws numeric_error on a non-finite value.
template <class F>
double integrate(const Domain& domain, const F& f, const QuadratureRule& rule) {
  (void)domain;
  CompensatedSum sum;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double v = f(rule.nodes[j]);
    if (!std::isfinite(v)) throw numeric_error("non-finite integrand value", rule.nodes[j]);
    sum.add(rule.weights[j] * v);
  }
  return sum.get();
}

/// Integral of a field over the domain with respect to Lebesgue measure.
/// Box domains split along the field's kinks.
inline double integrate_field(const Domain& domain, const Field& f, int level, int panels = 1) {
  if (domain.is_box() && !f.kinks().empty()) {
    auto breaks = kink_breaks(f.kinks(), domain.dim(), Point(domain.dim()), 1.0);
    if (has_breaks(breaks))
      return integrate(domain, f, split_box_rule(domain.dim(), breaks, level, panels));
  }
  return integrate(domain, f, composite_rule(domain, level, panels));
}

// ---------------------------------------------------------------------------
// Lattices

/// Lattice point idx / m, adjusted by at most a few ulps so that simplex
/// points pass the exact membership test.
inline Point lattice_point(const Domain& domain, std::span<const int> idx, int m) {
  Point x(domain.dim());
  for (int i = 0; i < domain.dim(); ++i) x[i] = static_cast<double>(idx[i]) / m;
  if (!domain.is_box()) detail::settle_in_simplex(x);
  return x;
}

/// All lattice points (i_1/m, ..., i_d/m) of the domain, lexicographic in the
/// index tuple.
inline std::vector<Point> uniform_grid(const Domain& domain, int m) {
  if (m < 1) throw invalid_argument("grid resolution must be >= 1");
  const int d = domain.dim();
  std::vector<Point> out;
  std::array<int, max_dim> idx{};
  while (true) {
    int total = 0;
    for (int i = 0; i < d; ++i) total += idx[i];
    if (domain.is_box() || total <= m) out.push_back(lattice_point(domain, {idx.data(), std::size_t(d)}, m));
    int i = d - 1;
    for (; i >= 0; --i) {
      if (++idx[i] <= m) break;
      idx[i] = 0;
    }
    if (i < 0) break;
  }
  return out;
}

/// Dense (m+1)^d index box over a lattice; simplex entries outside the
/// domain are marked invalid.
class LatticeIndex {
 public:
  LatticeIndex(const Domain& domain, int m) : domain_(domain), m_(m) {
    if (m < 1) throw invalid_argument("grid resolution must be >= 1");
    size_ = 1;
    for (int i = 0; i < domain.dim(); ++i) size_ *= static_cast<std::size_t>(m + 1);
  }

  const Domain& domain() const noexcept { return domain_; }
  int resolution() const noexcept { return m_; }
  int dim() const noexcept { return domain_.dim(); }
  std::size_t size() const noexcept { return size_; }

  std::array<int, max_dim> unflatten(std::size_t k) const {
    std::array<int, max_dim> idx{};
    for (int i = dim() - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(k % (m_ + 1));
      k /= (m_ + 1);
    }
    return idx;
  }

  std::size_t flatten(const std::array<int, max_dim>& idx) const {
    std::size_t k = 0;
    for (int i = 0; i < dim(); ++i) k = k * (m_ + 1) + idx[i];
    return k;
  }

  bool valid(const std::array<int, max_dim>& idx) const {
    int total = 0;
    for (int i = 0; i < dim(); ++i) {
      if (idx[i] < 0 || idx[i] > m_) return false;
      total += idx[i];
    }
    return domain_.is_box() || total <= m_;
  }

  Point point(const std::array<int, max_dim>& idx) const {
    return lattice_point(domain_, {idx.data(), std::size_t(dim())}, m_);
  }

 private:
  Domain domain_;
  int m_;
  std::size_t size_;
};

/// Weights of the piecewise-linear (trapezoid-type) quadrature on the
/// lattice of resolution m, indexed like LatticeIndex. The simplex uses the
/// Kuhn triangulation in partial-sum coordinates, which tiles K_d exactly.
inline std::vector<double> lattice_weights(const Domain& domain, int m) {
  const LatticeIndex lat(domain, m);
  const int d = domain.dim();
  std::vector<double> w(lat.size(), 0.0);
  if (domain.is_box()) {
    for (std::size_t k = 0; k < lat.size(); ++k) {
      const auto idx = lat.unflatten(k);
      double v = 1.0;
      for (int i = 0; i < d; ++i) v *= (idx[i] == 0 || idx[i] == m) ? 0.5 / m : 1.0 / m;
      w[k] = v;
    }
    return w;
  }
  // z_k = x_1 + ... + x_k maps K_d*m onto {0 <= z_1 <= ... <= z_d <= m}.
  const double share = 1.0 / (factorial(d) * std::pow(static_cast<double>(m), d) * (d + 1));
  std::array<int, max_dim> perm{};
  std::iota(perm.begin(), perm.begin() + d, 0);
  std::vector<std::array<int, max_dim>> perms;
  do perms.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.begin() + d));
  auto in_region = [&](const std::array<int, max_dim>& z) {
    if (z[0] < 0) return false;
    for (int i = 1; i < d; ++i)
      if (z[i] < z[i - 1]) return false;
    return z[d - 1] <= m;
  };
  auto to_x = [&](const std::array<int, max_dim>& z) {
    std::array<int, max_dim> x{};
    x[0] = z[0];
    for (int i = 1; i < d; ++i) x[i] = z[i] - z[i - 1];
    return x;
  };
  std::size_t cube_count = 1;
  for (int i = 0; i < d; ++i) cube_count *= static_cast<std::size_t>(m);
  for (std::size_t c = 0; c < cube_count; ++c) {
    std::array<int, max_dim> base{};
    std::size_t rest = c;
    for (int i = d - 1; i >= 0; --i) {
      base[i] = static_cast<int>(rest % m);
      rest /= m;
    }
    for (const auto& p : perms) {
      std::array<std::array<int, max_dim>, max_dim + 1> verts{};
      verts[0] = base;
      bool inside = in_region(base);
      for (int k = 0; k < d && inside; ++k) {
        verts[k + 1] = verts[k];
        verts[k + 1][p[k]] += 1;
        inside = in_region(verts[k + 1]);
      }
      if (!inside) continue;
      for (int k = 0; k <= d; ++k) w[lat.flatten(to_x(verts[k]))] += share;
    }
  }
  return w;
}

}  // namespace kantorov
