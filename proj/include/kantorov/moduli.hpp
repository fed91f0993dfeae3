#pragma once

// Grid approximations of moduli of continuity and smoothness. Every value
// is a maximum over lattice pairs and therefore a lower approximation of
// the supremum it stands for.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "kantorov/combinatorics.hpp"
#include "kantorov/errors.hpp"
#include "kantorov/field.hpp"
#include "kantorov/geometry.hpp"
#include "kantorov/parallel.hpp"
#include "kantorov/summation.hpp"

namespace kantorov {

enum class Metric { l1, l2 };

inline std::string to_string(Metric m) { return m == Metric::l1 ? "l1" : "l2"; }

namespace detail {

using Offset = std::array<int, max_dim>;

struct GridTable {
  LatticeIndex index;
  std::vector<double> values;
  std::vector<char> valid;
};

inline GridTable tabulate(const Domain& domain, const Field& f, int m) {
  GridTable t{LatticeIndex(domain, m), {}, {}};
  t.values.assign(t.index.size(), 0.0);
  t.valid.assign(t.index.size(), 0);
  parallel_for(t.index.size(), [&](std::size_t k) {
    const auto idx = t.index.unflatten(k);
    if (!t.index.valid(idx)) return;
    const Point x = t.index.point(idx);
    const double v = f(x);
    if (!std::isfinite(v)) throw numeric_error("non-finite function value", x);
    t.values[k] = v;
    t.valid[k] = 1;
  });
  return t;
}

inline double offset_length(const Offset& o, int d, Metric metric) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += metric == Metric::l1 ? std::abs(o[i]) : double(o[i]) * o[i];
  return metric == Metric::l1 ? s : std::sqrt(s);
}

// Nonzero integer offsets with length <= radius (lattice units, relative
// slack 1e-12) and max |o_i| <= window. `half` keeps one of each +-o pair;
// `even` keeps offsets with all entries even.
inline std::vector<Offset> offsets_within(int d, double radius, Metric metric, int window, bool half,
                                          bool even = false) {
  const double r = radius * (1.0 + 1e-12);
  const int reach = std::min(window, static_cast<int>(std::floor(r)));
  std::vector<Offset> out;
  if (reach < 1) return out;
  Offset o{};
  for (int i = 0; i < d; ++i) o[i] = -reach;
  while (true) {
    bool zero = true, positive = false, parity = true;
    for (int i = 0; i < d; ++i) {
      if (o[i] != 0 && zero) positive = o[i] > 0;
      if (o[i] != 0) zero = false;
      if (o[i] % 2) parity = false;
    }
    if (!zero && (!half || positive) && (!even || parity) && offset_length(o, d, metric) <= r) out.push_back(o);
    int i = d - 1;
    for (; i >= 0; --i) {
      if (++o[i] <= reach) break;
      o[i] = -reach;
    }
    if (i < 0) break;
  }
  return out;
}

// max over valid k of kernel(k, offsets); per-point maxima keep the
// reduction independent of scheduling.
template <class Kernel>
double max_over_points(const GridTable& t, Kernel&& kernel) {
  std::vector<double> best(t.index.size(), 0.0);
  parallel_for(t.index.size(), [&](std::size_t k) {
    if (t.valid[k]) best[k] = kernel(k);
  });
  double m = 0.0;
  for (double v : best) m = std::max(m, v);
  return m;
}

inline bool shifted(const LatticeIndex& index, std::size_t k, const Offset& o, int scale, std::size_t& out) {
  auto idx = index.unflatten(k);
  for (int i = 0; i < index.dim(); ++i) idx[i] += scale * o[i];
  if (!index.valid(idx)) return false;
  out = index.flatten(idx);
  return true;
}

inline void require_modulus_args(double delta, int m) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw invalid_argument("delta must be a positive number");
  if (m < 2) throw invalid_argument("grid resolution must be >= 2");
}

// Pair budget for exhaustive quotient scans.
constexpr double pair_budget = 2e7;

inline int quotient_window(const LatticeIndex& index) {
  const int d = index.dim();
  const double per_point = pair_budget / static_cast<double>(index.size());
  int w = index.resolution();
  while (w > 1 && std::pow(2.0 * w + 1.0, d) > per_point) --w;
  return w;
}

}  // namespace detail

/// sup |f(x) - f(y)| over lattice pairs with distance <= delta.
inline double omega1(const Field& f, const Domain& domain, double delta, int m, Metric metric = Metric::l2) {
  detail::require_modulus_args(delta, m);
  const auto t = detail::tabulate(domain, f, m);
  const auto offs = detail::offsets_within(domain.dim(), delta * m, metric, m, true);
  return detail::max_over_points(t, [&](std::size_t k) {
    double best = 0.0;
    std::size_t q;
    for (const auto& o : offs)
      if (detail::shifted(t.index, k, o, 1, q)) best = std::max(best, std::abs(t.values[k] - t.values[q]));
    return best;
  });
}

/// sup |f(x) - 2 f((x+y)/2) + f(y)| over lattice pairs with distance
/// <= 2 delta whose midpoint is a lattice point.
inline double omega2(const Field& f, const Domain& domain, double delta, int m) {
  detail::require_modulus_args(delta, m);
  const auto t = detail::tabulate(domain, f, m);
  const auto offs = detail::offsets_within(domain.dim(), 2.0 * delta * m, Metric::l2, m, true, true);
  return detail::max_over_points(t, [&](std::size_t k) {
    double best = 0.0;
    std::size_t mid, far;
    for (const auto& o : offs) {
      detail::Offset h{};
      for (int i = 0; i < domain.dim(); ++i) h[i] = o[i] / 2;
      if (!detail::shifted(t.index, k, h, 2, far)) continue;
      detail::shifted(t.index, k, h, 1, mid);
      best = std::max(best, std::abs(t.values[k] - 2.0 * t.values[mid] + t.values[far]));
    }
    return best;
  });
}

/// L^p norm (Lebesgue measure on the domain) of the local modulus
/// x -> sup |f(t) - f(t')| over t, t' in the ball of radius delta/2 at x,
/// all evaluated on the lattice.
inline double tau_p(const Field& f, const Domain& domain, double delta, double p, int m) {
  detail::require_modulus_args(delta, m);
  if (!(p >= 1.0)) throw invalid_argument("p must be >= 1");
  const auto t = detail::tabulate(domain, f, m);
  auto offs = detail::offsets_within(domain.dim(), 0.5 * delta * m, Metric::l2, m, false);
  std::vector<double> local(t.index.size(), 0.0);
  parallel_for(t.index.size(), [&](std::size_t k) {
    if (!t.valid[k]) return;
    double lo = t.values[k], hi = t.values[k];
    std::size_t q;
    for (const auto& o : offs)
      if (detail::shifted(t.index, k, o, 1, q)) {
        lo = std::min(lo, t.values[q]);
        hi = std::max(hi, t.values[q]);
      }
    local[k] = hi - lo;
  });
  const auto w = lattice_weights(domain, m);
  CompensatedSum s;
  for (std::size_t k = 0; k < local.size(); ++k)
    if (t.valid[k] && w[k] != 0.0) s.add(w[k] * std::pow(local[k], p));
  return std::pow(std::max(0.0, s.get()), 1.0 / p);
}

/// Unit directions sampled for the order-k modulus: the axis directions,
/// the diagonals and, for d >= 2, 16 seeded random directions.
inline std::vector<Point> sample_directions(int d, std::uint64_t seed = 42) {
  std::vector<Point> dirs;
  for (int i = 0; i < d; ++i) {
    Point e(d);
    e[i] = 1.0;
    dirs.push_back(e);
  }
  if (d == 1) return dirs;
  // Sign patterns with a positive first entry.
  for (int mask = 0; mask < (1 << (d - 1)); ++mask) {
    Point v(d);
    v[0] = 1.0 / std::sqrt(double(d));
    for (int i = 1; i < d; ++i) v[i] = ((mask >> (i - 1)) & 1 ? -1.0 : 1.0) / std::sqrt(double(d));
    dirs.push_back(v);
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int j = 0; j < 16; ++j) {
    Point v(d);
    double norm = 0.0;
    do {
      norm = 0.0;
      for (int i = 0; i < d; ++i) {
        v[i] = normal(rng);
        norm += v[i] * v[i];
      }
    } while (norm < 1e-12);
    for (int i = 0; i < d; ++i) v[i] /= std::sqrt(norm);
    dirs.push_back(v);
  }
  return dirs;
}

/// sup over sampled steps 0 < |h| <= delta of the L^p norm of the k-th
/// forward difference, set to zero where x + k h leaves the domain.
/// Step lengths are delta * j / 32, j = 1..32.
inline double omega_kp(const Field& f, const Domain& domain, int k, double delta, double p, int m,
                       std::uint64_t seed = 42) {
  detail::require_modulus_args(delta, m);
  if (k < 1) throw invalid_argument("difference order k must be >= 1");
  if (!(p >= 1.0)) throw invalid_argument("p must be >= 1");
  const int d = domain.dim();
  const LatticeIndex index(domain, m);
  const auto w = lattice_weights(domain, m);
  const auto dirs = sample_directions(d, seed);
  constexpr int steps = 32;
  std::vector<double> coeff(k + 1);
  for (int l = 0; l <= k; ++l) coeff[l] = ((k - l) % 2 ? -1.0 : 1.0) * binomial(k, l);

  std::vector<double> best(dirs.size() * steps, 0.0);
  parallel_for(best.size(), [&](std::size_t job) {
    const Point& u = dirs[job / steps];
    const double len = delta * static_cast<double>(job % steps + 1) / steps;
    CompensatedSum s;
    for (std::size_t q = 0; q < index.size(); ++q) {
      if (w[q] == 0.0) continue;
      const auto idx = index.unflatten(q);
      if (!index.valid(idx)) continue;
      const Point x = index.point(idx);
      Point end(d);
      for (int i = 0; i < d; ++i) end[i] = x[i] + k * len * u[i];
      if (!contains(domain, end)) continue;
      double diff = 0.0;
      for (int l = 0; l <= k; ++l) {
        Point y(d);
        for (int i = 0; i < d; ++i) y[i] = x[i] + l * len * u[i];
        if (!contains(domain, y)) y = clamp_to_domain(domain, y);
        diff += coeff[l] * f(y);
      }
      if (!std::isfinite(diff)) throw numeric_error("non-finite difference", x);
      s.add(w[q] * std::pow(std::abs(diff), p));
    }
    best[job] = std::pow(std::max(0.0, s.get()), 1.0 / p);
  });
  return *std::max_element(best.begin(), best.end());
}

/// max |f(x) - f(y)| / rho(x, y)^alpha over lattice pairs. Large lattices
/// restrict pairs to a coordinate window so the scan stays within about
/// 2e7 pairs.
inline double holder_estimate(const Field& f, const Domain& domain, double alpha, int m, Metric metric = Metric::l2) {
  if (m < 2) throw invalid_argument("grid resolution must be >= 2");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw invalid_argument("Holder exponent must lie in (0, 1]");
  const auto t = detail::tabulate(domain, f, m);
  const int d = domain.dim();
  const int window = detail::quotient_window(t.index);
  const auto offs = detail::offsets_within(d, double(window) * d, Metric::l1, window, true);
  std::vector<double> denom(offs.size());
  for (std::size_t j = 0; j < offs.size(); ++j) denom[j] = std::pow(detail::offset_length(offs[j], d, metric) / m, alpha);
  return detail::max_over_points(t, [&](std::size_t k) {
    double best = 0.0;
    std::size_t q;
    for (std::size_t j = 0; j < offs.size(); ++j)
      if (detail::shifted(t.index, k, offs[j], 1, q))
        best = std::max(best, std::abs(t.values[k] - t.values[q]) / denom[j]);
    return best;
  });
}

inline double lipschitz_estimate(const Field& f, const Domain& domain, int m, Metric metric) {
  return holder_estimate(f, domain, 1.0, m, metric);
}

/// omega1(f, delta r(K)), the available upper bound for the total modulus.
inline double total_modulus_upper(const Field& f, const Domain& domain, double delta, int m) {
  return omega1(f, domain, delta * radius(domain), m);
}

}  // namespace kantorov
