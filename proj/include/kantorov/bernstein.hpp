#pragma once

// Bernstein-Schnabl operators of the canonical Markov operators, i.e. the
// classical Bernstein operators on [0,1], Q_d and K_d, in closed form.

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "kantorov/combinatorics.hpp"
#include "kantorov/errors.hpp"
#include "kantorov/field.hpp"
#include "kantorov/geometry.hpp"
#include "kantorov/summation.hpp"

namespace kantorov {

/// Above this order basis values are evaluated in log space.
inline constexpr int log_space_threshold = 60;

struct MultiIndex {
  std::array<int, max_dim> h{};
  int dim = 0;

  int order() const noexcept {
    int s = 0;
    for (int i = 0; i < dim; ++i) s += h[i];
    return s;
  }
  int operator[](int i) const noexcept { return h[i]; }
  std::span<const int> entries() const noexcept { return {h.data(), std::size_t(dim)}; }
};

inline bool valid_index(const Domain& domain, int n, const MultiIndex& h) {
  if (h.dim != domain.dim()) return false;
  for (int i = 0; i < h.dim; ++i)
    if (h[i] < 0 || h[i] > n) return false;
  return domain.is_box() || h.order() <= n;
}

/// Admissible multi-indices of order n in colexicographic order (h_1 varies
/// fastest).
inline std::vector<MultiIndex> lattice(const Domain& domain, int n) {
  if (n < 0) throw invalid_argument("lattice order must be >= 0");
  const int d = domain.dim();
  std::vector<MultiIndex> out;
  MultiIndex idx;
  idx.dim = d;
  while (true) {
    if (domain.is_box() || idx.order() <= n) out.push_back(idx);
    int i = 0;
    for (; i < d; ++i) {
      if (++idx.h[i] <= n) break;
      idx.h[i] = 0;
    }
    if (i == d) break;
  }
  return out;
}

/// The node h / n (exactly inside the domain).
inline Point lattice_node(const Domain& domain, int n, const MultiIndex& h) {
  return lattice_point(domain, h.entries(), n);
}

namespace detail {

// k * log(t) with 0 * log(0) = 0.
inline double xlogy(int k, double t) { return k == 0 ? 0.0 : k * std::log(t); }

// C(n,k) t^k (1-t)^(n-k), k = 0..n, by repeated multiplication.
inline void bernstein_row_direct(int n, double t, std::span<double> out) {
  std::vector<double> pw(n + 1), qw(n + 1);
  pw[0] = qw[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    pw[k] = pw[k - 1] * t;
    qw[k] = qw[k - 1] * (1.0 - t);
  }
  double c = 1.0;
  for (int k = 0; k <= n; ++k) {
    out[k] = c * pw[k] * qw[n - k];
    c = c * (n - k) / (k + 1);
  }
}

inline void bernstein_row_log(int n, double t, std::span<double> out) {
  for (int k = 0; k <= n; ++k)
    out[k] = std::exp(log_binomial(n, k) + xlogy(k, t) + xlogy(n - k, 1.0 - t));
}

inline void bernstein_row(int n, double t, std::span<double> out) {
  if (n > log_space_threshold)
    bernstein_row_log(n, t, out);
  else
    bernstein_row_direct(n, t, out);
}

inline double simplex_basis_direct(int n, const MultiIndex& h, const Point& x) {
  std::array<int, max_dim + 1> counts{};
  double v = 1.0;
  for (int i = 0; i < h.dim; ++i) {
    counts[i] = h[i];
    v *= std::pow(x[i], h[i]);
  }
  const int rest = n - h.order();
  counts[h.dim] = rest;
  v *= std::pow(1.0 - x.sum(), rest);
  return multinomial({counts.data(), std::size_t(h.dim + 1)}) * v;
}

inline double simplex_basis_log(int n, const MultiIndex& h, const Point& x) {
  std::array<int, max_dim + 1> counts{};
  double lg = 0.0;
  for (int i = 0; i < h.dim; ++i) {
    counts[i] = h[i];
    lg += xlogy(h[i], x[i]);
  }
  const int rest = n - h.order();
  counts[h.dim] = rest;
  lg += xlogy(rest, 1.0 - x.sum());
  return std::exp(log_multinomial({counts.data(), std::size_t(h.dim + 1)}) + lg);
}

inline double box_basis_direct(int n, const MultiIndex& h, const Point& x) {
  double v = 1.0;
  for (int i = 0; i < h.dim; ++i) v *= binomial(n, h[i]) * std::pow(x[i], h[i]) * std::pow(1.0 - x[i], n - h[i]);
  return v;
}

inline double box_basis_log(int n, const MultiIndex& h, const Point& x) {
  double lg = 0.0;
  for (int i = 0; i < h.dim; ++i) lg += log_binomial(n, h[i]) + xlogy(h[i], x[i]) + xlogy(n - h[i], 1.0 - x[i]);
  return std::exp(lg);
}

}  // namespace detail

/// P_{n,h}(x) on boxes, P*_{n,h}(x) on the simplex.
inline double basis(const Domain& domain, int n, const MultiIndex& h, const Point& x) {
  if (!valid_index(domain, n, h)) throw invalid_argument("multi-index not admissible for order " + std::to_string(n));
  require_inside(domain, x);
  const bool use_log = n > log_space_threshold;
  if (domain.is_box()) return use_log ? detail::box_basis_log(n, h, x) : detail::box_basis_direct(n, h, x);
  return use_log ? detail::simplex_basis_log(n, h, x) : detail::simplex_basis_direct(n, h, x);
}

/// All basis functions of order n on a domain, evaluated in lattice order.
/// Coefficients are tabulated once; evaluation per point is a sweep over the
/// lattice.
class BernsteinBasis {
 public:
  BernsteinBasis(const Domain& domain, int n) : domain_(domain), n_(n), indices_(lattice(domain, n)) {
    if (n < 1) throw invalid_argument("Bernstein order must be >= 1");
    if (!domain.is_box()) {
      log_coeff_.reserve(indices_.size());
      for (const auto& h : indices_) {
        std::array<int, max_dim + 1> counts{};
        for (int i = 0; i < h.dim; ++i) counts[i] = h[i];
        counts[h.dim] = n - h.order();
        log_coeff_.push_back(log_multinomial({counts.data(), std::size_t(h.dim + 1)}));
        coeff_.push_back(n > log_space_threshold ? 0.0 : multinomial({counts.data(), std::size_t(h.dim + 1)}));
      }
    }
  }

  const Domain& domain() const noexcept { return domain_; }
  int order() const noexcept { return n_; }
  const std::vector<MultiIndex>& indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }

  void values(const Point& x, std::vector<double>& out) const {
    require_inside(domain_, x);
    out.resize(indices_.size());
    const int d = domain_.dim();
    const int n = n_;
    if (domain_.is_box()) {
      std::array<std::vector<double>, max_dim> rows;
      for (int i = 0; i < d; ++i) {
        rows[i].resize(n + 1);
        detail::bernstein_row(n, x[i], rows[i]);
      }
      for (std::size_t k = 0; k < indices_.size(); ++k) {
        double v = 1.0;
        for (int i = 0; i < d; ++i) v *= rows[i][indices_[k][i]];
        out[k] = v;
      }
      return;
    }
    const double z = 1.0 - x.sum();
    if (n > log_space_threshold) {
      std::array<double, max_dim> lx{};
      for (int i = 0; i < d; ++i) lx[i] = std::log(x[i]);
      const double lz = std::log(z);
      for (std::size_t k = 0; k < indices_.size(); ++k) {
        const auto& h = indices_[k];
        double lg = log_coeff_[k];
        for (int i = 0; i < d; ++i)
          if (h[i]) lg += h[i] * lx[i];
        const int rest = n - h.order();
        if (rest) lg += rest * lz;
        out[k] = std::exp(lg);
      }
      return;
    }
    std::array<std::vector<double>, max_dim + 1> pw;
    for (int i = 0; i <= d; ++i) {
      const double t = i < d ? x[i] : z;
      pw[i].resize(n + 1);
      pw[i][0] = 1.0;
      for (int k = 1; k <= n; ++k) pw[i][k] = pw[i][k - 1] * t;
    }
    for (std::size_t k = 0; k < indices_.size(); ++k) {
      const auto& h = indices_[k];
      double v = coeff_[k] * pw[d][n - h.order()];
      for (int i = 0; i < d; ++i) v *= pw[i][h[i]];
      out[k] = v;
    }
  }

  std::vector<double> values(const Point& x) const {
    std::vector<double> out;
    values(x, out);
    return out;
  }

  /// sum_h P_h(x) c_h, compensated.
  double combine(const Point& x, std::span<const double> coefficients) const {
    thread_local std::vector<double> scratch;
    values(x, scratch);
    return compensated_dot(scratch, coefficients);
  }

 private:
  Domain domain_;
  int n_;
  std::vector<MultiIndex> indices_;
  std::vector<double> log_coeff_;
  std::vector<double> coeff_;
};

/// Basis values in lattice order.
inline std::vector<double> basis_values(const Domain& domain, int n, const Point& x) {
  return BernsteinBasis(domain, n).values(x);
}

/// B_n(f) with the values f(h/n) tabulated once.
class BernsteinEvaluator {
 public:
  BernsteinEvaluator(const Domain& domain, int n, const Field& f) : basis_(domain, n) {
    samples_.reserve(basis_.size());
    for (const auto& h : basis_.indices()) {
      const Point node = lattice_node(domain, n, h);
      const double v = f(node);
      if (!std::isfinite(v)) throw numeric_error("non-finite function value", node);
      samples_.push_back(v);
    }
  }

  double operator()(const Point& x) const { return basis_.combine(x, samples_); }

 private:
  BernsteinBasis basis_;
  std::vector<double> samples_;
};

inline double eval_Bn(const Domain& domain, int n, const Field& f, const Point& x) {
  require_inside(domain, x);
  return BernsteinEvaluator(domain, n, f)(x);
}

}  // namespace kantorov
