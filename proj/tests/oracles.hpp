#pragma once

// Slow reference computations used only by the tests. None of them share
// code paths with the library beyond the Point type and selection().

#include <cmath>
#include <functional>
#include <vector>

#include "kantorov/markov.hpp"

namespace oracle {

using kantorov::Point;

/// B_n(f)(x) by expanding the n-fold product of the selection measure at x:
/// the average of f((y_1 + ... + y_n)/n) over all n-tuples of atoms.
inline double product_measure_bernstein(const kantorov::MarkovOperator& op, int n,
                                        const std::function<double(const Point&)>& f, const Point& x) {
  const auto mu = kantorov::selection(op, x);
  const auto& atoms = mu.atoms();
  const auto& w = mu.weights();
  const int d = x.dim();
  const std::size_t k = atoms.size();
  std::vector<std::size_t> pick(n, 0);
  long double total = 0.0L;
  while (true) {
    long double weight = 1.0L;
    Point y(d);
    for (int r = 0; r < n; ++r) {
      weight *= w[pick[r]];
      for (int i = 0; i < d; ++i) y[i] += atoms[pick[r]][i];
    }
    if (weight != 0.0L) {
      for (int i = 0; i < d; ++i) y[i] /= n;
      total += weight * f(y);
    }
    int r = n - 1;
    for (; r >= 0; --r) {
      if (++pick[r] < k) break;
      pick[r] = 0;
    }
    if (r < 0) break;
  }
  return static_cast<double>(total);
}

namespace detail {
inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                           double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}
}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, 40);
}

/// Iterated adaptive Simpson over [0,1]^2.
inline double simpson2(const std::function<double(double, double)>& f, double tol = 1e-12) {
  return simpson([&](double s) { return simpson([&](double t) { return f(s, t); }, 0.0, 1.0, tol); }, 0.0, 1.0, tol);
}

/// Classical binomial Bernstein basis in long double.
inline double bernstein_basis(int n, int k, double x) {
  long double c = 1.0L;
  for (int j = 1; j <= k; ++j) c = c * (n - k + j) / j;
  return static_cast<double>(c * std::pow(static_cast<long double>(x), k) *
                             std::pow(1.0L - static_cast<long double>(x), n - k));
}

}  // namespace oracle
