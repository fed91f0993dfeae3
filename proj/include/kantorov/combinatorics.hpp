#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace kantorov {

/// log(k!) from a table for small k, lgamma beyond.
inline double log_factorial(int k) {
  static const std::vector<double> table = [] {
    std::vector<double> t(2049, 0.0);
    for (std::size_t i = 2; i < t.size(); ++i) t[i] = t[i - 1] + std::log(static_cast<double>(i));
    return t;
  }();
  if (k < 0) return NAN;
  if (static_cast<std::size_t>(k) < table.size()) return table[k];
  return std::lgamma(k + 1.0);
}

/// Binomial coefficient as a double via the multiplicative formula.
inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c < 9.007199254740992e15 ? std::round(c) : c;
}

inline double log_binomial(int n, int k) {
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

/// Multinomial n! / (k_1! ... k_m!) with n = sum k_j, as a product of binomials.
inline double multinomial(std::span<const int> counts) {
  int n = 0;
  double c = 1.0;
  for (int k : counts) {
    n += k;
    c *= binomial(n, k);
  }
  return c;
}

inline double log_multinomial(std::span<const int> counts) {
  int n = 0;
  double s = 0.0;
  for (int k : counts) {
    n += k;
    s -= log_factorial(k);
  }
  return s + log_factorial(n);
}

}  // namespace kantorov
