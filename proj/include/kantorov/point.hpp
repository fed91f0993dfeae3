#pragma once

#include <array>
#include <cstdio>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>

namespace kantorov {

/// Largest ambient dimension supported by the library.
inline constexpr int max_dim = 3;

/// A point of R^d, d <= max_dim, stored inline.
class Point {
 public:
  Point() = default;

  explicit Point(int dim) : dim_(checked(dim)) {}

  Point(std::initializer_list<double> coords)
      : dim_(checked(static_cast<int>(coords.size()))) {
    int i = 0;
    for (double c : coords) c_[i++] = c;
  }

  explicit Point(std::span<const double> coords)
      : dim_(checked(static_cast<int>(coords.size()))) {
    for (int i = 0; i < dim_; ++i) c_[i] = coords[i];
  }

  static Point filled(int dim, double value) {
    Point p(dim);
    for (int i = 0; i < dim; ++i) p.c_[i] = value;
    return p;
  }

  int dim() const noexcept { return dim_; }
  double operator[](int i) const noexcept { return c_[i]; }
  double& operator[](int i) noexcept { return c_[i]; }

  std::span<const double> coords() const noexcept {
    return {c_.data(), static_cast<std::size_t>(dim_)};
  }

  double sum() const noexcept {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += c_[i];
    return s;
  }

  friend bool operator==(const Point& a, const Point& b) noexcept {
    if (a.dim_ != b.dim_) return false;
    for (int i = 0; i < a.dim_; ++i)
      if (a.c_[i] != b.c_[i]) return false;
    return true;
  }

 private:
  static int checked(int dim) {
    if (dim < 0 || dim > max_dim)
      throw std::invalid_argument("point dimension must be in [0, 3]");
    return dim;
  }

  std::array<double, max_dim> c_{};
  int dim_ = 0;
};

inline std::string to_string(const Point& p) {
  std::string s = "(";
  char buf[32];
  for (int i = 0; i < p.dim(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", p[i]);
    if (i) s += ", ";
    s += buf;
  }
  return s + ")";
}

}  // namespace kantorov
