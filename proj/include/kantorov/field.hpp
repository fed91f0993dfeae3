#pragma once

#include <concepts>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "kantorov/point.hpp"

namespace kantorov {

/// Axis-aligned hyperplane x[axis] == at across which a function may lose
/// smoothness. Quadrature on box domains splits along these planes; a
/// singular kink (unbounded derivative) also gets geometrically graded panels.
struct Kink {
  int axis = 0;
  double at = 0.0;
  bool singular = false;
};

/// A real-valued function on points, optionally annotated with kinks.
class Field {
 public:
  Field() = default;

  template <class F>
    requires std::invocable<const F&, const Point&> && (!std::same_as<std::remove_cvref_t<F>, Field>) &&
             (!requires(const F& g) { { g.field() } -> std::same_as<Field>; })
  Field(F f) : fn_(std::move(f)) {}  // NOLINT(google-explicit-constructor)

  // Objects that know their own field representation (kinks included).
  template <class F>
    requires requires(const F& g) { { g.field() } -> std::same_as<Field>; }
  Field(const F& f) : Field(f.field()) {}  // NOLINT(google-explicit-constructor)

  Field(std::function<double(const Point&)> fn, std::vector<Kink> kinks)
      : fn_(std::move(fn)), kinks_(std::move(kinks)) {}

  double operator()(const Point& x) const { return fn_(x); }

  std::span<const Kink> kinks() const noexcept { return kinks_; }

  explicit operator bool() const noexcept { return static_cast<bool>(fn_); }

 private:
  std::function<double(const Point&)> fn_;
  std::vector<Kink> kinks_;
};

}  // namespace kantorov
