#pragma once

#include <stdexcept>
#include <string>

#include "kantorov/point.hpp"

namespace kantorov {

/// Precondition violations: dimension mismatch, point outside the domain,
/// malformed multi-index.
class invalid_argument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inconsistent operator or run configuration.
class config_error : public invalid_argument {
 public:
  using invalid_argument::invalid_argument;
};

/// Requested computation exceeds a documented cost ceiling.
class unsupported_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A non-finite function value was met while integrating or summing.
class numeric_error : public std::runtime_error {
 public:
  numeric_error(const std::string& what, Point where)
      : std::runtime_error(what + " at " + to_string(where)), where_(where) {}

  const Point& where() const noexcept { return where_; }

 private:
  Point where_;
};

}  // namespace kantorov
