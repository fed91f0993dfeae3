#pragma once

// The canonical Markov operators T_1 (interval), S_d (hypercube) and T_d
// (simplex), given by their vertex-supported selections of measures.

#include <cmath>
#include <string>
#include <vector>

#include "kantorov/errors.hpp"
#include "kantorov/geometry.hpp"
#include "kantorov/measures.hpp"

namespace kantorov {

enum class MarkovKind { T1, Sd, Td };

inline std::string to_string(MarkovKind k) {
  switch (k) {
    case MarkovKind::T1: return "T1";
    case MarkovKind::Sd: return "Sd";
    case MarkovKind::Td: return "Td";
  }
  return {};
}

class MarkovOperator {
 public:
  MarkovOperator(MarkovKind kind, const Domain& domain) : kind_(kind), domain_(domain) {
    const DomainKind expected = kind == MarkovKind::T1   ? DomainKind::interval
                                : kind == MarkovKind::Sd ? DomainKind::hypercube
                                                         : DomainKind::simplex;
    if (domain.kind() != expected)
      throw config_error("Markov operator " + to_string(kind) + " does not act on " + domain.name());
  }

  /// The operator shipped for the domain's kind.
  static MarkovOperator canonical(const Domain& domain) {
    switch (domain.kind()) {
      case DomainKind::interval: return {MarkovKind::T1, domain};
      case DomainKind::hypercube: return {MarkovKind::Sd, domain};
      case DomainKind::simplex: return {MarkovKind::Td, domain};
    }
    throw config_error("unknown domain kind");
  }

  MarkovKind kind() const noexcept { return kind_; }
  const Domain& domain() const noexcept { return domain_; }

 private:
  MarkovKind kind_;
  Domain domain_;
};

/// Representing measure of T at x: T(f)(x) = integral of f against it.
/// Atoms are the vertices in the order of vertices(domain).
inline DiscreteMeasure selection(const MarkovOperator& op, const Point& x) {
  const Domain& domain = op.domain();
  require_inside(domain, x);
  const int d = domain.dim();
  std::vector<double> w;
  switch (op.kind()) {
    case MarkovKind::T1:
      w = {1.0 - x[0], x[0]};
      break;
    case MarkovKind::Sd: {
      // running product, coordinate 1 most significant
      w = {1.0};
      for (int i = 0; i < d; ++i) {
        std::vector<double> next;
        next.reserve(w.size() * 2);
        for (double v : w) {
          next.push_back(v * (1.0 - x[i]));
          next.push_back(v * x[i]);
        }
        w = std::move(next);
      }
      break;
    }
    case MarkovKind::Td:
      w.push_back(1.0 - x.sum());
      for (int i = 0; i < d; ++i) w.push_back(x[i]);
      break;
  }
  return make_unchecked_measure(vertices(domain), std::move(w));
}

template <class F>
double apply_markov(const MarkovOperator& op, const F& f, const Point& x) {
  return selection(op, x).integrate(f);
}

struct AffineInvarianceReport {
  bool pass = true;
  double max_deviation = 0.0;
  Point worst;
};

/// Checks |T(h)(x) - h(x)| <= tol for h in {1, pr_1, ..., pr_d} on the grid.
inline AffineInvarianceReport verify_affine_invariance(const MarkovOperator& op, const std::vector<Point>& grid,
                                                       double tol) {
  if (grid.empty()) throw invalid_argument("affine invariance check needs a nonempty grid");
  AffineInvarianceReport rep;
  const int d = op.domain().dim();
  for (const Point& x : grid) {
    const DiscreteMeasure mu = selection(op, x);
    auto check = [&](double dev) {
      if (dev > rep.max_deviation) {
        rep.max_deviation = dev;
        rep.worst = x;
      }
    };
    check(std::abs(mu.integrate([](const Point&) { return 1.0; }) - 1.0));
    for (int i = 0; i < d; ++i) check(std::abs(mu.integrate([i](const Point& y) { return y[i]; }) - x[i]));
  }
  rep.pass = rep.max_deviation <= tol;
  return rep;
}

}  // namespace kantorov
