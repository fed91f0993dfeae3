#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "kantorov/bernstein.hpp"
#include "kantorov/markov.hpp"
#include "oracles.hpp"

using namespace kantorov;

TEST(Lattice, CountsAndColexOrder) {
  EXPECT_EQ(lattice(Domain::hypercube(2), 3).size(), 16u);
  EXPECT_EQ(lattice(Domain::simplex(2), 3).size(), 10u);
  EXPECT_EQ(lattice(Domain::simplex(3), 4).size(), 35u);
  const auto l = lattice(Domain::simplex(2), 2);
  // h_1 varies fastest
  EXPECT_EQ(l[0][0], 0);
  EXPECT_EQ(l[1][0], 1);
  EXPECT_EQ(l[2][0], 2);
  EXPECT_EQ(l[3][0], 0);
  EXPECT_EQ(l[3][1], 1);
  for (const auto& h : lattice(Domain::simplex(3), 5)) EXPECT_LE(h.order(), 5);
}

TEST(Basis, MatchesLongDoubleFormula) {
  for (int n : {1, 7, 30, 61, 120})
    for (int k : {0, 1, n / 2, n})
      for (double x : {0.0, 0.13, 0.5, 0.91, 1.0}) {
        MultiIndex h;
        h.dim = 1;
        h.h[0] = k;
        const double ref = oracle::bernstein_basis(n, k, x);
        EXPECT_NEAR(basis(Domain::interval(), n, h, {x}), ref, 1e-13 * std::max(1.0, ref)) << n << " " << k << " " << x;
      }
}

TEST(Basis, DirectAndLogFormsAgreeAtCrossover) {
  const int n = log_space_threshold;
  std::vector<double> direct(n + 1), logged(n + 1);
  for (double t : {0.0, 0.03, 0.37, 0.5, 0.77, 1.0}) {
    detail::bernstein_row_direct(n, t, direct);
    detail::bernstein_row_log(n, t, logged);
    for (int k = 0; k <= n; ++k) EXPECT_NEAR(direct[k], logged[k], 1e-11) << t << " " << k;
  }
  for (const auto& h : lattice(Domain::simplex(2), n)) {
    const Point x{0.21, 0.45};
    EXPECT_NEAR(detail::simplex_basis_direct(n, h, x), detail::simplex_basis_log(n, h, x), 1e-11);
  }
}

TEST(Basis, PartitionOfUnityAndFaces) {
  for (const auto& dom : {Domain::interval(), Domain::hypercube(2), Domain::simplex(2), Domain::simplex(3)}) {
    for (int n : {1, 4, 70}) {
      const BernsteinBasis b(dom, n);
      for (const Point& x : uniform_grid(dom, 3)) {
        const auto v = b.values(x);
        double s = 0.0;
        for (double w : v) {
          EXPECT_GE(w, 0.0);
          EXPECT_TRUE(std::isfinite(w));
          s += w;
        }
        EXPECT_NEAR(s, 1.0, 1e-12) << dom.name() << " n=" << n;
      }
    }
  }
  // at a vertex only the corresponding basis function survives
  const BernsteinBasis b(Domain::simplex(2), 90);
  const auto v = b.values({0.0, 1.0});
  for (std::size_t k = 0; k < v.size(); ++k) {
    const bool corner = b.indices()[k][0] == 0 && b.indices()[k][1] == 90;
    EXPECT_EQ(v[k], corner ? 1.0 : 0.0);
  }
}

TEST(Basis, RejectsBadInput) {
  MultiIndex h;
  h.dim = 2;
  h.h = {2, 2, 0};
  EXPECT_THROW(basis(Domain::simplex(2), 3, h, {0.1, 0.1}), std::invalid_argument);
  h.h = {1, 1, 0};
  EXPECT_THROW(basis(Domain::simplex(2), 3, h, {0.9, 0.9}), std::invalid_argument);
  EXPECT_THROW(BernsteinBasis(Domain::interval(), 0), std::invalid_argument);
}

TEST(Bernstein, ReproducesAffineAndKnownQuadratic) {
  for (const auto& dom : {Domain::interval(), Domain::hypercube(3), Domain::simplex(2), Domain::simplex(3)}) {
    const Field h([](const Point& x) { return 0.3 - x[0] + 2.0 * x[x.dim() - 1]; });
    for (int n : {1, 3, 11, 75}) {
      const BernsteinEvaluator bn(dom, n, h);
      const BernsteinEvaluator sq(dom, n, Field([](const Point& x) { return x[0] * x[0]; }));
      for (const Point& x : uniform_grid(dom, 4)) {
        EXPECT_NEAR(bn(x), h(x), 1e-12);
        EXPECT_NEAR(sq(x), x[0] / n + (n - 1.0) / n * x[0] * x[0], 1e-12);
      }
    }
  }
}

TEST(Bernstein, AgreesWithProductMeasureExpansion) {
  const auto f = [](const Point& x) { return std::abs(x[0] - 0.4) + std::exp(x.sum()) * x[x.dim() - 1]; };
  struct Case {
    Domain dom;
    int n;
  };
  for (const Case& c : {Case{Domain::interval(), 12}, Case{Domain::hypercube(2), 5}, Case{Domain::simplex(2), 6},
                        Case{Domain::simplex(3), 4}}) {
    const auto op = MarkovOperator::canonical(c.dom);
    const BernsteinEvaluator bn(c.dom, c.n, Field(f));
    for (const Point& x : uniform_grid(c.dom, 3))
      EXPECT_NEAR(bn(x), oracle::product_measure_bernstein(op, c.n, f, x), 1e-13) << c.dom.name() << to_string(x);
  }
}
