#include <gtest/gtest.h>

#include <cmath>

#include "kantorov/catalog.hpp"
#include "kantorov/moduli.hpp"

using namespace kantorov;

namespace {

const Domain I = Domain::interval();
const Field id([](const Point& x) { return x[0]; });
const Field sq([](const Point& x) { return x[0] * x[0]; });

}  // namespace

TEST(Moduli, ClosedFormValuesOnTheInterval) {
  EXPECT_NEAR(omega1(sq, I, 0.1, 1000), 0.19, 1e-3);
  EXPECT_NEAR(omega2(sq, I, 0.25, 1000), 0.125, 1e-3);
  EXPECT_NEAR(tau_p(id, I, 0.2, 1.0, 1000), 0.19, 2e-3);
  EXPECT_NEAR(omega_kp(id, I, 1, 0.5, 1.0, 1000), 0.25, 2e-3);
  // tau_2(id, 0.2): local oscillation x + 0.1 near the ends, 0.2 inside
  const double exact = std::sqrt(2.0 * (std::pow(0.2, 3) - std::pow(0.1, 3)) / 3.0 + 0.8 * 0.04);
  EXPECT_NEAR(tau_p(id, I, 0.2, 2.0, 1000), exact, 2e-3);
}

TEST(Moduli, AffineAndConstantVanish) {
  for (const Domain& dom : {I, Domain::hypercube(2), Domain::simplex(2)}) {
    std::vector<double> params = {0.3};
    for (int i = 0; i < dom.dim(); ++i) params.push_back(0.7 - i);
    const Field aff = lookup("affine", params, dom).field();
    const Field c = lookup("constant", {4.0}, dom).field();
    EXPECT_NEAR(omega2(aff, dom, 0.3, 40), 0.0, 1e-12);
    EXPECT_NEAR(omega_kp(aff, dom, 2, 0.3, 1.0, 40), 0.0, 1e-12);
    for (const Field& f : {c}) {
      EXPECT_NEAR(omega1(f, dom, 0.3, 40), 0.0, 1e-12);
      EXPECT_NEAR(omega2(f, dom, 0.3, 40), 0.0, 1e-12);
      EXPECT_NEAR(tau_p(f, dom, 0.3, 1.0, 40), 0.0, 1e-12);
      EXPECT_NEAR(omega_kp(f, dom, 1, 0.3, 2.0, 40), 0.0, 1e-12);
    }
  }
}

TEST(Moduli, MetricChoiceMatters) {
  const auto Q2 = Domain::hypercube(2);
  const Field f = lookup("abs_diff12", {}, Q2).field();
  EXPECT_NEAR(omega1(f, Q2, 0.1, 100, Metric::l1), 0.1, 1e-12);
  // l2 ball of radius 0.1 reaches (0.07, -0.07) on the lattice
  EXPECT_NEAR(omega1(f, Q2, 0.1, 100, Metric::l2), 0.14, 1e-12);
}

TEST(Moduli, TotalModulusUsesTheDomainRadius) {
  const auto Q2 = Domain::hypercube(2);
  const Field pr1([](const Point& x) { return x[0]; });
  EXPECT_NEAR(total_modulus_upper(pr1, Q2, 0.1, 99), 0.1 * std::sqrt(2.0), 1e-3);
  EXPECT_NEAR(total_modulus_upper(pr1, Domain::simplex(2), 0.1, 100), 0.1, 1e-12);
}

TEST(Moduli, GridModulusProperties) {
  const Field f = lookup("runge", {}, I).field();
  double prev = 0.0;
  for (int k = 1; k <= 20; ++k) {
    const double delta = k / 50.0;
    const double w = omega1(f, I, delta, 200);
    EXPECT_GE(w, prev);
    prev = w;
    EXPECT_LE(omega1(f, I, 2 * delta, 200), 2 * w + 1e-15);
    EXPECT_LE(omega2(f, I, delta, 200), 2 * w + 1e-15);
  }
}

TEST(Moduli, HolderAndLipschitzEstimates) {
  const Field h = lookup("holder_coord", {1, 0.5, 0.5}, I).field();
  const double est = holder_estimate(h, I, 0.5, 400);
  EXPECT_LE(est, 1.0 + 1e-12);
  EXPECT_GE(est, 0.99);
  EXPECT_NEAR(lipschitz_estimate(sq, I, 100, Metric::l2), 1.99, 1e-12);
  const auto Q2 = Domain::hypercube(2);
  const Field pr1([](const Point& x) { return x[0] + 2 * x[1]; });
  EXPECT_NEAR(lipschitz_estimate(pr1, Q2, 30, Metric::l1), 2.0, 1e-12);
  EXPECT_NEAR(lipschitz_estimate(pr1, Q2, 30, Metric::l2), std::sqrt(5.0), 1e-12);
}

TEST(Moduli, DirectionsAreSeededUnitVectors) {
  EXPECT_EQ(sample_directions(1).size(), 1u);
  for (int d : {2, 3}) {
    const auto a = sample_directions(d, 7), b = sample_directions(d, 7), c = sample_directions(d, 8);
    ASSERT_EQ(a.size(), b.size());
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      double norm = 0.0;
      for (int k = 0; k < d; ++k) {
        EXPECT_EQ(a[i][k], b[i][k]);
        differs = differs || a[i][k] != c[i][k];
        norm += a[i][k] * a[i][k];
      }
      EXPECT_NEAR(norm, 1.0, 1e-14);
    }
    EXPECT_TRUE(differs);
  }
}

TEST(Moduli, HigherOrderModuli) {
  // omega_{2,1}(t^2, delta) on [0,1] = sup_h 2h^2 (1 - 2h)
  const double h = 1.0 / 3.0;
  EXPECT_NEAR(omega_kp(sq, I, 2, 0.5, 1.0, 600), 2 * h * h * (1 - 2 * h), 2e-3);
  EXPECT_NEAR(omega_kp(sq, I, 3, 0.2, 1.0, 300), 0.0, 1e-12);
}

TEST(Moduli, ArgumentChecks) {
  EXPECT_THROW(omega1(id, I, 0.0, 10), invalid_argument);
  EXPECT_THROW(omega1(id, I, 0.1, 1), invalid_argument);
  EXPECT_THROW(tau_p(id, I, 0.1, 0.5, 10), invalid_argument);
  EXPECT_THROW(omega_kp(id, I, 0, 0.1, 1.0, 10), invalid_argument);
  EXPECT_THROW(holder_estimate(id, I, 1.5, 10), invalid_argument);
}
