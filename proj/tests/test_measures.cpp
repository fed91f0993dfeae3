#include <gtest/gtest.h>

#include <cmath>

#include "kantorov/measures.hpp"
#include "oracles.hpp"

using namespace kantorov;

TEST(DiscreteMeasure, ValidatesInput) {
  const auto I = Domain::interval();
  EXPECT_THROW(DiscreteMeasure(I, {}, {}), std::invalid_argument);
  EXPECT_THROW(DiscreteMeasure(I, {Point{0.2}}, {0.5, 0.5}), std::invalid_argument);
  EXPECT_THROW(DiscreteMeasure(I, {Point{0.2}, Point{0.4}}, {0.6, 0.6}), std::invalid_argument);
  EXPECT_THROW(DiscreteMeasure(I, {Point{0.2}, Point{0.4}}, {1.5, -0.5}), std::invalid_argument);
  EXPECT_THROW(DiscreteMeasure(I, {Point{1.2}}, {1.0}), std::invalid_argument);
  EXPECT_NO_THROW(DiscreteMeasure(I, {Point{0.2}, Point{0.4}}, {0.25, 0.75}));
}

TEST(DiscreteMeasure, IntegratesBySummation) {
  const DiscreteMeasure mu(Domain::interval(), {Point{0.0}, Point{1.0}}, {0.25, 0.75});
  EXPECT_DOUBLE_EQ(mu.integrate([](const Point& x) { return x[0]; }), 0.75);
  EXPECT_THROW(mu.integrate([](const Point&) { return std::nan(""); }), numeric_error);
}

TEST(MeasureSequence, ResolvesEachFamily) {
  const auto I = Domain::interval();
  EXPECT_TRUE(std::holds_alternative<LebesgueMeasure>(resolve(ConstantLebesgue{}, I, 3)));
  const auto d = resolve(DiracShift{[](int n) { return Point{1.0 / n}; }}, I, 4);
  EXPECT_DOUBLE_EQ(std::get<DiscreteMeasure>(d).atoms()[0][0], 0.25);
  const auto p = resolve(PowerOfBase{LebesgueMeasure{}, 2}, I, 9);
  EXPECT_EQ(std::get<PowerMeasure>(p).exponent, 2);
  const ExplicitList list{{LebesgueMeasure{}, DiscreteMeasure::dirac(I, {0.5})}};
  EXPECT_TRUE(std::holds_alternative<DiscreteMeasure>(resolve(list, I, 2)));
  EXPECT_THROW(resolve(list, I, 3), std::out_of_range);
  EXPECT_THROW(resolve(list, I, 0), std::invalid_argument);
}

TEST(Lebesgue, NormalizedMoments) {
  for (const auto& dom : {Domain::interval(), Domain::hypercube(2), Domain::simplex(2), Domain::simplex(3)}) {
    const double one = integrate_measure(LebesgueMeasure{}, dom, Field([](const Point&) { return 1.0; }), 8);
    EXPECT_NEAR(one, 1.0, 1e-14) << dom.name();
    const double mean = integrate_measure(LebesgueMeasure{}, dom, Field([](const Point& x) { return x[0]; }), 8);
    EXPECT_NEAR(mean, dom.is_box() ? 0.5 : 1.0 / (dom.dim() + 1), 1e-14) << dom.name();
  }
  // second moment on K_2: 2 / ((d+1)(d+2)) = 1/6
  EXPECT_NEAR(integrate_measure(LebesgueMeasure{}, Domain::simplex(2),
                                Field([](const Point& x) { return x[0] * x[0]; }), 8),
              1.0 / 6.0, 1e-14);
}

TEST(PowerMeasure, DiscreteBaseEnumeratesMultisets) {
  const auto I = Domain::interval();
  const DiscreteMeasure coin(I, {Point{0.0}, Point{1.0}}, {0.5, 0.5});
  const Field f([](const Point& x) { return x[0] * x[0]; });
  // mean of two fair coins: 0, 1/2, 1 with weights 1/4, 1/2, 1/4
  EXPECT_NEAR(power_average_integral(coin, 2, I, f, 4), 0.25 * 0.25 * 2 + 0.25, 1e-15);
  // three coins
  EXPECT_NEAR(power_average_integral(coin, 3, I, f, 4), (3.0 / 8) / 9 + (3.0 / 8) * 4 / 9 + 1.0 / 8, 1e-15);
}

TEST(PowerMeasure, UniformMeanDensityIsAProbabilityDensity) {
  for (int a : {1, 2, 3, 5}) {
    const double mass = oracle::simpson([&](double s) { return detail::uniform_mean_density(a, s); }, 0.0, 1.0, 1e-12);
    EXPECT_NEAR(mass, 1.0, 1e-10) << a;
  }
  EXPECT_DOUBLE_EQ(detail::uniform_mean_density(2, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(detail::uniform_mean_density(2, 1.5), 0.0);
}

TEST(PowerMeasure, DensityPathMatchesTensorEnumeration) {
  const Field f([](const Point& x) { return std::exp(x[0]) * (1.0 + x.sum()); });
  for (const auto& dom : {Domain::interval(), Domain::hypercube(2)}) {
    for (int a : {2, 3}) {
      if (a * dom.dim() > 6) continue;
      const double via_density = integrate_measure(PowerMeasure{LebesgueMeasure{}, a}, dom, f, 8);
      const double via_tensor = power_average_integral(LebesgueMeasure{}, a, dom, f, 8);
      EXPECT_NEAR(via_density, via_tensor, 1e-12) << dom.name() << " a=" << a;
    }
  }
}

TEST(PowerMeasure, PowerOfLebesgueKeepsTheMean) {
  const auto K2 = Domain::simplex(2);
  const double m = power_average_integral(LebesgueMeasure{}, 2, K2, Field([](const Point& x) { return x[1]; }), 6);
  EXPECT_NEAR(m, 1.0 / 3.0, 1e-14);
  EXPECT_THROW(power_average_integral(LebesgueMeasure{}, 3, Domain::simplex(3), Field([](const Point&) { return 1.0; }), 4),
               unsupported_error);
}
