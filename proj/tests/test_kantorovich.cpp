#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kantorov/analysis.hpp"
#include "kantorov/kantorovich.hpp"
#include "oracles.hpp"

using namespace kantorov;

namespace {

const Field id([](const Point& x) { return x[0]; });
const Field sq([](const Point& x) { return x[0] * x[0]; });
const Field kink([](const Point& x) { return std::abs(x[0] - 0.5); }, {{0, 0.5}});

std::vector<Domain> domains() { return {Domain::interval(), Domain::hypercube(2), Domain::simplex(2)}; }

// sum_h b_{n,h}(x) J_h on the interval with J_h from an independent integrator.
double interval_operator(int n, const std::function<double(int)>& inner, double x) {
  double s = 0.0;
  for (int h = 0; h <= n; ++h) s += oracle::bernstein_basis(n, h, x) * inner(h);
  return s;
}

}  // namespace

TEST(Config, ValidationRules) {
  const auto I = Domain::interval();
  EXPECT_THROW(OperatorConfig::canonical(I, -0.5), config_error);
  EXPECT_THROW(OperatorConfig::canonical(I, 0.0, DiracShift{[](int) { return Point{0.5}; }}), config_error);
  EXPECT_THROW(OperatorConfig::canonical(I, 1.5, PowerOfBase{LebesgueMeasure{}, 1}), config_error);
  EXPECT_THROW(OperatorConfig::canonical(I, 2.0, PowerOfBase{LebesgueMeasure{}, 3}), config_error);
  EXPECT_NO_THROW(OperatorConfig::canonical(I, 2.0, PowerOfBase{LebesgueMeasure{}, 2}));
  OperatorConfig cfg = OperatorConfig::canonical(I, 1.0);
  cfg.markov = MarkovOperator::canonical(Domain::hypercube(1));
  EXPECT_THROW(cfg.validate(), config_error);
  EXPECT_THROW(OperatorConfig::canonical(I, 1.0, ExplicitList{}), config_error);
}

TEST(Blend, AuxiliaryOperatorValues) {
  const auto I = Domain::interval();
  const auto cfg = OperatorConfig::canonical(I, 1.0);
  EXPECT_NEAR(eval_In(cfg, 1, id, {1.0}), 0.75, 1e-15);
  const auto dirac = OperatorConfig::canonical(I, 1.0, DiracShift{[](int) { return Point{1.0}; }});
  EXPECT_NEAR(eval_In(dirac, 3, id, {0.0}), 0.25, 1e-15);
  const auto zero = OperatorConfig::canonical(Domain::simplex(2), 0.0);
  const Field f([](const Point& x) { return std::sin(x[0] + 3 * x[1]); });
  EXPECT_EQ(eval_In(zero, 4, f, {0.2, 0.3}), f({0.2, 0.3}));
}

TEST(Operator, ClassicalKantorovichValues) {
  const auto cfg = OperatorConfig::canonical(Domain::interval(), 1.0);
  EXPECT_NEAR(eval_Cn(cfg, 1, id, {0.0}), 0.25, 1e-15);
  EXPECT_NEAR(eval_Cn(cfg, 1, sq, {1.0}), 7.0 / 12.0, 1e-15);
  EXPECT_NEAR(eval_Cn_cells(cfg, 1, id, {0.0}), 0.25, 1e-15);
  const auto dirac = OperatorConfig::canonical(Domain::interval(), 1.0, DiracShift{[](int) { return Point{1.0}; }});
  EXPECT_NEAR(eval_Cn(dirac, 2, id, {0.5}), 2.0 / 3.0, 1e-15);
  const auto Q2 = Domain::hypercube(2);
  EXPECT_NEAR(eval_Cn_cells(OperatorConfig::canonical(Q2, 1.0), 1, Field([](const Point&) { return 1.0; }), {0.3, 0.9}),
              1.0, 1e-15);
}

TEST(Operator, ZeroBlendIsBernstein) {
  for (const auto& dom : domains()) {
    const auto cfg = OperatorConfig::canonical(dom, 0.0);
    const Field f([](const Point& x) { return std::exp(x[0]) * std::cos(3.0 * x.sum()); });
    for (int n : {1, 6, 40})
      for (const Point& x : uniform_grid(dom, 5)) EXPECT_NEAR(eval_Cn(cfg, n, f, x), eval_Bn(dom, n, f, x), 1e-13);
  }
}

TEST(Operator, DiracSequenceMatchesPointEvaluations) {
  // mu_n = delta at b_n / a, so the inner integrals are f((h + b_n)/(n + a))
  const double a = 0.75;
  const auto cfg = OperatorConfig::canonical(Domain::interval(), a,
                                             DiracShift{[a](int n) { return Point{1.0 / (n * a + 1.0)}; }});
  const auto f = [](double t) { return std::exp(t) * std::sin(4 * t); };
  for (int n : {1, 5, 17}) {
    const double b = a / (n * a + 1.0);
    for (double x : {0.0, 0.33, 1.0}) {
      const double ref = interval_operator(n, [&](int h) { return f((h + b) / (n + a)); }, x);
      EXPECT_NEAR(eval_Cn(cfg, n, Field([&](const Point& p) { return f(p[0]); }), {x}), ref, 1e-13);
    }
  }
}

TEST(Operator, PowerMeasureAgreesWithDirectDoubleIntegral) {
  const auto f = [](double t) { return std::abs(t - 0.4) + std::exp(-3 * t); };
  const Field field([&](const Point& p) { return f(p[0]); }, {{0, 0.4}});
  for (int a : {1, 2}) {
    const auto cfg = OperatorConfig::canonical(Domain::interval(), a, PowerOfBase{LebesgueMeasure{}, a});
    for (int n : {1, 4, 9}) {
      auto inner = [&](int h) {
        if (a == 1) return oracle::simpson([&](double s) { return f((h + s) / (n + 1.0)); }, 0.0, 1.0, 1e-13);
        return oracle::simpson2([&](double s, double t) { return f((h + s + t) / (n + 2.0)); }, 1e-13);
      };
      const KantorovichEvaluator ev(cfg, n, field);
      for (double x : {0.0, 0.2, 0.65, 1.0}) EXPECT_NEAR(ev({x}), interval_operator(n, inner, x), 1e-9) << a << " " << n;
    }
  }
}

TEST(Operator, AffineOracleAgreement) {
  std::mt19937_64 rng(7);
  for (const auto& dom : domains())
    for (double a : {0.0, 0.5, 1.0, 2.0}) {
      const auto cfg = OperatorConfig::canonical(dom, a);
      for (int r = 0; r < 50; ++r) {
        const AffineForm h = random_affine(dom.dim(), rng);
        const int n = 1 + r % 7;
        const KantorovichEvaluator ev(cfg, n, h.field());
        const Point x = random_point(dom, rng);
        EXPECT_NEAR(ev(x), cn_affine_moment(cfg, n, h, x), 1e-10);
      }
    }
}

TEST(Operator, QuadraticOracleAgreement) {
  for (const auto& dom : domains())
    for (double a : {0.0, 0.5, 1.0, 2.0})
      for (int n : {1, 5, 25}) {
        const auto cfg = OperatorConfig::canonical(dom, a);
        for (int i = 0; i < dom.dim(); ++i) {
          const KantorovichEvaluator ev(cfg, n, Field([i](const Point& x) { return x[i] * x[i]; }));
          for (const Point& x : uniform_grid(dom, 6))
            EXPECT_NEAR(ev(x), cn_quadratic_moment(cfg, n, i, x), 1e-9) << dom.name() << " a=" << a << " n=" << n;
        }
      }
}

TEST(Moments, DocumentedValues) {
  const auto I = Domain::interval();
  const auto cfg = OperatorConfig::canonical(I, 1.0);
  EXPECT_NEAR(cn_affine_moment(cfg, 4, AffineForm::one(1), {0.3}), 1.0, 1e-15);
  EXPECT_NEAR(cn_affine_moment(cfg, 4, AffineForm::coordinate(1, 0), {0.0}), 0.1, 1e-15);
  const auto K2 = OperatorConfig::canonical(Domain::simplex(2), 1.0);
  EXPECT_NEAR(cn_affine_moment(K2, 2, AffineForm::coordinate(2, 0), {0.0, 0.0}), 1.0 / 9.0, 1e-15);
  EXPECT_NEAR(cn_quadratic_moment(cfg, 1, 0, {1.0}), 7.0 / 12.0, 1e-15);
  EXPECT_NEAR(cn_quadratic_moment(K2, 1, 0, {0.0, 0.0}), 1.0 / 24.0, 1e-15);
  const auto zero = OperatorConfig::canonical(I, 0.0);
  for (int n : {1, 3, 10}) EXPECT_NEAR(cn_quadratic_moment(zero, n, 0, {0.4}), 0.4 / n + (n - 1.0) / n * 0.16, 1e-15);
}

TEST(Moments, BilinearFormConsistency) {
  std::mt19937_64 rng(11);
  for (const auto& dom : domains()) {
    for (auto measures : {MeasureSeq{ConstantLebesgue{}}, MeasureSeq{PowerOfBase{LebesgueMeasure{}, 2}}}) {
      const auto cfg = OperatorConfig::canonical(dom, 2.0, measures);
      for (int r = 0; r < 5; ++r) {
        const Point x = random_point(dom, rng);
        const AffineForm k = random_affine(dom.dim(), rng);
        const AffineForm pr = AffineForm::coordinate(dom.dim(), 0);
        EXPECT_NEAR(cn_bilinear_moment(cfg, 3, pr, pr, x), cn_quadratic_moment(cfg, 3, 0, x), 1e-12);
        EXPECT_NEAR(cn_bilinear_moment(cfg, 3, AffineForm::one(dom.dim()), k, x), cn_affine_moment(cfg, 3, k, x), 1e-12);
        EXPECT_NEAR(cn_quadratic_moment_generic(cfg, 3, 0, x), cn_quadratic_moment(cfg, 3, 0, x), 1e-12);
      }
    }
  }
  const auto cfg = OperatorConfig::canonical(Domain::interval(), 1.0);
  const AffineForm h(0.0, Point{1.0}), k(1.0, Point{-1.0});
  EXPECT_NEAR(cn_bilinear_moment(cfg, 2, h, k, {0.5}),
              eval_Cn(cfg, 2, Field([](const Point& x) { return x[0] * (1 - x[0]); }), {0.5}), 1e-10);
}

TEST(Operator, CompositionOfBernsteinAndBlend) {
  struct Case {
    Domain dom;
    int n;
  };
  const Field f([](const Point& x) { return std::exp(x.sum()) * (1.0 + x[0]); });
  for (const Case& c : {Case{Domain::interval(), 9}, Case{Domain::hypercube(2), 4}, Case{Domain::simplex(2), 5}}) {
    for (auto measures : {MeasureSeq{ConstantLebesgue{}}, MeasureSeq{PowerOfBase{LebesgueMeasure{}, 1}}}) {
      const auto cfg = OperatorConfig::canonical(c.dom, 1.0, measures);
      const Field blended([&](const Point& y) { return eval_In(cfg, c.n, f, y); });
      for (const Point& x : uniform_grid(c.dom, 4))
        EXPECT_NEAR(eval_Cn(cfg, c.n, f, x), eval_Bn(c.dom, c.n, blended, x), 1e-11);
    }
  }
}

TEST(Operator, CellFormAgreesWithInnerIntegrals) {
  const auto cfg = OperatorConfig::canonical(Domain::interval(), 1.0);
  for (const Point& x : uniform_grid(Domain::interval(), 10))
    EXPECT_NEAR(eval_Cn_cells(cfg, 5, kink, x), eval_Cn(cfg, 5, kink, x), 1e-10);
  const Field g([](const Point& x) { return std::exp(x[0] - 2 * x[x.dim() - 1]) + std::abs(x[0] - 0.3); }, {{0, 0.3}});
  for (const auto& dom : {Domain::hypercube(2), Domain::simplex(2), Domain::simplex(3)})
    for (double a : {0.5, 2.0}) {
      const auto c = OperatorConfig::canonical(dom, a);
      const int n = dom.dim() == 3 ? 3 : 6;
      const CellEvaluator cells(c, n, dom.is_box() ? g : Field([](const Point& x) { return std::exp(x[0] - 2 * x[x.dim() - 1]); }));
      const KantorovichEvaluator inner(c, n, dom.is_box() ? g : Field([](const Point& x) { return std::exp(x[0] - 2 * x[x.dim() - 1]); }));
      for (const Point& x : uniform_grid(dom, 4)) EXPECT_NEAR(cells(x), inner(x), 1e-9) << dom.name();
    }
  EXPECT_THROW(CellEvaluator(OperatorConfig::canonical(Domain::interval(), 0.0), 2, id), config_error);
  EXPECT_THROW(CellEvaluator(OperatorConfig::canonical(Domain::interval(), 2.0, PowerOfBase{LebesgueMeasure{}, 2}), 2, id),
               config_error);
}

TEST(Operator, MarkovPropertyAndPositivity) {
  const Field one([](const Point&) { return 1.0; });
  const Field bump([](const Point& x) { return std::pow(std::abs(x[0] - 0.5), 3) * (x.sum() <= 0.7 ? 1.0 : 0.2); });
  for (const auto& dom : domains()) {
    std::vector<MeasureSeq> seqs = {ConstantLebesgue{}, PowerOfBase{LebesgueMeasure{}, 1},
                                    DiracShift{[&](int) { return vertices(dom).back(); }}};
    for (const auto& seq : seqs) {
      const auto cfg = OperatorConfig::canonical(dom, 1.0, seq);
      for (int n : {1, 4, 13}) {
        const KantorovichEvaluator e1(cfg, n, one), eb(cfg, n, bump);
        for (const Point& x : uniform_grid(dom, 5)) {
          EXPECT_NEAR(e1(x), 1.0, 1e-12);
          EXPECT_GE(eb(x), -1e-12);
        }
      }
    }
  }
}

TEST(Operator, ExplicitListUsesTheNthMeasure) {
  const auto I = Domain::interval();
  const auto cfg = OperatorConfig::canonical(
      I, 1.0, ExplicitList{{DiscreteMeasure::dirac(I, {0.0}), DiscreteMeasure::dirac(I, {1.0})}});
  // n = 2 picks the Dirac at 1: C_2(id)(0) = 1/3 * 1
  EXPECT_NEAR(eval_Cn(cfg, 2, id, {0.0}), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(eval_Cn(cfg, 1, id, {0.0}), 0.0, 1e-15);
  EXPECT_THROW(eval_Cn(cfg, 3, id, {0.0}), std::out_of_range);
}
