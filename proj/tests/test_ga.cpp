#include "essi/ga.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

namespace essi {
namespace {

TEST(Sbx, EqualParentsGiveEqualChildren) {
  const Box box = Box::uniform(3, -1.0, 1.0);
  const Vector p = (Vector(3) << 0.1, -0.4, 0.9).finished();
  const auto [c1, c2] = sbx_crossover(p, p, 20.0, box, Seed{1}, 1.0);
  EXPECT_EQ(c1, p);
  EXPECT_EQ(c2, p);
}

TEST(Sbx, PairPreservesMean) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double p1 = 10.0 * unit(rng) - 5.0;
    const double p2 = 10.0 * unit(rng) - 5.0;
    for (double eta : {2.0, 20.0}) {
      const auto [c1, c2] = detail::sbx_pair(p1, p2, detail::sbx_beta(unit(rng), eta));
      EXPECT_NEAR(c1 + c2, p1 + p2, 1e-12);
    }
  }
}

TEST(Sbx, LargerEtaGivesCloserChildren) {
  const Box box = Box::uniform(1, -100.0, 100.0);
  auto spread = [&](double eta) {
    Rng rng = make_rng(3);
    double total = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const Vector p1 = Vector::Constant(1, -1.0);
      const Vector p2 = Vector::Constant(1, 1.0);
      const auto [c1, c2] = sbx_crossover(p1, p2, eta, box, rng, 1.0);
      for (double c : {c1[0], c2[0]}) total += std::min(std::abs(c - p1[0]), std::abs(c - p2[0]));
    }
    return total / 20000.0;
  };
  EXPECT_LT(spread(20.0), spread(2.0));
}

TEST(Sbx, ChildrenStayInBox) {
  const Box box = Box::uniform(4, 0.0, 1.0);
  Rng rng = make_rng(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    Vector p1(4), p2(4);
    for (Eigen::Index j = 0; j < 4; ++j) {
      p1[j] = unit(rng);
      p2[j] = unit(rng);
    }
    const auto [c1, c2] = sbx_crossover(p1, p2, 2.0, box, rng);
    EXPECT_TRUE(box.contains(c1));
    EXPECT_TRUE(box.contains(c2));
  }
}

TEST(PolynomialMutation, ZeroRateIsIdentity) {
  const Box box = Box::uniform(3, 0.0, 1.0);
  const Vector x = (Vector(3) << 0.2, 0.5, 0.8).finished();
  EXPECT_EQ(polynomial_mutation(x, 20.0, 0.0, box, Seed{5}), x);
}

TEST(PolynomialMutation, StaysInBox) {
  const Box box = Box::uniform(2, -1.0, 3.0);
  Rng rng = make_rng(6);
  for (int i = 0; i < 5000; ++i) {
    const Vector x = (Vector(2) << -1.0, 2.99).finished();
    EXPECT_TRUE(box.contains(polynomial_mutation(x, 2.0, 1.0, box, rng)));
  }
}

TEST(PolynomialMutation, CenterDensityMatchesTruncatedPolynomial) {
  // At the centre of [0,1] the perturbation delta = y - 0.5 follows the
  // density 0.5 (eta+1)(1-|delta|)^eta restricted to [-0.5, 0.5].
  const double eta = 20.0;
  const double a = std::pow(0.5, eta + 1.0);
  auto cdf = [&](double delta) {
    if (delta <= 0.0) return 0.5 * (std::pow(1.0 + delta, eta + 1.0) - a) / (1.0 - a);
    return 1.0 - 0.5 * (std::pow(1.0 - delta, eta + 1.0) - a) / (1.0 - a);
  };
  const Box box = Box::uniform(1, 0.0, 1.0);
  Rng rng = make_rng(7);
  const std::size_t n = 100000;
  std::vector<double> deltas(n);
  for (auto &d : deltas) d = polynomial_mutation(Vector::Constant(1, 0.5), eta, 1.0, box, rng)[0] - 0.5;
  std::sort(deltas.begin(), deltas.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = cdf(deltas[i]);
    ks = std::max({ks, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  EXPECT_GT(oracle::ks_p_value(ks, n), 0.001);
}

TEST(Maximize, FindsQuadraticPeak) {
  const Box box = Box::uniform(1, 0.0, 1.0);
  int hits = 0;
  for (Seed s = 0; s < 100; ++s) {
    GAConfig config = GAConfig::defaults_for(1, s);
    config.population = 20;
    config.generations = 100;
    const GAResult r = maximize([](const Vector &x) { return -(x[0] - 0.3) * (x[0] - 0.3); }, box, config);
    if (std::abs(r.best_x[0] - 0.3) < 0.01) ++hits;
  }
  EXPECT_GE(hits, 95);
}

TEST(Maximize, BudgetElitismAndFeasibility) {
  const Box box = Box::uniform(3, -2.0, 2.0);
  GAConfig config = GAConfig::defaults_for(3, 8);
  config.generations = 40;
  std::size_t calls = 0;
  bool feasible = true;
  const GAResult r = maximize(
      [&](const Vector &x) {
        ++calls;
        feasible &= box.contains(x);
        return -x.squaredNorm() + std::cos(5.0 * x[0]);
      },
      box, config);
  EXPECT_EQ(calls, static_cast<std::size_t>(config.population * (config.generations + 1)));
  EXPECT_EQ(r.evaluations, calls);
  EXPECT_TRUE(feasible);
  ASSERT_EQ(r.generation_best.size(), static_cast<std::size_t>(config.generations + 1));
  for (std::size_t g = 1; g < r.generation_best.size(); ++g) EXPECT_GE(r.generation_best[g], r.generation_best[g - 1]);
  EXPECT_EQ(r.best_value, -r.best_x.squaredNorm() + std::cos(5.0 * r.best_x[0]));
}

TEST(Maximize, ConstantObjective) {
  const Box box = Box::uniform(2, 0.0, 1.0);
  const GAResult r = maximize([](const Vector &) { return 4.0; }, box, GAConfig::defaults_for(2, 9));
  EXPECT_EQ(r.best_value, 4.0);
  EXPECT_TRUE(box.contains(r.best_x));
}

TEST(Maximize, NonFiniteValuesRankLast) {
  const Box box = Box::uniform(1, -1.0, 1.0);
  const GAResult r = maximize(
      [](const Vector &x) { return x[0] > 0.0 ? std::numeric_limits<double>::quiet_NaN() : x[0]; }, box,
      GAConfig::defaults_for(1, 10));
  EXPECT_LE(r.best_x[0], 0.0);
  EXPECT_GT(r.best_value, -0.05);
}

TEST(Maximize, DeterministicPerSeed) {
  const Box box = Box::uniform(2, -1.0, 1.0);
  auto f = [](const Vector &x) { return std::sin(3.0 * x[0]) * std::cos(2.0 * x[1]); };
  const GAResult a = maximize(f, box, GAConfig::defaults_for(2, 11));
  const GAResult b = maximize(f, box, GAConfig::defaults_for(2, 11));
  EXPECT_EQ(a.best_x, b.best_x);
  EXPECT_EQ(a.generation_best, b.generation_best);
}

TEST(GAConfig, ValidatesSettings) {
  GAConfig c = GAConfig::defaults_for(3, 0);
  EXPECT_EQ(c.population, 30);
  EXPECT_NEAR(c.effective_mutation_rate(3), 1.0 / 3.0, 1e-15);
  c.population = 1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace essi
