#include "essi/doe.hpp"
#include "essi/problems.hpp"

#include <gtest/gtest.h>

#include <Eigen/LU>

#include <numbers>
#include <random>

namespace essi {
namespace {

double ackley_reference(const Vector &x) {
  const double n = static_cast<double>(x.size());
  double s1 = 0.0, s2 = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    s1 += x[i] * x[i];
    s2 += std::cos(2.0 * std::numbers::pi * x[i]);
  }
  return -20.0 * std::exp(-0.2 * std::sqrt(s1 / n)) - std::exp(s2 / n) + 20.0 + std::exp(1.0);
}

TEST(Problems, RosenbrockIdentityMinimum) {
  const ProblemInstance p = make_problem("rosenbrock-d3-seed0");
  EXPECT_EQ(p.f_star(), 0.0);
  EXPECT_EQ(p.x_star(), Vector::Ones(3));
  EXPECT_EQ(p.box().lower(), Vector::Constant(3, -2.048));
  EXPECT_EQ(p.box().upper(), Vector::Constant(3, 2.048));
}

TEST(Problems, LevyIdentityMinimumByGridRefinement) {
  const ProblemInstance p = make_problem("levy-d5-seed0");
  EXPECT_NEAR(p.f_star(), 0.0, 1e-15);
  EXPECT_EQ(p.x_star(), Vector::Ones(5));
  // Coordinate-wise grid refinement from a nearby start converges to ones.
  Vector x = Vector::Constant(5, 1.3);
  for (double step = 0.1; step > 1e-7; step /= 10.0)
    for (int sweep = 0; sweep < 3; ++sweep)
      for (Eigen::Index j = 0; j < 5; ++j) {
        double best = p.evaluate(x), arg = x[j];
        for (int k = -20; k <= 20; ++k) {
          Vector y = x;
          y[j] = x[j] + k * step;
          if (p.evaluate(y) < best) {
            best = p.evaluate(y);
            arg = y[j];
          }
        }
        x[j] = arg;
      }
  EXPECT_LT((x - Vector::Ones(5)).cwiseAbs().maxCoeff(), 1e-5);
  EXPECT_LT(p.evaluate(x), 1e-9);
}

TEST(Problems, AckleyMatchesReferenceFormula) {
  const ProblemInstance p = make_problem("ackley-d4-seed0");
  const DesignMatrix pts = uniform_sample(200, p.box(), 3);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    const Vector x = pts.row(i).transpose();
    EXPECT_NEAR(p.evaluate(x), ackley_reference(x), 1e-12);
  }
  EXPECT_NEAR(p.f_star(), 0.0, 1e-12);
}

TEST(Problems, RotationIsOrthogonal) {
  for (Eigen::Index d : {1, 2, 5, 10}) {
    const Matrix q = random_rotation(d, 40 + d);
    EXPECT_LT((q.transpose() * q - Matrix::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(std::abs(q.determinant()), 1.0, 1e-12);
  }
}

TEST(Problems, SeededInstancesAreConsistent) {
  for (const auto &base : base_function_names())
    for (Seed seed : {Seed{0}, Seed{1}, Seed{17}}) {
      const ProblemInstance p = make_problem(base, 5, seed);
      SCOPED_TRACE(p.name());
      EXPECT_TRUE(p.box().contains(p.x_star()));
      EXPECT_EQ(p.evaluate(p.x_star()), p.f_star());
      EXPECT_NEAR(p.f_star(), 0.0, 1e-3);
      EXPECT_EQ(make_problem(p.name()).f_star(), p.f_star());
      EXPECT_EQ(make_problem(p.name()).x_star(), p.x_star());
      const auto [f_star, x_star] = global_minimum(p);
      EXPECT_EQ(f_star, p.f_star());
      if (seed != 0) {
        const Vector u = p.box().to_unit(p.x_star());
        EXPECT_TRUE((u.array() >= 0.1).all() && (u.array() <= 0.9).all());
      }
    }
}

TEST(Problems, MinimalityUnderSmallPerturbations) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  for (const auto &base : base_function_names())
    for (Seed seed : {Seed{0}, Seed{3}}) {
      const ProblemInstance p = make_problem(base, 4, seed);
      SCOPED_TRACE(p.name());
      const double radius = 0.01 * p.box().width().maxCoeff();
      for (int i = 0; i < 1000; ++i) {
        Vector dir(4);
        for (auto &v : dir) v = normal(rng);
        const Vector x = p.box().clamp(p.x_star() + dir.normalized() * radius * unit(rng));
        EXPECT_GE(p.evaluate(x), p.f_star() - 1e-9);
      }
    }
}

TEST(Problems, DifferentSeedsMoveTheOptimum) {
  const ProblemInstance a = make_problem("sphere-d3-seed1");
  const ProblemInstance b = make_problem("sphere-d3-seed2");
  EXPECT_NE(a.x_star(), b.x_star());
  EXPECT_EQ(a.x_star(), make_problem("sphere-d3-seed1").x_star());
}

TEST(Problems, RejectsBadInput) {
  EXPECT_THROW(make_problem("sphere-5"), std::invalid_argument);
  EXPECT_THROW(make_problem("banana-d2-seed1"), std::invalid_argument);
  const ProblemInstance p = make_problem("sphere-d2-seed0");
  EXPECT_THROW(p.evaluate(Vector::Constant(2, 6.0)), std::invalid_argument);
  EXPECT_THROW(p.evaluate(Vector::Zero(3)), std::invalid_argument);
  try {
    make_problem("banana-d2-seed1");
  } catch (const std::invalid_argument &e) {
    EXPECT_NE(std::string(e.what()).find("rosenbrock"), std::string::npos);
  }
}

}  // namespace
}  // namespace essi
