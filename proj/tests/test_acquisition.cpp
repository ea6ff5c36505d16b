#include "essi/acquisition.hpp"
#include "essi/doe.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

namespace essi {
namespace {

std::shared_ptr<const GaussianProcessModel> random_model(Eigen::Index d, Eigen::Index n, Seed seed, const Box &box) {
  const DesignMatrix x = latin_hypercube(n, box, seed);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = (x.row(i).array() * (1.0 + static_cast<double>(i % 3))).sin().sum();
  KernelParams k;
  k.signal_variance = 1.5;
  k.lengthscales = box.width() * 0.3;
  k.nugget = 1.5e-10;
  (void)d;
  return std::make_shared<const GaussianProcessModel>(GaussianProcessModel::condition(x, y, y.mean(), k, box));
}

TEST(NormalFunctions, MatchReference) {
  for (double u = -8.0; u <= 8.0; u += 0.25) {
    EXPECT_NEAR(normal_pdf(u), oracle::phi(u), 1e-15);
    EXPECT_NEAR(normal_cdf(u), oracle::Phi(u), 1e-15);
  }
}

TEST(ExpectedImprovement, SymmetricCase) {
  EXPECT_NEAR(expected_improvement(2.0, 1.0, 2.0), 0.398942, 1e-6);
}

TEST(ExpectedImprovement, ZeroSigmaFallback) {
  EXPECT_EQ(expected_improvement(3.0, 0.0, 2.0), 0.0);
  EXPECT_EQ(expected_improvement(1.5, 0.0, 2.0), 0.5);
  EXPECT_EQ(expected_improvement(1.5, 1e-13, 2.0), 0.5);
}

TEST(ExpectedImprovement, MatchesMonteCarlo) {
  const double mu = 1.0, sigma = 2.0, f_min = 2.0;
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal(mu, sigma);
  const int draws = 10'000'000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double imp = std::max(f_min - normal(rng), 0.0);
    sum += imp;
    sum2 += imp * imp;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sum2 / draws - mean * mean) / draws);
  EXPECT_LT(std::abs(expected_improvement(mu, sigma, f_min) - mean), 3.0 * se);
}

TEST(ExpectedImprovement, MonotoneInMeanAndSigma) {
  for (double sigma : {0.1, 1.0, 3.0}) {
    double prev = std::numeric_limits<double>::infinity();
    for (double mu = -3.0; mu <= 3.0; mu += 0.05) {
      const double ei = expected_improvement(mu, sigma, 0.0);
      EXPECT_LT(ei, prev);
      prev = ei;
    }
  }
  for (double mu : {-2.0, -0.5, -0.01}) {
    // Strict growth can be below one ulp while sigma << |mu|.
    double prev = -1.0;
    for (double sigma = 0.01; sigma <= 5.0; sigma += 0.05) {
      const double ei = expected_improvement(mu, sigma, 0.0);
      EXPECT_GE(ei, prev);
      if (sigma > 0.2 * std::abs(mu)) {
        EXPECT_GT(ei, prev);
      }
      prev = ei;
    }
  }
}

TEST(ExpectedImprovement, VanishesAtTrainingPoints) {
  const Box box = Box::uniform(2, 0.0, 1.0);
  const auto model = random_model(2, 10, 3, box);
  const double f_min = model->training_values().minCoeff();
  for (Eigen::Index i = 0; i < model->size(); ++i)
    EXPECT_NEAR(expected_improvement(*model, f_min, model->training_inputs().row(i).transpose()), 0.0, 1e-5);
}

TEST(Embed, ReplacesSubspaceCoordinates) {
  const Incumbent inc{(Vector(3) << 1.0, 2.0, 3.0).finished(), 0.0};
  const Vector y = (Vector(2) << 7.0, 9.0).finished();
  const Vector z = embed(inc, Subspace({0, 2}, 3), y);
  EXPECT_EQ(z, (Vector(3) << 7.0, 2.0, 9.0).finished());
  EXPECT_EQ(embed(inc, Subspace::full(3), inc.x_min), inc.x_min);
  EXPECT_EQ(embed(inc, Subspace({1}, 3), Vector::Constant(1, 2.0)), inc.x_min);
}

TEST(Essi, FullSubspaceEqualsExpectedImprovement) {
  for (Eigen::Index d : {2, 5}) {
    const Box box = Box::uniform(d, -1.0, 2.0);
    const auto model = random_model(d, 15, 40 + d, box);
    const ObservationSet data(model->training_inputs(), model->training_values());
    const auto spec = AcquisitionSpec::make(model, data.incumbent(), Subspace::full(d), box);
    const DesignMatrix pts = uniform_sample(100, box, 9);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      const Vector p = pts.row(i).transpose();
      EXPECT_NEAR(essi(spec, p), expected_improvement(*model, data.incumbent().f_min, p), 1e-12);
    }
  }
}

TEST(Essi, ZeroAtIncumbentCoordinates) {
  const Box box = Box::uniform(3, 0.0, 1.0);
  const auto model = random_model(3, 12, 7, box);
  const ObservationSet data(model->training_inputs(), model->training_values());
  const Subspace sub({0, 2}, 3);
  const auto spec = AcquisitionSpec::make(model, data.incumbent(), sub, box);
  const Vector y = (Vector(2) << data.incumbent().x_min[0], data.incumbent().x_min[2]).finished();
  EXPECT_NEAR(essi(spec, y), 0.0, 1e-5);
}

TEST(Essi, SliceGridEqualsExpectedImprovementAlongSlice) {
  const Box box = Box::uniform(2, 0.0, 1.0);
  const auto model = random_model(2, 10, 8, box);
  const ObservationSet data(model->training_inputs(), model->training_values());
  const Incumbent inc = data.incumbent();
  const auto spec = AcquisitionSpec::make(model, inc, Subspace({0}, 2), box);
  EXPECT_EQ(spec.box.dim(), 1);
  for (int i = 0; i <= 100; ++i) {
    const double t = i / 100.0;
    const Vector z = (Vector(2) << t, inc.x_min[1]).finished();
    EXPECT_NEAR(essi(spec, Vector::Constant(1, t)), expected_improvement(*model, inc.f_min, z), 1e-12);
  }
}

TEST(Essi, NonnegativeEverywhere) {
  const Box box = Box::uniform(4, -2.0, 2.0);
  const auto model = random_model(4, 20, 13, box);
  const ObservationSet data(model->training_inputs(), model->training_values());
  const auto spec = AcquisitionSpec::make(model, data.incumbent(), Subspace({1, 3}, 4), box);
  const DesignMatrix pts = uniform_sample(500, spec.box, 14);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) EXPECT_GE(essi(spec, pts.row(i).transpose()), 0.0);
}

TEST(Essi, DependsOnlyThroughEmbedding) {
  const Box box = Box::uniform(3, 0.0, 1.0);
  const auto model = random_model(3, 12, 15, box);
  const Incumbent a{(Vector(3) << 0.2, 0.6, 0.6).finished(), 0.0};
  const Incumbent b{(Vector(3) << 0.9, 0.6, 0.6).finished(), 0.0};
  const auto sa = AcquisitionSpec::make(model, a, Subspace({0}, 3), box);
  const auto sb = AcquisitionSpec::make(model, b, Subspace({0}, 3), box);
  for (double t : {0.0, 0.3, 0.77})
    EXPECT_EQ(essi(sa, Vector::Constant(1, t)), essi(sb, Vector::Constant(1, t)));
}

TEST(Essi, RejectsPointsOutsideSubspaceBox) {
  const Box box = Box::uniform(2, 0.0, 1.0);
  const auto model = random_model(2, 6, 16, box);
  const ObservationSet data(model->training_inputs(), model->training_values());
  const auto spec = AcquisitionSpec::make(model, data.incumbent(), Subspace({1}, 2), box);
  EXPECT_THROW(essi(spec, Vector::Constant(1, 1.5)), std::invalid_argument);
}

}  // namespace
}  // namespace essi
