#include "essi/doe.hpp"

#include <gtest/gtest.h>

#include <set>

namespace essi {
namespace {

TEST(LatinHypercube, FourPointsFillFourStrata) {
  const DesignMatrix x = latin_hypercube(4, Box::uniform(1, 0.0, 1.0), 7);
  std::set<int> strata;
  for (Eigen::Index i = 0; i < 4; ++i) strata.insert(static_cast<int>(x(i, 0) * 4.0));
  EXPECT_EQ(strata, (std::set<int>{0, 1, 2, 3}));
}

TEST(LatinHypercube, EachProjectionStratified) {
  const Box box(Vector::LinSpaced(3, -2.0, 0.0), Vector::LinSpaced(3, 1.0, 5.0));
  const Eigen::Index n = 50;
  const DesignMatrix x = latin_hypercube(n, box, 123);
  ASSERT_EQ(x.rows(), n);
  ASSERT_EQ(x.cols(), 3);
  for (Eigen::Index j = 0; j < 3; ++j) {
    std::set<Eigen::Index> bins;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = (x(i, j) - box.lower(j)) / (box.upper(j) - box.lower(j));
      EXPECT_GE(u, 0.0);
      EXPECT_LE(u, 1.0);
      bins.insert(std::min<Eigen::Index>(static_cast<Eigen::Index>(u * n), n - 1));
    }
    EXPECT_EQ(static_cast<Eigen::Index>(bins.size()), n) << "dimension " << j;
  }
}

TEST(LatinHypercube, DeterministicPerSeed) {
  const Box box = Box::uniform(4, -1.0, 1.0);
  EXPECT_EQ(latin_hypercube(16, box, 9), latin_hypercube(16, box, 9));
  EXPECT_NE(latin_hypercube(16, box, 9), latin_hypercube(16, box, 10));
}

TEST(LatinHypercube, RejectsEmptyDesign) {
  EXPECT_THROW(latin_hypercube(0, Box::uniform(2, 0.0, 1.0), 1), std::invalid_argument);
}

TEST(UniformSample, InsideBoxAndDeterministic) {
  const Box box(Vector::Constant(2, -3.0), Vector::Constant(2, 2.0));
  const DesignMatrix x = uniform_sample(500, box, 4);
  for (Eigen::Index i = 0; i < x.rows(); ++i) EXPECT_TRUE(box.contains(x.row(i).transpose()));
  EXPECT_EQ(x, uniform_sample(500, box, 4));
  EXPECT_NEAR(x.col(0).mean(), -0.5, 0.25);
}

}  // namespace
}  // namespace essi
