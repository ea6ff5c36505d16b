#include "essi/subspace.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include <map>
#include <set>

namespace essi {
namespace {

double chi_square_p(const std::vector<double> &observed, const std::vector<double> &expected) {
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i)
    stat += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
  const boost::math::chi_squared dist(static_cast<double>(observed.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

TEST(Subspace, ValidatesIndices) {
  EXPECT_NO_THROW(Subspace({0, 2}, 3));
  EXPECT_THROW(Subspace({}, 3), std::invalid_argument);
  EXPECT_THROW(Subspace({2, 0}, 3), std::invalid_argument);
  EXPECT_THROW(Subspace({1, 1}, 3), std::invalid_argument);
  EXPECT_THROW(Subspace({3}, 3), std::invalid_argument);
  EXPECT_TRUE(Subspace::full(4).is_full());
}

TEST(DrawSubspace, OneDimensionalAlwaysFull) {
  Rng rng = make_rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(draw_subspace(1, {}, rng).indices(), std::vector<Eigen::Index>{0});
}

TEST(DrawSubspace, SortedDistinctInRange) {
  Rng rng = make_rng(2);
  for (int i = 0; i < 2000; ++i) {
    const Subspace s = draw_subspace(7, {}, rng);
    ASSERT_GE(s.size(), 1);
    for (std::size_t j = 0; j < s.indices().size(); ++j) {
      EXPECT_LT(s.indices()[j], 7);
      if (j > 0) {
        EXPECT_LT(s.indices()[j - 1], s.indices()[j]);
      }
    }
  }
}

TEST(DrawSubspace, SizeUniformOverOneToD) {
  Rng rng = make_rng(3);
  const int draws = 100000;
  std::vector<double> counts(5, 0.0);
  double total_size = 0.0;
  for (int i = 0; i < draws; ++i) {
    const auto s = draw_subspace(5, {}, rng).size();
    counts[static_cast<std::size_t>(s - 1)] += 1.0;
    total_size += static_cast<double>(s);
  }
  EXPECT_GT(chi_square_p(counts, std::vector<double>(5, draws / 5.0)), 0.001);
  EXPECT_NEAR(total_size / draws, 3.0, 0.02);
}

TEST(DrawSubspace, UniformWithinSizeClass) {
  Rng rng = make_rng(4);
  std::map<std::size_t, std::map<std::vector<Eigen::Index>, double>> by_size;
  for (int i = 0; i < 100000; ++i) {
    const Subspace s = draw_subspace(4, {}, rng);
    by_size[s.indices().size()][s.indices()] += 1.0;
  }
  const std::map<std::size_t, std::size_t> subsets{{1, 4}, {2, 6}, {3, 4}, {4, 1}};
  for (const auto &[size, counts] : by_size) {
    ASSERT_EQ(counts.size(), subsets.at(size));
    if (counts.size() < 2) continue;
    std::vector<double> observed;
    double total = 0.0;
    for (const auto &[indices, c] : counts) {
      observed.push_back(c);
      total += c;
    }
    EXPECT_GT(chi_square_p(observed, std::vector<double>(observed.size(), total / observed.size())), 0.001)
        << "size " << size;
  }
}

TEST(DrawSubspace, FixedAndFullModes) {
  Rng rng = make_rng(5);
  SubspaceStrategy fixed{SubspaceStrategy::Mode::fixed_dimension, 2};
  SubspaceStrategy full{SubspaceStrategy::Mode::full_space};
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(draw_subspace(6, fixed, rng).size(), 2);
    EXPECT_TRUE(draw_subspace(6, full, rng).is_full());
  }
  EXPECT_THROW(draw_subspace(3, SubspaceStrategy{SubspaceStrategy::Mode::fixed_dimension, 4}, rng),
               std::invalid_argument);
}

TEST(DrawBatch, PigeonholeWithDedup) {
  const auto batch = draw_batch(2, 3, {.dedup = true}, 6);
  std::set<std::vector<Eigen::Index>> got;
  for (const auto &s : batch) got.insert(s.indices());
  EXPECT_EQ(got, (std::set<std::vector<Eigen::Index>>{{0}, {1}, {0, 1}}));
}

TEST(DrawBatch, DedupLargeBatchDistinct) {
  const auto batch = draw_batch(10, 128, {.dedup = true}, 7);
  ASSERT_EQ(batch.size(), 128u);
  std::set<std::vector<Eigen::Index>> got;
  for (const auto &s : batch) got.insert(s.indices());
  EXPECT_EQ(got.size(), 128u);
}

TEST(DrawBatch, DedupBeyondAvailableRejected) {
  EXPECT_THROW(draw_batch(2, 4, {.dedup = true}, 8), std::invalid_argument);
}

TEST(DrawBatch, ReproduciblePerSeedAndAllowsDuplicates) {
  const auto a = draw_batch(3, 6, {}, 9);
  EXPECT_EQ(a, draw_batch(3, 6, {}, 9));
  bool any_duplicate = false;
  for (Seed s = 0; s < 20 && !any_duplicate; ++s) {
    const auto b = draw_batch(3, 6, {}, s);
    for (std::size_t i = 0; i < b.size(); ++i)
      for (std::size_t j = 0; j < i; ++j) any_duplicate |= b[i] == b[j];
  }
  EXPECT_TRUE(any_duplicate);
}

TEST(CountSubspaces, PowersOfTwoMinusOne) {
  EXPECT_EQ(count_subspaces(1).value, 1u);
  EXPECT_EQ(count_subspaces(10).value, 1023u);
  EXPECT_EQ(count_subspaces(20).value, 1048575u);
  EXPECT_EQ(count_subspaces(64).value, UINT64_MAX);
  EXPECT_FALSE(count_subspaces(64).saturated);
  EXPECT_TRUE(count_subspaces(65).saturated);
}

}  // namespace
}  // namespace essi
