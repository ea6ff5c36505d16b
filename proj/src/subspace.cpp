#include "essi/subspace.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace essi {

Subspace::Subspace(std::vector<Eigen::Index> indices, Eigen::Index d)
    : indices_(std::move(indices)), ambient_dim_(d) {
  if (indices_.empty()) throw std::invalid_argument("Subspace: needs at least one coordinate");
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i] < 0 || indices_[i] >= d) throw std::invalid_argument("Subspace: coordinate index out of range");
    if (i > 0 && indices_[i] <= indices_[i - 1])
      throw std::invalid_argument("Subspace: indices must be strictly increasing");
  }
}

Subspace Subspace::full(Eigen::Index d) {
  std::vector<Eigen::Index> all(static_cast<std::size_t>(d));
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  return Subspace(std::move(all), d);
}

void SubspaceStrategy::validate(Eigen::Index d) const {
  if (d < 1) throw std::invalid_argument("SubspaceStrategy: dimension must be at least 1");
  if (mode == Mode::fixed_dimension && (fixed_dim < 1 || fixed_dim > d))
    throw std::invalid_argument("SubspaceStrategy: fixed subspace size must lie in [1, d]");
}

Subspace draw_subspace(Eigen::Index d, const SubspaceStrategy &strategy, Rng &rng) {
  strategy.validate(d);
  Eigen::Index s = d;
  switch (strategy.mode) {
    case SubspaceStrategy::Mode::random_dimension:
      s = std::uniform_int_distribution<Eigen::Index>(1, d)(rng);
      break;
    case SubspaceStrategy::Mode::fixed_dimension:
      s = strategy.fixed_dim;
      break;
    case SubspaceStrategy::Mode::full_space:
      return Subspace::full(d);
  }
  std::vector<Eigen::Index> pool(static_cast<std::size_t>(d));
  std::iota(pool.begin(), pool.end(), Eigen::Index{0});
  for (Eigen::Index i = 0; i < s; ++i) {
    const auto j = std::uniform_int_distribution<Eigen::Index>(i, d - 1)(rng);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(s));
  std::sort(pool.begin(), pool.end());
  return Subspace(std::move(pool), d);
}

Subspace draw_subspace(Eigen::Index d, const SubspaceStrategy &strategy, Seed seed) {
  Rng rng = make_rng(seed);
  return draw_subspace(d, strategy, rng);
}

SubspaceCount count_subspaces(Eigen::Index d) {
  if (d < 1) throw std::invalid_argument("count_subspaces: dimension must be at least 1");
  if (d > 64) return {std::numeric_limits<std::uint64_t>::max(), true};
  if (d == 64) return {std::numeric_limits<std::uint64_t>::max(), false};
  return {(std::uint64_t{1} << d) - 1, false};
}

namespace {

/// Number of distinct subspaces the strategy can produce, saturating.
std::uint64_t reachable(Eigen::Index d, const SubspaceStrategy &strategy) {
  switch (strategy.mode) {
    case SubspaceStrategy::Mode::full_space:
      return 1;
    case SubspaceStrategy::Mode::fixed_dimension: {
      // C(d, s), saturating at UINT64_MAX.
      std::uint64_t c = 1;
      const Eigen::Index s = std::min(strategy.fixed_dim, d - strategy.fixed_dim);
      for (Eigen::Index i = 1; i <= s; ++i) {
        const auto num = static_cast<std::uint64_t>(d - s + i);
        if (c > std::numeric_limits<std::uint64_t>::max() / num) return std::numeric_limits<std::uint64_t>::max();
        c = c * num / static_cast<std::uint64_t>(i);
      }
      return c;
    }
    case SubspaceStrategy::Mode::random_dimension:
      break;
  }
  return count_subspaces(d).value;
}

}  // namespace

std::vector<Subspace> draw_batch(Eigen::Index d, std::size_t q, const SubspaceStrategy &strategy, Seed seed) {
  strategy.validate(d);
  if (strategy.dedup && q > reachable(d, strategy)) {
    std::ostringstream msg;
    msg << "draw_batch: cannot draw " << q << " distinct subspaces; at most " << reachable(d, strategy)
        << " exist (2^d - 1 = " << count_subspaces(d).value << " for d = " << d << ")";
    throw std::invalid_argument(msg.str());
  }
  Rng rng = make_rng(seed);
  std::vector<Subspace> batch;
  batch.reserve(q);
  if (!strategy.dedup) {
    for (std::size_t i = 0; i < q; ++i) batch.push_back(draw_subspace(d, strategy, rng));
    return batch;
  }
  std::set<Subspace> seen;
  const std::size_t cap = 1000 * q;
  std::size_t attempts = 0;
  while (batch.size() < q) {
    if (attempts++ >= cap) {
      std::ostringstream msg;
      msg << "draw_batch: gave up after " << cap << " attempts drawing " << q << " distinct subspaces";
      throw std::runtime_error(msg.str());
    }
    Subspace s = draw_subspace(d, strategy, rng);
    if (seen.insert(s).second) batch.push_back(std::move(s));
  }
  return batch;
}

}  // namespace essi
