#include "essi/doe.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace essi {

namespace {

void require_count(Eigen::Index n, const char *who) {
  if (n < 1) throw std::invalid_argument(std::string(who) + ": sample count must be at least 1");
}

}  // namespace

DesignMatrix latin_hypercube(Eigen::Index n, const Box &box, Seed seed) {
  require_count(n, "latin_hypercube");
  const Eigen::Index d = box.dim();
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  DesignMatrix design(n, d);
  std::vector<Eigen::Index> strata(static_cast<std::size_t>(n));
  const double inv_n = 1.0 / static_cast<double>(n);
  for (Eigen::Index j = 0; j < d; ++j) {
    std::iota(strata.begin(), strata.end(), Eigen::Index{0});
    std::shuffle(strata.begin(), strata.end(), rng);
    const double lo = box.lower(j);
    const double width = box.upper(j) - lo;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = (static_cast<double>(strata[static_cast<std::size_t>(i)]) + unit(rng)) * inv_n;
      // u < 1 always, but lo + u * width can round up to the bound.
      design(i, j) = std::min(lo + u * width, box.upper(j));
    }
  }
  return design;
}

DesignMatrix uniform_sample(Eigen::Index n, const Box &box, Seed seed) {
  require_count(n, "uniform_sample");
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DesignMatrix design(n, box.dim());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < box.dim(); ++j)
      design(i, j) = std::min(box.lower(j) + unit(rng) * (box.upper(j) - box.lower(j)), box.upper(j));
  return design;
}

}  // namespace essi
