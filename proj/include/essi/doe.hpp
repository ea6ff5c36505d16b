#pragma once

#include "essi/rng.hpp"
#include "essi/types.hpp"

namespace essi {

/// Latin hypercube design of n points in box: every coordinate places
/// exactly one point in each of n equal-width strata. Columns are paired by
/// independent random permutations and each point is placed uniformly inside
/// its stratum.
DesignMatrix latin_hypercube(Eigen::Index n, const Box &box, Seed seed);

/// n i.i.d. uniform points in box.
DesignMatrix uniform_sample(Eigen::Index n, const Box &box, Seed seed);

}  // namespace essi
