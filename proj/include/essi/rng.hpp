#pragma once

#include "essi/types.hpp"

#include <initializer_list>
#include <random>

namespace essi {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
Seed mix_seed(Seed x);

/// Derives an independent stream seed from a parent seed and a path of
/// integer keys, e.g. derive_seed(run_seed, {iteration, task}).
Seed derive_seed(Seed parent, std::initializer_list<std::uint64_t> path);

/// Stream tags so that different consumers in one iteration never collide.
enum class Stream : std::uint64_t {
  design = 0x64657369676eULL,
  fit = 0x666974ULL,
  acquisition = 0x61637175ULL,
  subspace = 0x73756273ULL,
  jitter = 0x6a6974ULL,
  random_search = 0x72616e64ULL,
};

inline std::uint64_t tag(Stream s) { return static_cast<std::uint64_t>(s); }

inline Rng make_rng(Seed seed) { return Rng(mix_seed(seed)); }

}  // namespace essi
