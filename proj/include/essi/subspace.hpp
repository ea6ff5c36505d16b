#pragma once

#include "essi/rng.hpp"
#include "essi/types.hpp"

#include <cstdint>
#include <vector>

namespace essi {

/// Axis-aligned subspace: strictly increasing coordinate indices in [0, d).
class Subspace {
 public:
  Subspace() = default;
  /// Validates and keeps `indices`; throws std::invalid_argument unless they
  /// are strictly increasing, nonempty and below d.
  Subspace(std::vector<Eigen::Index> indices, Eigen::Index d);

  static Subspace full(Eigen::Index d);

  const std::vector<Eigen::Index> &indices() const { return indices_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(indices_.size()); }
  Eigen::Index ambient_dim() const { return ambient_dim_; }
  bool is_full() const { return size() == ambient_dim_; }

  friend bool operator==(const Subspace &a, const Subspace &b) = default;
  friend auto operator<=>(const Subspace &a, const Subspace &b) = default;

 private:
  std::vector<Eigen::Index> indices_;
  Eigen::Index ambient_dim_ = 0;
};

struct SubspaceStrategy {
  enum class Mode { random_dimension, fixed_dimension, full_space };
  Mode mode = Mode::random_dimension;
  /// Subspace size for fixed_dimension mode.
  Eigen::Index fixed_dim = 1;
  bool dedup = false;

  void validate(Eigen::Index d) const;
};

/// Random-dimension mode: s uniform on {1..d}, then an s-subset uniform among
/// all s-subsets (partial Fisher-Yates shuffle, sorted).
Subspace draw_subspace(Eigen::Index d, const SubspaceStrategy &strategy, Rng &rng);
Subspace draw_subspace(Eigen::Index d, const SubspaceStrategy &strategy, Seed seed);

/// q subspaces from one seeded stream. With dedup, rejection sampling yields
/// q distinct subspaces; throws when q exceeds the number available or after
/// 1000*q attempts.
std::vector<Subspace> draw_batch(Eigen::Index d, std::size_t q, const SubspaceStrategy &strategy, Seed seed);

struct SubspaceCount {
  std::uint64_t value = 0;
  /// Set when 2^d - 1 does not fit in 64 bits; value is then UINT64_MAX.
  bool saturated = false;
};

/// Number of nonempty axis-aligned subspaces, 2^d - 1.
SubspaceCount count_subspaces(Eigen::Index d);

}  // namespace essi
