#pragma once

#include "essi/rng.hpp"
#include "essi/types.hpp"

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace essi {

/// Real-coded GA settings. A mutation_rate <= 0 means "1/k", k being the
/// dimension of the box being searched.
struct GAConfig {
  int population = 20;
  int generations = 100;
  double crossover_rate = 0.9;
  double mutation_rate = 0.0;
  double eta_crossover = 20.0;
  double eta_mutation = 20.0;
  Seed seed = 0;
  bool lhs_init = false;
  /// Objective evaluations inside one generation may run on this many
  /// threads; only meaningful for thread-compatible objectives.
  std::size_t workers = 1;

  /// pc = 0.9, pm = 1/dim, eta = 20, population 10*dim (rounded up to an
  /// even number), 100 generations.
  static GAConfig defaults_for(Eigen::Index dim, Seed seed);

  void validate() const;
  double effective_mutation_rate(Eigen::Index dim) const {
    return mutation_rate > 0.0 ? mutation_rate : 1.0 / static_cast<double>(dim);
  }
};

using Objective = std::function<double(const Vector &)>;

struct GAResult {
  Vector best_x;
  double best_value = 0.0;
  std::size_t evaluations = 0;
  /// Best fitness after initialization and after each generation.
  std::vector<double> generation_best;
};

/// Simulated binary crossover, applied per variable with probability
/// `variable_probability`; children are clipped to box.
std::pair<Vector, Vector> sbx_crossover(const Vector &p1, const Vector &p2, double eta, const Box &box,
                                        Rng &rng, double variable_probability = 0.5);
std::pair<Vector, Vector> sbx_crossover(const Vector &p1, const Vector &p2, double eta, const Box &box,
                                        Seed seed, double variable_probability = 0.5);

/// Bounded polynomial mutation: each variable is perturbed with probability
/// `rate`; the perturbation never leaves the box.
Vector polynomial_mutation(const Vector &x, double eta, double rate, const Box &box, Rng &rng);
Vector polynomial_mutation(const Vector &x, double eta, double rate, const Box &box, Seed seed);

/// Elitist (mu + lambda) GA maximizing `objective` over box. Binary
/// tournament selection, SBX, polynomial mutation. The objective is called
/// exactly population * (generations + 1) times. Non-finite objective values
/// rank below every finite one. `initial` individuals (clamped into box)
/// replace the first members of the random initial population.
GAResult maximize(const Objective &objective, const Box &box, const GAConfig &config,
                  std::span<const Vector> initial = {});

namespace detail {

/// SBX spread factor for a uniform draw u in [0,1).
double sbx_beta(double u, double eta);

/// Unclipped SBX on one variable pair; c1 + c2 == p1 + p2 up to rounding.
std::pair<double, double> sbx_pair(double p1, double p2, double beta);

}  // namespace detail

}  // namespace essi
