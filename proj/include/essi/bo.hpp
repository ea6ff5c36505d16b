#pragma once

#include "essi/acquisition.hpp"
#include "essi/ga.hpp"
#include "essi/gp.hpp"
#include "essi/problems.hpp"
#include "essi/subspace.hpp"
#include "essi/types.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace essi {

enum class Algorithm { sequential_ei, batch_essi, batch_kb, random };

const std::vector<std::string> &algorithm_names();
std::string algorithm_name(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);

struct LoopConfig {
  Eigen::Index n_init = 0;
  Eigen::Index n_max = 0;
  std::size_t q = 1;
  /// Template for every acquisition GA. population <= 0 selects the sizing
  /// rule max(10 k, 20) for a k-dimensional search; mutation_rate <= 0
  /// selects 1/k. The seed is replaced per task.
  GAConfig ga{.population = 0};
  SubspaceStrategy subspace_strategy;
  /// Hyperparameters are re-estimated every refit_every iterations; in
  /// between, the previous ones are reused on the grown data set.
  int refit_every = 1;
  Seed seed = 0;
  FitConfig fit;
  /// Threads for the q acquisition optimizations and q evaluations of one
  /// iteration. Results do not depend on it.
  std::size_t workers = 1;

  /// n_init = 10 d, n_max = 10 d + 512.
  static LoopConfig defaults_for(Eigen::Index d, std::size_t q, Seed seed);

  /// Throws std::invalid_argument on inconsistent settings. `batched` loops
  /// additionally need (n_max - n_init) divisible by q.
  void validate(bool batched) const;
  std::size_t iterations(bool batched) const;
};

/// Population used for a k-dimensional acquisition search.
int acquisition_population(Eigen::Index k, const GAConfig &ga_template);

/// Per-task GA settings for a k-dimensional acquisition search.
GAConfig acquisition_ga(Eigen::Index k, const GAConfig &ga_template, Seed seed);

struct Evaluation {
  Vector x;
  double f = 0.0;
  std::size_t iteration = 0;
  std::size_t worker_slot = 0;
};

struct IterationTiming {
  double acquisition_ms = 0.0;
  double fit_ms = 0.0;
};

/// Where a model-based query came from, before duplicate jitter.
struct QueryTrace {
  std::size_t iteration = 0;
  std::size_t slot = 0;
  std::vector<Eigen::Index> subspace;
  Vector incumbent;
  Vector proposed;
  double acquisition_value = 0.0;
  bool jittered = false;
};

struct FantasyTrace {
  std::size_t iteration = 0;
  std::size_t slot = 0;
  Vector x;
  double value = 0.0;
};

enum class RunStatus { complete, aborted };

/// Full trajectory of one optimization run. Iteration 0 is the initial
/// design; incumbent_trace and timings have one entry per iteration
/// including iteration 0.
struct RunRecord {
  std::string algorithm;
  std::string problem;
  Eigen::Index dim = 0;
  Eigen::Index n_init = 0;
  std::size_t q = 1;
  Seed seed = 0;
  std::string config_digest;
  std::vector<Evaluation> evaluations;
  std::vector<double> incumbent_trace;
  std::vector<IterationTiming> timings;
  std::vector<QueryTrace> queries;
  std::vector<FantasyTrace> fantasies;
  RunStatus status = RunStatus::complete;
  std::string failure;

  std::size_t iterations() const { return incumbent_trace.empty() ? 0 : incumbent_trace.size() - 1; }
  /// Hash of everything except wall-clock timings and debug traces.
  std::string digest() const;
};

/// Stable identifier of (problem, algorithm, loop settings); worker counts
/// are excluded since they never change results.
std::string config_digest(const ProblemInstance &problem, Algorithm algorithm, const LoopConfig &config);

RunRecord run_sequential_ei(const ProblemInstance &problem, const LoopConfig &config);
RunRecord run_batch_essi(const ProblemInstance &problem, const LoopConfig &config);
RunRecord run_batch_kb(const ProblemInstance &problem, const LoopConfig &config);
RunRecord run_random_search(const ProblemInstance &problem, const LoopConfig &config);
RunRecord run_algorithm(Algorithm algorithm, const ProblemInstance &problem, const LoopConfig &config);

struct Proposal {
  Vector x;
  double acquisition_value = 0.0;
};

/// Maximizes the q ESSI functions of one iteration independently (on up to
/// `workers` threads) against one model/incumbent snapshot. Task i uses GA
/// seed derive_seed(iteration_seed, {i}).
std::vector<Proposal> propose_essi_batch(std::shared_ptr<const GaussianProcessModel> model,
                                         const Incumbent &incumbent, const std::vector<Subspace> &subspaces,
                                         const Box &box, const GAConfig &ga_template, Seed iteration_seed,
                                         std::size_t workers = 1);

struct KrigingBelieverBatch {
  std::vector<Proposal> points;
  std::vector<FantasyTrace> fantasies;
};

/// Kriging-believer selection: maximize EI, condition the model on its own
/// mean at the chosen point, repeat q times. `adjust` may move a chosen
/// point (e.g. duplicate jitter) before it is conditioned on.
KrigingBelieverBatch propose_kb_batch(const GaussianProcessModel &model, double f_min, const Box &box, std::size_t q,
                                      const GAConfig &ga_template, Seed iteration_seed,
                                      const std::function<Vector(const Vector &, std::size_t)> &adjust = {});

}  // namespace essi
