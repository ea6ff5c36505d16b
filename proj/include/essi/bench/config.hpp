#pragma once

#include "essi/bo.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace essi::bench {

/// One benchmark campaign. Loaded from an INI file with sections
/// [experiment], [loop], [ga], [gp] and [subspace]; see
/// configs/example.ini for every key and its default.
struct ExperimentConfig {
  std::vector<std::string> problems;
  std::vector<Algorithm> algorithms;
  std::vector<std::size_t> batch_sizes{1};
  std::size_t repeats = 1;
  Seed base_seed = 1;
  std::filesystem::path output_dir = "results";
  std::size_t parallel_workers = 1;
  std::string baseline = "sequential-ei";
  double alpha = 0.05;

  /// n_init = n_init_per_dim * d unless n_init_fixed is set.
  Eigen::Index n_init_per_dim = 10;
  std::optional<Eigen::Index> n_init_fixed;
  /// Evaluations after the initial design.
  Eigen::Index budget = 512;
  /// Acquisition GA, fit, subspace, refit and in-run worker settings; n_init,
  /// n_max, q and seed are filled in per run.
  LoopConfig loop;

  /// Throws std::invalid_argument naming the offending setting.
  void validate() const;

  Eigen::Index n_init_for(Eigen::Index d) const;
  /// Initial-design seed of repeat r; independent of problem and algorithm.
  Seed repeat_seed(std::size_t repeat) const;
  /// Loop settings for one run. Sequential EI always gets q = 1.
  LoopConfig loop_for(Eigen::Index d, Algorithm algorithm, std::size_t q, std::size_t repeat) const;
};

ExperimentConfig parse_experiment_config(const std::string &ini_text);
ExperimentConfig load_experiment_config(const std::filesystem::path &path);

}  // namespace essi::bench
