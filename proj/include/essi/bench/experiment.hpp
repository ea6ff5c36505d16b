#pragma once

#include "essi/bench/config.hpp"
#include "essi/bench/stats.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace essi::bench {

struct RunKey {
  std::string problem;
  Algorithm algorithm = Algorithm::sequential_ei;
  std::size_t q = 1;
  std::size_t repeat = 0;

  /// runs/<problem>__<algorithm>-q<q>__r<repeat>.csv, relative to the output
  /// directory.
  std::filesystem::path relative_path() const;
  static std::optional<RunKey> from_path(const std::filesystem::path &path);

  friend bool operator==(const RunKey &, const RunKey &) = default;
};

/// Every run of the campaign, in a fixed order. Sequential EI appears once
/// per (problem, repeat) with q = 1 whatever the batch sizes.
std::vector<RunKey> enumerate_runs(const ExperimentConfig &config);

struct RunOptions {
  /// Skip runs whose file holds a complete record with the expected config
  /// digest.
  bool resume = false;
  /// Progress lines; called under a lock.
  std::function<void(const std::string &)> log;
};

struct Manifest {
  std::filesystem::path output_dir;
  std::vector<std::filesystem::path> run_files;
  std::vector<std::filesystem::path> summary_files;
  std::size_t computed = 0;
  std::size_t skipped = 0;
  std::size_t failed = 0;

  bool ok() const { return failed == 0; }
};

/// Runs (or resumes) the campaign: one record file per run, then summary.csv,
/// significance.csv, timing.csv and manifest.json. Runs execute concurrently
/// up to config.parallel_workers. A failed or aborted run is recorded in the
/// summary and counted in Manifest::failed; the others still complete.
Manifest run_experiment(const ExperimentConfig &config, const RunOptions &options = {});

/// (problem, algorithm name, q)
using CohortKey = std::tuple<std::string, std::string, std::size_t>;

struct ResultSet {
  /// Complete records by cohort and repeat index.
  std::map<CohortKey, std::map<std::size_t, RunRecord>> cohorts;
  /// Repeats a complete cohort must have; from manifest.json when present.
  std::size_t expected_repeats = 0;
  std::string baseline = "sequential-ei";
  double alpha = 0.05;
  /// Files that were unreadable or held aborted runs.
  std::vector<std::string> issues;

  std::vector<CohortKey> incomplete() const;
  bool complete(const CohortKey &key) const;
};

ResultSet load_results(const std::filesystem::path &dir);

struct SignificanceRow {
  std::string problem;
  std::string algorithm;
  std::size_t q = 1;
  std::string baseline;
  std::size_t baseline_q = 1;
  std::size_t pairs = 0;
  std::optional<WilcoxonResult> test;
  /// Why no test was possible.
  std::string note;
};

/// Paired test of final simple regret, cohort against baseline, per problem.
/// A batch baseline is matched by q, a sequential one is used for every q.
/// Incomplete cohorts are skipped.
std::vector<SignificanceRow> compare(const ResultSet &results, const std::string &baseline, double alpha);

std::string format_significance(const std::vector<SignificanceRow> &rows, const std::string &baseline, double alpha);

/// Writes aggregate.csv (median and quartiles of simple regret per
/// iteration, with cumulative evaluations alongside) and significance.csv
/// from the records in dir. Returns the incomplete cohorts.
std::vector<CohortKey> write_report(const std::filesystem::path &dir);

}  // namespace essi::bench
