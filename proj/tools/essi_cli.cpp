#include "essi/bench/experiment.hpp"
#include "essi/bench/record_io.hpp"
#include "essi/problems.hpp"

#include <CLI11.hpp>
#include <iostream>
#include <sstream>

namespace {

using namespace essi;

int cmd_run(const std::string &config_path, std::size_t workers, bool resume) {
  bench::ExperimentConfig config = bench::load_experiment_config(config_path);
  if (workers > 0) config.parallel_workers = workers;
  bench::RunOptions options;
  options.resume = resume;
  options.log = [](const std::string &line) { std::cerr << line << '\n'; };
  const bench::Manifest manifest = bench::run_experiment(config, options);
  std::cout << "runs: " << manifest.computed << " computed, " << manifest.skipped << " skipped, " << manifest.failed
            << " failed\n";
  std::cout << "output: " << manifest.output_dir.string() << '\n';
  return manifest.ok() ? 0 : 1;
}

int cmd_report(const std::string &dir) {
  const auto incomplete = bench::write_report(dir);
  std::cout << "wrote " << (std::filesystem::path(dir) / "aggregate.csv").string() << " and significance.csv\n";
  for (const auto &[problem, algorithm, q] : incomplete)
    std::cerr << "incomplete cohort skipped: " << problem << ' ' << algorithm << " q=" << q << '\n';
  return incomplete.empty() ? 0 : 1;
}

int cmd_compare(const std::string &dir, const std::string &baseline, double alpha) {
  const bench::ResultSet results = bench::load_results(dir);
  for (const auto &issue : results.issues) std::cerr << "warning: " << issue << '\n';
  std::cout << bench::format_significance(bench::compare(results, baseline, alpha), baseline, alpha);
  return 0;
}

int cmd_problem_list() {
  for (const auto &name : base_function_names()) {
    const Box box = default_box(parse_base_function(name), 1);
    std::cout << name << "  [" << box.lower()[0] << ", " << box.upper()[0] << "]^d\n";
  }
  std::cout << "\ninstances are named <base>-d<D>-seed<S>; seed 0 is the unshifted, unrotated function\n";
  return 0;
}

int cmd_problem_eval(const std::string &name, const std::string &point) {
  const ProblemInstance problem = make_problem(name);
  std::vector<double> values;
  std::istringstream in(point);
  std::string cell;
  while (std::getline(in, cell, ',')) values.push_back(std::stod(cell));
  if (static_cast<Eigen::Index>(values.size()) != problem.dim())
    throw std::invalid_argument("point has " + std::to_string(values.size()) + " coordinates, problem " + name +
                                " needs " + std::to_string(problem.dim()));
  const Vector x = Eigen::Map<const Vector>(values.data(), problem.dim());
  std::cout.precision(17);
  std::cout << problem.evaluate(x) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Batch Bayesian optimization benchmarks"};
  app.require_subcommand(1);

  std::string config_path;
  std::size_t workers = 0;
  bool resume = false;
  auto *run = app.add_subcommand("run", "Run an experiment campaign");
  run->add_option("--config", config_path, "INI experiment file")->required()->check(CLI::ExistingFile);
  run->add_option("--workers", workers, "Concurrent runs (overrides experiment.parallel_workers)");
  run->add_flag("--resume", resume, "Skip runs already complete with matching settings");

  std::string dir;
  auto *report = app.add_subcommand("report", "Write aggregate curves and the significance table");
  report->add_option("--dir", dir, "Experiment output directory")->required()->check(CLI::ExistingDirectory);

  std::string baseline = "sequential-ei";
  double alpha = 0.05;
  auto *cmp = app.add_subcommand("compare", "Print Wilcoxon comparisons against a baseline");
  cmp->add_option("--dir", dir, "Experiment output directory")->required()->check(CLI::ExistingDirectory);
  cmp->add_option("--baseline", baseline, "Baseline algorithm")->capture_default_str();
  cmp->add_option("--alpha", alpha, "Significance level")->capture_default_str();

  auto *problem = app.add_subcommand("problem", "Inspect benchmark problems");
  problem->require_subcommand(1);
  auto *list = problem->add_subcommand("list", "List base functions");
  std::string name;
  std::string point;
  auto *eval = problem->add_subcommand("eval", "Evaluate a problem instance at a point");
  eval->add_option("--name", name, "Instance name, e.g. sphere-d5-seed1")->required();
  eval->add_option("--point", point, "Comma-separated coordinates")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, workers, resume);
    if (*report) return cmd_report(dir);
    if (*cmp) return cmd_compare(dir, baseline, alpha);
    if (*list) return cmd_problem_list();
    if (*eval) return cmd_problem_eval(name, point);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
