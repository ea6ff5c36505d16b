#include "essi/bench/experiment.hpp"

#include "essi/bench/record_io.hpp"
#include "essi/parallel.hpp"
#include "essi/problems.hpp"

#include <charconv>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <regex>
#include <sstream>

namespace essi::bench {

namespace fs = std::filesystem;
using nlohmann::json;

std::filesystem::path RunKey::relative_path() const {
  return fs::path("runs") /
         (problem + "__" + algorithm_name(algorithm) + "-q" + std::to_string(q) + "__r" + std::to_string(repeat) + ".csv");
}

std::optional<RunKey> RunKey::from_path(const std::filesystem::path &path) {
  static const std::regex pattern(R"((.+)__([a-z-]+)-q(\d+)__r(\d+))");
  std::smatch m;
  const std::string stem = path.stem().string();
  if (path.extension() != ".csv" || !std::regex_match(stem, m, pattern)) return std::nullopt;
  try {
    return RunKey{m[1], parse_algorithm(m[2].str()), std::stoull(m[3]), std::stoull(m[4])};
  } catch (const std::invalid_argument &) {
    return std::nullopt;
  }
}

std::vector<RunKey> enumerate_runs(const ExperimentConfig &config) {
  std::vector<RunKey> keys;
  for (const auto &problem : config.problems)
    for (Algorithm a : config.algorithms) {
      std::vector<std::size_t> qs = config.batch_sizes;
      if (a == Algorithm::sequential_ei) qs = {1};
      for (std::size_t q : qs)
        for (std::size_t r = 0; r < config.repeats; ++r) keys.push_back({problem, a, q, r});
    }
  return keys;
}

namespace {

json loop_json(const LoopConfig &c) {
  const char *modes[] = {"random", "fixed", "full"};
  return {{"n_init", c.n_init},
          {"n_max", c.n_max},
          {"q", c.q},
          {"seed", c.seed},
          {"refit_every", c.refit_every},
          {"ga",
           {{"population", c.ga.population},
            {"generations", c.ga.generations},
            {"crossover_rate", c.ga.crossover_rate},
            {"mutation_rate", c.ga.mutation_rate},
            {"eta_crossover", c.ga.eta_crossover},
            {"eta_mutation", c.ga.eta_mutation},
            {"lhs_init", c.ga.lhs_init}}},
          {"gp",
           {{"relative_nugget", c.fit.relative_nugget},
            {"isotropic", c.fit.isotropic},
            {"population", c.fit.population},
            {"generations", c.fit.generations},
            {"duplicate_tolerance", c.fit.duplicate_tolerance}}},
          {"subspace",
           {{"mode", modes[static_cast<int>(c.subspace_strategy.mode)]},
            {"fixed_dim", c.subspace_strategy.fixed_dim},
            {"dedup", c.subspace_strategy.dedup}}}};
}

void write_text(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double final_regret(const RunRecord &record) {
  const ProblemInstance problem = make_problem(record.problem);
  const auto regret = simple_regret(record, problem.f_star());
  return regret.empty() ? std::numeric_limits<double>::quiet_NaN() : regret.back();
}

struct Outcome {
  enum class State { computed, skipped, failed } state = State::failed;
  std::optional<RunRecord> record;
  std::string error;
};

std::string summary_csv(const std::vector<RunKey> &keys, const std::vector<Outcome> &outcomes) {
  std::ostringstream out;
  out << "# essi-summary 1\n";
  out << "problem,algorithm,q,repeat,status,evaluations,iterations,f_star,final_f_min,final_regret,digest,error\n";
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto &k = keys[i];
    const auto &o = outcomes[i];
    out << k.problem << ',' << algorithm_name(k.algorithm) << ',' << k.q << ',' << k.repeat << ',';
    if (!o.record) {
      std::string error = o.error;
      std::replace(error.begin(), error.end(), ',', ';');
      std::replace(error.begin(), error.end(), '\n', ' ');
      out << "failed,,,,,,," << error << '\n';
      continue;
    }
    const RunRecord &r = *o.record;
    const double f_star = make_problem(r.problem).f_star();
    const double f_min = r.incumbent_trace.empty() ? std::numeric_limits<double>::quiet_NaN() : r.incumbent_trace.back();
    std::string failure = r.failure;
    std::replace(failure.begin(), failure.end(), ',', ';');
    out << run_status_name(r.status) << ',' << r.evaluations.size() << ',' << r.iterations() << ',' << number(f_star)
        << ',' << number(f_min) << ',' << number(final_regret(r)) << ',' << r.digest() << ',' << failure << '\n';
  }
  return out.str();
}

std::string timing_csv(const std::vector<RunKey> &keys, const std::vector<Outcome> &outcomes) {
  std::ostringstream out;
  out << "# essi-timing 1\n";
  out << "# wall-clock milliseconds per iteration; iteration 0 (initial design) omitted\n";
  out << "problem,algorithm,q,repeat,iteration,t_acq_ms,t_fit_ms\n";
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (!outcomes[i].record) continue;
    const auto &k = keys[i];
    const auto &timings = outcomes[i].record->timings;
    for (std::size_t t = 1; t < timings.size(); ++t)
      out << k.problem << ',' << algorithm_name(k.algorithm) << ',' << k.q << ',' << k.repeat << ',' << t << ','
          << number(timings[t].acquisition_ms) << ',' << number(timings[t].fit_ms) << '\n';
  }
  return out.str();
}

ResultSet results_from(const std::vector<RunKey> &keys, const std::vector<Outcome> &outcomes, std::size_t repeats) {
  ResultSet results;
  results.expected_repeats = repeats;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto &o = outcomes[i];
    if (o.record && o.record->status == RunStatus::complete)
      results.cohorts[{keys[i].problem, algorithm_name(keys[i].algorithm), keys[i].q}][keys[i].repeat] = *o.record;
  }
  for (std::size_t i = 0; i < keys.size(); ++i)
    results.cohorts.try_emplace({keys[i].problem, algorithm_name(keys[i].algorithm), keys[i].q});
  return results;
}

}  // namespace

Manifest run_experiment(const ExperimentConfig &config, const RunOptions &options) {
  config.validate();
  const fs::path dir = config.output_dir;
  fs::create_directories(dir / "runs");

  const auto keys = enumerate_runs(config);
  std::vector<Outcome> outcomes(keys.size());
  std::mutex log_mutex;
  auto log = [&](const std::string &line) {
    if (!options.log) return;
    std::lock_guard lock(log_mutex);
    options.log(line);
  };

  parallel_for(keys.size(), config.parallel_workers, [&](std::size_t i) {
    const RunKey &key = keys[i];
    Outcome &out = outcomes[i];
    const fs::path path = dir / key.relative_path();
    const std::string label = key.relative_path().stem().string();
    try {
      const ProblemInstance problem = make_problem(key.problem);
      const LoopConfig loop = config.loop_for(problem.dim(), key.algorithm, key.q, key.repeat);
      const std::string expected_digest = config_digest(problem, key.algorithm, loop);
      if (options.resume && fs::exists(path)) {
        try {
          RunRecord existing = read_run_record(path);
          if (existing.status == RunStatus::complete && existing.config_digest == expected_digest) {
            out.record = std::move(existing);
            out.state = Outcome::State::skipped;
            log("skip " + label);
            return;
          }
        } catch (const std::exception &e) {
          log("recompute " + label + ": " + e.what());
        }
      }
      RunRecord record = run_algorithm(key.algorithm, problem, loop);
      write_run_record(record, path, loop_json(loop).dump());
      out.state = record.status == RunStatus::complete ? Outcome::State::computed : Outcome::State::failed;
      if (record.status != RunStatus::complete) out.error = record.failure;
      log((record.status == RunStatus::complete ? "done " : "aborted ") + label);
      out.record = std::move(record);
    } catch (const std::exception &e) {
      out.state = Outcome::State::failed;
      out.error = e.what();
      log("failed " + label + ": " + e.what());
    }
  });

  Manifest manifest;
  manifest.output_dir = dir;
  json runs = json::array();
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto &o = outcomes[i];
    if (o.state == Outcome::State::computed) ++manifest.computed;
    if (o.state == Outcome::State::skipped) ++manifest.skipped;
    if (o.state == Outcome::State::failed) ++manifest.failed;
    if (o.record) manifest.run_files.push_back(keys[i].relative_path());
    runs.push_back({{"file", keys[i].relative_path().generic_string()},
                    {"status", o.record ? run_status_name(o.record->status) : "failed"},
                    {"digest", o.record ? o.record->digest() : ""}});
  }

  write_text(dir / "summary.csv", summary_csv(keys, outcomes));
  write_text(dir / "timing.csv", timing_csv(keys, outcomes));
  const ResultSet results = results_from(keys, outcomes, config.repeats);
  write_text(dir / "significance.csv",
             format_significance(compare(results, config.baseline, config.alpha), config.baseline, config.alpha));

  json algorithms = json::array();
  for (Algorithm a : config.algorithms) algorithms.push_back(algorithm_name(a));
  const json doc = {{"format", 1},
                    {"problems", config.problems},
                    {"algorithms", algorithms},
                    {"batch_sizes", config.batch_sizes},
                    {"repeats", config.repeats},
                    {"base_seed", config.base_seed},
                    {"baseline", config.baseline},
                    {"alpha", config.alpha},
                    {"runs", runs},
                    {"outputs", {"summary.csv", "significance.csv", "timing.csv"}}};
  write_text(dir / "manifest.json", doc.dump(2) + "\n");
  manifest.summary_files = {"summary.csv", "significance.csv", "timing.csv", "manifest.json"};
  return manifest;
}

bool ResultSet::complete(const CohortKey &key) const {
  const auto it = cohorts.find(key);
  return it != cohorts.end() && !it->second.empty() && it->second.size() >= expected_repeats;
}

std::vector<CohortKey> ResultSet::incomplete() const {
  std::vector<CohortKey> out;
  for (const auto &[key, runs] : cohorts)
    if (!complete(key)) out.push_back(key);
  return out;
}

ResultSet load_results(const std::filesystem::path &dir) {
  ResultSet results;
  const fs::path manifest_path = dir / "manifest.json";
  if (fs::exists(manifest_path)) {
    std::ifstream in(manifest_path);
    const json doc = json::parse(in);
    results.expected_repeats = doc.at("repeats").get<std::size_t>();
    results.baseline = doc.value("baseline", results.baseline);
    results.alpha = doc.value("alpha", results.alpha);
  }
  if (!fs::is_directory(dir / "runs")) throw std::runtime_error("no runs directory under " + dir.string());

  std::vector<fs::path> files;
  for (const auto &entry : fs::directory_iterator(dir / "runs"))
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::size_t max_repeats = 0;
  for (const auto &file : files) {
    const auto key = RunKey::from_path(file);
    if (!key) continue;
    const CohortKey cohort{key->problem, algorithm_name(key->algorithm), key->q};
    auto &slot = results.cohorts[cohort];
    try {
      RunRecord record = read_run_record(file);
      if (record.status != RunStatus::complete) {
        results.issues.push_back(file.filename().string() + ": aborted: " + record.failure);
        continue;
      }
      slot[key->repeat] = std::move(record);
      max_repeats = std::max(max_repeats, key->repeat + 1);
    } catch (const std::exception &e) {
      results.issues.push_back(file.filename().string() + ": " + e.what());
    }
  }
  if (results.expected_repeats == 0) results.expected_repeats = max_repeats;
  return results;
}

std::vector<SignificanceRow> compare(const ResultSet &results, const std::string &baseline, double alpha) {
  const Algorithm baseline_algorithm = parse_algorithm(baseline);
  std::vector<SignificanceRow> rows;
  for (const auto &[key, runs] : results.cohorts) {
    const auto &[problem, algorithm, q] = key;
    if (algorithm == baseline) continue;
    SignificanceRow row;
    row.problem = problem;
    row.algorithm = algorithm;
    row.q = q;
    row.baseline = baseline;
    row.baseline_q = baseline_algorithm == Algorithm::sequential_ei ? 1 : q;
    const CohortKey base_key{problem, baseline, row.baseline_q};
    if (!results.cohorts.contains(base_key)) {
      row.note = "no baseline cohort";
    } else if (!results.complete(key) || !results.complete(base_key)) {
      row.note = "incomplete cohort";
    } else {
      std::vector<double> a;
      std::vector<double> b;
      const auto &base_runs = results.cohorts.at(base_key);
      for (const auto &[repeat, record] : runs)
        if (const auto it = base_runs.find(repeat); it != base_runs.end()) {
          a.push_back(final_regret(record));
          b.push_back(final_regret(it->second));
        }
      row.pairs = a.size();
      try {
        row.test = wilcoxon_signed_rank(a, b, alpha);
      } catch (const std::invalid_argument &e) {
        row.note = e.what();
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_significance(const std::vector<SignificanceRow> &rows, const std::string &baseline, double alpha) {
  std::ostringstream out;
  out << "# essi-significance 1\n";
  out << "# two-sided Wilcoxon signed-rank test on final simple regret paired by repeat; baseline " << baseline
      << ", alpha " << number(alpha) << "\n";
  out << "# verdict: + significantly lower regret than baseline, - significantly higher, ≈ no significant difference\n";
  out << "problem,algorithm,q,baseline,baseline_q,pairs,nonzero,statistic,p_value,verdict,note\n";

  std::map<std::pair<std::string, std::size_t>, std::array<int, 3>> totals;
  for (const auto &r : rows) {
    out << r.problem << ',' << r.algorithm << ',' << r.q << ',' << r.baseline << ',' << r.baseline_q << ',' << r.pairs
        << ',';
    auto &count = totals[{r.algorithm, r.q}];
    if (r.test) {
      out << r.test->n << ',' << number(r.test->statistic) << ',' << number(r.test->p_value) << ','
          << verdict_symbol(r.test->verdict) << ",\n";
      ++count[static_cast<int>(r.test->verdict == Verdict::better ? 0 : r.test->verdict == Verdict::similar ? 1 : 2)];
    } else {
      std::string note = r.note;
      std::replace(note.begin(), note.end(), ',', ';');
      out << ",,,n/a," << note << '\n';
    }
  }
  for (const auto &[cohort, count] : totals)
    out << "TOTAL," << cohort.first << ',' << cohort.second << ',' << baseline << ",,,,,," << count[0] << '/'
        << count[1] << '/' << count[2] << ",+/≈/- counts\n";
  return out.str();
}

std::vector<CohortKey> write_report(const std::filesystem::path &dir) {
  const ResultSet results = load_results(dir);
  std::ostringstream out;
  out << "# essi-aggregate 1\n";
  out << "# simple regret across repeats; percentiles by linear interpolation between closest ranks: sorted v[0..n-1], "
         "h = (n-1)p, value = v[floor h] + (h - floor h)(v[floor h + 1] - v[floor h])\n";
  out << "problem,algorithm,q,iteration,evaluations,runs,median,q1,q3\n";
  for (const auto &[key, runs] : results.cohorts) {
    if (!results.complete(key)) continue;
    const auto &[problem, algorithm, q] = key;
    const double f_star = make_problem(problem).f_star();
    std::vector<std::vector<double>> traces;
    for (const auto &[repeat, record] : runs) traces.push_back(simple_regret(record, f_star));
    AggregateCurve curve;
    try {
      curve = aggregate_traces(traces);
    } catch (const std::invalid_argument &) {
      continue;
    }
    const auto n_init = static_cast<std::size_t>(runs.begin()->second.n_init);
    for (std::size_t t = 0; t < curve.median.size(); ++t)
      out << problem << ',' << algorithm << ',' << q << ',' << t << ',' << n_init + t * q << ',' << runs.size() << ','
          << number(curve.median[t]) << ',' << number(curve.q1[t]) << ',' << number(curve.q3[t]) << '\n';
  }
  write_text(dir / "aggregate.csv", out.str());
  write_text(dir / "significance.csv",
             format_significance(compare(results, results.baseline, results.alpha), results.baseline, results.alpha));
  return results.incomplete();
}

}  // namespace essi::bench
