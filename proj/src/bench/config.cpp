#include "essi/bench/config.hpp"

#include "essi/problems.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace essi::bench {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string &s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string &s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_value(const std::string &key, const std::string &text) {
  std::istringstream in(text);
  T value{};
  in >> value;
  if (in.fail() || !(in >> std::ws).eof()) throw std::invalid_argument("config: bad value '" + text + "' for " + key);
  return value;
}

bool parse_bool(const std::string &key, const std::string &text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw std::invalid_argument("config: bad boolean '" + text + "' for " + key);
}

const std::map<std::string, std::set<std::string>> &known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"experiment",
       {"problems", "algorithms", "batch_sizes", "repeats", "base_seed", "output_dir", "parallel_workers", "baseline",
        "alpha"}},
      {"loop", {"n_init", "budget", "refit_every", "workers"}},
      {"ga", {"population", "generations", "crossover_rate", "mutation_rate", "eta_crossover", "eta_mutation", "lhs_init"}},
      {"gp", {"relative_nugget", "isotropic", "population", "generations", "duplicate_tolerance"}},
      {"subspace", {"mode", "fixed_dim", "dedup"}},
  };
  return keys;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (problems.empty()) throw std::invalid_argument("config: experiment.problems is empty");
  if (algorithms.empty()) throw std::invalid_argument("config: experiment.algorithms is empty");
  if (batch_sizes.empty()) throw std::invalid_argument("config: experiment.batch_sizes is empty");
  if (repeats < 1) throw std::invalid_argument("config: experiment.repeats must be at least 1");
  if (parallel_workers < 1) throw std::invalid_argument("config: experiment.parallel_workers must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("config: experiment.alpha must lie in (0,1)");
  parse_algorithm(baseline);
  if (budget < 0) throw std::invalid_argument("config: loop.budget must be nonnegative");
  for (const auto &name : problems) {
    const ProblemInstance problem = make_problem(name);
    for (Algorithm a : algorithms)
      for (std::size_t q : batch_sizes) {
        const LoopConfig lc = loop_for(problem.dim(), a, q, 0);
        try {
          lc.validate(a != Algorithm::sequential_ei);
          lc.subspace_strategy.validate(problem.dim());
        } catch (const std::invalid_argument &e) {
          throw std::invalid_argument("config: " + name + " / " + algorithm_name(a) + " / q=" + std::to_string(q) +
                                      ": " + e.what());
        }
      }
  }
}

Eigen::Index ExperimentConfig::n_init_for(Eigen::Index d) const { return n_init_fixed ? *n_init_fixed : n_init_per_dim * d; }

Seed ExperimentConfig::repeat_seed(std::size_t repeat) const { return derive_seed(base_seed, {repeat}); }

LoopConfig ExperimentConfig::loop_for(Eigen::Index d, Algorithm algorithm, std::size_t q, std::size_t repeat) const {
  LoopConfig c = loop;
  c.n_init = n_init_for(d);
  c.n_max = c.n_init + budget;
  c.q = algorithm == Algorithm::sequential_ei ? 1 : q;
  c.seed = repeat_seed(repeat);
  return c;
}

ExperimentConfig parse_experiment_config(const std::string &ini_text) {
  pt::ptree tree;
  std::istringstream in(ini_text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error &e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }

  for (const auto &[section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) throw std::invalid_argument("config: unknown section [" + section + "]");
    for (const auto &[key, value] : body)
      if (!it->second.contains(key)) throw std::invalid_argument("config: unknown key " + section + "." + key);
  }

  auto get = [&](const std::string &path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return trim(*v);
    return std::nullopt;
  };

  ExperimentConfig c;
  if (auto v = get("experiment.problems")) c.problems = split_list(*v);
  if (auto v = get("experiment.algorithms")) {
    c.algorithms.clear();
    for (const auto &name : split_list(*v)) c.algorithms.push_back(parse_algorithm(name));
  }
  if (auto v = get("experiment.batch_sizes")) {
    c.batch_sizes.clear();
    for (const auto &q : split_list(*v)) c.batch_sizes.push_back(parse_value<std::size_t>("experiment.batch_sizes", q));
  }
  if (auto v = get("experiment.repeats")) c.repeats = parse_value<std::size_t>("experiment.repeats", *v);
  if (auto v = get("experiment.base_seed")) c.base_seed = parse_value<Seed>("experiment.base_seed", *v);
  if (auto v = get("experiment.output_dir")) c.output_dir = *v;
  if (auto v = get("experiment.parallel_workers"))
    c.parallel_workers = parse_value<std::size_t>("experiment.parallel_workers", *v);
  if (auto v = get("experiment.baseline")) c.baseline = *v;
  if (auto v = get("experiment.alpha")) c.alpha = parse_value<double>("experiment.alpha", *v);

  if (auto v = get("loop.n_init")) {
    if (!v->empty() && v->back() == 'd') {
      const std::string factor = v->substr(0, v->size() - 1);
      c.n_init_per_dim = factor.empty() ? 1 : parse_value<Eigen::Index>("loop.n_init", factor);
    } else {
      c.n_init_fixed = parse_value<Eigen::Index>("loop.n_init", *v);
    }
  }
  if (auto v = get("loop.budget")) c.budget = parse_value<Eigen::Index>("loop.budget", *v);
  if (auto v = get("loop.refit_every")) c.loop.refit_every = parse_value<int>("loop.refit_every", *v);
  if (auto v = get("loop.workers")) c.loop.workers = parse_value<std::size_t>("loop.workers", *v);

  auto auto_or = [](const std::optional<std::string> &v) { return v && *v != "auto"; };
  if (auto v = get("ga.population"); auto_or(v)) c.loop.ga.population = parse_value<int>("ga.population", *v);
  if (auto v = get("ga.generations")) c.loop.ga.generations = parse_value<int>("ga.generations", *v);
  if (auto v = get("ga.crossover_rate")) c.loop.ga.crossover_rate = parse_value<double>("ga.crossover_rate", *v);
  if (auto v = get("ga.mutation_rate"); auto_or(v)) c.loop.ga.mutation_rate = parse_value<double>("ga.mutation_rate", *v);
  if (auto v = get("ga.eta_crossover")) c.loop.ga.eta_crossover = parse_value<double>("ga.eta_crossover", *v);
  if (auto v = get("ga.eta_mutation")) c.loop.ga.eta_mutation = parse_value<double>("ga.eta_mutation", *v);
  if (auto v = get("ga.lhs_init")) c.loop.ga.lhs_init = parse_bool("ga.lhs_init", *v);

  if (auto v = get("gp.relative_nugget")) c.loop.fit.relative_nugget = parse_value<double>("gp.relative_nugget", *v);
  if (auto v = get("gp.isotropic")) c.loop.fit.isotropic = parse_bool("gp.isotropic", *v);
  if (auto v = get("gp.population")) c.loop.fit.population = parse_value<int>("gp.population", *v);
  if (auto v = get("gp.generations")) c.loop.fit.generations = parse_value<int>("gp.generations", *v);
  if (auto v = get("gp.duplicate_tolerance"))
    c.loop.fit.duplicate_tolerance = parse_value<double>("gp.duplicate_tolerance", *v);

  if (auto v = get("subspace.mode")) {
    if (*v == "random") {
      c.loop.subspace_strategy.mode = SubspaceStrategy::Mode::random_dimension;
    } else if (*v == "fixed") {
      c.loop.subspace_strategy.mode = SubspaceStrategy::Mode::fixed_dimension;
    } else if (*v == "full") {
      c.loop.subspace_strategy.mode = SubspaceStrategy::Mode::full_space;
    } else {
      throw std::invalid_argument("config: subspace.mode must be random, fixed or full, got '" + *v + "'");
    }
  }
  if (auto v = get("subspace.fixed_dim")) c.loop.subspace_strategy.fixed_dim = parse_value<Eigen::Index>("subspace.fixed_dim", *v);
  if (auto v = get("subspace.dedup")) c.loop.subspace_strategy.dedup = parse_bool("subspace.dedup", *v);

  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_experiment_config(text.str());
}

}  // namespace essi::bench
