#include "essi/ga.hpp"

#include "essi/doe.hpp"
#include "essi/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace essi {

GAConfig GAConfig::defaults_for(Eigen::Index dim, Seed seed) {
  GAConfig config;
  const int pop = static_cast<int>(10 * dim);
  config.population = std::max(2, pop + pop % 2);
  config.generations = 100;
  config.crossover_rate = 0.9;
  config.mutation_rate = 1.0 / static_cast<double>(dim);
  config.eta_crossover = 20.0;
  config.eta_mutation = 20.0;
  config.seed = seed;
  return config;
}

void GAConfig::validate() const {
  std::ostringstream err;
  if (population < 2 || population % 2 != 0) err << "population must be even and >= 2 (got " << population << "); ";
  if (generations < 1) err << "generations must be >= 1 (got " << generations << "); ";
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) err << "crossover_rate must lie in [0,1]; ";
  if (!(mutation_rate <= 1.0)) err << "mutation_rate must be <= 1; ";
  if (!(eta_crossover > 0.0) || !(eta_mutation > 0.0)) err << "distribution indices must be positive; ";
  const auto msg = err.str();
  if (!msg.empty()) throw std::invalid_argument("GAConfig: " + msg);
}

namespace detail {

double sbx_beta(double u, double eta) {
  const double expo = 1.0 / (eta + 1.0);
  if (u <= 0.5) return std::pow(2.0 * u, expo);
  return std::pow(1.0 / (2.0 * (1.0 - u)), expo);
}

std::pair<double, double> sbx_pair(double p1, double p2, double beta) {
  const double mean = 0.5 * (p1 + p2);
  const double half_spread = 0.5 * beta * (p2 - p1);
  return {mean - half_spread, mean + half_spread};
}

}  // namespace detail

std::pair<Vector, Vector> sbx_crossover(const Vector &p1, const Vector &p2, double eta, const Box &box,
                                        Rng &rng, double variable_probability) {
  if (p1.size() != box.dim() || p2.size() != box.dim())
    throw std::invalid_argument("sbx_crossover: parent dimension does not match box");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector c1 = p1;
  Vector c2 = p2;
  for (Eigen::Index i = 0; i < p1.size(); ++i) {
    if (unit(rng) > variable_probability) continue;
    const double u = unit(rng);
    if (std::abs(p1[i] - p2[i]) <= 1e-14) continue;
    const auto [a, b] = detail::sbx_pair(p1[i], p2[i], detail::sbx_beta(u, eta));
    c1[i] = a;
    c2[i] = b;
  }
  return {box.clamp(c1), box.clamp(c2)};
}

std::pair<Vector, Vector> sbx_crossover(const Vector &p1, const Vector &p2, double eta, const Box &box, Seed seed,
                                        double variable_probability) {
  Rng rng = make_rng(seed);
  return sbx_crossover(p1, p2, eta, box, rng, variable_probability);
}

Vector polynomial_mutation(const Vector &x, double eta, double rate, const Box &box, Rng &rng) {
  if (x.size() != box.dim()) throw std::invalid_argument("polynomial_mutation: dimension does not match box");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector y = x;
  const double expo = 1.0 / (eta + 1.0);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (unit(rng) >= rate) continue;
    const double u = unit(rng);
    const double lo = box.lower(i);
    const double hi = box.upper(i);
    const double width = hi - lo;
    const double v = std::clamp(x[i], lo, hi);
    const double delta1 = (v - lo) / width;
    const double delta2 = (hi - v) / width;
    double delta_q;
    if (u < 0.5) {
      const double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - delta1, eta + 1.0);
      delta_q = std::pow(val, expo) - 1.0;
    } else {
      const double val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - delta2, eta + 1.0);
      delta_q = 1.0 - std::pow(val, expo);
    }
    y[i] = std::clamp(v + delta_q * width, lo, hi);
  }
  return y;
}

Vector polynomial_mutation(const Vector &x, double eta, double rate, const Box &box, Seed seed) {
  Rng rng = make_rng(seed);
  return polynomial_mutation(x, eta, rate, box, rng);
}

namespace {

struct Individual {
  Vector x;
  double raw = 0.0;
  double fitness = 0.0;
};

double as_fitness(double value) {
  return std::isfinite(value) ? value : -std::numeric_limits<double>::infinity();
}

void evaluate(std::vector<Individual> &members, std::size_t first, const Objective &objective,
              std::size_t workers) {
  parallel_for(members.size() - first, workers, [&](std::size_t k) {
    auto &ind = members[first + k];
    ind.raw = objective(ind.x);
    ind.fitness = as_fitness(ind.raw);
  });
}

}  // namespace

GAResult maximize(const Objective &objective, const Box &box, const GAConfig &config,
                  std::span<const Vector> initial) {
  config.validate();
  const auto pop = static_cast<std::size_t>(config.population);
  const double pm = config.effective_mutation_rate(box.dim());
  Rng rng = make_rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, pop - 1);

  const DesignMatrix start = config.lhs_init
                                 ? latin_hypercube(static_cast<Eigen::Index>(pop), box, derive_seed(config.seed, {1}))
                                 : uniform_sample(static_cast<Eigen::Index>(pop), box, derive_seed(config.seed, {1}));
  std::vector<Individual> members(pop);
  for (std::size_t i = 0; i < pop; ++i) {
    members[i].x = i < initial.size() ? box.clamp(initial[i]) : Vector(start.row(static_cast<Eigen::Index>(i)));
  }
  evaluate(members, 0, objective, config.workers);

  GAResult result;
  result.evaluations = pop;
  std::size_t best_index = 0;
  for (std::size_t i = 1; i < pop; ++i)
    if (members[i].fitness > members[best_index].fitness) best_index = i;
  Individual champion = members[best_index];
  result.generation_best.push_back(champion.fitness);

  auto tournament = [&]() -> const Individual & {
    const auto &a = members[pick(rng)];
    const auto &b = members[pick(rng)];
    return b.fitness > a.fitness ? b : a;
  };

  std::vector<std::size_t> order(2 * pop);
  for (int gen = 0; gen < config.generations; ++gen) {
    members.resize(2 * pop);
    for (std::size_t k = 0; k < pop; k += 2) {
      Vector c1 = tournament().x;
      Vector c2 = tournament().x;
      if (unit(rng) < config.crossover_rate) std::tie(c1, c2) = sbx_crossover(c1, c2, config.eta_crossover, box, rng);
      members[pop + k].x = polynomial_mutation(c1, config.eta_mutation, pm, box, rng);
      members[pop + k + 1].x = polynomial_mutation(c2, config.eta_mutation, pm, box, rng);
    }
    evaluate(members, pop, objective, config.workers);
    result.evaluations += pop;

    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return members[a].fitness > members[b].fitness; });
    std::vector<Individual> survivors;
    survivors.reserve(pop);
    for (std::size_t i = 0; i < pop; ++i) survivors.push_back(std::move(members[order[i]]));
    members = std::move(survivors);

    if (members.front().fitness > champion.fitness) champion = members.front();
    result.generation_best.push_back(champion.fitness);
  }

  result.best_x = champion.x;
  result.best_value = champion.raw;
  return result;
}

}  // namespace essi
