#include "essi/bo.hpp"

#include "essi/doe.hpp"
#include "essi/parallel.hpp"

#include <chrono>
#include <cstring>
#include <iomanip>
#include <sstream>

namespace essi {

const std::vector<std::string> &algorithm_names() {
  static const std::vector<std::string> names{"sequential-ei", "batch-essi", "batch-kb", "random"};
  return names;
}

std::string algorithm_name(Algorithm algorithm) { return algorithm_names()[static_cast<std::size_t>(algorithm)]; }

Algorithm parse_algorithm(std::string_view name) {
  const auto &names = algorithm_names();
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<Algorithm>(i);
  std::string valid;
  for (const auto &n : names) valid += " " + n;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'; valid:" + valid);
}

LoopConfig LoopConfig::defaults_for(Eigen::Index d, std::size_t q, Seed seed) {
  LoopConfig config;
  config.n_init = 10 * d;
  config.n_max = 10 * d + 512;
  config.q = q;
  config.seed = seed;
  return config;
}

void LoopConfig::validate(bool batched) const {
  if (n_init < 2) throw std::invalid_argument("LoopConfig: n_init must be at least 2");
  if (n_max < n_init) throw std::invalid_argument("LoopConfig: n_max must be at least n_init");
  if (q < 1) throw std::invalid_argument("LoopConfig: batch size q must be at least 1");
  if (refit_every < 1) throw std::invalid_argument("LoopConfig: refit_every must be at least 1");
  if (batched && static_cast<std::size_t>(n_max - n_init) % q != 0) {
    std::ostringstream msg;
    msg << "LoopConfig: evaluation budget n_max - n_init = " << (n_max - n_init) << " is not divisible by q = " << q;
    throw std::invalid_argument(msg.str());
  }
  if (ga.generations < 1) throw std::invalid_argument("LoopConfig: GA generations must be at least 1");
}

std::size_t LoopConfig::iterations(bool batched) const {
  const auto budget = static_cast<std::size_t>(n_max - n_init);
  return batched ? budget / q : budget;
}

int acquisition_population(Eigen::Index k, const GAConfig &ga_template) {
  if (ga_template.population > 0) return ga_template.population;
  const int pop = std::max(20, static_cast<int>(10 * k));
  return pop + pop % 2;
}

GAConfig acquisition_ga(Eigen::Index k, const GAConfig &ga_template, Seed seed) {
  GAConfig ga = ga_template;
  ga.population = acquisition_population(k, ga_template);
  ga.mutation_rate = ga_template.mutation_rate > 0.0 ? ga_template.mutation_rate : 1.0 / static_cast<double>(k);
  ga.seed = seed;
  ga.workers = 1;
  return ga;
}

namespace {

class Fnv1a {
 public:
  void bytes(const void *data, std::size_t size) {
    const auto *p = static_cast<const unsigned char *>(data);
    for (std::size_t i = 0; i < size; ++i) {
      hash_ ^= p[i];
      hash_ *= 0x100000001b3ULL;
    }
  }
  template <typename T>
  void value(const T &v) {
    bytes(&v, sizeof(T));
  }
  void text(const std::string &s) {
    value(s.size());
    bytes(s.data(), s.size());
  }
  std::string hex() const {
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << hash_;
    return out.str();
  }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

std::string RunRecord::digest() const {
  Fnv1a h;
  h.text(algorithm);
  h.text(problem);
  h.text(config_digest);
  h.value(seed);
  h.value(q);
  h.value(static_cast<int>(status));
  for (const auto &e : evaluations) {
    for (Eigen::Index j = 0; j < e.x.size(); ++j) h.value(e.x[j]);
    h.value(e.f);
    h.value(e.iteration);
    h.value(e.worker_slot);
  }
  for (double f : incumbent_trace) h.value(f);
  return h.hex();
}

std::string config_digest(const ProblemInstance &problem, Algorithm algorithm, const LoopConfig &c) {
  std::ostringstream s;
  s << std::setprecision(17);
  s << problem.name() << '|' << algorithm_name(algorithm) << '|' << c.n_init << '|' << c.n_max << '|'
    << (algorithm == Algorithm::sequential_ei ? 1 : c.q) << '|' << c.seed << '|' << c.refit_every;
  s << "|ga:" << c.ga.population << ',' << c.ga.generations << ',' << c.ga.crossover_rate << ','
    << c.ga.mutation_rate << ',' << c.ga.eta_crossover << ',' << c.ga.eta_mutation << ',' << c.ga.lhs_init;
  s << "|sub:" << static_cast<int>(c.subspace_strategy.mode) << ',' << c.subspace_strategy.fixed_dim << ','
    << c.subspace_strategy.dedup;
  s << "|fit:" << c.fit.relative_nugget << ',' << c.fit.isotropic << ',' << c.fit.population << ','
    << c.fit.generations << ',' << c.fit.duplicate_tolerance;
  Fnv1a h;
  h.text(s.str());
  return h.hex();
}

std::vector<Proposal> propose_essi_batch(std::shared_ptr<const GaussianProcessModel> model,
                                         const Incumbent &incumbent, const std::vector<Subspace> &subspaces,
                                         const Box &box, const GAConfig &ga_template, Seed iteration_seed,
                                         std::size_t workers) {
  std::vector<Proposal> out(subspaces.size());
  parallel_for(subspaces.size(), workers, [&](std::size_t i) {
    const AcquisitionSpec spec = AcquisitionSpec::make(model, incumbent, subspaces[i], box);
    const GAConfig ga = acquisition_ga(spec.subspace.size(), ga_template, derive_seed(iteration_seed, {i}));
    const GAResult best = maximize([&spec](const Vector &y) { return essi(spec, y); }, spec.box, ga);
    out[i].x = embed(spec.incumbent, spec.subspace, best.best_x);
    out[i].acquisition_value = best.best_value;
  });
  return out;
}

KrigingBelieverBatch propose_kb_batch(const GaussianProcessModel &model, double f_min, const Box &box, std::size_t q,
                                      const GAConfig &ga_template, Seed iteration_seed,
                                      const std::function<Vector(const Vector &, std::size_t)> &adjust) {
  KrigingBelieverBatch batch;
  GaussianProcessModel current = model;
  for (std::size_t i = 0; i < q; ++i) {
    const GAConfig ga = acquisition_ga(box.dim(), ga_template, derive_seed(iteration_seed, {i}));
    const GAResult best =
        maximize([&current, f_min](const Vector &x) { return expected_improvement(current, f_min, x); }, box, ga);
    Proposal p{best.best_x, best.best_value};
    if (adjust) p.x = adjust(p.x, i);
    if (i + 1 < q) {
      const double believed = current.predict(p.x).mean;
      batch.fantasies.push_back({0, i, p.x, believed});
      try {
        current = current.fantasy_update(p.x, believed);
      } catch (const std::exception &) {
        // The point repeats a (pseudo-)observation; the model already
        // believes its value, so conditioning again adds nothing.
      }
    }
    batch.points.push_back(std::move(p));
  }
  return batch;
}

namespace {

/// State shared by all loops: data set, record, model training and the
/// evaluation/commit step.
class LoopDriver {
 public:
  LoopDriver(const ProblemInstance &problem, const LoopConfig &config, Algorithm algorithm)
      : problem_(problem), config_(config), batched_(algorithm != Algorithm::sequential_ei) {
    config_.validate(batched_);
    if (!batched_) config_.q = 1;
    record_.algorithm = algorithm_name(algorithm);
    record_.problem = problem.name();
    record_.dim = problem.dim();
    record_.n_init = config_.n_init;
    record_.q = config_.q;
    record_.seed = config_.seed;
    record_.config_digest = config_digest(problem, algorithm, config);
    fit_config_ = config_.fit;
    fit_config_.domain = problem.box();
  }

  const LoopConfig &config() const { return config_; }
  const ObservationSet &data() const { return data_; }
  RunRecord &record() { return record_; }
  std::size_t iterations() const { return config_.iterations(batched_); }

  void initial_design() {
    const DesignMatrix x = latin_hypercube(config_.n_init, problem_.box(), derive_seed(config_.seed, {tag(Stream::design)}));
    std::vector<Vector> points;
    for (Eigen::Index i = 0; i < x.rows(); ++i) points.emplace_back(x.row(i).transpose());
    commit(0, points, 0.0, 0.0);
  }

  /// Trains the surrogate for iteration t; nullptr after recording an abort.
  std::shared_ptr<const GaussianProcessModel> train(std::size_t t, double &fit_ms) {
    const auto start = std::chrono::steady_clock::now();
    std::shared_ptr<const GaussianProcessModel> model;
    const bool refit = !last_kernel_ || (t - 1) % static_cast<std::size_t>(config_.refit_every) == 0;
    if (!refit) {
      try {
        KernelParams kernel = *last_kernel_;
        model = std::make_shared<const GaussianProcessModel>(GaussianProcessModel::condition(
            data_.design(), data_.values(), data_.values().mean(), std::move(kernel), problem_.box()));
      } catch (const std::exception &) {
        model.reset();
      }
    }
    if (!model) {
      FitConfig fc = fit_config_;
      fc.warm_start = last_kernel_;
      const Seed seed = derive_seed(config_.seed, {tag(Stream::fit), t});
      std::string error;
      for (int attempt = 0; attempt < 2 && !model; ++attempt) {
        try {
          model = std::make_shared<const GaussianProcessModel>(fit(data_, fc, seed));
        } catch (const std::exception &e) {
          error = e.what();
          fc.relative_nugget *= 2.0;
        }
      }
      if (!model) {
        record_.status = RunStatus::aborted;
        record_.failure = "iteration " + std::to_string(t) + ": model fit failed twice: " + error;
        fit_ms = elapsed_ms(start);
        return nullptr;
      }
      last_kernel_ = model->kernel();
    }
    fit_ms = elapsed_ms(start);
    return model;
  }

  /// Moves x off previously evaluated points and off earlier points of the
  /// same batch by uniform noise of 1e-6 box widths, on `coords` only (all
  /// coordinates when empty).
  Vector deconflict(const Vector &x, std::size_t t, std::size_t slot, const std::vector<Vector> &batch,
                    bool &jittered, const std::vector<Eigen::Index> &coords = {}) const {
    const Box &box = problem_.box();
    const Eigen::ArrayXd inv_w = box.width().array().inverse();
    auto clashes = [&](const Vector &p) {
      for (Eigen::Index i = 0; i < data_.size(); ++i)
        if (((data_.design().row(i).transpose() - p).array() * inv_w).abs().maxCoeff() < kDuplicateTolerance)
          return true;
      for (const auto &b : batch)
        if (((b - p).array() * inv_w).abs().maxCoeff() < kDuplicateTolerance) return true;
      return false;
    };
    jittered = false;
    if (!clashes(x)) return x;
    jittered = true;
    Rng rng = make_rng(derive_seed(config_.seed, {tag(Stream::jitter), t, slot}));
    std::uniform_real_distribution<double> noise(-1.0, 1.0);
    Vector moved = x;
    for (int attempt = 0; attempt < 100; ++attempt) {
      moved = x;
      if (coords.empty()) {
        for (Eigen::Index j = 0; j < x.size(); ++j) moved[j] += noise(rng) * kJitter * box.width()[j];
      } else {
        for (Eigen::Index j : coords) moved[j] += noise(rng) * kJitter * box.width()[j];
      }
      moved = box.clamp(moved);
      if (!clashes(moved)) break;
    }
    return moved;
  }

  /// Evaluates the points of iteration t (concurrently) and appends them.
  void commit(std::size_t t, const std::vector<Vector> &points, double acquisition_ms, double fit_ms) {
    std::vector<double> values(points.size());
    parallel_for(points.size(), config_.workers, [&](std::size_t i) { values[i] = problem_.evaluate(points[i]); });
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (data_.size() == 0) {
        data_ = ObservationSet(points[i].transpose(), Vector::Constant(1, values[i]));
      } else {
        data_.append(points[i], values[i]);
      }
      record_.evaluations.push_back({points[i], values[i], t, i});
    }
    record_.incumbent_trace.push_back(data_.incumbent().f_min);
    record_.timings.push_back({acquisition_ms, fit_ms});
  }

  static constexpr double kDuplicateTolerance = 1e-9;
  static constexpr double kJitter = 1e-6;

 private:
  const ProblemInstance &problem_;
  LoopConfig config_;
  bool batched_;
  FitConfig fit_config_;
  RunRecord record_;
  ObservationSet data_;
  std::optional<KernelParams> last_kernel_;
};

Seed acquisition_seed(const LoopConfig &config, std::size_t t) {
  return derive_seed(config.seed, {tag(Stream::acquisition), t});
}

}  // namespace

RunRecord run_sequential_ei(const ProblemInstance &problem, const LoopConfig &config) {
  LoopDriver loop(problem, config, Algorithm::sequential_ei);
  loop.initial_design();
  const std::size_t iterations = loop.iterations();
  for (std::size_t t = 1; t <= iterations; ++t) {
    double fit_ms = 0.0;
    const auto model = loop.train(t, fit_ms);
    if (!model) break;
    const auto start = std::chrono::steady_clock::now();
    const double f_min = loop.data().incumbent().f_min;
    const GAConfig ga = acquisition_ga(problem.dim(), loop.config().ga, derive_seed(acquisition_seed(loop.config(), t), {0}));
    const GAResult best = maximize(
        [&model, f_min](const Vector &x) { return expected_improvement(*model, f_min, x); }, problem.box(), ga);
    const double acquisition_ms = elapsed_ms(start);
    QueryTrace trace{t, 0, Subspace::full(problem.dim()).indices(), loop.data().incumbent().x_min, best.best_x,
                     best.best_value, false};
    const Vector x = loop.deconflict(best.best_x, t, 0, {}, trace.jittered);
    loop.record().queries.push_back(std::move(trace));
    loop.commit(t, {x}, acquisition_ms, fit_ms);
  }
  return std::move(loop.record());
}

RunRecord run_batch_essi(const ProblemInstance &problem, const LoopConfig &config) {
  LoopDriver loop(problem, config, Algorithm::batch_essi);
  loop.initial_design();
  const std::size_t iterations = loop.iterations();
  const std::size_t q = loop.config().q;
  for (std::size_t t = 1; t <= iterations; ++t) {
    double fit_ms = 0.0;
    const auto model = loop.train(t, fit_ms);
    if (!model) break;
    const auto start = std::chrono::steady_clock::now();
    const Incumbent snapshot = loop.data().incumbent();
    const auto subspaces = draw_batch(problem.dim(), q, loop.config().subspace_strategy,
                                      derive_seed(loop.config().seed, {tag(Stream::subspace), t}));
    const auto proposals = propose_essi_batch(model, snapshot, subspaces, problem.box(), loop.config().ga,
                                              acquisition_seed(loop.config(), t), loop.config().workers);
    const double acquisition_ms = elapsed_ms(start);

    std::vector<Vector> batch;
    for (std::size_t i = 0; i < q; ++i) {
      QueryTrace trace{t, i, subspaces[i].indices(), snapshot.x_min, proposals[i].x, proposals[i].acquisition_value,
                       false};
      batch.push_back(loop.deconflict(proposals[i].x, t, i, batch, trace.jittered, subspaces[i].indices()));
      loop.record().queries.push_back(std::move(trace));
    }
    loop.commit(t, batch, acquisition_ms, fit_ms);
  }
  return std::move(loop.record());
}

RunRecord run_batch_kb(const ProblemInstance &problem, const LoopConfig &config) {
  LoopDriver loop(problem, config, Algorithm::batch_kb);
  loop.initial_design();
  const std::size_t iterations = loop.iterations();
  const std::size_t q = loop.config().q;
  for (std::size_t t = 1; t <= iterations; ++t) {
    double fit_ms = 0.0;
    const auto model = loop.train(t, fit_ms);
    if (!model) break;
    const auto start = std::chrono::steady_clock::now();
    const Incumbent snapshot = loop.data().incumbent();
    std::vector<Vector> batch;
    std::vector<QueryTrace> traces;
    auto adjust = [&](const Vector &x, std::size_t slot) {
      QueryTrace trace{t, slot, Subspace::full(problem.dim()).indices(), snapshot.x_min, x, 0.0, false};
      batch.push_back(loop.deconflict(x, t, slot, batch, trace.jittered));
      traces.push_back(std::move(trace));
      return batch.back();
    };
    auto selection =
        propose_kb_batch(*model, snapshot.f_min, problem.box(), q, loop.config().ga, acquisition_seed(loop.config(), t), adjust);
    const double acquisition_ms = elapsed_ms(start);
    for (std::size_t i = 0; i < q; ++i) {
      traces[i].acquisition_value = selection.points[i].acquisition_value;
      loop.record().queries.push_back(std::move(traces[i]));
    }
    for (auto &f : selection.fantasies) {
      f.iteration = t;
      loop.record().fantasies.push_back(std::move(f));
    }
    loop.commit(t, batch, acquisition_ms, fit_ms);
  }
  return std::move(loop.record());
}

RunRecord run_random_search(const ProblemInstance &problem, const LoopConfig &config) {
  LoopDriver loop(problem, config, Algorithm::random);
  loop.initial_design();
  const std::size_t iterations = loop.iterations();
  const auto q = static_cast<Eigen::Index>(loop.config().q);
  for (std::size_t t = 1; t <= iterations; ++t) {
    const DesignMatrix x =
        uniform_sample(q, problem.box(), derive_seed(loop.config().seed, {tag(Stream::random_search), t}));
    std::vector<Vector> batch;
    for (Eigen::Index i = 0; i < q; ++i) batch.emplace_back(x.row(i).transpose());
    loop.commit(t, batch, 0.0, 0.0);
  }
  return std::move(loop.record());
}

RunRecord run_algorithm(Algorithm algorithm, const ProblemInstance &problem, const LoopConfig &config) {
  switch (algorithm) {
    case Algorithm::sequential_ei:
      return run_sequential_ei(problem, config);
    case Algorithm::batch_essi:
      return run_batch_essi(problem, config);
    case Algorithm::batch_kb:
      return run_batch_kb(problem, config);
    case Algorithm::random:
      return run_random_search(problem, config);
  }
  throw std::logic_error("run_algorithm: unhandled algorithm");
}

}  // namespace essi
