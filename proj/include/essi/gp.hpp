#pragma once

#include "essi/rng.hpp"
#include "essi/types.hpp"

#include <cmath>
#include <optional>
#include <string>

namespace essi {

/// Squared-exponential (ARD) kernel hyperparameters, in the units of the
/// inputs and outputs they are applied to. `nugget` is an absolute diagonal
/// term added to the training covariance only.
struct KernelParams {
  double signal_variance = 1.0;
  Vector lengthscales;
  double nugget = 0.0;

  Eigen::Index dim() const { return lengthscales.size(); }
  /// Throws std::invalid_argument unless all invariants hold for dimension d.
  void validate(Eigen::Index d) const;
};

/// k(x, x') = sf2 * exp(-1/2 sum_i ((x_i - x'_i) / l_i)^2)
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar kernel_eval(const KernelParams &params, const Eigen::MatrixBase<DerivedA> &x,
                                      const Eigen::MatrixBase<DerivedB> &x2) {
  if (x.size() != params.dim() || x2.size() != params.dim())
    throw std::invalid_argument("kernel_eval: dimension mismatch");
  const auto scaled = (x.derived() - x2.derived()).array() / params.lengthscales.array();
  return params.signal_variance * std::exp(-0.5 * scaled.square().sum());
}

/// Cross-covariance between the rows of a and the rows of b (no nugget).
Matrix kernel_matrix(const KernelParams &params, const DesignMatrix &a, const DesignMatrix &b);

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

/// Posterior of a constant-mean GP conditioned on noise-free training data.
/// Immutable once built; shareable across threads.
class GaussianProcessModel {
 public:
  GaussianProcessModel() = default;

  /// Conditions a GP with fixed hyperparameters on (inputs, values). The
  /// optional domain is used only for near-duplicate detection; it defaults
  /// to the bounding box of the inputs. Throws NotPositiveDefinite when
  /// K + nugget*I cannot be factorized.
  static GaussianProcessModel condition(DesignMatrix inputs, Vector values, double mean_constant, KernelParams kernel,
                                        std::optional<Box> domain = std::nullopt);

  Eigen::Index dim() const { return inputs_.cols(); }
  Eigen::Index size() const { return inputs_.rows(); }
  double mean_constant() const { return mean_constant_; }
  const KernelParams &kernel() const { return kernel_; }
  const DesignMatrix &training_inputs() const { return inputs_; }
  const Vector &training_values() const { return values_; }
  /// Lower Cholesky factor of K + nugget*I.
  const Matrix &factor() const { return factor_; }
  /// (K + nugget*I)^-1 (f(X) - m).
  const Vector &alpha() const { return alpha_; }
  const Box &domain() const { return domain_; }

  Prediction predict(const Eigen::Ref<const Vector> &x) const;

  /// Same hyperparameters, one more (pseudo-)observation. Rejects inputs
  /// within the duplicate tolerance of an existing training input.
  GaussianProcessModel fantasy_update(const Eigen::Ref<const Vector> &x, double y_fake,
                                      double duplicate_tolerance = 1e-9) const;

  /// Index of a training input within `tolerance` (max-norm in unit-domain
  /// coordinates) of x, if any.
  std::optional<Eigen::Index> find_near_duplicate(const Eigen::Ref<const Vector> &x, double tolerance) const;

 private:
  DesignMatrix inputs_;
  Vector values_;
  double mean_constant_ = 0.0;
  KernelParams kernel_;
  Box domain_;
  Matrix factor_;
  Vector alpha_;
};

inline Prediction predict(const GaussianProcessModel &model, const Eigen::Ref<const Vector> &x) {
  return model.predict(x);
}

inline GaussianProcessModel fantasy_update(const GaussianProcessModel &model, const Eigen::Ref<const Vector> &x,
                                           double y_fake) {
  return model.fantasy_update(x, y_fake);
}

/// Log density of f(X) under N(mean_constant, K + nugget*I). Throws
/// NotPositiveDefinite if the covariance does not factorize.
double log_likelihood(const ObservationSet &data, double mean_constant, const KernelParams &params);

/// Gradient of log_likelihood with respect to
/// [log l_1, ..., log l_d, log signal_variance], nugget held fixed.
Vector log_likelihood_gradient(const ObservationSet &data, double mean_constant, const KernelParams &params);

struct FitConfig {
  /// Nugget as a fraction of the signal variance.
  double relative_nugget = 1e-10;
  bool isotropic = false;
  int population = 30;
  int generations = 50;
  /// Points closer than this (max-norm, unit-domain coordinates) are merged.
  double duplicate_tolerance = 1e-9;
  /// Lengthscale search range, as multiples of each domain width.
  double lengthscale_min = 1e-3;
  double lengthscale_max = 1e3;
  /// Signal-variance search range, as multiples of var(y).
  double variance_min = 1e-6;
  double variance_max = 1e6;
  /// Search domain used to normalize inputs; bounding box of data if unset.
  std::optional<Box> domain;
  /// Hyperparameters injected into the initial search population.
  std::optional<KernelParams> warm_start;
};

struct FitReport {
  GaussianProcessModel model;
  double log_likelihood = 0.0;
  /// Best log-likelihood among candidates visited by the search.
  double best_candidate_log_likelihood = 0.0;
  std::size_t candidates = 0;
  std::size_t failed_candidates = 0;
};

/// Maximum-likelihood fit: mean fixed to the sample mean, log-lengthscales
/// and log signal variance searched by the GA on normalized data, then the
/// signal variance refined in closed form.
FitReport fit_with_report(const ObservationSet &data, const FitConfig &config, Seed seed);

inline GaussianProcessModel fit(const ObservationSet &data, const FitConfig &config, Seed seed) {
  return fit_with_report(data, config, seed).model;
}

/// Merges points closer than `tolerance` (max-norm in unit-domain
/// coordinates), keeping the lower objective value. First occurrence keeps
/// its position.
ObservationSet deduplicate(const ObservationSet &data, const Box &domain, double tolerance);

/// Text snapshot of hyperparameters and training data (17 significant
/// digits, round-trips exactly).
std::string to_snapshot(const GaussianProcessModel &model);
GaussianProcessModel from_snapshot(const std::string &text);

}  // namespace essi
