#include "essi/gp.hpp"

#include "essi/ga.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace essi {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

Box bounding_box(const DesignMatrix &x) {
  Vector lo = x.colwise().minCoeff().transpose();
  Vector hi = x.colwise().maxCoeff().transpose();
  for (Eigen::Index j = 0; j < lo.size(); ++j) {
    if (!(hi[j] > lo[j])) {
      lo[j] -= 0.5;
      hi[j] += 0.5;
    }
  }
  return Box(std::move(lo), std::move(hi));
}

/// Squared scaled distances between rows of a and b.
Matrix scaled_sqdist(const DesignMatrix &a, const DesignMatrix &b, const Vector &lengthscales) {
  Matrix s = Matrix::Zero(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const double inv = 1.0 / lengthscales[j];
    const Eigen::ArrayXd ca = a.col(j).array() * inv;
    const Eigen::ArrayXd cb = b.col(j).array() * inv;
    s.array() += (ca.replicate(1, b.rows()) - cb.transpose().replicate(a.rows(), 1)).square();
  }
  return s;
}

void require_dim(const KernelParams &params, Eigen::Index d, const char *who) {
  if (params.dim() != d) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

}  // namespace

void KernelParams::validate(Eigen::Index d) const {
  if (lengthscales.size() != d) throw std::invalid_argument("KernelParams: need one lengthscale per dimension");
  if (!(signal_variance > 0.0) || !std::isfinite(signal_variance))
    throw std::invalid_argument("KernelParams: signal variance must be positive");
  if (!(lengthscales.array() > 0.0).all() || !lengthscales.allFinite())
    throw std::invalid_argument("KernelParams: lengthscales must be positive");
  if (!(nugget >= 0.0)) throw std::invalid_argument("KernelParams: nugget must be nonnegative");
}

Matrix kernel_matrix(const KernelParams &params, const DesignMatrix &a, const DesignMatrix &b) {
  require_dim(params, a.cols(), "kernel_matrix");
  require_dim(params, b.cols(), "kernel_matrix");
  return params.signal_variance * (-0.5 * scaled_sqdist(a, b, params.lengthscales).array()).exp().matrix();
}

GaussianProcessModel GaussianProcessModel::condition(DesignMatrix inputs, Vector values, double mean_constant,
                                                     KernelParams kernel, std::optional<Box> domain) {
  if (inputs.rows() != values.size())
    throw std::invalid_argument("GaussianProcessModel: input rows and value count differ");
  if (inputs.rows() < 1) throw std::invalid_argument("GaussianProcessModel: needs at least one training point");
  kernel.validate(inputs.cols());
  if (domain && domain->dim() != inputs.cols())
    throw std::invalid_argument("GaussianProcessModel: domain dimension mismatch");

  GaussianProcessModel model;
  model.domain_ = domain ? *domain : bounding_box(inputs);
  Matrix cov = kernel_matrix(kernel, inputs, inputs);
  cov.diagonal().array() += kernel.nugget;
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success || !llt.matrixLLT().allFinite())
    throw NotPositiveDefinite("GaussianProcessModel: training covariance is not positive definite");
  model.factor_ = llt.matrixL();
  model.alpha_ = llt.solve((values.array() - mean_constant).matrix());
  model.inputs_ = std::move(inputs);
  model.values_ = std::move(values);
  model.mean_constant_ = mean_constant;
  model.kernel_ = std::move(kernel);
  return model;
}

Prediction GaussianProcessModel::predict(const Eigen::Ref<const Vector> &x) const {
  if (x.size() != dim()) throw std::invalid_argument("predict: dimension mismatch");
  const Eigen::ArrayXd inv_l = kernel_.lengthscales.array().inverse();
  const Eigen::ArrayXd sq =
      ((inputs_.rowwise() - x.transpose()).array().rowwise() * inv_l.transpose()).square().rowwise().sum();
  const Vector k = kernel_.signal_variance * (-0.5 * sq).exp().matrix();
  Prediction out;
  out.mean = mean_constant_ + k.dot(alpha_);
  const Vector v = factor_.triangularView<Eigen::Lower>().solve(k);
  out.variance = std::max(0.0, kernel_.signal_variance - v.squaredNorm());
  return out;
}

std::optional<Eigen::Index> GaussianProcessModel::find_near_duplicate(const Eigen::Ref<const Vector> &x,
                                                                      double tolerance) const {
  const Eigen::ArrayXd inv_w = domain_.width().array().inverse();
  for (Eigen::Index i = 0; i < inputs_.rows(); ++i) {
    const double gap = ((inputs_.row(i).transpose() - x).array() * inv_w).abs().maxCoeff();
    if (gap < tolerance) return i;
  }
  return std::nullopt;
}

GaussianProcessModel GaussianProcessModel::fantasy_update(const Eigen::Ref<const Vector> &x, double y_fake,
                                                          double duplicate_tolerance) const {
  if (x.size() != dim()) throw std::invalid_argument("fantasy_update: dimension mismatch");
  if (auto dup = find_near_duplicate(x, duplicate_tolerance)) {
    std::ostringstream msg;
    msg << "fantasy_update: point is a near-duplicate of training input " << *dup;
    throw std::invalid_argument(msg.str());
  }
  const Eigen::Index n = size();
  const Vector k = kernel_matrix(kernel_, inputs_, x.transpose()).col(0);
  const Vector l = factor_.triangularView<Eigen::Lower>().solve(k);
  const double pivot = kernel_.signal_variance + kernel_.nugget - l.squaredNorm();
  if (!(pivot > 0.0)) throw NotPositiveDefinite("fantasy_update: extended covariance is not positive definite");

  GaussianProcessModel out;
  out.domain_ = domain_;
  out.kernel_ = kernel_;
  out.mean_constant_ = mean_constant_;
  out.inputs_.resize(n + 1, dim());
  out.inputs_.topRows(n) = inputs_;
  out.inputs_.row(n) = x.transpose();
  out.values_.resize(n + 1);
  out.values_.head(n) = values_;
  out.values_[n] = y_fake;
  out.factor_ = Matrix::Zero(n + 1, n + 1);
  out.factor_.topLeftCorner(n, n) = factor_;
  out.factor_.block(n, 0, 1, n) = l.transpose();
  out.factor_(n, n) = std::sqrt(pivot);
  const Matrix &factor = out.factor_;
  const Vector z = factor.triangularView<Eigen::Lower>().solve((out.values_.array() - mean_constant_).matrix());
  out.alpha_ = factor.triangularView<Eigen::Lower>().transpose().solve(z);
  return out;
}

double log_likelihood(const ObservationSet &data, double mean_constant, const KernelParams &params) {
  params.validate(data.dim());
  const Eigen::Index n = data.size();
  Matrix cov = kernel_matrix(params, data.design(), data.design());
  cov.diagonal().array() += params.nugget;
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success || !llt.matrixLLT().allFinite())
    throw NotPositiveDefinite("log_likelihood: covariance is not positive definite");
  const Vector resid = (data.values().array() - mean_constant).matrix();
  const Vector alpha = llt.solve(resid);
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return -0.5 * resid.dot(alpha) - 0.5 * log_det - 0.5 * static_cast<double>(n) * kLog2Pi;
}

Vector log_likelihood_gradient(const ObservationSet &data, double mean_constant, const KernelParams &params) {
  params.validate(data.dim());
  const Eigen::Index n = data.size();
  const Eigen::Index d = data.dim();
  const Matrix kse = kernel_matrix(params, data.design(), data.design());
  Matrix cov = kse;
  cov.diagonal().array() += params.nugget;
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("log_likelihood_gradient: covariance is not positive definite");
  const Vector alpha = llt.solve((data.values().array() - mean_constant).matrix());
  const Matrix weight = alpha * alpha.transpose() - llt.solve(Matrix::Identity(n, n));

  Vector grad(d + 1);
  for (Eigen::Index j = 0; j < d; ++j) {
    const Eigen::ArrayXd c = data.design().col(j).array() / params.lengthscales[j];
    const Eigen::ArrayXXd sq = (c.replicate(1, n) - c.transpose().replicate(n, 1)).square();
    grad[j] = 0.5 * (weight.array() * kse.array() * sq).sum();
  }
  grad[d] = 0.5 * (weight.array() * kse.array()).sum();
  return grad;
}

ObservationSet deduplicate(const ObservationSet &data, const Box &domain, double tolerance) {
  const Eigen::ArrayXd inv_w = domain.width().array().inverse();
  std::vector<Eigen::Index> kept;
  std::vector<Eigen::Index> source;
  Vector values = data.values();
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    bool merged = false;
    for (std::size_t k = 0; k < kept.size(); ++k) {
      const double gap =
          ((data.design().row(i) - data.design().row(source[k])).transpose().array() * inv_w).abs().maxCoeff();
      if (gap < tolerance) {
        if (data.values()[i] < values[kept[k]]) {
          values[kept[k]] = data.values()[i];
          source[k] = i;
        }
        merged = true;
        break;
      }
    }
    if (!merged) {
      kept.push_back(i);
      source.push_back(i);
    }
  }
  if (kept.size() == static_cast<std::size_t>(data.size())) return data;
  DesignMatrix x(static_cast<Eigen::Index>(kept.size()), data.dim());
  Vector y(x.rows());
  for (std::size_t k = 0; k < kept.size(); ++k) {
    x.row(static_cast<Eigen::Index>(k)) = data.design().row(source[k]);
    y[static_cast<Eigen::Index>(k)] = values[kept[k]];
  }
  return ObservationSet(std::move(x), std::move(y));
}

namespace {

/// Log-likelihood of standardized outputs over unit-domain inputs, with
/// per-dimension squared differences cached once per fit.
class NormalizedLikelihood {
 public:
  NormalizedLikelihood(const DesignMatrix &unit_inputs, Vector residual, double relative_nugget)
      : residual_(std::move(residual)), relative_nugget_(relative_nugget) {
    const Eigen::Index n = unit_inputs.rows();
    for (Eigen::Index j = 0; j < unit_inputs.cols(); ++j) {
      const Eigen::ArrayXd c = unit_inputs.col(j).array();
      sqdiff_.emplace_back((c.replicate(1, n) - c.transpose().replicate(n, 1)).square().matrix());
    }
  }

  Eigen::Index size() const { return residual_.size(); }

  /// Unit-variance correlation plus relative nugget.
  Matrix correlation(const Vector &lengthscales) const {
    Matrix s = Matrix::Zero(size(), size());
    for (std::size_t j = 0; j < sqdiff_.size(); ++j) {
      const double l = lengthscales[static_cast<Eigen::Index>(j)];
      s.noalias() += sqdiff_[j] * (1.0 / (l * l));
    }
    Matrix r = (-0.5 * s.array()).exp().matrix();
    r.diagonal().array() += relative_nugget_;
    return r;
  }

  std::optional<double> evaluate(const Vector &lengthscales, double signal_variance) const {
    Eigen::LLT<Matrix> llt(correlation(lengthscales));
    if (llt.info() != Eigen::Success) return std::nullopt;
    const double quad = residual_.dot(llt.solve(residual_)) / signal_variance;
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum() +
                           static_cast<double>(size()) * std::log(signal_variance);
    const double ll = -0.5 * quad - 0.5 * log_det - 0.5 * static_cast<double>(size()) * kLog2Pi;
    if (!std::isfinite(ll)) return std::nullopt;
    return ll;
  }

  /// Closed-form maximizer of the likelihood in the signal variance.
  std::optional<double> profile_variance(const Vector &lengthscales) const {
    Eigen::LLT<Matrix> llt(correlation(lengthscales));
    if (llt.info() != Eigen::Success) return std::nullopt;
    return residual_.dot(llt.solve(residual_)) / static_cast<double>(size());
  }

 private:
  std::vector<Matrix> sqdiff_;
  Vector residual_;
  double relative_nugget_;
};

}  // namespace

FitReport fit_with_report(const ObservationSet &raw, const FitConfig &config, Seed seed) {
  if (raw.size() < 2) throw std::invalid_argument("fit: need at least two observations");
  const Box domain = config.domain ? *config.domain : bounding_box(raw.design());
  if (domain.dim() != raw.dim()) throw std::invalid_argument("fit: domain dimension mismatch");
  const ObservationSet data = deduplicate(raw, domain, config.duplicate_tolerance);
  if (data.size() < 2) throw std::invalid_argument("fit: fewer than two distinct observations after merging duplicates");

  const Eigen::Index n = data.size();
  const Eigen::Index d = data.dim();
  const double y_mean = data.values().mean();
  double y_std = std::sqrt((data.values().array() - y_mean).square().mean());
  if (!(y_std > 0.0) || !std::isfinite(y_std)) y_std = 1.0;

  DesignMatrix unit(n, d);
  for (Eigen::Index i = 0; i < n; ++i) unit.row(i) = domain.to_unit(data.design().row(i).transpose()).transpose();
  const NormalizedLikelihood likelihood(unit, (data.values().array() - y_mean).matrix() / y_std,
                                        config.relative_nugget);

  // Search vector: log10 lengthscales (1 or d entries), then log10 variance.
  const Eigen::Index n_scales = config.isotropic ? 1 : d;
  Vector lo(n_scales + 1);
  Vector hi(n_scales + 1);
  lo.head(n_scales).setConstant(std::log10(config.lengthscale_min));
  hi.head(n_scales).setConstant(std::log10(config.lengthscale_max));
  lo[n_scales] = std::log10(config.variance_min);
  hi[n_scales] = std::log10(config.variance_max);
  const Box search(lo, hi);

  auto lengthscales_of = [&](const Vector &theta) {
    Vector l(d);
    for (Eigen::Index j = 0; j < d; ++j) l[j] = std::pow(10.0, theta[config.isotropic ? 0 : j]);
    return l;
  };

  std::size_t failures = 0;
  double best_candidate = -std::numeric_limits<double>::infinity();
  const Objective objective = [&](const Vector &theta) {
    const auto ll = likelihood.evaluate(lengthscales_of(theta), std::pow(10.0, theta[n_scales]));
    if (!ll) {
      ++failures;
      return -std::numeric_limits<double>::infinity();
    }
    best_candidate = std::max(best_candidate, *ll);
    return *ll;
  };

  std::vector<Vector> initial;
  if (config.warm_start && config.warm_start->dim() == d) {
    Vector theta(n_scales + 1);
    const Vector width = domain.width();
    for (Eigen::Index j = 0; j < n_scales; ++j)
      theta[j] = std::log10(config.warm_start->lengthscales[j] / width[j]);
    theta[n_scales] = std::log10(config.warm_start->signal_variance / (y_std * y_std));
    initial.push_back(search.clamp(theta));
  }

  GAConfig ga = GAConfig::defaults_for(n_scales + 1, seed);
  ga.population = config.population;
  ga.generations = config.generations;
  const GAResult found = maximize(objective, search, ga, initial);
  if (!std::isfinite(found.best_value)) {
    std::ostringstream msg;
    msg << "fit: every one of " << found.evaluations << " hyperparameter candidates gave a non-positive-definite "
        << "covariance (n = " << n << ", relative nugget = " << config.relative_nugget << ")";
    throw NotPositiveDefinite(msg.str());
  }

  const Vector unit_lengthscales = lengthscales_of(found.best_x);
  double unit_variance = std::pow(10.0, found.best_x[n_scales]);
  double best_ll = found.best_value;
  if (const auto profiled = likelihood.profile_variance(unit_lengthscales)) {
    const double candidate = std::clamp(*profiled, config.variance_min, config.variance_max);
    if (const auto ll = likelihood.evaluate(unit_lengthscales, candidate); ll && *ll >= best_ll) {
      unit_variance = candidate;
      best_ll = *ll;
    }
  }

  KernelParams kernel;
  kernel.lengthscales = unit_lengthscales.cwiseProduct(domain.width());
  kernel.signal_variance = unit_variance * y_std * y_std;
  kernel.nugget = config.relative_nugget * kernel.signal_variance;

  const double shift = static_cast<double>(n) * std::log(y_std);
  FitReport report;
  report.model = GaussianProcessModel::condition(data.design(), data.values(), y_mean, std::move(kernel), domain);
  report.log_likelihood = best_ll - shift;
  report.best_candidate_log_likelihood = best_candidate - shift;
  report.candidates = found.evaluations;
  report.failed_candidates = failures;
  return report;
}

std::string to_snapshot(const GaussianProcessModel &model) {
  std::ostringstream out;
  out << std::setprecision(17);
  const auto row = [&](const char *key, const Vector &v) {
    out << key;
    for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << v[i];
    out << '\n';
  };
  out << "essi-gp-snapshot 1\n";
  out << "dim " << model.dim() << "\ncount " << model.size() << '\n';
  out << "mean_constant " << model.mean_constant() << '\n';
  out << "signal_variance " << model.kernel().signal_variance << '\n';
  out << "nugget " << model.kernel().nugget << '\n';
  row("lengthscales", model.kernel().lengthscales);
  row("domain_lower", model.domain().lower());
  row("domain_upper", model.domain().upper());
  out << "data\n";
  for (Eigen::Index i = 0; i < model.size(); ++i) {
    for (Eigen::Index j = 0; j < model.dim(); ++j) out << model.training_inputs()(i, j) << ' ';
    out << model.training_values()[i] << '\n';
  }
  return out.str();
}

GaussianProcessModel from_snapshot(const std::string &text) {
  std::istringstream in(text);
  auto expect = [&](const std::string &key) {
    std::string got;
    if (!(in >> got) || got != key) throw std::invalid_argument("from_snapshot: expected '" + key + "'");
  };
  auto read_vec = [&](Eigen::Index size) {
    Vector v(size);
    for (Eigen::Index i = 0; i < size; ++i)
      if (!(in >> v[i])) throw std::invalid_argument("from_snapshot: truncated vector");
    return v;
  };
  int version = 0;
  expect("essi-gp-snapshot");
  in >> version;
  if (version != 1) throw std::invalid_argument("from_snapshot: unsupported version");
  Eigen::Index d = 0, n = 0;
  expect("dim");
  in >> d;
  expect("count");
  in >> n;
  if (d < 1 || n < 1) throw std::invalid_argument("from_snapshot: bad sizes");
  KernelParams kernel;
  double mean = 0.0;
  expect("mean_constant");
  in >> mean;
  expect("signal_variance");
  in >> kernel.signal_variance;
  expect("nugget");
  in >> kernel.nugget;
  expect("lengthscales");
  kernel.lengthscales = read_vec(d);
  expect("domain_lower");
  Vector lo = read_vec(d);
  expect("domain_upper");
  Vector hi = read_vec(d);
  expect("data");
  DesignMatrix x(n, d);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i) = read_vec(d).transpose();
    if (!(in >> y[i])) throw std::invalid_argument("from_snapshot: truncated data");
  }
  return GaussianProcessModel::condition(std::move(x), std::move(y), mean, std::move(kernel),
                                         Box(std::move(lo), std::move(hi)));
}

}  // namespace essi
