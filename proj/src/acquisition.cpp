#include "essi/acquisition.hpp"

#include <cmath>
#include <numbers>

namespace essi {

double normal_pdf(double u) { return std::exp(-0.5 * u * u) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2); }

double normal_cdf(double u) { return 0.5 * std::erfc(-u / std::numbers::sqrt2); }

double expected_improvement(double mean, double sigma, double f_min) {
  const double gain = f_min - mean;
  if (!(sigma > kSigmaFloor)) return std::max(gain, 0.0);
  const double u = gain / sigma;
  return std::max(0.0, gain * normal_cdf(u) + sigma * normal_pdf(u));
}

double expected_improvement(const GaussianProcessModel &model, double f_min, const Eigen::Ref<const Vector> &x) {
  const Prediction p = model.predict(x);
  return expected_improvement(p.mean, std::sqrt(p.variance), f_min);
}

Vector embed(const Incumbent &incumbent, const Subspace &subspace, const Eigen::Ref<const Vector> &y) {
  if (y.size() != subspace.size()) throw std::invalid_argument("embed: subspace point has the wrong length");
  if (incumbent.x_min.size() != subspace.ambient_dim())
    throw std::invalid_argument("embed: incumbent dimension does not match subspace");
  Vector z = incumbent.x_min;
  for (Eigen::Index k = 0; k < y.size(); ++k) z[subspace.indices()[static_cast<std::size_t>(k)]] = y[k];
  return z;
}

AcquisitionSpec AcquisitionSpec::make(std::shared_ptr<const GaussianProcessModel> model, Incumbent incumbent,
                                      Subspace subspace, const Box &problem_box) {
  if (!model) throw std::invalid_argument("AcquisitionSpec: model is null");
  if (subspace.ambient_dim() != model->dim() || problem_box.dim() != model->dim() ||
      incumbent.x_min.size() != model->dim())
    throw std::invalid_argument("AcquisitionSpec: dimension mismatch between model, incumbent, subspace and box");
  AcquisitionSpec spec;
  spec.box = problem_box.restrict_to(subspace.indices());
  spec.model = std::move(model);
  spec.incumbent = std::move(incumbent);
  spec.subspace = std::move(subspace);
  return spec;
}

double essi(const AcquisitionSpec &spec, const Eigen::Ref<const Vector> &y) {
  if (!spec.box.contains(y, 1e-12)) throw std::invalid_argument("essi: point lies outside the subspace box");
  return expected_improvement(*spec.model, spec.incumbent.f_min, embed(spec.incumbent, spec.subspace, y));
}

}  // namespace essi
