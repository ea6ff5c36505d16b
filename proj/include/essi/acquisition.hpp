#pragma once

#include "essi/gp.hpp"
#include "essi/subspace.hpp"
#include "essi/types.hpp"

#include <memory>

namespace essi {

/// Standard normal density and distribution function (Phi via erfc).
double normal_pdf(double u);
double normal_cdf(double u);

/// Posterior standard deviations at or below this use the deterministic
/// limit max(f_min - mu, 0).
inline constexpr double kSigmaFloor = 1e-12;

/// EI of a N(mean, sigma^2) outcome against f_min (minimization).
double expected_improvement(double mean, double sigma, double f_min);

double expected_improvement(const GaussianProcessModel &model, double f_min, const Eigen::Ref<const Vector> &x);

/// x_min with the subspace coordinates replaced by y, in index order.
Vector embed(const Incumbent &incumbent, const Subspace &subspace, const Eigen::Ref<const Vector> &y);

/// EI restricted to an axis-aligned slice through the incumbent.
struct AcquisitionSpec {
  std::shared_ptr<const GaussianProcessModel> model;
  Incumbent incumbent;
  Subspace subspace;
  /// Problem bounds at the subspace coordinates.
  Box box;

  static AcquisitionSpec make(std::shared_ptr<const GaussianProcessModel> model, Incumbent incumbent,
                              Subspace subspace, const Box &problem_box);
};

/// Expected subspace improvement at y (a point of spec.box).
double essi(const AcquisitionSpec &spec, const Eigen::Ref<const Vector> &y);

}  // namespace essi
