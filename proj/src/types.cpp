#include "essi/types.hpp"

#include <sstream>

namespace essi {

Box::Box(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() < 1) throw std::invalid_argument("Box: dimension must be at least 1");
  if (lower_.size() != upper_.size())
    throw std::invalid_argument("Box: lower and upper bounds differ in dimension");
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (!(lower_[i] < upper_[i])) {
      std::ostringstream msg;
      msg << "Box: lower bound must be strictly below upper bound in coordinate " << i << " (got ["
          << lower_[i] << ", " << upper_[i] << "])";
      throw std::invalid_argument(msg.str());
    }
  }
}

Box Box::uniform(Eigen::Index d, double lower, double upper) {
  return Box(Vector::Constant(d, lower), Vector::Constant(d, upper));
}

bool Box::contains(const Eigen::Ref<const Vector> &x, double tol) const {
  if (x.size() != dim()) return false;
  for (Eigen::Index i = 0; i < dim(); ++i) {
    if (!(x[i] >= lower_[i] - tol && x[i] <= upper_[i] + tol)) return false;
  }
  return true;
}

Vector Box::clamp(const Eigen::Ref<const Vector> &x) const {
  return x.cwiseMax(lower_).cwiseMin(upper_);
}

Vector Box::to_unit(const Eigen::Ref<const Vector> &x) const {
  return (x - lower_).cwiseQuotient(upper_ - lower_);
}

Vector Box::from_unit(const Eigen::Ref<const Vector> &u) const {
  return lower_ + u.cwiseProduct(upper_ - lower_);
}

ObservationSet::ObservationSet(DesignMatrix design, Vector values)
    : design_(std::move(design)), values_(std::move(values)) {
  if (design_.rows() != values_.size())
    throw std::invalid_argument("ObservationSet: design rows and value count differ");
  if (design_.rows() < 1) throw std::invalid_argument("ObservationSet: needs at least one point");
  refresh_incumbent();
}

void ObservationSet::append(const Eigen::Ref<const Vector> &x, double f) {
  if (design_.rows() > 0 && x.size() != design_.cols())
    throw std::invalid_argument("ObservationSet::append: dimension mismatch");
  const Eigen::Index n = design_.rows();
  design_.conservativeResize(n + 1, x.size());
  design_.row(n) = x.transpose();
  values_.conservativeResize(n + 1);
  values_[n] = f;
  if (n == 0 || f < incumbent_.f_min) {
    incumbent_.f_min = f;
    incumbent_.x_min = x;
  }
}

void ObservationSet::refresh_incumbent() {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < values_.size(); ++i)
    if (values_[i] < values_[best]) best = i;
  incumbent_.f_min = values_[best];
  incumbent_.x_min = design_.row(best).transpose();
}

}  // namespace essi
