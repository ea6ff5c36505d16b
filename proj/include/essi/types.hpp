#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace essi {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Row-major view of a design: one point per row (n x d).
using DesignMatrix = Eigen::MatrixXd;

using Seed = std::uint64_t;

/// Axis-aligned box [lower, upper] in R^d.
class Box {
 public:
  Box() = default;
  Box(Vector lower, Vector upper);

  /// Same interval [lower, upper] in every one of d coordinates.
  static Box uniform(Eigen::Index d, double lower, double upper);

  Eigen::Index dim() const { return lower_.size(); }
  const Vector &lower() const { return lower_; }
  const Vector &upper() const { return upper_; }
  Vector width() const { return upper_ - lower_; }
  double lower(Eigen::Index i) const { return lower_[i]; }
  double upper(Eigen::Index i) const { return upper_[i]; }

  bool contains(const Eigen::Ref<const Vector> &x, double tol = 0.0) const;
  Vector clamp(const Eigen::Ref<const Vector> &x) const;

  /// Maps x into [0,1]^d and back.
  Vector to_unit(const Eigen::Ref<const Vector> &x) const;
  Vector from_unit(const Eigen::Ref<const Vector> &u) const;

  /// Restriction of the box to the given coordinates, in the given order.
  template <typename IndexRange>
  Box restrict_to(const IndexRange &indices) const {
    Vector lo(static_cast<Eigen::Index>(indices.size()));
    Vector hi(lo.size());
    Eigen::Index k = 0;
    for (auto i : indices) {
      lo[k] = lower_[static_cast<Eigen::Index>(i)];
      hi[k] = upper_[static_cast<Eigen::Index>(i)];
      ++k;
    }
    return Box(std::move(lo), std::move(hi));
  }

 private:
  Vector lower_;
  Vector upper_;
};

/// Best evaluated solution so far.
struct Incumbent {
  Vector x_min;
  double f_min = 0.0;
};

/// Evaluated points D = (X, f(X)) together with their incumbent.
class ObservationSet {
 public:
  ObservationSet() = default;
  ObservationSet(DesignMatrix design, Vector values);

  Eigen::Index size() const { return design_.rows(); }
  Eigen::Index dim() const { return design_.cols(); }
  const DesignMatrix &design() const { return design_; }
  const Vector &values() const { return values_; }
  const Incumbent &incumbent() const { return incumbent_; }

  /// Appends one evaluated point; ties keep the earlier incumbent.
  void append(const Eigen::Ref<const Vector> &x, double f);

 private:
  void refresh_incumbent();

  DesignMatrix design_;
  Vector values_;
  Incumbent incumbent_;
};

/// Raised when a covariance matrix fails to factorize.
class NotPositiveDefinite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace essi
