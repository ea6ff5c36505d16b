#pragma once

#include "essi/rng.hpp"
#include "essi/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace essi {

enum class BaseFunction { sphere, ellipsoid, rosenbrock, rastrigin, ackley, griewank, levy, schwefel };

/// Canonical names in enum order.
const std::vector<std::string> &base_function_names();
std::string base_function_name(BaseFunction base);
/// Throws std::invalid_argument listing the valid names.
BaseFunction parse_base_function(std::string_view name);

/// Conventional search domain of each base function.
Box default_box(BaseFunction base, Eigen::Index d);
/// Untransformed base function g(z) and a global minimizer of it.
double base_value(BaseFunction base, const Eigen::Ref<const Vector> &z);
Vector base_minimizer(BaseFunction base, Eigen::Index d);

/// Haar-distributed random orthogonal matrix: QR of a seeded Gaussian matrix
/// with the signs of R's diagonal folded into Q.
Matrix random_rotation(Eigen::Index d, Seed seed);

/// f(x) = g(R (x - o) + z*) + bias, with global minimizer x* = o.
/// transform_seed = 0 selects identity mode: f(x) = g(x), x* = z*.
class ProblemInstance {
 public:
  BaseFunction base() const { return base_; }
  Eigen::Index dim() const { return box_.dim(); }
  const Box &box() const { return box_; }
  const Vector &shift() const { return shift_; }
  const Matrix &rotation() const { return rotation_; }
  double bias() const { return bias_; }
  double f_star() const { return f_star_; }
  const Vector &x_star() const { return x_star_; }
  Seed transform_seed() const { return transform_seed_; }
  /// Registry name "<base>-d<D>-seed<S>", or the given name of a custom
  /// problem.
  std::string name() const;
  bool is_custom() const { return static_cast<bool>(custom_); }

  /// Throws std::invalid_argument for inputs outside the box.
  double evaluate(const Eigen::Ref<const Vector> &x) const;

 private:
  friend ProblemInstance make_problem(BaseFunction, Eigen::Index, Seed, std::optional<Box>);
  friend ProblemInstance make_custom_problem(std::string, Box, std::function<double(const Vector &)>, double, Vector);

  BaseFunction base_ = BaseFunction::sphere;
  Box box_;
  Vector shift_;
  Matrix rotation_;
  Vector inner_offset_;
  double bias_ = 0.0;
  double f_star_ = 0.0;
  Vector x_star_;
  Seed transform_seed_ = 0;
  std::string custom_name_;
  std::function<double(const Vector &)> custom_;
};

/// The shift o is drawn uniformly inside the central 80% of the box.
ProblemInstance make_problem(BaseFunction base, Eigen::Index d, Seed transform_seed,
                             std::optional<Box> box = std::nullopt);
ProblemInstance make_problem(std::string_view base, Eigen::Index d, Seed transform_seed,
                             std::optional<Box> box = std::nullopt);
/// Parses "<base>-d<D>-seed<S>", e.g. "rosenbrock-d5-seed3".
ProblemInstance make_problem(std::string_view registry_name);

/// Wraps an arbitrary objective with a known minimum. The function must be
/// safe to call concurrently. Not addressable through the registry.
ProblemInstance make_custom_problem(std::string name, Box box, std::function<double(const Vector &)> fn,
                                    double f_star, Vector x_star);

inline double evaluate(const ProblemInstance &problem, const Eigen::Ref<const Vector> &x) {
  return problem.evaluate(x);
}

inline std::pair<double, Vector> global_minimum(const ProblemInstance &problem) {
  return {problem.f_star(), problem.x_star()};
}

}  // namespace essi
