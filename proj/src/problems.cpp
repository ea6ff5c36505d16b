#include "essi/problems.hpp"

#include <Eigen/QR>

#include <cmath>
#include <numbers>
#include <regex>
#include <sstream>

namespace essi {

namespace {

constexpr double kPi = std::numbers::pi;

double schwefel_term(double y, double d) {
  if (std::abs(y) <= 500.0) return y * std::sin(std::sqrt(std::abs(y)));
  if (y > 500.0) {
    const double m = 500.0 - std::fmod(y, 500.0);
    return m * std::sin(std::sqrt(std::abs(m))) - (y - 500.0) * (y - 500.0) / (10000.0 * d);
  }
  const double m = std::fmod(std::abs(y), 500.0) - 500.0;
  return m * std::sin(std::sqrt(std::abs(m))) - (y + 500.0) * (y + 500.0) / (10000.0 * d);
}

}  // namespace

const std::vector<std::string> &base_function_names() {
  static const std::vector<std::string> names{"sphere",   "ellipsoid", "rosenbrock", "rastrigin",
                                              "ackley",   "griewank",  "levy",       "schwefel"};
  return names;
}

std::string base_function_name(BaseFunction base) {
  return base_function_names()[static_cast<std::size_t>(base)];
}

BaseFunction parse_base_function(std::string_view name) {
  const auto &names = base_function_names();
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<BaseFunction>(i);
  std::ostringstream msg;
  msg << "unknown base function '" << name << "'; valid names:";
  for (const auto &n : names) msg << ' ' << n;
  throw std::invalid_argument(msg.str());
}

Box default_box(BaseFunction base, Eigen::Index d) {
  switch (base) {
    case BaseFunction::sphere:
    case BaseFunction::ellipsoid:
    case BaseFunction::rastrigin:
      return Box::uniform(d, -5.12, 5.12);
    case BaseFunction::rosenbrock:
      return Box::uniform(d, -2.048, 2.048);
    case BaseFunction::ackley:
      return Box::uniform(d, -32.768, 32.768);
    case BaseFunction::griewank:
      return Box::uniform(d, -600.0, 600.0);
    case BaseFunction::levy:
      return Box::uniform(d, -10.0, 10.0);
    case BaseFunction::schwefel:
      return Box::uniform(d, -500.0, 500.0);
  }
  throw std::logic_error("default_box: unhandled base function");
}

double base_value(BaseFunction base, const Eigen::Ref<const Vector> &z) {
  const Eigen::Index d = z.size();
  const double dd = static_cast<double>(d);
  switch (base) {
    case BaseFunction::sphere:
      return z.squaredNorm();
    case BaseFunction::ellipsoid: {
      double sum = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) {
        const double expo = d > 1 ? 6.0 * static_cast<double>(i) / (dd - 1.0) : 0.0;
        sum += std::pow(10.0, expo) * z[i] * z[i];
      }
      return sum;
    }
    case BaseFunction::rosenbrock: {
      if (d == 1) return (z[0] - 1.0) * (z[0] - 1.0);
      double sum = 0.0;
      for (Eigen::Index i = 0; i + 1 < d; ++i) {
        const double a = z[i + 1] - z[i] * z[i];
        const double b = z[i] - 1.0;
        sum += 100.0 * a * a + b * b;
      }
      return sum;
    }
    case BaseFunction::rastrigin:
      return 10.0 * dd + (z.array().square() - 10.0 * (2.0 * kPi * z.array()).cos()).sum();
    case BaseFunction::ackley: {
      const double rms = std::sqrt(z.squaredNorm() / dd);
      const double cosine = (2.0 * kPi * z.array()).cos().mean();
      return -20.0 * std::exp(-0.2 * rms) - std::exp(cosine) + 20.0 + std::numbers::e;
    }
    case BaseFunction::griewank: {
      double prod = 1.0;
      for (Eigen::Index i = 0; i < d; ++i) prod *= std::cos(z[i] / std::sqrt(static_cast<double>(i + 1)));
      return 1.0 + z.squaredNorm() / 4000.0 - prod;
    }
    case BaseFunction::levy: {
      const Eigen::ArrayXd w = 1.0 + (z.array() - 1.0) / 4.0;
      const double head = std::pow(std::sin(kPi * w[0]), 2);
      double mid = 0.0;
      for (Eigen::Index i = 0; i + 1 < d; ++i)
        mid += (w[i] - 1.0) * (w[i] - 1.0) * (1.0 + 10.0 * std::pow(std::sin(kPi * w[i] + 1.0), 2));
      const double last = w[d - 1];
      const double tail = (last - 1.0) * (last - 1.0) * (1.0 + std::pow(std::sin(2.0 * kPi * last), 2));
      return head + mid + tail;
    }
    case BaseFunction::schwefel: {
      double sum = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) sum += schwefel_term(z[i] + 420.9687462275036, dd);
      return 418.9828872724338 * dd - sum;
    }
  }
  throw std::logic_error("base_value: unhandled base function");
}

Vector base_minimizer(BaseFunction base, Eigen::Index d) {
  switch (base) {
    case BaseFunction::rosenbrock:
    case BaseFunction::levy:
      return Vector::Ones(d);
    default:
      return Vector::Zero(d);
  }
}

Matrix random_rotation(Eigen::Index d, Seed seed) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix gauss(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) gauss(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(gauss);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < d; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

std::string ProblemInstance::name() const {
  if (custom_) return custom_name_;
  std::ostringstream out;
  out << base_function_name(base_) << "-d" << dim() << "-seed" << transform_seed_;
  return out.str();
}

double ProblemInstance::evaluate(const Eigen::Ref<const Vector> &x) const {
  if (x.size() != dim()) throw std::invalid_argument("evaluate: dimension mismatch");
  if (!box_.contains(x, 1e-12)) throw std::invalid_argument("evaluate: point lies outside the problem box");
  if (custom_) return custom_(x);
  if (transform_seed_ == 0) return base_value(base_, x) + bias_;
  const Vector z = rotation_ * (x - shift_) + inner_offset_;
  return base_value(base_, z) + bias_;
}

ProblemInstance make_problem(BaseFunction base, Eigen::Index d, Seed transform_seed, std::optional<Box> box) {
  if (d < 1) throw std::invalid_argument("make_problem: dimension must be at least 1");
  ProblemInstance p;
  p.base_ = base;
  p.box_ = box ? *box : default_box(base, d);
  if (p.box_.dim() != d) throw std::invalid_argument("make_problem: box dimension mismatch");
  p.transform_seed_ = transform_seed;
  p.inner_offset_ = base_minimizer(base, d);
  if (transform_seed == 0) {
    p.shift_ = Vector::Zero(d);
    p.rotation_ = Matrix::Identity(d, d);
    p.x_star_ = p.inner_offset_;
    if (!p.box_.contains(p.x_star_))
      throw std::invalid_argument("make_problem: identity-mode minimizer lies outside the given box");
  } else {
    Rng rng = make_rng(derive_seed(transform_seed, {static_cast<std::uint64_t>(base), static_cast<std::uint64_t>(d)}));
    std::uniform_real_distribution<double> unit(0.1, 0.9);
    Vector u(d);
    for (Eigen::Index i = 0; i < d; ++i) u[i] = unit(rng);
    p.shift_ = p.box_.from_unit(u);
    p.rotation_ = random_rotation(d, derive_seed(transform_seed, {static_cast<std::uint64_t>(base), 0x726f74ULL}));
    p.x_star_ = p.shift_;
  }
  p.f_star_ = p.evaluate(p.x_star_);
  return p;
}

ProblemInstance make_custom_problem(std::string name, Box box, std::function<double(const Vector &)> fn,
                                    double f_star, Vector x_star) {
  if (!fn) throw std::invalid_argument("make_custom_problem: empty objective");
  if (x_star.size() != box.dim() || !box.contains(x_star))
    throw std::invalid_argument("make_custom_problem: x_star must lie in the box");
  ProblemInstance p;
  p.box_ = std::move(box);
  p.custom_name_ = std::move(name);
  p.custom_ = std::move(fn);
  p.shift_ = Vector::Zero(p.box_.dim());
  p.rotation_ = Matrix::Identity(p.box_.dim(), p.box_.dim());
  p.f_star_ = f_star;
  p.x_star_ = std::move(x_star);
  return p;
}

ProblemInstance make_problem(std::string_view base, Eigen::Index d, Seed transform_seed, std::optional<Box> box) {
  return make_problem(parse_base_function(base), d, transform_seed, std::move(box));
}

ProblemInstance make_problem(std::string_view registry_name) {
  static const std::regex pattern(R"(^([a-z]+)-d([0-9]+)-seed([0-9]+)$)");
  std::cmatch m;
  if (!std::regex_match(registry_name.begin(), registry_name.end(), m, pattern))
    throw std::invalid_argument("problem name must look like '<base>-d<D>-seed<S>' (got '" +
                                std::string(registry_name) + "')");
  return make_problem(m[1].str(), std::stol(m[2].str()), std::stoull(m[3].str()));
}

}  // namespace essi
