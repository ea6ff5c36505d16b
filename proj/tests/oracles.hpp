// Reference implementations used only by tests. They avoid the production
// code paths on purpose: dense inverses instead of Cholesky, brute-force
// enumeration instead of recursions.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

inline double se_kernel(double sf2, const Eigen::VectorXd &ls, const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
  double r2 = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) r2 += (a[i] - b[i]) * (a[i] - b[i]) / (ls[i] * ls[i]);
  return sf2 * std::exp(-0.5 * r2);
}

struct DenseGp {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  double mean = 0.0;
  double sf2 = 1.0;
  Eigen::VectorXd ls;
  double nugget = 0.0;

  Eigen::MatrixXd cov() const {
    const auto n = x.rows();
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) k(i, j) = se_kernel(sf2, ls, x.row(i).transpose(), x.row(j).transpose());
    k.diagonal().array() += nugget;
    return k;
  }

  std::pair<double, double> predict(const Eigen::VectorXd &p) const {
    const auto n = x.rows();
    Eigen::VectorXd k(n);
    for (Eigen::Index i = 0; i < n; ++i) k[i] = se_kernel(sf2, ls, x.row(i).transpose(), p);
    const Eigen::MatrixXd kinv = cov().fullPivLu().inverse();
    const Eigen::VectorXd r = y.array() - mean;
    const double m = mean + k.dot(kinv * r);
    const double v = sf2 - k.dot(kinv * k);
    return {m, std::max(v, 0.0)};
  }

  double log_likelihood() const {
    const Eigen::MatrixXd k = cov();
    const Eigen::VectorXd r = y.array() - mean;
    const auto lu = k.fullPivLu();
    return -0.5 * r.dot(lu.solve(r)) - 0.5 * std::log(lu.determinant()) -
           0.5 * static_cast<double>(x.rows()) * std::log(2.0 * std::numbers::pi);
  }
};

inline double phi(double u) { return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi); }
inline double Phi(double u) { return 0.5 * (1.0 + std::erf(u / std::numbers::sqrt2)); }

/// Two-sided Wilcoxon p-value by enumerating all 2^n sign assignments of the
/// ranks of |d| (average ranks for ties).
inline double wilcoxon_enumeration_p(const std::vector<double> &d) {
  const auto n = d.size();
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    double less = 0.0;
    double equal = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(d[j]) < std::abs(d[i])) less += 1.0;
      if (std::abs(d[j]) == std::abs(d[i])) equal += 1.0;
    }
    rank[i] = less + (equal + 1.0) / 2.0;
  }
  double total = 0.0;
  double plus = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += rank[i];
    if (d[i] > 0) plus += rank[i];
  }
  const double observed = std::min(plus, total - plus);
  std::size_t extreme = 0;
  const std::size_t patterns = std::size_t{1} << n;
  for (std::size_t mask = 0; mask < patterns; ++mask) {
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) w += rank[i];
    if (std::min(w, total - w) <= observed + 1e-9) ++extreme;
  }
  return static_cast<double>(extreme) / static_cast<double>(patterns);
}

/// Asymptotic Kolmogorov-Smirnov p-value for statistic D on n samples.
inline double ks_p_value(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) sum += ((k % 2) ? 2.0 : -2.0) * std::exp(-2.0 * k * k * lambda * lambda);
  return std::clamp(sum, 0.0, 1.0);
}

/// Linear interpolation between closest ranks.
inline double percentile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const double lo = std::floor(h);
  const double hi = std::ceil(h);
  return v[static_cast<std::size_t>(lo)] + (h - lo) * (v[static_cast<std::size_t>(hi)] - v[static_cast<std::size_t>(lo)]);
}

}  // namespace oracle
