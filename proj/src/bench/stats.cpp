#include "essi/bench/stats.hpp"

#include "essi/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace essi::bench {

std::vector<double> simple_regret(const RunRecord &record, double f_star) {
  std::size_t iterations = 0;
  for (const auto &e : record.evaluations) iterations = std::max(iterations, e.iteration + 1);
  std::vector<double> best(iterations, std::numeric_limits<double>::infinity());
  for (const auto &e : record.evaluations) best[e.iteration] = std::min(best[e.iteration], e.f);
  std::vector<double> regret(iterations);
  double running = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < iterations; ++t) {
    running = std::min(running, best[t]);
    regret[t] = running - f_star;
  }
  return regret;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile: no values");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("percentile: p must lie in [0,1]");
  std::sort(values.begin(), values.end());
  const double h = static_cast<double>(values.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

AggregateCurve aggregate_traces(const std::vector<std::vector<double>> &traces) {
  if (traces.empty()) throw std::invalid_argument("aggregate: no traces");
  const std::size_t length = traces.front().size();
  for (const auto &t : traces)
    if (t.size() != length) throw std::invalid_argument("aggregate: traces have different lengths");
  AggregateCurve curve;
  std::vector<double> column(traces.size());
  for (std::size_t i = 0; i < length; ++i) {
    for (std::size_t r = 0; r < traces.size(); ++r) column[r] = traces[r][i];
    curve.median.push_back(percentile(column, 0.5));
    curve.q1.push_back(percentile(column, 0.25));
    curve.q3.push_back(percentile(column, 0.75));
  }
  return curve;
}

AggregateCurve aggregate(std::span<const RunRecord> records, double f_star) {
  std::vector<std::vector<double>> traces;
  for (const auto &r : records) traces.push_back(simple_regret(r, f_star));
  return aggregate_traces(traces);
}

std::string verdict_symbol(Verdict verdict) {
  switch (verdict) {
    case Verdict::better:
      return "+";
    case Verdict::worse:
      return "-";
    case Verdict::similar:
      break;
  }
  return "≈";
}

namespace {

/// P(W+ <= w) under the sign-flip null for the given doubled ranks.
double exact_lower_tail(const std::vector<int> &doubled_ranks, int doubled_w) {
  const int total = std::accumulate(doubled_ranks.begin(), doubled_ranks.end(), 0);
  std::vector<double> ways(static_cast<std::size_t>(total) + 1, 0.0);
  ways[0] = 1.0;
  int reach = 0;
  for (int r : doubled_ranks) {
    for (int s = reach; s >= 0; --s) ways[static_cast<std::size_t>(s + r)] += ways[static_cast<std::size_t>(s)];
    reach += r;
  }
  double below = 0.0;
  for (int s = 0; s <= std::min(doubled_w, total); ++s) below += ways[static_cast<std::size_t>(s)];
  return below / std::ldexp(1.0, static_cast<int>(doubled_ranks.size()));
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b, double alpha) {
  if (a.size() != b.size()) throw std::invalid_argument("wilcoxon_signed_rank: samples differ in length");
  std::vector<double> diff;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] - b[i] != 0.0) diff.push_back(a[i] - b[i]);

  WilcoxonResult out;
  out.n = diff.size();
  if (diff.empty()) return out;
  if (diff.size() < 5)
    throw std::invalid_argument("wilcoxon_signed_rank: need at least 5 nonzero paired differences");

  const std::size_t n = diff.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return std::abs(diff[i]) < std::abs(diff[j]); });

  // Doubled average ranks stay integral.
  std::vector<int> doubled(n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::abs(diff[order[j + 1]]) == std::abs(diff[order[i]])) ++j;
    const auto group = static_cast<double>(j - i + 1);
    tie_term += group * group * group - group;
    for (std::size_t k = i; k <= j; ++k) doubled[order[k]] = static_cast<int>(i + j + 2);
    i = j + 1;
  }
  int doubled_plus = 0;
  int doubled_total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    doubled_total += doubled[i];
    if (diff[i] > 0.0) doubled_plus += doubled[i];
  }
  const int doubled_minus = doubled_total - doubled_plus;
  const int doubled_stat = std::min(doubled_plus, doubled_minus);
  out.statistic = 0.5 * doubled_stat;

  if (n <= 12) {
    out.p_value = std::min(1.0, 2.0 * exact_lower_tail(doubled, doubled_stat));
  } else {
    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1.0) / 4.0;
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
    const double z = std::max(0.0, std::abs(0.5 * doubled_plus - mean) - 0.5) / std::sqrt(var);
    out.p_value = std::min(1.0, 2.0 * (1.0 - normal_cdf(z)));
  }

  if (out.p_value < alpha) {
    std::vector<double> sorted = diff;
    std::sort(sorted.begin(), sorted.end());
    const double med = percentile(sorted, 0.5);
    const bool a_smaller = med != 0.0 ? med < 0.0 : doubled_plus < doubled_minus;
    out.verdict = a_smaller ? Verdict::better : Verdict::worse;
  }
  return out;
}

}  // namespace essi::bench
