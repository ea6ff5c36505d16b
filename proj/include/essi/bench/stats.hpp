#pragma once

#include "essi/bo.hpp"

#include <span>
#include <string>
#include <vector>

namespace essi::bench {

/// Per-iteration f_min - f_star, from the evaluations of each iteration and
/// all earlier ones.
std::vector<double> simple_regret(const RunRecord &record, double f_star);

/// Percentile with linear interpolation between closest ranks: for sorted
/// values v[0..n-1] and p in [0,1], h = (n-1) p and the result is
/// v[floor(h)] + (h - floor(h)) (v[floor(h)+1] - v[floor(h)]).
double percentile(std::vector<double> values, double p);

struct AggregateCurve {
  std::vector<double> median;
  std::vector<double> q1;
  std::vector<double> q3;
};

/// Pointwise median and quartiles of equally long traces.
AggregateCurve aggregate_traces(const std::vector<std::vector<double>> &traces);
AggregateCurve aggregate(std::span<const RunRecord> records, double f_star);

enum class Verdict { better, worse, similar };

/// "+", "-" or "≈".
std::string verdict_symbol(Verdict verdict);

struct WilcoxonResult {
  /// min(W+, W-) over the nonzero differences a - b.
  double statistic = 0.0;
  double p_value = 1.0;
  Verdict verdict = Verdict::similar;
  /// Number of nonzero differences.
  std::size_t n = 0;
};

/// Two-sided Wilcoxon signed-rank test on paired samples (a_i, b_i). Zero
/// differences are dropped and tied magnitudes get averaged ranks. Exact
/// null distribution for n <= 12, normal approximation with continuity and
/// tie correction above. `better` means a is significantly smaller.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b, double alpha);

}  // namespace essi::bench
