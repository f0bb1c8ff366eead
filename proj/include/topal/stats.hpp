#pragma once

#include <vector>

namespace topal {

/// Mean over classes of per-class recall. Classes are taken from y_true;
/// predictions outside y_true's classes count as errors.
/// Throws on length mismatch or empty input.
double balanced_accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred);

/// Two-sided Wilcoxon rank sum test (normal approximation, tie-corrected).
/// Returns the p-value in (0,1]. Requires at least 5 samples per side.
double rank_sum_test(const std::vector<double>& a, const std::vector<double>& b);

double mean(const std::vector<double>& v);
double sample_stddev(const std::vector<double>& v);

}  // namespace topal
