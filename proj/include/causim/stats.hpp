#pragma once

#include <span>
#include <vector>

namespace causim::stats {

double mean(std::span<const double> x);
// Sample variance (n - 1 denominator).
double variance(std::span<const double> x);

// Two-sided p-value of a t statistic with `df` degrees of freedom.
double student_t_two_sided_p(double t, double df);
// Two-sided p-value of a standard-normal statistic.
double normal_two_sided_p(double z);

double digamma(double x);

// Average ranks, ties sharing the mean rank.
std::vector<double> ranks(std::span<const double> x);
double spearman(std::span<const double> a, std::span<const double> b);

double mean_squared_error(std::span<const double> truth, std::span<const double> pred);
// 1 - SSE / SST with SST around the mean of `truth`; negative when the
// prediction is worse than that mean.
double r_squared(std::span<const double> truth, std::span<const double> pred);
// Mean binary cross-entropy; probabilities clipped to [1e-15, 1 - 1e-15].
double log_loss(std::span<const double> labels, std::span<const double> prob);
double misclassification_rate(std::span<const double> labels, std::span<const double> prob);

double sigmoid(double z);

}  // namespace causim::stats
