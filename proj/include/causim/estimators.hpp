#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "causim/dataset.hpp"

namespace causim {

// Output of a regression fit. Entry 0 of every per-term vector is the
// intercept; the rest follow the regressor order.
struct FitResult {
    enum class Model { ols, logistic };

    Model model = Model::ols;
    std::string target;
    std::vector<std::string> terms;
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    // t statistics for OLS, Wald z statistics for logistic fits.
    std::vector<double> statistics;
    std::vector<double> p_values;
    double residual_variance = 0.0;
    std::size_t n_used = 0;
    // OLS: in-sample R^2. Logistic: log-likelihood at the optimum.
    double r_squared = 0.0;
    double log_likelihood = 0.0;
    std::size_t iterations = 0;

    std::size_t index_of(std::string_view term) const;
    double coefficient(std::string_view term) const { return coefficients[index_of(term)]; }
    double std_error(std::string_view term) const { return std_errors[index_of(term)]; }
    double p_value(std::string_view term) const { return p_values[index_of(term)]; }

    // Linear predictor intercept + sum_k coef_k x_k for regressor values in
    // term order (without the intercept).
    double linear_predictor(std::span<const double> x) const;
    // Linear predictor for OLS, probability for logistic fits.
    double predict(std::span<const double> x) const;
    std::vector<double> predict(const Dataset& data) const;
};

struct CorrResult {
    std::string a;
    std::string b;
    double r = 0.0;
    double p = 1.0;
    std::size_t n = 0;
};

inline constexpr double kRankTolerance = 1e-10;

// Least squares with intercept, classical standard errors and two-sided
// t-test p-values. Throws InsufficientDataError when n <= k + 1 and
// RankDeficientError when a singular value of the design falls below
// 1e-10 times the largest.
FitResult ols_fit(const Dataset& data, std::string_view target, const std::vector<std::string>& regressors);

// Pearson r with the t-distribution test on n - 2 degrees of freedom.
CorrResult pearson(const Dataset& data, std::string_view a, std::string_view b);
CorrResult pearson(std::span<const double> a, std::span<const double> b);

struct LogisticOptions {
    double gradient_tolerance = 1e-8;
    std::size_t max_iterations = 100;
};

// Maximum likelihood by damped Newton (step halving on the log-likelihood).
// Converged when the infinity norm of X^T (y - p) drops below the tolerance.
// Throws NonBinaryTargetError, or SeparationError when the likelihood has no
// finite maximizer.
FitResult logistic_fit(const Dataset& data, std::string_view target,
                       const std::vector<std::string>& regressors, const LogisticOptions& options = {});

// Serialization with a fixed field order. CSV has one row per term.
void write_fit_csv_header(std::ostream& out);
void write_fit_csv_rows(std::ostream& out, const FitResult& fit);
void write_corr_csv_header(std::ostream& out);
void write_corr_csv_row(std::ostream& out, const CorrResult& c);
nlohmann::ordered_json fit_to_json(const FitResult& fit);
nlohmann::ordered_json corr_to_json(const CorrResult& c);

}  // namespace causim
