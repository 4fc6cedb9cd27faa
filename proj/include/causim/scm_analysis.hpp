#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "causim/scm.hpp"

namespace causim {

// Exact first and second moments of a linear structural model.
struct PopulationMoments {
    std::vector<std::string> nodes;
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;

    std::size_t index_of(std::string_view node) const;
    double mean_of(std::string_view node) const { return mean(index_of(node)); }
    double cov(std::string_view a, std::string_view b) const {
        return covariance(index_of(a), index_of(b));
    }
    double corr(std::string_view a, std::string_view b) const;
};

// Forward propagation in topological order: each node is written as a linear
// combination of the independent noise terms, so Cov = L diag(var) L^T.
// Throws NonlinearModelError for custom assignments.
PopulationMoments population_moments(const StructuralModel& model);

inline Eigen::MatrixXd population_covariance(const StructuralModel& model) {
    return population_moments(model).covariance;
}

// Population least-squares coefficients of `target` on `regressors`:
// [intercept, slope_1, ..., slope_k] = limit of any consistent OLS fit.
// Throws SingularCovarianceError when the regressor covariance has
// condition number above 1e12.
std::vector<double> population_regression(const StructuralModel& model, std::string_view target,
                                          const std::vector<std::string>& regressors);

// Sum over directed paths cause -> ... -> outcome of the product of edge
// weights.
double total_effect_linear(const StructuralModel& model, std::string_view cause,
                           std::string_view outcome);

inline constexpr double kMaxConditionNumber = 1e12;

}  // namespace causim
