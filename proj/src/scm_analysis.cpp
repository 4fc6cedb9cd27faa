#include "causim/scm_analysis.hpp"

#include <algorithm>
#include <cmath>

#include "causim/error.hpp"

namespace causim {

namespace {

void require_linear(const StructuralModel& model) {
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (model.assignment(i).kind != StructuralAssignment::Kind::linear) {
            throw NonlinearModelError("node '" + model.nodes()[i] +
                                      "' has a custom assignment; analytic moments need a linear model");
        }
    }
}

}  // namespace

std::size_t PopulationMoments::index_of(std::string_view node) const {
    const auto it = std::find(nodes.begin(), nodes.end(), node);
    if (it == nodes.end()) throw UnknownNodeError("unknown node '" + std::string(node) + "'");
    return static_cast<std::size_t>(it - nodes.begin());
}

double PopulationMoments::corr(std::string_view a, std::string_view b) const {
    const auto i = index_of(a);
    const auto j = index_of(b);
    return covariance(i, j) / std::sqrt(covariance(i, i) * covariance(j, j));
}

PopulationMoments population_moments(const StructuralModel& model) {
    require_linear(model);
    const auto n = static_cast<Eigen::Index>(model.size());
    // loading(i, j): coefficient of the standardized noise of node j in node i.
    Eigen::MatrixXd loading = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
    for (const auto i : model.topological_order()) {
        const auto& a = model.assignment(i);
        const auto& parents = model.parent_indices(i);
        const auto row = static_cast<Eigen::Index>(i);
        double m = a.intercept + a.noise.mean();
        for (std::size_t k = 0; k < parents.size(); ++k) {
            const auto p = static_cast<Eigen::Index>(parents[k]);
            loading.row(row) += a.weights[k] * loading.row(p);
            m += a.weights[k] * mean(p);
        }
        loading(row, row) += std::sqrt(a.noise.variance());
        mean(row) = m;
    }
    return {model.nodes(), mean, loading * loading.transpose()};
}

std::vector<double> population_regression(const StructuralModel& model, std::string_view target,
                                          const std::vector<std::string>& regressors) {
    const auto moments = population_moments(model);
    const auto t = static_cast<Eigen::Index>(moments.index_of(target));
    const auto k = static_cast<Eigen::Index>(regressors.size());
    std::vector<Eigen::Index> idx;
    for (const auto& r : regressors) {
        const auto i = static_cast<Eigen::Index>(moments.index_of(r));
        if (i == t) throw InvalidArgumentError("target '" + std::string(target) + "' is also a regressor");
        idx.push_back(i);
    }

    std::vector<double> out(regressors.size() + 1);
    out[0] = moments.mean(t);
    if (k == 0) return out;

    Eigen::MatrixXd sxx(k, k);
    Eigen::VectorXd sxy(k);
    for (Eigen::Index a = 0; a < k; ++a) {
        sxy(a) = moments.covariance(idx[a], t);
        for (Eigen::Index b = 0; b < k; ++b) sxx(a, b) = moments.covariance(idx[a], idx[b]);
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sxx, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(hi > 0.0) || !(lo > 0.0) || hi / lo > kMaxConditionNumber) {
        throw SingularCovarianceError("regressor covariance is singular (eigenvalues " +
                                      std::to_string(lo) + " .. " + std::to_string(hi) + ")");
    }
    const Eigen::VectorXd beta = sxx.ldlt().solve(sxy);
    double intercept = moments.mean(t);
    for (Eigen::Index a = 0; a < k; ++a) {
        out[static_cast<std::size_t>(a) + 1] = beta(a);
        intercept -= beta(a) * moments.mean(idx[a]);
    }
    out[0] = intercept;
    return out;
}

double total_effect_linear(const StructuralModel& model, std::string_view cause,
                           std::string_view outcome) {
    const auto c = model.index_of(cause);
    const auto o = model.index_of(outcome);
    if (c == o) throw InvalidArgumentError("cause and outcome must differ");
    require_linear(model);

    // effect[i] = d node_i / d cause, accumulated in topological order.
    std::vector<double> effect(model.size(), 0.0);
    effect[c] = 1.0;
    bool after_cause = false;
    for (const auto i : model.topological_order()) {
        if (i == c) {
            after_cause = true;
            continue;
        }
        if (!after_cause) continue;
        const auto& a = model.assignment(i);
        const auto& parents = model.parent_indices(i);
        double e = 0.0;
        for (std::size_t k = 0; k < parents.size(); ++k) e += a.weights[k] * effect[parents[k]];
        effect[i] = e;
    }
    return effect[o];
}

}  // namespace causim
