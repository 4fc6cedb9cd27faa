#include <algorithm>
#include <cmath>

#include "causim/error.hpp"
#include "causim/exp/studies.hpp"
#include "causim/reference_models.hpp"
#include "causim/scm_analysis.hpp"

namespace causim::exp {

Table2Result run_table2(const std::vector<double>& theta, std::size_t n, std::uint64_t seed) {
    if (theta.size() < 2) throw ConfigValidationError("theta needs an intercept and at least one slope");
    const auto model = reference::exogenous_regression_model(theta);
    const auto data = sample(model, n, seed);
    std::vector<std::string> regressors;
    for (std::size_t k = 1; k < theta.size(); ++k) regressors.push_back("x" + std::to_string(k));

    Table2Result r;
    r.theta = theta;
    r.fit = ols_fit(data, "y", regressors);
    // Term 0 of the fit is the intercept, which plays the role of theta_0 x0.
    r.estimate = r.fit.coefficients;
    r.std_error = r.fit.std_errors;
    r.p_value = r.fit.p_values;
    return r;
}

std::vector<Table3Row> run_table3(std::size_t n, std::uint64_t seed) {
    const auto model = reference::mediated_confounding_model();
    const auto data = sample(model, n, seed);
    const auto moments = population_moments(model);
    std::vector<Table3Row> rows;
    for (const auto& node : model.nodes()) {
        if (node == "y") continue;
        rows.push_back({node, pearson(data, node, "y"), moments.corr(node, "y")});
    }
    return rows;
}

Part2Result run_part2(std::size_t n, std::uint64_t seed) {
    const auto model = reference::mediated_confounding_model();
    const auto data = sample(model, n, seed);
    const std::vector<std::pair<std::string, std::vector<std::string>>> designs{
        {"naive", {"x0"}},
        {"all_variables", {"x0", "x1", "x2", "x3", "x4", "x5", "x6", "x7"}},
        {"mediator", {"x0", "x1"}},
        {"backdoor", {"x0", "x3"}},
    };
    Part2Result out;
    for (const auto& [name, regressors] : designs) {
        RegressionScenario s;
        s.name = name;
        s.regressors = regressors;
        s.fit = ols_fit(data, "y", regressors);
        s.oracle = population_regression(model, "y", regressors);
        for (std::size_t t = 0; t < s.oracle.size(); ++t) {
            const double err = std::fabs(s.fit.coefficients[t] - s.oracle[t]);
            const double se = s.fit.std_errors[t];
            const double z = se > 0.0 ? err / se : (err > 0.0 ? INFINITY : 0.0);
            s.z.push_back(z);
            if (z > 4.0) s.flagged = true;
        }
        out.scenarios.push_back(std::move(s));
    }
    out.total_effect = total_effect_linear(model, "x0", "y");
    return out;
}

const RegressionScenario& scenario(const Part2Result& r, std::string_view name) {
    for (const auto& s : r.scenarios) {
        if (s.name == name) return s;
    }
    throw InvalidArgumentError("no regression scenario named '" + std::string(name) + "'");
}

BackdoorResult run_backdoor() {
    BackdoorResult r;
    const auto g = Dag::from_model(reference::mediated_confounding_model());
    r.confounded = analyze_adjustment(g, "x0", "y");
    r.latent = analyze_adjustment(reference::latent_confounder_graph(), "x", "y");
    return r;
}

}  // namespace causim::exp
