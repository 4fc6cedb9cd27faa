#include "causim/reference_models.hpp"

#include <string>

#include "causim/error.hpp"

namespace causim::reference {

StructuralModel exogenous_regression_model(const std::vector<double>& theta) {
    if (theta.empty()) throw InvalidArgumentError("need at least the intercept weight");
    ModelSpec spec;
    std::vector<std::string> parents;
    spec.add("x0", StructuralAssignment::exogenous(NoiseSpec::constant(1.0)));
    parents.push_back("x0");
    for (std::size_t k = 1; k < theta.size(); ++k) {
        const auto name = "x" + std::to_string(k);
        spec.add(name, StructuralAssignment::exogenous(NoiseSpec::standard_normal()));
        parents.push_back(name);
    }
    spec.add("y", StructuralAssignment::linear(parents, theta, NoiseSpec::standard_normal()));
    return validate_model(spec);
}

StructuralModel mediated_confounding_model() {
    using A = StructuralAssignment;
    const auto u = [](double scale) { return NoiseSpec::standard_normal(scale); };
    ModelSpec spec;
    spec.add("x0", A::linear({"x4", "x2"}, {1.0, -2.0}, u(0.2)))
        .add("x1", A::linear({"x0"}, {-2.0}, u(0.5)))
        .add("x2", A::exogenous(u(0.8)))
        .add("x3", A::linear({"x2"}, {1.0}, u(0.1)))
        .add("x4", A::exogenous(u(1.0)))
        .add("x5", A::linear({"x0"}, {3.0}, u(0.8)))
        .add("x6", A::linear({"x1"}, {1.0}, u(0.5)))
        .add("x7", A::linear({"y"}, {0.5}, u(0.1)))
        .add("y", A::linear({"x3", "x1"}, {2.0, -1.0}, u(0.2)));
    return validate_model(spec);
}

Dag exogenous_predictors_graph(std::size_t k) {
    std::vector<std::string> nodes;
    std::vector<Edge> edges;
    for (std::size_t i = 1; i <= k; ++i) {
        nodes.push_back("x" + std::to_string(i));
        edges.push_back({nodes.back(), "y"});
    }
    nodes.push_back("y");
    return Dag(nodes, edges);
}

Dag latent_confounder_graph() {
    return Dag({"x", "y", "z"}, {{"x", "y"}, {"z", "x"}, {"z", "y"}}, {"z"});
}

}  // namespace causim::reference
