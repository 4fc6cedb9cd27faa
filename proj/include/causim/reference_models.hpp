#pragma once

#include <vector>

#include "causim/causal_graph.hpp"
#include "causim/scm.hpp"

namespace causim::reference {

// Exogenous-predictor regression model: x0 := 1, x_k := N(0,1) for
// k = 1..K-1, y := sum_k theta_k x_k + N(0,1).
StructuralModel exogenous_regression_model(const std::vector<double>& theta);

// Nine-node linear-Gaussian model with a mediator (x1), a confounding path
// through x2 and x3, and descendants of both cause and outcome:
//   x4 := U4            x2 := 0.8 U2         x0 := x4 - 2 x2 + 0.2 U0
//   x1 := -2 x0 + 0.5 U1  x3 := x2 + 0.1 U3   x5 := 3 x0 + 0.8 U5
//   x6 := x1 + 0.5 U6   y := 2 x3 - x1 + 0.2 Uy   x7 := 0.5 y + 0.1 U7
StructuralModel mediated_confounding_model();

// Graph of the exogenous-predictor model (x1..x_k -> y, all observed).
Dag exogenous_predictors_graph(std::size_t k);

// x -> y with a latent common cause z -> x, z -> y.
Dag latent_confounder_graph();

}  // namespace causim::reference
