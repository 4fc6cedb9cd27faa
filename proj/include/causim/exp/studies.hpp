#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "causim/causal_graph.hpp"
#include "causim/dataset.hpp"
#include "causim/estimators.hpp"
#include "causim/gbt.hpp"
#include "causim/mlp.hpp"
#include "causim/scm.hpp"
#include "causim/stepwise.hpp"

// Typed entry points behind the registered experiments. Each is a pure
// function of its parameters, n and seed.
namespace causim::exp {

// ---- table2: exogenous-predictor recovery ----------------------------------

struct Table2Result {
    std::vector<double> theta;  // theta[0] multiplies the constant x0
    FitResult fit;              // y ~ x1 .. x_{K-1}; the intercept estimates theta[0]
    // Estimates, standard errors and p-values in theta order.
    std::vector<double> estimate;
    std::vector<double> std_error;
    std::vector<double> p_value;
};

Table2Result run_table2(const std::vector<double>& theta, std::size_t n, std::uint64_t seed);

// ---- table3: pairwise correlations with y -----------------------------------

struct Table3Row {
    std::string variable;
    CorrResult sample;
    double analytic_r = 0.0;
};

std::vector<Table3Row> run_table3(std::size_t n, std::uint64_t seed);

// ---- part2_regressions --------------------------------------------------------

struct RegressionScenario {
    std::string name;
    std::vector<std::string> regressors;
    FitResult fit;
    // Population coefficients (intercept first) from the analytic covariance.
    std::vector<double> oracle;
    // |estimate - oracle| / SE per term, intercept first.
    std::vector<double> z;
    bool flagged = false;  // any z above 4
};

struct Part2Result {
    std::vector<RegressionScenario> scenarios;
    double total_effect = 0.0;  // x0 on y via directed paths
};

Part2Result run_part2(std::size_t n, std::uint64_t seed);
const RegressionScenario& scenario(const Part2Result& r, std::string_view name);

// ---- backdoor_report ----------------------------------------------------------

struct BackdoorResult {
    AdjustmentAnalysis confounded;      // (x0, y) on the nine-node graph
    AdjustmentAnalysis latent;          // (x, y) with z unobserved
};

BackdoorResult run_backdoor();

// ---- fig2_panels ----------------------------------------------------------------

struct Fig2Params {
    std::vector<double> rho_grid{0.1, 0.2, 0.4, 0.6, 0.8, 0.9};
    std::size_t k = 3;
    double quadratic_noise = 0.5;
    double sinusoid_noise = 0.3;
    double circle_noise = 0.05;
    double cross_noise = 0.05;
    std::size_t plot_points = 500;
};

struct Fig2Panel {
    std::string panel;
    std::string family;  // "linear" or "nonlinear"
    double rho = 0.0;    // linear panels only
    CorrResult corr;
    double mi = 0.0;              // nats
    double mi_closed_form = 0.0;  // -0.5 ln(1 - rho^2) for linear panels, NaN otherwise
    std::vector<double> x;        // first plot_points samples
    std::vector<double> y;
};

// Draws one panel; `shape` is "linear", "quadratic", "sinusoid", "circle" or
// "cross".
Dataset fig2_panel_data(const std::string& shape, double parameter, std::size_t n, std::uint64_t seed);
std::vector<Fig2Panel> run_fig2(const Fig2Params& params, std::size_t n, std::uint64_t seed);

// ---- fig3_fit ---------------------------------------------------------------------

struct Fig3Params {
    std::size_t test_n = 400;
    double noise_sd = 0.3;
    MlpConfig mlp{.hidden = {32},
                  .activation = Activation::tanh,
                  .output = OutputKind::identity,
                  .optimizer = Optimizer::adam,
                  .learning_rate = 0.01,
                  .epochs = 20000,
                  .standardize = true,
                  .seed = 0};
    std::size_t grid_points = 201;
};

// y = 0.5 x + 2 sin(3 x) + N(0, sd^2), x ~ U(-4, 4).
StructuralModel fig3_model(double noise_sd);
double fig3_signal(double x);
// E[(2 sin 3x)^2] under x ~ U(-4, 4).
double fig3_sine_power();

struct Fig3Result {
    double noise_variance = 0.0;
    double sine_power = 0.0;
    double linear_floor = 0.0;  // noise_variance + sine_power / 2
    double linear_train_mse = 0.0;
    double linear_test_mse = 0.0;
    double mlp_train_mse = 0.0;
    double mlp_test_mse = 0.0;
    std::size_t epochs = 0;
    double final_training_loss = 0.0;
    std::vector<double> grid_x;
    std::vector<double> grid_truth;
    std::vector<double> grid_linear;
    std::vector<double> grid_mlp;
};

Fig3Result run_fig3(const Fig3Params& params, std::size_t n, std::uint64_t seed);

// ---- fig5_sweep -----------------------------------------------------------------

struct LinprobsSpec {
    std::vector<double> q_grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    // (1-q)(c0 x1 + c1) + q(c2 x1^2 + c3) + c4 x2 + c5
    std::array<double, 6> coefficients{0.388, -0.325, 1.714, -1.0, 1.265, 0.0233};
    double proxy_noise_sd = 0.5;
    std::size_t n_noise = 4;

    double logit(double q, double x1, double x2) const;
    std::vector<std::string> features() const;  // x1 .. x_{4 + n_noise}
    std::vector<std::string> relevant() const { return {"x1", "x2"}; }
};

// Predictors: x1, x2 ~ N(0,1); x3 = x1^2 + e; x4 = |x1| + e; remaining
// features pure N(0,1) noise.
StructuralModel linprobs_predictor_model(const LinprobsSpec& spec);

struct Fig5Params {
    LinprobsSpec spec;
    std::size_t test_n = 20000;
    GbtConfig gbt{.n_trees = 100,
                  .max_depth = 3,
                  .learning_rate = 0.1,
                  .min_leaf = 20,
                  .max_bins = 64,
                  .subsample = 1.0,
                  .loss = GbtLoss::logistic,
                  .seed = 0};
    std::size_t eval_rows = 64;
    std::size_t background_rows = 128;
};

struct Fig5Point {
    double q = 0.0;
    double logistic_log_loss = 0.0;
    double logistic_error_rate = 0.0;
    double gbt_log_loss = 0.0;
    double gbt_error_rate = 0.0;
    double bayes_log_loss = 0.0;  // loss of the true probabilities
    std::vector<double> logistic_mean_abs_phi;
    std::vector<double> gbt_mean_abs_phi;
    double logistic_irrelevant_mass = 0.0;
    double gbt_irrelevant_mass = 0.0;
    double logistic_relevant_mass = 0.0;
    double gbt_relevant_mass = 0.0;
    double max_efficiency_residual = 0.0;
    FitResult logistic;
};

struct Fig5Result {
    std::vector<std::string> features;
    std::vector<Fig5Point> points;
    double spearman_logistic_log_loss = 0.0;
    double spearman_logistic_irrelevant = 0.0;
    double spearman_logistic_excess_log_loss = 0.0;
    double gbt_vs_logistic_reduction_at_max_q = 0.0;  // 1 - gbt/logistic log-loss
    double irrelevant_ratio_at_max_q = 0.0;             // gbt / logistic irrelevant mass
};

Fig5Result run_fig5(const Fig5Params& params, std::size_t n, std::uint64_t seed);

// ---- overfit_demo ---------------------------------------------------------------

struct OverfitParams {
    std::size_t candidates = 20;
    double test_fraction = 0.3;
    double min_gain = 0.02;
    std::size_t replications = 50;
};

struct OverfitResult {
    std::vector<StepwiseTrace> traces;
    std::vector<double> final_in_sample;  // 0 when nothing was selected
    std::vector<double> final_held_out;
    double mean_in_sample = 0.0;
    double mean_held_out = 0.0;
    double mean_selected = 0.0;
};

// Pure-noise data: target and candidates independent N(0,1).
Dataset overfit_data(std::size_t candidates, std::size_t n, std::uint64_t seed);
OverfitResult run_overfit(const OverfitParams& params, std::size_t n, std::uint64_t seed);

}  // namespace causim::exp
