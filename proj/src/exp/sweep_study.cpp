#include <cmath>

#include "causim/error.hpp"
#include "causim/exp/studies.hpp"
#include "causim/rng.hpp"
#include "causim/shapley.hpp"
#include "causim/stats.hpp"

namespace causim::exp {

namespace {

using A = StructuralAssignment;

enum Stream : std::uint64_t { kTrain = 1, kTest = 2, kTrainLabels = 3, kTestLabels = 4, kBoost = 5, kBackground = 6, kEval = 7 };

// Copy of the predictors plus a Bernoulli label column. The label uniforms
// depend only on (seed, row), so every q sees the same draws.
Dataset with_labels(const Dataset& x, const LinprobsSpec& spec, double q, std::uint64_t label_key,
                    std::vector<double>* prob) {
    const auto x1 = x.column("x1");
    const auto x2 = x.column("x2");
    std::vector<double> y(x.n_rows());
    if (prob) prob->resize(x.n_rows());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double p = stats::sigmoid(spec.logit(q, x1[i], x2[i]));
        if (prob) (*prob)[i] = p;
        y[i] = rng::to_unit_open(rng::derive(label_key, i)) < p ? 1.0 : 0.0;
    }
    Dataset d = x;
    d.add_column("y", std::move(y));
    return d;
}

}  // namespace

double LinprobsSpec::logit(double q, double x1, double x2) const {
    const auto& c = coefficients;
    return (1.0 - q) * (c[0] * x1 + c[1]) + q * (c[2] * x1 * x1 + c[3]) + c[4] * x2 + c[5];
}

std::vector<std::string> LinprobsSpec::features() const {
    std::vector<std::string> f;
    for (std::size_t k = 1; k <= 4 + n_noise; ++k) f.push_back("x" + std::to_string(k));
    return f;
}

StructuralModel linprobs_predictor_model(const LinprobsSpec& spec) {
    const auto e = NoiseSpec::gaussian(0.0, spec.proxy_noise_sd);
    ModelSpec m;
    m.add("x1", A::exogenous(NoiseSpec::standard_normal()))
        .add("x2", A::exogenous(NoiseSpec::standard_normal()))
        .add("x3", A::custom({"x1"}, [](std::span<const double> v) { return v[0] * v[0]; }, e))
        .add("x4", A::custom({"x1"}, [](std::span<const double> v) { return std::fabs(v[0]); }, e));
    for (std::size_t k = 0; k < spec.n_noise; ++k) {
        m.add("x" + std::to_string(5 + k), A::exogenous(NoiseSpec::standard_normal()));
    }
    return validate_model(m);
}

Fig5Result run_fig5(const Fig5Params& params, std::size_t n, std::uint64_t seed) {
    const auto& spec = params.spec;
    if (spec.q_grid.empty()) throw ConfigValidationError("q grid is empty");
    for (double q : spec.q_grid) {
        if (!(q >= 0.0 && q <= 1.0)) throw ConfigValidationError("q values must lie in [0, 1]");
    }
    const auto model = linprobs_predictor_model(spec);
    const auto features = spec.features();
    if (features.size() > kMaxShapleyFeatures) throw ConfigValidationError("too many features for exact Shapley values");
    const auto train_x = sample(model, n, rng::derive(seed, kTrain));
    const auto test_x = sample(model, params.test_n, rng::derive(seed, kTest));
    const auto background = background_sample(train_x, params.background_rows, rng::derive(seed, kBackground));
    const auto eval = background_sample(test_x, params.eval_rows, rng::derive(seed, kEval));

    Fig5Result out;
    out.features = features;
    for (std::size_t qi = 0; qi < spec.q_grid.size(); ++qi) {
        const double q = spec.q_grid[qi];
        const auto train = with_labels(train_x, spec, q, rng::derive(seed, kTrainLabels), nullptr);
        std::vector<double> p_true;
        const auto test = with_labels(test_x, spec, q, rng::derive(seed, kTestLabels), &p_true);
        const auto y_test = test.column("y");

        Fig5Point pt;
        pt.q = q;
        pt.bayes_log_loss = stats::log_loss(y_test, p_true);

        pt.logistic = logistic_fit(train, "y", features);
        const auto p_log = pt.logistic.predict(test);
        pt.logistic_log_loss = stats::log_loss(y_test, p_log);
        pt.logistic_error_rate = stats::misclassification_rate(y_test, p_log);

        auto gbt_config = params.gbt;
        gbt_config.loss = GbtLoss::logistic;
        gbt_config.seed = rng::derive(seed, kBoost, qi);
        const auto gbt = gbt_train(train, "y", features, gbt_config);
        const auto p_gbt = gbt.predict(test);
        pt.gbt_log_loss = stats::log_loss(y_test, p_gbt);
        pt.gbt_error_rate = stats::misclassification_rate(y_test, p_gbt);

        // Both models are explained on the log-odds scale.
        const auto& fit = pt.logistic;
        const PredictFn logistic_margin = [&fit](std::span<const double> x) { return fit.linear_predictor(x); };
        const auto s_log = attribution_summary(logistic_margin, eval, background, features, spec.relevant());
        const AdditiveShapleyExplainer gbt_explainer(tree_parts(gbt), gbt.base_score, background, features);
        const auto s_gbt = summarize_attributions(gbt_explainer.explain_all(eval), spec.relevant());
        pt.logistic_mean_abs_phi = s_log.mean_abs_phi;
        pt.gbt_mean_abs_phi = s_gbt.mean_abs_phi;
        pt.logistic_irrelevant_mass = s_log.irrelevant_mass;
        pt.gbt_irrelevant_mass = s_gbt.irrelevant_mass;
        pt.logistic_relevant_mass = s_log.relevant_mass;
        pt.gbt_relevant_mass = s_gbt.relevant_mass;
        pt.max_efficiency_residual = std::max(s_log.max_abs_efficiency_residual, s_gbt.max_abs_efficiency_residual);
        out.points.push_back(std::move(pt));
    }

    std::vector<double> qs, loss, irrelevant, excess;
    for (const auto& p : out.points) {
        qs.push_back(p.q);
        loss.push_back(p.logistic_log_loss);
        irrelevant.push_back(p.logistic_irrelevant_mass);
        excess.push_back(p.logistic_log_loss - p.bayes_log_loss);
    }
    if (qs.size() >= 2) {
        out.spearman_logistic_log_loss = stats::spearman(qs, loss);
        out.spearman_logistic_irrelevant = stats::spearman(qs, irrelevant);
        out.spearman_logistic_excess_log_loss = stats::spearman(qs, excess);
    } else {
        out.spearman_logistic_log_loss = out.spearman_logistic_irrelevant = out.spearman_logistic_excess_log_loss = NAN;
    }
    // Comparisons at the largest q in the grid.
    const auto last = std::max_element(out.points.begin(), out.points.end(),
                                       [](const Fig5Point& a, const Fig5Point& b) { return a.q < b.q; });
    out.gbt_vs_logistic_reduction_at_max_q = 1.0 - last->gbt_log_loss / last->logistic_log_loss;
    out.irrelevant_ratio_at_max_q = last->logistic_irrelevant_mass > 0.0
                                        ? last->gbt_irrelevant_mass / last->logistic_irrelevant_mass
                                        : INFINITY;
    return out;
}

}  // namespace causim::exp
