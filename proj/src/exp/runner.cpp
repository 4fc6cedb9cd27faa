#include "causim/exp/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>

#include "causim/error.hpp"
#include "causim/exp/studies.hpp"
#include "causim/reference_models.hpp"
#include "causim/shapley.hpp"

namespace causim::exp {

using nlohmann::ordered_json;

std::string cell(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt::format("{}", v);
}

std::string cell(std::size_t v) { return std::to_string(v); }

namespace {

std::string quoted(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

std::string format_set(const NodeSet& s) { return "{" + join(s, " ") + "}"; }

std::string yes_no(bool b) { return b ? "true" : "false"; }

// ---- table2 ----

void declare_table2(ParamSet& p) {
    p.declare("theta", "3.3,0.1,0.3,0.5", "structural weights; the first multiplies the constant x0");
}

ExperimentOutput run_table2_exp(const RunContext& ctx) {
    const auto r = run_table2(ctx.params.reals("theta"), ctx.n, ctx.seed);
    ExperimentOutput out;
    Table t{"table2.csv", {"term", "true_value", "estimate", "std_error", "p_value", "abs_error"}, {}};
    double max_err = 0.0;
    for (std::size_t k = 0; k < r.theta.size(); ++k) {
        const double err = std::fabs(r.estimate[k] - r.theta[k]);
        max_err = std::max(max_err, err);
        t.add({"x" + std::to_string(k), cell(r.theta[k]), cell(r.estimate[k]), cell(r.std_error[k]),
               cell(r.p_value[k]), cell(err)});
    }
    out.tables.push_back(std::move(t));
    out.results["theta_hat"] = r.estimate;
    out.results["std_errors"] = r.std_error;
    out.results["max_abs_error"] = max_err;
    out.results["r_squared"] = r.fit.r_squared;
    out.results["residual_variance"] = r.fit.residual_variance;
    return out;
}

// ---- table3 ----

ExperimentOutput run_table3_exp(const RunContext& ctx) {
    const auto rows = run_table3(ctx.n, ctx.seed);
    ExperimentOutput out;
    Table t{"table3.csv", {"variable", "r", "p", "n", "analytic_r", "abs_diff"}, {}};
    double max_diff = 0.0;
    ordered_json sample_r = ordered_json::object(), analytic_r = ordered_json::object();
    for (const auto& row : rows) {
        const double diff = std::fabs(row.sample.r - row.analytic_r);
        max_diff = std::max(max_diff, diff);
        t.add({row.variable, cell(row.sample.r), cell(row.sample.p), cell(row.sample.n), cell(row.analytic_r),
               cell(diff)});
        sample_r[row.variable] = row.sample.r;
        analytic_r[row.variable] = row.analytic_r;
    }
    out.tables.push_back(std::move(t));
    out.results["r"] = std::move(sample_r);
    out.results["analytic_r"] = std::move(analytic_r);
    out.results["max_abs_diff"] = max_diff;
    return out;
}

// ---- part2_regressions ----

ExperimentOutput run_part2_exp(const RunContext& ctx) {
    const auto r = run_part2(ctx.n, ctx.seed);
    ExperimentOutput out;
    Table t{"part2_regressions.csv",
            {"scenario", "term", "estimate", "std_error", "p_value", "oracle", "abs_error", "abs_error_in_se",
             "flagged"},
            {}};
    ordered_json scenarios = ordered_json::array();
    for (const auto& s : r.scenarios) {
        for (std::size_t k = 0; k < s.oracle.size(); ++k) {
            t.add({s.name, s.fit.terms[k], cell(s.fit.coefficients[k]), cell(s.fit.std_errors[k]),
                   cell(s.fit.p_values[k]), cell(s.oracle[k]), cell(std::fabs(s.fit.coefficients[k] - s.oracle[k])),
                   cell(s.z[k]), yes_no(s.z[k] > 4.0)});
        }
        const auto i = s.fit.index_of("x0");
        ordered_json j;
        j["scenario"] = s.name;
        j["regressors"] = s.regressors;
        j["x0_estimate"] = s.fit.coefficients[i];
        j["x0_std_error"] = s.fit.std_errors[i];
        j["x0_oracle"] = s.oracle[i];
        j["flagged"] = s.flagged;
        scenarios.push_back(std::move(j));
    }
    out.tables.push_back(std::move(t));
    out.results["scenarios"] = std::move(scenarios);
    out.results["total_effect_x0_y"] = r.total_effect;
    out.results["flag_threshold_se"] = 4.0;
    return out;
}

// ---- backdoor_report ----

ordered_json analysis_json(const AdjustmentAnalysis& a) {
    ordered_json j;
    j["cause"] = a.cause;
    j["outcome"] = a.outcome;
    j["identifiable"] = a.identifiable;
    j["candidates"] = a.candidates;
    j["n_backdoor_paths"] = a.backdoor_paths.size();
    j["n_valid_sets"] = a.valid_masks.size();
    j["minimal_sets"] = a.minimal_sets;
    return j;
}

ExperimentOutput run_backdoor_exp(const RunContext&) {
    const auto r = run_backdoor();
    const auto g = Dag::from_model(reference::mediated_confounding_model());
    ExperimentOutput out;
    Table paths{"backdoor_paths.csv", {"query", "path"}, {}};
    Table sets{"adjustment_sets.csv", {"query", "set", "size", "minimal"}, {}};
    const auto add = [&](const std::string& query, const AdjustmentAnalysis& a, const Dag& graph) {
        for (const auto& p : a.backdoor_paths) paths.add({query, format_path(graph, p)});
        for (const auto& s : a.valid_sets()) {
            const bool minimal = std::find(a.minimal_sets.begin(), a.minimal_sets.end(), s) != a.minimal_sets.end();
            sets.add({query, format_set(s), cell(s.size()), yes_no(minimal)});
        }
    };
    add("x0->y", r.confounded, g);
    add("x->y", r.latent, reference::latent_confounder_graph());
    out.tables.push_back(std::move(paths));
    out.tables.push_back(std::move(sets));
    out.results["confounded"] = analysis_json(r.confounded);
    out.results["latent_confounder"] = analysis_json(r.latent);
    out.results["note"] = "graph analysis only; n is not used";
    return out;
}

// ---- fig2_panels ----

void declare_fig2(ParamSet& p) {
    p.declare("rho_grid", "0.1,0.2,0.4,0.6,0.8,0.9", "correlations of the bivariate Gaussian panels");
    p.declare("k", "3", "neighbours in the mutual information estimator");
    p.declare("quadratic_noise", "0.5", "noise sd for y = x^2, x ~ N(0,1)");
    p.declare("sinusoid_noise", "0.3", "noise sd for y = cos(2x), x ~ U(-pi, pi)");
    p.declare("circle_noise", "0.05", "noise sd on each coordinate of the unit circle");
    p.declare("cross_noise", "0.05", "noise sd for y = +-x, x ~ U(-1, 1)");
    p.declare("plot_points", "500", "points per panel written to fig2_points.csv");
}

ExperimentOutput run_fig2_exp(const RunContext& ctx) {
    Fig2Params fp;
    fp.rho_grid = ctx.params.reals("rho_grid");
    for (double rho : fp.rho_grid) {
        if (!(rho > -1.0 && rho < 1.0)) throw ConfigValidationError("rho_grid entries must lie in (-1, 1)");
    }
    fp.k = ctx.params.count("k", 1);
    if (fp.k >= ctx.n) throw ConfigValidationError("k must be smaller than n");
    fp.quadratic_noise = ctx.params.real_in("quadratic_noise", 0.0, 1e6);
    fp.sinusoid_noise = ctx.params.real_in("sinusoid_noise", 0.0, 1e6);
    fp.circle_noise = ctx.params.real_in("circle_noise", 0.0, 1e6);
    fp.cross_noise = ctx.params.real_in("cross_noise", 0.0, 1e6);
    fp.plot_points = ctx.params.count("plot_points");
    const auto panels = run_fig2(fp, ctx.n, ctx.seed);

    ExperimentOutput out;
    Table t{"fig2_panels.csv", {"panel", "family", "rho", "r", "p", "mi_nats", "mi_closed_form_nats", "n"}, {}};
    Table pts{"fig2_points.csv", {"panel", "x", "y"}, {}};
    ordered_json summary = ordered_json::array();
    for (const auto& p : panels) {
        t.add({p.panel, p.family, cell(p.rho), cell(p.corr.r), cell(p.corr.p), cell(p.mi), cell(p.mi_closed_form),
               cell(p.corr.n)});
        for (std::size_t i = 0; i < p.x.size(); ++i) pts.add({p.panel, cell(p.x[i]), cell(p.y[i])});
        ordered_json j;
        j["panel"] = p.panel;
        j["r"] = p.corr.r;
        j["mi_nats"] = p.mi;
        summary.push_back(std::move(j));
    }
    out.tables.push_back(std::move(t));
    out.tables.push_back(std::move(pts));
    out.results["mi_units"] = "nats";
    out.results["panels"] = std::move(summary);
    return out;
}

// ---- fig3_fit ----

void declare_fig3(ParamSet& p) {
    p.declare("test_n", "400", "test rows");
    p.declare("noise_sd", "0.3", "noise sd of y = 0.5 x + 2 sin(3x) + e, x ~ U(-4, 4)");
    p.declare("hidden", "32", "hidden layer widths");
    p.declare("activation", "tanh", "tanh or relu");
    p.declare("optimizer", "adam", "gd or adam (full batch)");
    p.declare("learning_rate", "0.01", "step size");
    p.declare("epochs", "20000", "full-batch epochs");
    p.declare("grid_points", "201", "points in the prediction curve");
}

ExperimentOutput run_fig3_exp(const RunContext& ctx) {
    Fig3Params fp;
    fp.test_n = ctx.params.count("test_n", kMinRows);
    fp.noise_sd = ctx.params.real_in("noise_sd", 0.0, 1e6);
    fp.mlp.hidden = ctx.params.counts("hidden", 1);
    try {
        fp.mlp.activation = parse_activation(ctx.params.raw("activation"));
        fp.mlp.optimizer = parse_optimizer(ctx.params.raw("optimizer"));
    } catch (const InvalidConfigError& e) {
        throw ConfigValidationError(e.what());
    }
    fp.mlp.learning_rate = ctx.params.real_in("learning_rate", 1e-12, 10.0);
    fp.mlp.epochs = ctx.params.count("epochs", 1);
    fp.grid_points = ctx.params.count("grid_points", 2);
    const auto r = run_fig3(fp, ctx.n, ctx.seed);

    ExperimentOutput out;
    Table m{"fig3_metrics.csv", {"model", "split", "mse"}, {}};
    m.add({"linear", "train", cell(r.linear_train_mse)});
    m.add({"linear", "test", cell(r.linear_test_mse)});
    m.add({"mlp", "train", cell(r.mlp_train_mse)});
    m.add({"mlp", "test", cell(r.mlp_test_mse)});
    Table c{"fig3_curve.csv", {"x", "truth", "linear", "mlp"}, {}};
    for (std::size_t i = 0; i < r.grid_x.size(); ++i) {
        c.add({cell(r.grid_x[i]), cell(r.grid_truth[i]), cell(r.grid_linear[i]), cell(r.grid_mlp[i])});
    }
    out.tables.push_back(std::move(m));
    out.tables.push_back(std::move(c));
    auto& j = out.results;
    j["noise_variance"] = r.noise_variance;
    j["sine_power"] = r.sine_power;
    j["linear_floor"] = r.linear_floor;
    j["linear_train_mse"] = r.linear_train_mse;
    j["linear_test_mse"] = r.linear_test_mse;
    j["mlp_train_mse"] = r.mlp_train_mse;
    j["mlp_test_mse"] = r.mlp_test_mse;
    j["mlp_to_linear_test_ratio"] = r.mlp_test_mse / r.linear_test_mse;
    j["final_training_loss_scaled"] = r.final_training_loss;
    return out;
}

// ---- fig5_sweep ----

void declare_fig5(ParamSet& p) {
    p.declare("q_grid", "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1", "degrees of non-linearity");
    p.declare("coefficients", "0.388,-0.325,1.714,-1,1.265,0.0233",
              "c0..c5 in (1-q)(c0 x1 + c1) + q(c2 x1^2 + c3) + c4 x2 + c5");
    p.declare("proxy_noise_sd", "0.5", "noise sd of the proxies x3 = x1^2 + e and x4 = |x1| + e");
    p.declare("n_noise", "4", "pure-noise features after x4");
    p.declare("test_n", "20000", "test rows");
    p.declare("n_trees", "100", "boosting rounds");
    p.declare("max_depth", "3", "tree depth");
    p.declare("learning_rate", "0.1", "boosting shrinkage");
    p.declare("min_leaf", "20", "minimum rows per leaf");
    p.declare("max_bins", "64", "quantile bins per feature");
    p.declare("eval_rows", "64", "test rows explained per model and q");
    p.declare("background_rows", "128", "training rows in the Shapley background");
}

ExperimentOutput run_fig5_exp(const RunContext& ctx) {
    Fig5Params fp;
    fp.spec.q_grid = ctx.params.reals("q_grid");
    const auto coef = ctx.params.reals("coefficients");
    if (coef.size() != 6) throw ConfigValidationError("coefficients needs six values");
    std::copy(coef.begin(), coef.end(), fp.spec.coefficients.begin());
    fp.spec.proxy_noise_sd = ctx.params.real_in("proxy_noise_sd", 0.0, 1e6);
    fp.spec.n_noise = ctx.params.count("n_noise");
    fp.test_n = ctx.params.count("test_n", kMinRows);
    fp.gbt.n_trees = ctx.params.count("n_trees");
    fp.gbt.max_depth = ctx.params.count("max_depth", 1);
    fp.gbt.learning_rate = ctx.params.real_in("learning_rate", 1e-12, 1.0);
    fp.gbt.min_leaf = ctx.params.count("min_leaf", 1);
    fp.gbt.max_bins = ctx.params.count("max_bins", 2);
    if (fp.gbt.max_bins > 256) throw ConfigValidationError("max_bins must be at most 256");
    fp.eval_rows = ctx.params.count("eval_rows", 1);
    fp.background_rows = ctx.params.count("background_rows", 1);
    const auto r = run_fig5(fp, ctx.n, ctx.seed);

    ExperimentOutput out;
    Table sweep{"fig5_sweep.csv",
                {"q", "model", "test_log_loss", "test_error_rate", "bayes_log_loss", "excess_log_loss",
                 "irrelevant_mass", "relevant_mass"},
                {}};
    Table attr{"fig5_attributions.csv", {"q", "model", "feature", "relevant", "mean_abs_phi"}, {}};
    Table coefs{"fig5_logistic_coefficients.csv", {"q", "term", "estimate", "std_error", "p_value"}, {}};
    const auto relevant = fp.spec.relevant();
    for (const auto& p : r.points) {
        sweep.add({cell(p.q), "logistic", cell(p.logistic_log_loss), cell(p.logistic_error_rate),
                   cell(p.bayes_log_loss), cell(p.logistic_log_loss - p.bayes_log_loss),
                   cell(p.logistic_irrelevant_mass), cell(p.logistic_relevant_mass)});
        sweep.add({cell(p.q), "gbt", cell(p.gbt_log_loss), cell(p.gbt_error_rate), cell(p.bayes_log_loss),
                   cell(p.gbt_log_loss - p.bayes_log_loss), cell(p.gbt_irrelevant_mass), cell(p.gbt_relevant_mass)});
        for (std::size_t j = 0; j < r.features.size(); ++j) {
            const bool rel = std::find(relevant.begin(), relevant.end(), r.features[j]) != relevant.end();
            attr.add({cell(p.q), "logistic", r.features[j], yes_no(rel), cell(p.logistic_mean_abs_phi[j])});
            attr.add({cell(p.q), "gbt", r.features[j], yes_no(rel), cell(p.gbt_mean_abs_phi[j])});
        }
        for (std::size_t k = 0; k < p.logistic.terms.size(); ++k) {
            coefs.add({cell(p.q), p.logistic.terms[k], cell(p.logistic.coefficients[k]),
                       cell(p.logistic.std_errors[k]), cell(p.logistic.p_values[k])});
        }
    }
    out.tables.push_back(std::move(sweep));
    out.tables.push_back(std::move(attr));
    out.tables.push_back(std::move(coefs));

    auto& j = out.results;
    j["generator"] =
        "x1, x2 ~ N(0,1) independent; x3 = x1^2 + e and x4 = |x1| + e are proxies of the quadratic signal; the "
        "remaining features are pure N(0,1) noise; y ~ Bernoulli(sigmoid(eta_q)). Label uniforms are shared "
        "across q. Shapley values are computed on the log-odds scale against a training-row background.";
    j["features"] = r.features;
    j["relevant"] = relevant;
    j["spearman_q_logistic_log_loss"] = r.spearman_logistic_log_loss;
    j["spearman_q_logistic_irrelevant_mass"] = r.spearman_logistic_irrelevant;
    j["spearman_q_logistic_excess_log_loss"] = r.spearman_logistic_excess_log_loss;
    j["gbt_log_loss_reduction_at_max_q"] = r.gbt_vs_logistic_reduction_at_max_q;
    j["gbt_to_logistic_irrelevant_ratio_at_max_q"] = r.irrelevant_ratio_at_max_q;
    double max_resid = 0.0;
    for (const auto& p : r.points) max_resid = std::max(max_resid, p.max_efficiency_residual);
    j["max_shapley_efficiency_residual"] = max_resid;
    return out;
}

// ---- overfit_demo ----

void declare_overfit(ParamSet& p) {
    p.declare("candidates", "20", "pure-noise candidate predictors");
    p.declare("test_fraction", "0.3", "held-out share of rows");
    p.declare("min_gain", "0.02", "minimum in-sample R^2 gain to add a candidate");
    p.declare("replications", "50", "independent datasets");
}

ExperimentOutput run_overfit_exp(const RunContext& ctx) {
    OverfitParams op;
    op.candidates = ctx.params.count("candidates", 2);
    op.test_fraction = ctx.params.real_in("test_fraction", 1e-9, 1.0 - 1e-9);
    op.min_gain = ctx.params.real("min_gain");
    op.replications = ctx.params.count("replications", 1);
    const auto r = run_overfit(op, ctx.n, ctx.seed);

    ExperimentOutput out;
    Table trace{"overfit_trace.csv", {"replication", "step", "added", "in_sample_r2", "held_out_r2"}, {}};
    Table summary{"overfit_summary.csv", {"replication", "selected", "final_in_sample_r2", "final_held_out_r2"}, {}};
    for (std::size_t rep = 0; rep < r.traces.size(); ++rep) {
        const auto& t = r.traces[rep];
        for (std::size_t s = 0; s < t.steps.size(); ++s) {
            trace.add({cell(rep), cell(s + 1), t.steps[s].added, cell(t.steps[s].in_sample_r2),
                       cell(t.steps[s].held_out_r2)});
        }
        summary.add({cell(rep), cell(t.steps.size()), cell(r.final_in_sample[rep]), cell(r.final_held_out[rep])});
    }
    out.tables.push_back(std::move(trace));
    out.tables.push_back(std::move(summary));
    out.results["mean_final_in_sample_r2"] = r.mean_in_sample;
    out.results["mean_final_held_out_r2"] = r.mean_held_out;
    out.results["mean_gap"] = r.mean_in_sample - r.mean_held_out;
    out.results["mean_selected"] = r.mean_selected;
    return out;
}

void declare_nothing(ParamSet&) {}

}  // namespace

const std::vector<ExperimentInfo>& registry() {
    static const std::vector<ExperimentInfo> experiments{
        {"table2", "exogenous-predictor model; OLS recovery of the structural weights", 5000, declare_table2,
         run_table2_exp},
        {"table3", "nine-node linear model; Pearson r and p of every x_k with y", 5000, declare_nothing,
         run_table3_exp},
        {"part2_regressions", "naive, all-variable, mediator and backdoor regressions against analytic oracles",
         5000, declare_nothing, run_part2_exp},
        {"backdoor_report", "backdoor paths and adjustment sets for (x0, y); latent-confounder identifiability",
         5000, declare_nothing, run_backdoor_exp},
        {"fig2_panels", "Pearson r and k-NN mutual information on linear and non-linear panels", 5000, declare_fig2,
         run_fig2_exp},
        {"fig3_fit", "linear regression versus a one-hidden-layer network on a sinusoid over a trend", 400,
         declare_fig3, run_fig3_exp},
        {"fig5_sweep", "logistic regression versus boosted trees across a non-linearity grid, with attributions",
         20000, declare_fig5, run_fig5_exp},
        {"overfit_demo", "forward stepwise selection on pure-noise candidates", 100, declare_overfit,
         run_overfit_exp},
    };
    return experiments;
}

const ExperimentInfo& find_experiment(std::string_view name) {
    for (const auto& e : registry()) {
        if (e.name == name) return e;
    }
    throw UnknownExperimentError("unknown experiment '" + std::string(name) + "'");
}

const std::string& RunFiles::at(std::string_view name) const {
    for (const auto& [f, content] : files) {
        if (f == name) return content;
    }
    throw InvalidArgumentError("run produced no file named '" + std::string(name) + "'");
}

std::string render_csv(const Table& t, std::string_view experiment, std::uint64_t seed) {
    std::string out = "experiment,seed";
    for (const auto& h : t.header) out += "," + quoted(h);
    out += '\n';
    const auto prefix = quoted(std::string(experiment)) + "," + std::to_string(seed);
    for (const auto& row : t.rows) {
        if (row.size() != t.header.size()) throw InvalidArgumentError("row width differs from header in " + t.file);
        out += prefix;
        for (const auto& c : row) out += "," + quoted(c);
        out += '\n';
    }
    return out;
}

RunFiles run_experiment(const ExperimentConfig& config) {
    const auto& info = find_experiment(config.name);
    RunContext ctx;
    ctx.name = info.name;
    ctx.seed = config.seed;
    ctx.n = config.n.value_or(info.default_n);
    if (ctx.n < kMinRows) {
        throw ConfigValidationError("n must be at least " + std::to_string(kMinRows) + ", got " +
                                    std::to_string(ctx.n));
    }
    info.declare(ctx.params);
    ctx.params.apply(config.params);

    ExperimentOutput result;
    try {
        result = info.run(ctx);
    } catch (const InvalidConfigError& e) {
        throw ConfigValidationError(e.what());
    }

    RunFiles files;
    ordered_json report;
    report["experiment"] = info.name;
    report["artifact"] = "causim";
    report["version"] = CAUSIM_VERSION;
    report["seed"] = ctx.seed;
    report["n"] = ctx.n;
    report["config"] = ctx.params.to_json();
    report["summary"] = info.summary;
    report["results"] = std::move(result.results);
    std::vector<std::string> names;
    for (const auto& t : result.tables) names.push_back(t.file);
    report["tables"] = names;
    files.files.emplace_back("report.json", report.dump(2) + "\n");

    ordered_json meta;
    meta["experiment"] = info.name;
    meta["seed"] = ctx.seed;
    meta["version"] = CAUSIM_VERSION;
    meta["files"] = ordered_json::array();
    meta["files"].push_back({{"name", "report.json"}, {"bytes", files.files.back().second.size()}, {"rows", 0}});
    for (const auto& t : result.tables) {
        auto csv = render_csv(t, info.name, ctx.seed);
        meta["files"].push_back({{"name", t.file}, {"bytes", csv.size()}, {"rows", t.rows.size()}});
        files.files.emplace_back(t.file, std::move(csv));
    }
    files.files.emplace_back("meta.json", meta.dump(2) + "\n");
    return files;
}

void write_files(const RunFiles& files, const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
    for (const auto& [name, content] : files.files) {
        const auto path = std::filesystem::path(dir) / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
        out << content;
        if (!out) throw IoError("failed writing '" + path.string() + "'");
    }
}

}  // namespace causim::exp
