// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "causal_graph_support.hpp"
#include "causim/causal_graph.hpp"
#include "causim/error.hpp"
#include "causim/estimators.hpp"
#include "causim/exp/runner.hpp"
#include "causim/exp/studies.hpp"
#include "causim/mutual_information.hpp"
#include "causim/reference_models.hpp"
#include "causim/scm_analysis.hpp"
#include "causim/shapley.hpp"
#include "causim/stats.hpp"
#include "mlp_gradient_check.hpp"
#include "support.hpp"

#include <Eigen/Dense>

using namespace causim;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "!") + what;
    }
};

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return 0.5 * (v[(v.size() - 1) / 2] + v[v.size() / 2]);
}

const std::vector<double> kTheta{3.3, 0.1, 0.3, 0.5};

Outcome criterion1() {
    Outcome o;
    std::size_t good = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto r = exp::run_table2(kTheta, 5000, seed);
        bool all = true;
        for (std::size_t k = 0; k < 4; ++k) all = all && std::fabs(r.estimate[k] - kTheta[k]) <= 0.05;
        good += all;
    }
    o.require(good >= 19, fmt::format("{}/20 seeds with all four estimates within 0.05", good));

    const auto t0 = Clock::now();
    exp::ExperimentConfig c;
    c.name = "table2";
    c.seed = 7;
    (void)exp::run_experiment(c);
    const double elapsed = seconds_since(t0);
    const auto r = exp::run_table2(kTheta, 5000, 7);
    const std::vector<double> reference{3.31, 0.11, 0.31, 0.50};
    bool inside = true;
    for (std::size_t k = 0; k < 4; ++k) {
        inside = inside && std::fabs(reference[k] - r.estimate[k]) <= 0.05 && std::fabs(reference[k] - kTheta[k]) <= 0.05;
    }
    o.require(inside, fmt::format("reference estimates inside the +-0.05 intervals (seed 7 estimates {:.3f} {:.3f} {:.3f} {:.3f})",
                                  r.estimate[0], r.estimate[1], r.estimate[2], r.estimate[3]));
    o.require(elapsed < 1.0, fmt::format("runtime {:.3f} s", elapsed));
    return o;
}

Outcome criterion2() {
    Outcome o;
    const auto rows = exp::run_table3(5000, 7);
    const std::vector<double> reference{0.92, -0.92, -0.58, -0.56, 0.76, 0.91, -0.93, 1.00};
    double worst_sample = 0.0, worst_ref = 0.0, worst_ref_sample = 0.0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        worst_sample = std::max(worst_sample, std::fabs(rows[k].sample.r - rows[k].analytic_r));
        worst_ref = std::max(worst_ref, std::fabs(reference[k] - rows[k].analytic_r));
        worst_ref_sample = std::max(worst_ref_sample, std::fabs(reference[k] - rows[k].sample.r));
    }
    o.require(rows.size() == 8, fmt::format("{} rows", rows.size()));
    o.require(worst_sample <= 0.03, fmt::format("max |r - analytic| {:.4f}", worst_sample));
    o.require(std::fabs(rows[0].analytic_r - 0.921) < 5e-4 && std::fabs(rows[7].analytic_r - 0.997) < 5e-4,
              fmt::format("analytic r(x0,y) {:.4f}, r(x7,y) {:.4f}", rows[0].analytic_r, rows[7].analytic_r));
    o.require(worst_ref <= 0.03, fmt::format("max |reference - analytic| {:.4f}", worst_ref));
    o.detail += fmt::format("; info: max |reference - sampled| {:.4f}", worst_ref_sample);
    return o;
}

Outcome criterion3() {
    Outcome o;
    const auto r = exp::run_part2(5000, 7);
    const auto& naive = exp::scenario(r, "naive").fit;
    const auto& all = exp::scenario(r, "all_variables").fit;
    const auto& backdoor = exp::scenario(r, "backdoor").fit;
    const auto& mediator = exp::scenario(r, "mediator").fit;
    const double oracle = population_regression(reference::mediated_confounding_model(), "y", {"x0"})[1];
    o.require(std::fabs(oracle - 1.2889) < 1e-4, fmt::format("oracle slope {:.5f}", oracle));
    o.require(std::fabs(naive.coefficient("x0") - oracle) <= 3.0 * naive.std_error("x0"),
              fmt::format("naive {:.4f} (SE {:.4f})", naive.coefficient("x0"), naive.std_error("x0")));
    o.require(std::fabs(all.coefficient("x0")) <= 0.05, fmt::format("all-variable x0 {:.4f}", all.coefficient("x0")));
    o.require(std::fabs(backdoor.coefficient("x0") - 2.0) <= 0.03, fmt::format("backdoor {:.4f}", backdoor.coefficient("x0")));
    o.require(std::fabs(mediator.coefficient("x1") + 1.0) <= 3.0 * mediator.std_error("x1"),
              fmt::format("mediator x1 {:.4f} (SE {:.4f})", mediator.coefficient("x1"), mediator.std_error("x1")));
    return o;
}

Outcome criterion4() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto r = exp::run_backdoor();
    o.require(r.confounded.minimal_sets == std::vector<NodeSet>{{"x2"}, {"x3"}}, "minimal sets {x2}, {x3}");
    o.require(!r.latent.identifiable, "latent confounder not identifiable");

    std::size_t dags = 0, queries = 0, mismatches = 0;
    for (std::size_t k = 1; k <= 5; ++k) {
        dags += testing::for_each_dag(k, [&](const Dag& g) {
            const std::size_t n = g.size();
            for (std::size_t a = 0; a < n; ++a) {
                for (std::size_t b = a + 1; b < n; ++b) {
                    for (std::uint32_t zs = 0; zs < (1u << n); ++zs) {
                        if (zs >> a & 1u || zs >> b & 1u) continue;
                        NodeSet z;
                        for (std::size_t v = 0; v < n; ++v)
                            if (zs >> v & 1u) z.push_back(g.nodes()[v]);
                        const NodeSet x{g.nodes()[a]}, y{g.nodes()[b]};
                        ++queries;
                        if (d_separated(g, x, y, z) != d_separated_moralized(g, x, y, z)) ++mismatches;
                    }
                }
            }
        });
    }
    o.require(dags == 1 + 3 + 25 + 543 + 29281, fmt::format("{} DAGs", dags));
    o.require(mismatches == 0, fmt::format("{} d-separation queries, {} disagreements", queries, mismatches));
    const double elapsed = seconds_since(t0);
    o.require(elapsed < 10.0, fmt::format("runtime {:.2f} s", elapsed));
    return o;
}

Outcome criterion5() {
    Outcome o;
    for (double rho : {0.3, 0.6, 0.8, 0.9}) {
        const double truth = -0.5 * std::log(1.0 - rho * rho);
        std::vector<double> err;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            auto s = rng::Stream::derived(seed, 0x4D49);
            std::vector<double> x(5000), y(5000);
            for (std::size_t i = 0; i < x.size(); ++i) {
                x[i] = s.normal();
                y[i] = rho * x[i] + std::sqrt(1.0 - rho * rho) * s.normal();
            }
            err.push_back(std::fabs(mutual_information(x, y, 3).mi - truth));
        }
        const double m = median(err);
        o.require(m <= 0.05, fmt::format("rho {} median error {:.4f}", rho, m));
    }
    const auto panels = exp::run_fig2({}, 5000, 7);
    const auto quad = std::find_if(panels.begin(), panels.end(), [](const exp::Fig2Panel& p) { return p.panel == "quadratic"; });
    o.require(quad != panels.end() && std::fabs(quad->corr.r) < 0.1 && quad->mi > 0.3,
              fmt::format("quadratic panel r {:.3f}, MI {:.3f}", quad->corr.r, quad->mi));
    return o;
}

Outcome criterion6() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto r = exp::run_fig3({}, 400, 7);
    const double elapsed = seconds_since(t0);
    o.require(r.mlp_test_mse <= 1.5 * r.noise_variance,
              fmt::format("MLP test MSE {:.4f} <= {:.4f}", r.mlp_test_mse, 1.5 * r.noise_variance));
    o.require(r.linear_test_mse >= r.noise_variance + 0.5 * r.sine_power,
              fmt::format("linear test MSE {:.4f} >= {:.4f}", r.linear_test_mse, r.noise_variance + 0.5 * r.sine_power));
    o.require(r.mlp_test_mse / r.linear_test_mse < 0.25, fmt::format("ratio {:.4f}", r.mlp_test_mse / r.linear_test_mse));
    o.require(elapsed < 60.0, fmt::format("runtime {:.1f} s", elapsed));
    return o;
}

Outcome criterion7() {
    Outcome o;
    const auto r = exp::run_fig5({}, 20000, 7);
    const auto& last = r.points.back();
    o.require(r.spearman_logistic_log_loss > 0.8,
              fmt::format("(a) Spearman(q, logistic log-loss) {:.3f} [{:.4f} -> {:.4f}]", r.spearman_logistic_log_loss,
                          r.points.front().logistic_log_loss, last.logistic_log_loss));
    o.require(r.gbt_vs_logistic_reduction_at_max_q >= 0.20,
              fmt::format("(b) GBT log-loss {:.4f} vs logistic {:.4f} at q=1, reduction {:.1f}%", last.gbt_log_loss,
                          last.logistic_log_loss, 100.0 * r.gbt_vs_logistic_reduction_at_max_q));
    o.require(r.spearman_logistic_irrelevant > 0.8,
              fmt::format("(c) Spearman(q, logistic irrelevant mass) {:.3f}", r.spearman_logistic_irrelevant));
    o.require(r.irrelevant_ratio_at_max_q < 0.25,
              fmt::format("(d) GBT/logistic irrelevant mass at q=1 {:.3f}", r.irrelevant_ratio_at_max_q));
    o.detail += fmt::format("; info: Spearman(q, logistic excess log-loss over Bayes) {:.3f}",
                            r.spearman_logistic_excess_log_loss);
    return o;
}

Outcome criterion8() {
    Outcome o;
    const std::vector<std::string> features{"a", "b", "c", "d", "e"};
    auto train = testing::normal_columns(features, 2000, 81);
    std::vector<double> y(train.n_rows());
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = std::sin(train.column("a")[i]) + train.column("b")[i] * train.column("c")[i] + 0.5 * train.column("d")[i];
    }
    train.add_column("y", y);
    GbtConfig gc;
    gc.n_trees = 50;
    const auto gbt = gbt_train(train, "y", features, gc);
    MlpConfig mc;
    mc.hidden = {16};
    mc.epochs = 300;
    const auto mlp = mlp_train(train, "y", features, mc);
    const auto bg = background_sample(train, 48, 82);
    const auto eval = testing::normal_columns(features, 1000, 83);

    const ShapleyExplainer eg([&](std::span<const double> x) { return gbt.margin_row(x); }, bg, features);
    const ShapleyExplainer em([&](std::span<const double> x) { return mlp.predict_row(x); }, bg, features);
    double worst_gbt = 0.0, worst_mlp = 0.0;
    for (const auto& a : eg.explain_all(eval)) worst_gbt = std::max(worst_gbt, std::fabs(a.efficiency_residual));
    for (const auto& a : em.explain_all(eval)) worst_mlp = std::max(worst_mlp, std::fabs(a.efficiency_residual));
    o.require(worst_gbt < 1e-9 && worst_mlp < 1e-9,
              fmt::format("efficiency residual over 1000 instances: GBT {:.2e}, MLP {:.2e}", worst_gbt, worst_mlp));

    const std::vector<double> beta{1.5, -2.0, 0.25, 3.0, 0.0};
    const ShapleyExplainer el(
        [&](std::span<const double> x) {
            double s = -0.4;
            for (std::size_t j = 0; j < beta.size(); ++j) s += beta[j] * x[j];
            return s;
        },
        bg, features);
    double worst_linear = 0.0;
    bool dummy_zero = true;
    for (std::size_t r = 0; r < 200; ++r) {
        const auto x = eval.row(r, features);
        const auto a = el.explain(x);
        for (std::size_t j = 0; j < beta.size(); ++j) {
            worst_linear = std::max(worst_linear, std::fabs(a.phi[j] - beta[j] * (x[j] - stats::mean(bg.column(features[j])))));
        }
        dummy_zero = dummy_zero && a.phi[4] == 0.0;
    }
    o.require(worst_linear < 1e-9, fmt::format("linear closed-form error {:.2e}", worst_linear));
    // a model that never reads feature e
    const ShapleyExplainer ed([&](std::span<const double> x) { return mlp.predict_row(std::vector<double>{x[0], x[1], x[2], x[3], 0.0}); },
                              bg, features);
    for (std::size_t r = 0; r < 50; ++r) dummy_zero = dummy_zero && ed.explain(eval, r).phi[4] == 0.0;
    o.require(dummy_zero, "dummy feature exactly 0");
    return o;
}

Outcome criterion9() {
    Outcome o;
    double worst = 0.0;
    for (auto act : {Activation::tanh, Activation::relu}) {
        for (auto out : {OutputKind::identity, OutputKind::logistic}) {
            worst = std::max(worst, testing::worst_gradient_error(act, out, 25, 91));
        }
    }
    o.require(worst < 1e-4, fmt::format("MLP gradient relative error {:.2e} over 100 points", worst));

    const auto d = sample(reference::mediated_confounding_model(), 5000, 92);
    const std::vector<std::string> regs{"x0", "x1", "x2", "x3", "x4", "x5", "x6", "x7"};
    const auto fit = ols_fit(d, "y", regs);
    Eigen::MatrixXd x(d.n_rows(), regs.size() + 1);
    x.col(0).setOnes();
    for (std::size_t j = 0; j < regs.size(); ++j)
        for (std::size_t i = 0; i < d.n_rows(); ++i) x(i, j + 1) = d.column(regs[j])[i];
    const auto yc = d.column("y");
    const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(yc.data(), yc.size());
    const Eigen::VectorXd theta = Eigen::Map<const Eigen::VectorXd>(fit.coefficients.data(), fit.coefficients.size());
    const double resid = (x.transpose() * (yv - x * theta)).norm() / yv.norm();
    o.require(resid < 1e-8, fmt::format("OLS normal-equation residual {:.2e} x ||y||", resid));
    return o;
}

Outcome criterion10() {
    Outcome o;
    std::vector<std::string> differing;
    for (const auto& info : exp::registry()) {
        exp::ExperimentConfig c;
        c.name = info.name;
        c.seed = 2718;
        const auto a = exp::run_experiment(c);
        const auto b = exp::run_experiment(c);
        if (a.files != b.files) differing.push_back(info.name);
    }
    o.require(differing.empty(), fmt::format("{} experiments re-run, {} with differing bytes", exp::registry().size(), differing.size()));
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"table2 recovery", criterion1},
        {"table3 correlations", criterion2},
        {"part2 regressions", criterion3},
        {"backdoor identification", criterion4},
        {"mutual information", criterion5},
        {"fig3 MLP vs linear", criterion6},
        {"fig5 sweep", criterion7},
        {"Shapley suite", criterion8},
        {"numerical hygiene", criterion9},
        {"determinism", criterion10},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failures += !o.pass;
        std::printf("%s %zu %s | %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
