#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "causim/error.hpp"
#include "causim/exp/studies.hpp"
#include "causim/mutual_information.hpp"
#include "causim/rng.hpp"
#include "causim/split.hpp"
#include "causim/stats.hpp"

namespace causim::exp {

namespace {

using A = StructuralAssignment;

enum Stream : std::uint64_t { kTrain = 1, kTest = 2, kInit = 3, kSplit = 4 };

StructuralModel panel_model(const std::string& shape, double p) {
    ModelSpec spec;
    if (shape == "linear") {
        if (!(p >= -1.0 && p <= 1.0)) throw ConfigValidationError("correlation must lie in [-1, 1]");
        spec.add("x", A::exogenous(NoiseSpec::standard_normal()))
            .add("y", A::linear({"x"}, {p}, NoiseSpec::gaussian(0.0, std::sqrt(1.0 - p * p))));
    } else if (shape == "quadratic") {
        spec.add("x", A::exogenous(NoiseSpec::standard_normal()))
            .add("y", A::custom({"x"}, [](std::span<const double> v) { return v[0] * v[0]; },
                                NoiseSpec::gaussian(0.0, p)));
    } else if (shape == "sinusoid") {
        spec.add("x", A::exogenous(NoiseSpec::uniform(-std::numbers::pi, std::numbers::pi)))
            .add("y", A::custom({"x"}, [](std::span<const double> v) { return std::cos(2.0 * v[0]); },
                                NoiseSpec::gaussian(0.0, p)));
    } else if (shape == "circle") {
        spec.add("t", A::exogenous(NoiseSpec::uniform(0.0, 2.0 * std::numbers::pi)))
            .add("x", A::custom({"t"}, [](std::span<const double> v) { return std::cos(v[0]); },
                                NoiseSpec::gaussian(0.0, p)))
            .add("y", A::custom({"t"}, [](std::span<const double> v) { return std::sin(v[0]); },
                                NoiseSpec::gaussian(0.0, p)));
    } else if (shape == "cross") {
        spec.add("x", A::exogenous(NoiseSpec::uniform(-1.0, 1.0)))
            .add("s", A::exogenous(NoiseSpec::uniform(0.0, 1.0)))
            .add("y", A::custom({"x", "s"}, [](std::span<const double> v) { return v[1] < 0.5 ? v[0] : -v[0]; },
                                NoiseSpec::gaussian(0.0, p)));
    } else {
        throw ConfigValidationError("unknown panel shape '" + shape + "'");
    }
    return validate_model(spec);
}

double final_r2(const StepwiseTrace& t, bool in_sample) {
    if (t.steps.empty()) return 0.0;
    return in_sample ? t.steps.back().in_sample_r2 : t.steps.back().held_out_r2;
}

}  // namespace

Dataset fig2_panel_data(const std::string& shape, double parameter, std::size_t n, std::uint64_t seed) {
    const auto all = sample(panel_model(shape, parameter), n, seed);
    const std::vector<std::string> keep{"x", "y"};
    return all.select_columns(keep);
}

std::vector<Fig2Panel> run_fig2(const Fig2Params& params, std::size_t n, std::uint64_t seed) {
    std::vector<Fig2Panel> panels;
    std::uint64_t index = 0;
    const auto add = [&](const std::string& name, const std::string& shape, double parameter, bool linear) {
        const auto data = fig2_panel_data(shape, parameter, n, rng::derive(seed, index++));
        Fig2Panel p;
        p.panel = name;
        p.family = linear ? "linear" : "nonlinear";
        p.rho = linear ? parameter : NAN;
        p.corr = pearson(data, "x", "y");
        p.mi = mutual_information(data, "x", "y", params.k).mi;
        p.mi_closed_form = linear ? -0.5 * std::log1p(-parameter * parameter) : NAN;
        const auto m = std::min(params.plot_points, n);
        const auto x = data.column("x");
        const auto y = data.column("y");
        p.x.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(m));
        p.y.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(m));
        panels.push_back(std::move(p));
    };
    for (double rho : params.rho_grid) add(fmt::format("linear_rho_{}", rho), "linear", rho, true);
    add("quadratic", "quadratic", params.quadratic_noise, false);
    add("sinusoid", "sinusoid", params.sinusoid_noise, false);
    add("circle", "circle", params.circle_noise, false);
    add("cross", "cross", params.cross_noise, false);
    return panels;
}

double fig3_signal(double x) { return 0.5 * x + 2.0 * std::sin(3.0 * x); }

double fig3_sine_power() { return 4.0 * (0.5 - std::sin(24.0) / 48.0); }

StructuralModel fig3_model(double noise_sd) {
    ModelSpec spec;
    spec.add("x", A::exogenous(NoiseSpec::uniform(-4.0, 4.0)))
        .add("y", A::custom({"x"}, [](std::span<const double> v) { return fig3_signal(v[0]); },
                            NoiseSpec::gaussian(0.0, noise_sd)));
    return validate_model(spec);
}

Fig3Result run_fig3(const Fig3Params& params, std::size_t n, std::uint64_t seed) {
    const auto model = fig3_model(params.noise_sd);
    const auto train = sample(model, n, rng::derive(seed, kTrain));
    const auto test = sample(model, params.test_n, rng::derive(seed, kTest));
    const std::vector<std::string> features{"x"};

    Fig3Result r;
    r.noise_variance = params.noise_sd * params.noise_sd;
    r.sine_power = fig3_sine_power();
    r.linear_floor = r.noise_variance + 0.5 * r.sine_power;

    const auto linear = ols_fit(train, "y", features);
    r.linear_train_mse = stats::mean_squared_error(train.column("y"), linear.predict(train));
    r.linear_test_mse = stats::mean_squared_error(test.column("y"), linear.predict(test));

    auto config = params.mlp;
    config.seed = rng::derive(seed, kInit);
    const auto mlp = mlp_train(train, "y", features, config);
    r.mlp_train_mse = stats::mean_squared_error(train.column("y"), mlp.predict(train));
    r.mlp_test_mse = stats::mean_squared_error(test.column("y"), mlp.predict(test));
    r.epochs = config.epochs;
    r.final_training_loss = mlp.training_loss.back();

    const std::size_t g = std::max<std::size_t>(params.grid_points, 2);
    for (std::size_t i = 0; i < g; ++i) {
        const double x = -4.0 + 8.0 * static_cast<double>(i) / static_cast<double>(g - 1);
        const double row[1] = {x};
        r.grid_x.push_back(x);
        r.grid_truth.push_back(fig3_signal(x));
        r.grid_linear.push_back(linear.predict(std::span<const double>(row)));
        r.grid_mlp.push_back(mlp.predict_row(row));
    }
    return r;
}

Dataset overfit_data(std::size_t candidates, std::size_t n, std::uint64_t seed) {
    Dataset d(seed);
    for (std::size_t j = 0; j <= candidates; ++j) {
        auto stream = rng::Stream::derived(seed, j);
        std::vector<double> col(n);
        for (auto& v : col) v = stream.normal();
        d.add_column(j == 0 ? "y" : "c" + std::to_string(j), std::move(col));
    }
    return d;
}

OverfitResult run_overfit(const OverfitParams& params, std::size_t n, std::uint64_t seed) {
    if (params.replications == 0) throw ConfigValidationError("replications must be positive");
    std::vector<std::string> candidates;
    for (std::size_t j = 1; j <= params.candidates; ++j) candidates.push_back("c" + std::to_string(j));

    OverfitResult r;
    double selected = 0.0;
    for (std::size_t rep = 0; rep < params.replications; ++rep) {
        const auto data = overfit_data(params.candidates, n, rng::derive(seed, rep));
        const auto split = train_test_split(data, params.test_fraction, rng::derive(seed, rep, kSplit));
        auto trace = stepwise_forward(data, "y", candidates, split, params.min_gain);
        r.final_in_sample.push_back(final_r2(trace, true));
        r.final_held_out.push_back(final_r2(trace, false));
        selected += static_cast<double>(trace.steps.size());
        r.traces.push_back(std::move(trace));
    }
    r.mean_in_sample = stats::mean(r.final_in_sample);
    r.mean_held_out = stats::mean(r.final_held_out);
    r.mean_selected = selected / static_cast<double>(params.replications);
    return r;
}

}  // namespace causim::exp
