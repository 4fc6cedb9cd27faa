#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "causim/error.hpp"
#include "causim/gbt.hpp"
#include "causim/mlp.hpp"
#include "causim/shapley.hpp"
#include "causim/stats.hpp"
#include "support.hpp"

using namespace causim;

namespace {

const std::vector<std::string> kFeatures{"a", "b", "c", "d"};

// Average marginal contribution over all d! orderings.
std::vector<double> permutation_shapley(const std::vector<double>& values, std::size_t d) {
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> phi(d, 0.0);
    double count = 0.0;
    do {
        std::size_t mask = 0;
        for (auto j : order) {
            phi[j] += values[mask | (std::size_t{1} << j)] - values[mask];
            mask |= std::size_t{1} << j;
        }
        count += 1.0;
    } while (std::next_permutation(order.begin(), order.end()));
    for (auto& p : phi) p /= count;
    return phi;
}

Dataset labelled(std::uint64_t seed, std::size_t n) {
    auto d = testing::normal_columns(kFeatures, n, seed);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = std::sin(d.column("a")[i]) + d.column("b")[i] * d.column("c")[i] + 0.1 * d.column("d")[i];
    }
    d.add_column("y", y);
    return d;
}

}  // namespace

TEST_SUITE("shapley") {

TEST_CASE("constant model") {
    const auto bg = testing::normal_columns(kFeatures, 30, 1);
    const ShapleyExplainer ex([](std::span<const double>) { return 4.5; }, bg, kFeatures);
    const std::vector<double> x{1, 2, 3, 4};
    const auto a = ex.explain(x);
    for (double p : a.phi) CHECK(p == 0.0);
    CHECK(a.base_value == 4.5);
}

TEST_CASE("linear model closed form") {
    const auto bg = testing::normal_columns(kFeatures, 50, 2);
    const std::vector<double> beta{1.5, -2.0, 0.25, 3.0};
    const PredictFn f = [&](std::span<const double> x) {
        double s = 0.7;
        for (std::size_t j = 0; j < 4; ++j) s += beta[j] * x[j];
        return s;
    };
    const ShapleyExplainer ex(f, bg, kFeatures);
    auto s = rng::Stream(3);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> x(4);
        for (auto& v : x) v = s.normal(0.0, 2.0);
        const auto a = ex.explain(x);
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(std::fabs(a.phi[j] - beta[j] * (x[j] - stats::mean(bg.column(kFeatures[j])))) < 1e-9);
        }
        CHECK(std::fabs(a.efficiency_residual) < 1e-9);
    }
}

TEST_CASE("symmetry") {
    Dataset bg;
    bg.add_column("x1", {-1.0, 1.0, 0.0, 0.5, -0.5});
    bg.add_column("x2", {1.0, -1.0, 0.0, -0.5, 0.5});
    const ShapleyExplainer ex([](std::span<const double> x) { return x[0] * x[1]; }, bg, {"x1", "x2"});
    const std::vector<double> one{1.0, 1.0};
    const auto a = ex.explain(one);
    CHECK(std::fabs(a.phi[0] - a.phi[1]) < 1e-9);

    // Features with identical roles: the model is symmetric in (a, b) and the
    // background contains every row together with its (a, b) swap.
    auto half = testing::normal_columns(kFeatures, 20, 4);
    Dataset sym;
    for (const auto& name : kFeatures) {
        std::vector<double> col(half.column(name).begin(), half.column(name).end());
        const auto& partner = name == "a" ? "b" : name == "b" ? "a" : name;
        col.insert(col.end(), half.column(partner).begin(), half.column(partner).end());
        sym.add_column(name, col);
    }
    const ShapleyExplainer ex2(
        [](std::span<const double> x) { return std::exp(0.3 * (x[0] + x[1])) + x[0] * x[1] * x[2] + x[3]; }, sym, kFeatures);
    const std::vector<double> x{0.4, 1.1, -0.3, 2.0}, swapped{1.1, 0.4, -0.3, 2.0};
    const auto p = ex2.explain(x), q = ex2.explain(swapped);
    CHECK(std::fabs(p.phi[0] - q.phi[1]) < 1e-9);
    CHECK(std::fabs(p.phi[1] - q.phi[0]) < 1e-9);
    CHECK(std::fabs(p.phi[2] - q.phi[2]) < 1e-9);
}

TEST_CASE("dummy features get exactly zero") {
    const auto train = labelled(5, 400);
    GbtConfig c;
    c.n_trees = 30;
    const auto m = gbt_train(train, "y", {"a", "b", "c"}, c);
    const PredictFn f = [&](std::span<const double> x) { return m.margin_row(x.first(3)); };
    const ShapleyExplainer ex(f, background_sample(train, 40, 1), kFeatures);
    for (const auto& a : ex.explain_all(train.select_rows(std::vector<std::size_t>{0, 1, 2, 3, 4}))) CHECK(a.phi[3] == 0.0);

    const AdditiveShapleyExplainer add(tree_parts(m), m.base_score, background_sample(train, 40, 1), {"a", "b", "c", "d"});
    CHECK(add.explain(std::vector<double>{0.1, 0.2, 0.3, 9.0}).phi[3] == 0.0);
}

TEST_CASE("linearity in the model") {
    const auto bg = testing::normal_columns(kFeatures, 25, 6);
    const PredictFn f = [](std::span<const double> x) { return std::tanh(x[0] * x[1]) + x[2] * x[2]; };
    const PredictFn g = [](std::span<const double> x) { return std::max(x[0], x[3]) - x[1]; };
    const double alpha = 2.5, beta = -0.75;
    const PredictFn h = [&](std::span<const double> x) { return alpha * f(x) + beta * g(x); };
    const ShapleyExplainer ef(f, bg, kFeatures), eg(g, bg, kFeatures), eh(h, bg, kFeatures);
    const std::vector<double> x{0.3, -1.2, 0.8, 1.5};
    const auto pf = ef.explain(x), pg = eg.explain(x), ph = eh.explain(x);
    for (std::size_t j = 0; j < 4; ++j) CHECK(std::fabs(ph.phi[j] - (alpha * pf.phi[j] + beta * pg.phi[j])) < 1e-9);
}

TEST_CASE("coalition enumeration order does not matter") {
    const auto bg = testing::normal_columns(kFeatures, 25, 7);
    const PredictFn f = [](std::span<const double> x) { return x[0] * x[1] * x[2] + std::sin(x[3]) * x[0]; };
    const ShapleyExplainer ex(f, bg, kFeatures);
    const std::vector<double> x{1.0, -0.5, 2.0, 0.3};
    const auto v = ex.coalition_values(x);
    const auto direct = shapley_from_values(v, 4);
    const auto perm = permutation_shapley(v, 4);
    for (std::size_t j = 0; j < 4; ++j) CHECK(std::fabs(direct[j] - perm[j]) < 1e-12);

    // Reordering the explained features permutes the attributions.
    const std::vector<std::string> reversed{"d", "c", "b", "a"};
    const PredictFn fr = [&](std::span<const double> z) {
        const double back[4] = {z[3], z[2], z[1], z[0]};
        return f(back);
    };
    const ShapleyExplainer er(fr, bg, reversed);
    const std::vector<double> xr{0.3, 2.0, -0.5, 1.0};
    const auto ar = er.explain(xr);
    const auto a = ex.explain(x);
    for (std::size_t j = 0; j < 4; ++j) CHECK(std::fabs(ar.phi[3 - j] - a.phi[j]) < 1e-12);
}

TEST_CASE("efficiency for boosted trees and networks") {
    const auto train = labelled(8, 400);
    GbtConfig gc;
    gc.n_trees = 40;
    const auto gbt = gbt_train(train, "y", kFeatures, gc);
    MlpConfig mc;
    mc.hidden = {8};
    mc.epochs = 200;
    const auto mlp = mlp_train(train, "y", kFeatures, mc);
    const auto bg = background_sample(train, 64, 2);
    const ShapleyExplainer eg([&](std::span<const double> x) { return gbt.margin_row(x); }, bg, kFeatures);
    const ShapleyExplainer em([&](std::span<const double> x) { return mlp.predict_row(x); }, bg, kFeatures);
    const auto eval = labelled(9, 200);
    double worst = 0.0;
    for (const auto* ex : {&eg, &em}) {
        for (const auto& a : ex->explain_all(eval)) worst = std::max(worst, std::fabs(a.efficiency_residual));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("per-tree decomposition equals direct enumeration") {
    const auto train = labelled(10, 500);
    for (auto loss : {GbtLoss::squared, GbtLoss::logistic}) {
        auto data = train;
        if (loss == GbtLoss::logistic) {
            std::vector<double> y(data.n_rows());
            for (std::size_t i = 0; i < y.size(); ++i) y[i] = data.column("y")[i] > 0.2 ? 1.0 : 0.0;
            Dataset relabel = data.select_columns(kFeatures);
            relabel.add_column("y", y);
            data = relabel;
        }
        GbtConfig c;
        c.loss = loss;
        c.n_trees = 50;
        const auto m = gbt_train(data, "y", kFeatures, c);
        const auto bg = background_sample(data, 50, 3);
        const ShapleyExplainer direct([&](std::span<const double> x) { return m.margin_row(x); }, bg, kFeatures);
        const AdditiveShapleyExplainer additive(tree_parts(m), m.base_score, bg, kFeatures);
        const auto eval = data.select_rows(std::vector<std::size_t>{0, 7, 19, 33, 250});
        const auto da = direct.explain_all(eval), aa = additive.explain_all(eval);
        for (std::size_t r = 0; r < da.size(); ++r) {
            CHECK(std::fabs(da[r].base_value - aa[r].base_value) < 1e-10);
            CHECK(std::fabs(da[r].prediction - aa[r].prediction) < 1e-10);
            CHECK(std::fabs(aa[r].efficiency_residual) < 1e-9);
            for (std::size_t j = 0; j < 4; ++j) CHECK(std::fabs(da[r].phi[j] - aa[r].phi[j]) < 1e-10);
        }
    }
}

TEST_CASE("summaries") {
    const auto bg = testing::normal_columns(kFeatures, 20, 11);
    const PredictFn f = [](std::span<const double> x) { return 2.0 * x[0] - x[2]; };
    const auto eval = testing::normal_columns(kFeatures, 5, 12);
    const auto s = attribution_summary(f, eval, bg, kFeatures, {"a", "b"});
    CHECK(s.n_instances == 5);
    CHECK(s.mean_abs_phi[1] == 0.0);
    CHECK(s.mean_abs_phi[3] == 0.0);
    CHECK(s.irrelevant_mass == doctest::Approx(s.mean_abs_phi[2]));
    CHECK(s.relevant_mass == doctest::Approx(s.mean_abs_phi[0]));
    for (double m : s.mean_abs_phi) CHECK(m >= 0.0);

    const auto one = eval.select_rows(std::vector<std::size_t>{3});
    const auto single = attribution_summary(f, one, bg, kFeatures, {"a"});
    const auto a = shapley_exact(f, one.row(0, kFeatures), bg, kFeatures);
    for (std::size_t j = 0; j < 4; ++j) CHECK(single.mean_abs_phi[j] == std::fabs(a.phi[j]));

    CHECK_THROWS_AS(attribution_summary(f, eval, bg, kFeatures, {"zzz"}), InvalidArgumentError);
}

TEST_CASE("background sampling") {
    const auto d = testing::normal_columns({"a"}, 1000, 13);
    const auto b = background_sample(d, 100, 4);
    CHECK(b.n_rows() == 100);
    const auto again = background_sample(d, 100, 4);
    CHECK(std::equal(b.column("a").begin(), b.column("a").end(), again.column("a").begin()));
    CHECK(background_sample(d, 5000, 4).n_rows() == 1000);
}

TEST_CASE("serialization") {
    const auto bg = testing::normal_columns(kFeatures, 10, 14);
    const auto a = shapley_exact([](std::span<const double> x) { return x[0]; }, std::vector<double>{1, 2, 3, 4}, bg, kFeatures);
    std::ostringstream out;
    write_attribution_csv_header(out);
    write_attribution_csv_rows(out, 0, a);
    const auto text = out.str();
    CHECK(text.rfind("instance,feature,phi\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 5);
    CHECK(attribution_to_json(a)["phi"].size() == 4);
}

TEST_CASE("errors") {
    const auto bg = testing::normal_columns(kFeatures, 10, 15);
    const PredictFn f = [](std::span<const double>) { return 0.0; };
    std::vector<std::string> many;
    for (int i = 0; i < 13; ++i) many.push_back("f" + std::to_string(i));
    CHECK_THROWS_AS(ShapleyExplainer(f, testing::normal_columns(many, 5, 1), many), TooManyFeaturesError);
    CHECK_THROWS_AS(ShapleyExplainer(f, Dataset{}, kFeatures), EmptyBackgroundError);
    CHECK_THROWS_AS(ShapleyExplainer(f, bg, {"a", "zzz"}), MissingFeatureError);
    CHECK_THROWS_AS(AdditiveShapleyExplainer({}, 0.0, Dataset{}, kFeatures), EmptyBackgroundError);
}

}
