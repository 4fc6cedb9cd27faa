#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "causim/causal_graph.hpp"
#include "causim/error.hpp"
#include "causim/reference_models.hpp"
#include "causim/scm.hpp"
#include "causim/scm_analysis.hpp"
#include "causim/scm_io.hpp"
#include "causim/stats.hpp"

using namespace causim;
using A = StructuralAssignment;

namespace {

std::vector<std::string> order_names(const StructuralModel& m) {
    std::vector<std::string> out;
    for (auto i : m.topological_order()) out.push_back(m.nodes()[i]);
    return out;
}

double sample_cov(std::span<const double> a, std::span<const double> b) {
    const double ma = stats::mean(a), mb = stats::mean(b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
    return s / static_cast<double>(a.size() - 1);
}

}  // namespace

TEST_SUITE("scm") {

TEST_CASE("validation") {
    ModelSpec chain;
    chain.add("b", A::linear({"a"}, {1.0}, NoiseSpec::standard_normal()))
        .add("a", A::exogenous(NoiseSpec::standard_normal()));
    CHECK(order_names(validate_model(chain)) == std::vector<std::string>{"a", "b"});

    ModelSpec cycle;
    cycle.add("a", A::linear({"b"}, {1.0}, NoiseSpec::standard_normal()))
        .add("b", A::linear({"a"}, {1.0}, NoiseSpec::standard_normal()));
    CHECK_THROWS_AS(validate_model(cycle), CycleError);

    ModelSpec unknown;
    unknown.add("a", A::linear({"ghost"}, {1.0}, NoiseSpec::standard_normal()));
    CHECK_THROWS_AS(validate_model(unknown), UnknownParentError);

    ModelSpec dup;
    dup.add("a", A::exogenous(NoiseSpec::standard_normal())).add("a", A::exogenous(NoiseSpec::standard_normal()));
    CHECK_THROWS_AS(validate_model(dup), DuplicateAssignmentError);

    ModelSpec bad_weights;
    bad_weights.add("a", A::exogenous(NoiseSpec::standard_normal()))
        .add("b", A::linear({"a"}, {1.0, 2.0}, NoiseSpec::standard_normal()));
    CHECK_THROWS_AS(validate_model(bad_weights), InvalidModelError);

    const auto m = reference::mediated_confounding_model();
    CHECK(m.size() == 9);
    CHECK(m.is_linear());
}

TEST_CASE("sampling is deterministic and noise-free models are exact") {
    const auto m = reference::mediated_confounding_model();
    const auto a = sample(m, 300, 42);
    const auto b = sample(m, 300, 42);
    const auto c = sample(m, 300, 43);
    for (const auto& name : m.nodes()) {
        const auto ca = a.column(name), cb = b.column(name), cc = c.column(name);
        CHECK(std::equal(ca.begin(), ca.end(), cb.begin()));
        CHECK_FALSE(std::equal(ca.begin(), ca.end(), cc.begin()));
    }
    // The first rows of a longer sample are the same draws.
    const auto longer = sample(m, 600, 42);
    CHECK(longer.column("y")[299] == a.column("y")[299]);

    ModelSpec fixed;
    fixed.add("a", A::exogenous(NoiseSpec::constant(2.0)))
        .add("b", A::linear({"a"}, {3.0}, NoiseSpec::constant(0.0), 1.0))
        .add("c", A::custom({"a", "b"}, [](std::span<const double> v) { return v[0] * v[1]; }, NoiseSpec::constant(0.0)));
    const auto d = sample(validate_model(fixed), 5, 1);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(d.column("b")[i] == 7.0);
        CHECK(d.column("c")[i] == 14.0);
    }
    CHECK_THROWS_AS(sample(m, 0, 1), InsufficientDataError);
}

TEST_CASE("population covariance by hand") {
    const auto pm = population_moments(reference::mediated_confounding_model());
    CHECK(pm.cov("x2", "x2") == doctest::Approx(0.64).epsilon(1e-14));
    CHECK(pm.cov("x0", "x0") == doctest::Approx(3.6).epsilon(1e-14));
    CHECK(pm.cov("x0", "y") == doctest::Approx(4.64).epsilon(1e-14));
    CHECK(pm.cov("x2", "x4") == 0.0);

    ModelSpec u;
    u.add("a", A::exogenous(NoiseSpec::uniform(-1.0, 2.0, 2.0))).add("b", A::linear({"a"}, {0.5}, NoiseSpec::constant(1.0)));
    const auto pu = population_moments(validate_model(u));
    CHECK(pu.cov("a", "a") == doctest::Approx(4.0 * 9.0 / 12.0));
    CHECK(pu.mean_of("a") == doctest::Approx(1.0));
    CHECK(pu.mean_of("b") == doctest::Approx(1.5));
    CHECK(pu.cov("a", "b") == doctest::Approx(1.5));

    ModelSpec nl;
    nl.add("a", A::exogenous(NoiseSpec::standard_normal()))
        .add("b", A::custom({"a"}, [](std::span<const double> v) { return v[0] * v[0]; }, NoiseSpec::standard_normal()));
    CHECK_THROWS_AS(population_moments(validate_model(nl)), NonlinearModelError);
}

TEST_CASE("population covariance matches a million-row Monte Carlo sample") {
    const auto m = reference::mediated_confounding_model();
    const auto pm = population_moments(m);
    const std::size_t n = 1'000'000;
    const auto d = sample(m, n, 2024);
    for (const auto& a : m.nodes()) {
        CHECK(std::fabs(stats::mean(d.column(a)) - pm.mean_of(a)) < 5.0 * std::sqrt(pm.cov(a, a) / n) + 1e-12);
        for (const auto& b : m.nodes()) {
            const double sab = pm.cov(a, b);
            const double se = std::sqrt((pm.cov(a, a) * pm.cov(b, b) + sab * sab) / n);
            CAPTURE(a);
            CAPTURE(b);
            CHECK(std::fabs(sample_cov(d.column(a), d.column(b)) - sab) < 5.0 * se);
        }
    }
}

TEST_CASE("population regression") {
    const auto m = reference::mediated_confounding_model();
    CHECK(population_regression(m, "y", {"x0"})[1] == doctest::Approx(4.64 / 3.6).epsilon(1e-12));
    const auto backdoor = population_regression(m, "y", {"x0", "x3"});
    CHECK(backdoor[1] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(backdoor[2] == doctest::Approx(2.0).epsilon(1e-10));
    const auto mediator = population_regression(m, "y", {"x0", "x1"});
    CHECK(mediator[2] == doctest::Approx(-1.0).epsilon(1e-10));

    const std::vector<double> theta{3.3, 0.1, 0.3, 0.5};
    const auto e = reference::exogenous_regression_model(theta);
    const auto r = population_regression(e, "y", {"x1", "x2", "x3"});
    CHECK(r[0] == doctest::Approx(3.3).epsilon(1e-12));
    for (std::size_t k = 1; k < 4; ++k) CHECK(r[k] == doctest::Approx(theta[k]).epsilon(1e-12));

    // b is an exact multiple of a.
    ModelSpec s;
    s.add("a", A::exogenous(NoiseSpec::standard_normal()))
        .add("b", A::linear({"a"}, {2.0}, NoiseSpec::constant(0.0)))
        .add("y", A::linear({"a"}, {1.0}, NoiseSpec::standard_normal()));
    CHECK_THROWS_AS(population_regression(validate_model(s), "y", {"a", "b"}), SingularCovarianceError);
}

TEST_CASE("total effects by path enumeration") {
    const auto m = reference::mediated_confounding_model();
    CHECK(total_effect_linear(m, "x0", "y") == doctest::Approx(2.0));
    CHECK(total_effect_linear(m, "x2", "y") == doctest::Approx(-2.0));
    CHECK(total_effect_linear(m, "x4", "x7") == doctest::Approx(1.0));
    CHECK(total_effect_linear(m, "x6", "y") == 0.0);
    CHECK_THROWS_AS(total_effect_linear(m, "x0", "nope"), UnknownNodeError);
}

TEST_CASE("interventions") {
    const auto m = reference::mediated_confounding_model();
    const auto cut = intervene(m, "x3", 0.0);
    const auto g = Dag::from_model(cut);
    CHECK_FALSE(g.has_edge("x2", "x3"));
    CHECK(g.has_edge("x3", "y"));
    const auto d = sample(cut, 200, 9);
    for (double v : d.column("x3")) CHECK(v == 0.0);
    const auto pm = population_moments(cut);
    for (const auto& other : cut.nodes()) CHECK(pm.cov("x3", other) == 0.0);

    const auto exo = intervene(m, "x4", NoiseSpec::uniform(0.0, 1.0));
    CHECK(exo.edges() == m.edges());
    CHECK(exo.assignment("x4").noise == NoiseSpec::uniform(0.0, 1.0));
    CHECK_THROWS_AS(intervene(m, "nope", 1.0), UnknownNodeError);

    // Two-point interventional contrast with shared noise draws equals the
    // path-product effect row by row.
    for (const char* cause : {"x0", "x2", "x4"}) {
        const auto lo = sample(intervene(m, cause, 0.0), 2000, 77);
        const auto hi = sample(intervene(m, cause, 1.0), 2000, 77);
        const double effect = total_effect_linear(m, cause, "y");
        const double diff = stats::mean(hi.column("y")) - stats::mean(lo.column("y"));
        CAPTURE(cause);
        CHECK(diff == doctest::Approx(effect).epsilon(1e-9));
    }
}

TEST_CASE("model file round trip") {
    const auto m = reference::mediated_confounding_model();
    const auto text = format_model(m);
    const auto back = parse_model(text);
    CHECK(format_model(back) == text);
    const auto a = sample(m, 50, 3), b = sample(back, 50, 3);
    for (const auto& name : m.nodes()) {
        const auto ca = a.column(name), cb = b.column(name);
        CHECK(std::equal(ca.begin(), ca.end(), cb.begin()));
    }

    CHECK_THROWS_AS(parse_model("node a\n  noise gaussian 0\n"), ParseError);
    CHECK_THROWS_AS(parse_model("parents x\n"), ParseError);
    CHECK_THROWS_AS(parse_model("node a\n  wobble 3\n"), ParseError);
    CHECK_THROWS_AS(parse_model("node a\n  parents b\n  weights 1\nnode b\n  parents a\n  weights 1\n"), CycleError);
    try {
        parse_model("node a\n  intercept abc\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }

    ModelSpec nl;
    nl.add("a", A::custom({}, [](std::span<const double>) { return 1.0; }, NoiseSpec::standard_normal()));
    CHECK_THROWS_AS(format_model(validate_model(nl)), InvalidModelError);
}

}
