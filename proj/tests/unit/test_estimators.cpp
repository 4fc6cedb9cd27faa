#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "causim/error.hpp"
#include "causim/estimators.hpp"
#include "causim/exp/studies.hpp"
#include "causim/reference_models.hpp"
#include "causim/scm.hpp"
#include "causim/scm_analysis.hpp"
#include "causim/stats.hpp"
#include "support.hpp"

using namespace causim;

namespace {

Eigen::MatrixXd design(const Dataset& d, const std::vector<std::string>& regressors) {
    Eigen::MatrixXd x(d.n_rows(), regressors.size() + 1);
    x.col(0).setOnes();
    for (std::size_t j = 0; j < regressors.size(); ++j)
        for (std::size_t i = 0; i < d.n_rows(); ++i) x(i, j + 1) = d.column(regressors[j])[i];
    return x;
}

Eigen::VectorXd vec(std::span<const double> v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()); }

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return 0.5 * (v[(v.size() - 1) / 2] + v[v.size() / 2]);
}

}  // namespace

TEST_SUITE("estimators") {

TEST_CASE("t and normal p-values") {
    // 97.5% quantile of t with 10 df
    CHECK(stats::student_t_two_sided_p(2.228138851986, 10) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(stats::student_t_two_sided_p(0.0, 5) == doctest::Approx(1.0));
    CHECK(stats::normal_two_sided_p(1.959963984540054) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(stats::normal_two_sided_p(-1.959963984540054) == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("OLS normal equations and hand-computed simple regression") {
    const auto m = reference::mediated_confounding_model();
    const auto d = sample(m, 5000, 3);
    const std::vector<std::string> all{"x0", "x1", "x2", "x3", "x4", "x5", "x6", "x7"};
    const auto fit = ols_fit(d, "y", all);
    const Eigen::MatrixXd x = design(d, all);
    const Eigen::VectorXd y = vec(d.column("y"));
    const Eigen::VectorXd theta = Eigen::Map<const Eigen::VectorXd>(fit.coefficients.data(), fit.coefficients.size());
    CHECK((x.transpose() * (y - x * theta)).norm() < 1e-8 * y.norm());
    CHECK(fit.n_used == 5000);
    CHECK(fit.terms.front() == "intercept");
    for (double p : fit.p_values) CHECK((p >= 0.0 && p <= 1.0));
    CHECK(fit.residual_variance >= 0.0);

    // y ~ x0 by the textbook formulas
    const auto a = d.column("x0"), b = d.column("y");
    const double ma = stats::mean(a), mb = stats::mean(b);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sxx += (a[i] - ma) * (a[i] - ma);
        sxy += (a[i] - ma) * (b[i] - mb);
    }
    const double slope = sxy / sxx;
    double sse = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double r = b[i] - (mb + slope * (a[i] - ma));
        sse += r * r;
    }
    const double s2 = sse / double(a.size() - 2);
    const auto simple = ols_fit(d, "y", {"x0"});
    CHECK(simple.coefficient("x0") == doctest::Approx(slope).epsilon(1e-12));
    CHECK(simple.coefficient("intercept") == doctest::Approx(mb - slope * ma).epsilon(1e-10));
    CHECK(simple.std_error("x0") == doctest::Approx(std::sqrt(s2 / sxx)).epsilon(1e-10));
    CHECK(simple.residual_variance == doctest::Approx(s2).epsilon(1e-10));
    const double t = slope / std::sqrt(s2 / sxx);
    CHECK(simple.p_value("x0") == doctest::Approx(stats::student_t_two_sided_p(t, double(a.size() - 2))));
    // within 3 SE of the population slope
    CHECK(std::fabs(simple.coefficient("x0") - 4.64 / 3.6) < 3.0 * simple.std_error("x0"));
}

TEST_CASE("OLS exact recovery and errors") {
    Dataset d;
    std::vector<double> x1, x2, y;
    for (int i = 0; i < 20; ++i) {
        x1.push_back(i);
        x2.push_back((i * 7) % 5);
        y.push_back(1.5 + 2.0 * x1.back() - 0.25 * x2.back());
    }
    d.add_column("x1", x1);
    d.add_column("x2", x2);
    d.add_column("y", y);
    const auto fit = ols_fit(d, "y", {"x1", "x2"});
    CHECK(fit.coefficient("intercept") == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(fit.coefficient("x1") == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(fit.coefficient("x2") == doctest::Approx(-0.25).epsilon(1e-10));
    CHECK(fit.residual_variance < 1e-20);

    d.add_column("x1copy", x1);
    CHECK_THROWS_AS(ols_fit(d, "y", {"x1", "x1copy"}), RankDeficientError);
    const std::vector<std::size_t> few{0, 1, 2};
    CHECK_THROWS_AS(ols_fit(d.select_rows(few), "y", {"x1", "x2"}), InsufficientDataError);
    CHECK_THROWS_AS(ols_fit(d, "y", {"nope"}), MissingColumnError);
}

TEST_CASE("OLS error shrinks with n") {
    const auto m = reference::mediated_confounding_model();
    const double oracle = population_regression(m, "y", {"x0"})[1];
    std::vector<double> medians;
    for (std::size_t n : {500, 5000, 50000}) {
        std::vector<double> err;
        for (std::uint64_t s = 0; s < 20; ++s) err.push_back(std::fabs(ols_fit(sample(m, n, s), "y", {"x0"}).coefficient("x0") - oracle));
        medians.push_back(median(err));
    }
    CHECK(medians[1] < medians[0]);
    CHECK(medians[2] < medians[1]);
}

TEST_CASE("Pearson correlation") {
    const auto d = testing::normal_columns({"a", "b"}, 5000, 17);
    const auto self = pearson(d, "a", "a");
    CHECK(self.r == doctest::Approx(1.0));
    const auto ind = pearson(d, "a", "b");
    CHECK(std::fabs(ind.r) < 0.05);
    CHECK(ind.n == 5000);

    std::vector<double> a(d.column("a").begin(), d.column("a").end());
    std::vector<double> b(d.column("b").begin(), d.column("b").end());
    for (std::size_t i = 0; i < a.size(); ++i) b[i] += 0.5 * a[i];
    const double r = pearson(a, b).r;
    std::vector<double> up = a, down = a;
    for (auto& v : up) v = 3.0 * v + 11.0;
    for (auto& v : down) v = -0.2 * v - 4.0;
    CHECK(std::fabs(pearson(up, b).r - r) < 1e-12);
    CHECK(std::fabs(pearson(down, b).r + r) < 1e-12);

    const std::vector<double> flat(10, 1.0), other{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    CHECK_THROWS_AS(pearson(flat, other), DegenerateColumnError);
}

TEST_CASE("logistic regression") {
    exp::LinprobsSpec spec;
    const std::size_t n = 50000;
    const auto x = testing::normal_columns({"x1", "x2"}, n, 23);
    std::vector<double> y(n);
    auto s = rng::Stream(29);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = s.uniform() < stats::sigmoid(spec.logit(0.0, x.column("x1")[i], x.column("x2")[i])) ? 1.0 : 0.0;
    }
    Dataset d = x;
    d.add_column("y", y);
    const auto fit = logistic_fit(d, "y", {"x1", "x2"});
    CHECK(std::fabs(fit.coefficient("x1") - 0.388) < 4.0 * fit.std_error("x1"));
    CHECK(std::fabs(fit.coefficient("x2") - 1.265) < 4.0 * fit.std_error("x2"));
    CHECK(std::fabs(fit.coefficient("intercept") - (-0.325 + 0.0233)) < 4.0 * fit.std_error("intercept"));

    // score equations at the optimum
    const Eigen::MatrixXd xm = design(d, {"x1", "x2"});
    Eigen::VectorXd resid(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double row[2] = {d.column("x1")[i], d.column("x2")[i]};
        resid(i) = fit.predict(row) - y[i];
    }
    CHECK((xm.transpose() * resid).cwiseAbs().maxCoeff() < 1e-6);

    // null model
    Dataset nul = testing::normal_columns({"a"}, 4000, 31);
    std::vector<double> coin(4000);
    for (std::size_t i = 0; i < coin.size(); ++i) coin[i] = double(i % 2);
    nul.add_column("y", coin);
    const auto nf = logistic_fit(nul, "y", {"a"});
    CHECK(std::fabs(nf.coefficient("a")) < 4.0 * nf.std_error("a"));
    CHECK(std::fabs(nf.coefficient("intercept")) < 4.0 * nf.std_error("intercept"));
}

TEST_CASE("logistic regression errors") {
    Dataset d = testing::normal_columns({"a"}, 200, 3);
    d.add_column("zero", std::vector<double>(200, 0.0));
    CHECK_THROWS_AS(logistic_fit(d, "zero", {"a"}), SeparationError);
    std::vector<double> sep(200), three(200, 2.0);
    for (std::size_t i = 0; i < 200; ++i) sep[i] = d.column("a")[i] > 0.0 ? 1.0 : 0.0;
    d.add_column("sep", sep);
    d.add_column("three", three);
    CHECK_THROWS_AS(logistic_fit(d, "sep", {"a"}), SeparationError);
    CHECK_THROWS_AS(logistic_fit(d, "three", {"a"}), NonBinaryTargetError);
}

TEST_CASE("serialization has one CSV row per term") {
    const auto d = sample(reference::mediated_confounding_model(), 100, 1);
    const auto fit = ols_fit(d, "y", {"x0", "x3"});
    std::ostringstream csv;
    write_fit_csv_header(csv);
    write_fit_csv_rows(csv, fit);
    const auto text = csv.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
    const auto j = fit_to_json(fit);
    CHECK(j["terms"].size() == 3);
    const auto c = corr_to_json(pearson(d, "x0", "y"));
    CHECK(c.contains("r"));
}

}
