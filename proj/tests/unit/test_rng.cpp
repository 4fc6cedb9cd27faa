#include <doctest.h>

#include <boost/math/distributions/normal.hpp>

#include "causim/dataset.hpp"
#include "causim/error.hpp"
#include "causim/rng.hpp"

using namespace causim;

TEST_SUITE("rng") {

TEST_CASE("derive is a pure function of its arguments") {
    CHECK(rng::derive(7, 1, 2) == rng::derive(7, 1, 2));
    CHECK(rng::derive(7, 1, 2) != rng::derive(7, 2, 1));
    CHECK(rng::derive(7, 1) != rng::derive(8, 1));
    CHECK(rng::derive(0, 0, 0) != 0);
}

TEST_CASE("unit mapping stays inside the open interval") {
    CHECK(rng::to_unit_open(0) > 0.0);
    CHECK(rng::to_unit_open(~std::uint64_t{0}) < 1.0);
    CHECK(rng::to_unit_open(~std::uint64_t{0}) == 1.0 - 0x1.0p-53);
    CHECK(rng::normal_quantile(rng::to_unit_open(~std::uint64_t{0})) < 9.0);
}

TEST_CASE("normal quantile agrees with an independent implementation") {
    const boost::math::normal_distribution<double> z;
    for (double p : {1e-12, 1e-6, 0.001, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.97575, 0.999, 1 - 1e-9}) {
        CAPTURE(p);
        CHECK(rng::normal_quantile(p) == doctest::Approx(boost::math::quantile(z, p)).epsilon(1e-13));
        CHECK(rng::normal_cdf(rng::normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
    }
}

TEST_CASE("streams are reproducible and roughly uniform") {
    auto a = rng::Stream::derived(3, 4);
    auto b = rng::Stream::derived(3, 4);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    auto s = rng::Stream(11);
    const int n = 200000;
    double sum = 0.0, sum_sq = 0.0;
    std::vector<int> counts(7, 0);
    for (int i = 0; i < n; ++i) {
        const double z = s.normal();
        sum += z;
        sum_sq += z * z;
        ++counts[s.below(7)];
    }
    CHECK(std::fabs(sum / n) < 5.0 / std::sqrt(n));
    CHECK(sum_sq / n == doctest::Approx(1.0).epsilon(0.02));
    // chi-square with 6 df; 30 is far in the tail
    double chi = 0.0;
    for (int c : counts) chi += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
    CHECK(chi < 30.0);
}

TEST_CASE("dataset basics") {
    Dataset d(5);
    d.add_column("a", {1, 2, 3});
    d.add_column("b", {4, 5, 6});
    CHECK(d.n_rows() == 3);
    CHECK(d.seed() == 5);
    CHECK_THROWS_AS(d.add_column("c", {1, 2}), InvalidArgumentError);
    CHECK_THROWS_AS(d.add_column("a", {1, 2, 3}), InvalidArgumentError);
    CHECK_THROWS_AS(d.column("zzz"), MissingColumnError);
    const std::vector<std::string> cols{"b", "a"};
    CHECK(d.row(1, cols) == std::vector<double>{5, 2});
    const std::vector<std::size_t> rows{2, 0};
    const auto s = d.select_rows(rows);
    CHECK(s.column("a")[0] == 3);
    CHECK(s.column("b")[1] == 4);
}

}
