#include "causim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/digamma.hpp>

#include "causim/error.hpp"

namespace causim::stats {

double mean(std::span<const double> x) {
    if (x.empty()) throw InsufficientDataError("mean of an empty sample");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    if (x.size() < 2) throw InsufficientDataError("variance needs at least two values");
    const double m = mean(x);
    double s = 0.0;
    for (const double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

double student_t_two_sided_p(double t, double df) {
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(t)) return 0.0;
    const boost::math::students_t dist(df);
    return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t))), 0.0, 1.0);
}

double normal_two_sided_p(double z) {
    if (std::isnan(z)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(z)) return 0.0;
    const boost::math::normal dist;
    return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(z))), 0.0, 1.0);
}

double digamma(double x) { return boost::math::digamma(x); }

std::vector<double> ranks(std::span<const double> x) {
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

double spearman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw InsufficientDataError("spearman needs two equal-length samples of size >= 2");
    }
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    const double ma = mean(ra);
    const double mb = mean(rb);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

double mean_squared_error(std::span<const double> truth, std::span<const double> pred) {
    if (truth.size() != pred.size() || truth.empty()) {
        throw InvalidArgumentError("mean_squared_error needs equal-length non-empty inputs");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) s += (truth[i] - pred[i]) * (truth[i] - pred[i]);
    return s / static_cast<double>(truth.size());
}

double r_squared(std::span<const double> truth, std::span<const double> pred) {
    const double m = mean(truth);
    double sse = 0.0, sst = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        sse += (truth[i] - pred[i]) * (truth[i] - pred[i]);
        sst += (truth[i] - m) * (truth[i] - m);
    }
    if (sst == 0.0) throw DegenerateColumnError("r_squared of a constant outcome");
    return 1.0 - sse / sst;
}

double log_loss(std::span<const double> labels, std::span<const double> prob) {
    if (labels.size() != prob.size() || labels.empty()) {
        throw InvalidArgumentError("log_loss needs equal-length non-empty inputs");
    }
    constexpr double eps = 1e-15;
    double s = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double p = std::clamp(prob[i], eps, 1.0 - eps);
        s -= labels[i] * std::log(p) + (1.0 - labels[i]) * std::log1p(-p);
    }
    return s / static_cast<double>(labels.size());
}

double misclassification_rate(std::span<const double> labels, std::span<const double> prob) {
    if (labels.size() != prob.size() || labels.empty()) {
        throw InvalidArgumentError("misclassification_rate needs equal-length non-empty inputs");
    }
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double predicted = prob[i] >= 0.5 ? 1.0 : 0.0;
        if (predicted != labels[i]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(labels.size());
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace causim::stats
