#include "causim/mutual_information.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <vector>

#include "causim/error.hpp"
#include "causim/rng.hpp"
#include "causim/stats.hpp"

namespace causim {

namespace {

std::vector<double> jittered(std::span<const double> x, rng::Stream& stream) {
    const double sd = x.size() > 1 ? std::sqrt(stats::variance(x)) : 0.0;
    const double amp = 1e-10 * (sd > 0.0 ? sd : 1.0);
    std::vector<double> out(x.begin(), x.end());
    for (auto& v : out) v += amp * stream.normal();
    return out;
}

// Number of j != i with |v[j] - v[i]| < eps, given `sorted` = sorted copy of v.
std::size_t strict_count(const std::vector<double>& sorted, double center, double eps) {
    const auto n = sorted.size();
    auto lo = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), center - eps) - sorted.begin());
    auto hi = static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), center + eps) - sorted.begin());
    // Fix the boundary with exact distance tests so rounding in center +/- eps
    // cannot admit or drop a point.
    while (lo < hi && !(std::fabs(sorted[lo] - center) < eps)) ++lo;
    while (lo > 0 && std::fabs(sorted[lo - 1] - center) < eps) --lo;
    while (hi > lo && !(std::fabs(sorted[hi - 1] - center) < eps)) --hi;
    while (hi < n && std::fabs(sorted[hi] - center) < eps) ++hi;
    return hi - lo - 1;  // minus the point itself
}

}  // namespace

MiResult mutual_information(std::span<const double> a, std::span<const double> b, std::size_t k,
                            std::uint64_t jitter_seed) {
    if (a.size() != b.size()) throw InvalidArgumentError("mutual_information needs equal-length columns");
    const std::size_t n = a.size();
    if (k < 1 || n <= k) {
        throw InsufficientDataError("mutual_information needs n > k >= 1 (n = " + std::to_string(n) +
                                    ", k = " + std::to_string(k) + ")");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(a[i]) || !std::isfinite(b[i])) {
            throw InvalidArgumentError("mutual_information needs finite values");
        }
    }

    rng::Stream stream(jitter_seed);
    const auto x = jittered(a, stream);
    const auto y = jittered(b, stream);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
    std::vector<double> xs(n), ys(y);
    for (std::size_t r = 0; r < n; ++r) xs[r] = x[order[r]];
    std::sort(ys.begin(), ys.end());

    double sum_marginal = 0.0;
    std::priority_queue<double> heap;  // k smallest joint distances (max at top)
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t i = order[r];
        heap = {};
        auto consider = [&](std::size_t j) {
            const double d = std::max(std::fabs(x[j] - x[i]), std::fabs(y[j] - y[i]));
            if (heap.size() < k) {
                heap.push(d);
            } else if (d < heap.top()) {
                heap.pop();
                heap.push(d);
            }
        };
        // Scan outward in x order; stop a side once its x gap alone exceeds
        // the current k-th distance.
        std::size_t left = r, right = r + 1;
        bool left_open = r > 0, right_open = right < n;
        while (left_open || right_open) {
            if (left_open) {
                const std::size_t j = order[left - 1];
                if (heap.size() == k && std::fabs(x[j] - x[i]) > heap.top()) {
                    left_open = false;
                } else {
                    consider(j);
                    --left;
                    left_open = left > 0;
                }
            }
            if (right_open) {
                const std::size_t j = order[right];
                if (heap.size() == k && std::fabs(x[j] - x[i]) > heap.top()) {
                    right_open = false;
                } else {
                    consider(j);
                    ++right;
                    right_open = right < n;
                }
            }
        }
        const double eps = heap.top();
        const auto nx = strict_count(xs, x[i], eps);
        const auto ny = strict_count(ys, y[i], eps);
        sum_marginal += stats::digamma(static_cast<double>(nx) + 1.0) + stats::digamma(static_cast<double>(ny) + 1.0);
    }

    MiResult out;
    out.n = n;
    out.k_neighbors = k;
    out.raw = stats::digamma(static_cast<double>(k)) + stats::digamma(static_cast<double>(n)) -
              sum_marginal / static_cast<double>(n);
    out.mi = std::max(out.raw, 0.0);
    return out;
}

MiResult mutual_information(const Dataset& data, std::string_view a, std::string_view b, std::size_t k,
                            std::uint64_t jitter_seed) {
    return mutual_information(data.column(a), data.column(b), k, jitter_seed);
}

}  // namespace causim
