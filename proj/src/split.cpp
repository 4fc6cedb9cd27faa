#include "causim/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "causim/error.hpp"
#include "causim/rng.hpp"

namespace causim {

namespace {
constexpr std::uint64_t kShuffleStream = 0x5348554646;
}

std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    auto stream = rng::Stream::derived(seed, kShuffleStream);
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(stream.below(i));
        std::swap(p[i - 1], p[j]);
    }
    return p;
}

SplitPlan SplitPlan::holdout(std::size_t fold) const {
    if (fold >= folds.size()) throw InvalidArgumentError("fold index out of range");
    SplitPlan out;
    out.seed = seed;
    out.test = folds[fold];
    for (std::size_t f = 0; f < folds.size(); ++f) {
        if (f != fold) out.train.insert(out.train.end(), folds[f].begin(), folds[f].end());
    }
    std::sort(out.train.begin(), out.train.end());
    return out;
}

SplitPlan train_test_split(std::size_t n, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw InvalidArgumentError("test_fraction must lie strictly between 0 and 1");
    }
    const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
    if (n_test == 0 || n_test >= n) {
        throw InsufficientDataError("split of " + std::to_string(n) + " rows leaves an empty side");
    }
    const auto p = permutation(n, seed);
    SplitPlan plan;
    plan.seed = seed;
    plan.test.assign(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(n_test));
    plan.train.assign(p.begin() + static_cast<std::ptrdiff_t>(n_test), p.end());
    std::sort(plan.test.begin(), plan.test.end());
    std::sort(plan.train.begin(), plan.train.end());
    return plan;
}

SplitPlan train_test_split(const Dataset& data, double test_fraction, std::uint64_t seed) {
    return train_test_split(data.n_rows(), test_fraction, seed);
}

SplitPlan kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw InvalidArgumentError("k-fold split needs k >= 2");
    if (n < k) throw InsufficientDataError(std::to_string(n) + " rows cannot fill " + std::to_string(k) + " folds");
    const auto p = permutation(n, seed);
    SplitPlan plan;
    plan.seed = seed;
    plan.folds.resize(k);
    for (std::size_t i = 0; i < n; ++i) plan.folds[i % k].push_back(p[i]);
    for (auto& f : plan.folds) std::sort(f.begin(), f.end());
    return plan;
}

SplitPlan kfold_split(const Dataset& data, std::size_t k, std::uint64_t seed) {
    return kfold_split(data.n_rows(), k, seed);
}

}  // namespace causim
