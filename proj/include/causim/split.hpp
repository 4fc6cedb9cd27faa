#pragma once

#include <cstdint>
#include <vector>

#include "causim/dataset.hpp"

namespace causim {

// Partition of row indices. A hold-out plan fills `train`/`test`; a k-fold
// plan fills `folds` (each sorted ascending) and leaves train/test empty
// until `holdout` picks a fold.
struct SplitPlan {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    std::vector<std::vector<std::size_t>> folds;
    std::uint64_t seed = 0;

    std::size_t k_folds() const noexcept { return folds.size(); }
    // Train on every fold except `fold`, test on `fold`.
    SplitPlan holdout(std::size_t fold) const;
};

// Fisher-Yates permutation of 0..n-1 driven by `seed`.
std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed);

// Seeded shuffle, then the first round(n * test_fraction) rows become the
// test set. Throws InvalidArgumentError unless 0 < test_fraction < 1 and
// InsufficientDataError when either side would be empty.
SplitPlan train_test_split(std::size_t n, double test_fraction, std::uint64_t seed);
SplitPlan train_test_split(const Dataset& data, double test_fraction, std::uint64_t seed);

// Seeded shuffle dealt round-robin into k folds (sizes differ by at most one).
SplitPlan kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);
SplitPlan kfold_split(const Dataset& data, std::size_t k, std::uint64_t seed);

}  // namespace causim
