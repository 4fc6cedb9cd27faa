#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "causim/dataset.hpp"

namespace causim {

struct MiResult {
    // Reported estimate in nats, max(raw, 0).
    double mi = 0.0;
    // Estimator output before clipping; KSG can dip slightly below zero.
    double raw = 0.0;
    std::size_t k_neighbors = 0;
    std::size_t n = 0;
};

inline constexpr std::size_t kDefaultNeighbors = 3;
inline constexpr std::uint64_t kDefaultJitterSeed = 0x4B5347;

// Kraskov-Stoegbauer-Grassberger estimator (first algorithm):
//   I = psi(k) + psi(N) - < psi(n_x + 1) + psi(n_y + 1) >
// with max-norm k-nearest-neighbour distances in the joint space and strict
// marginal counts. Ties are broken by adding 1e-10 * sd(column) Gaussian
// jitter drawn from `jitter_seed`. Throws InsufficientDataError unless
// n > k >= 1.
MiResult mutual_information(std::span<const double> a, std::span<const double> b,
                            std::size_t k = kDefaultNeighbors, std::uint64_t jitter_seed = kDefaultJitterSeed);

MiResult mutual_information(const Dataset& data, std::string_view a, std::string_view b,
                            std::size_t k = kDefaultNeighbors, std::uint64_t jitter_seed = kDefaultJitterSeed);

}  // namespace causim
