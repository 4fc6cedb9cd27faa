#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "causim/dataset.hpp"
#include "causim/rng.hpp"

namespace testing {

// Dataset of independent N(0,1) columns named as given.
inline causim::Dataset normal_columns(const std::vector<std::string>& names, std::size_t n, std::uint64_t seed) {
    causim::Dataset d(seed);
    for (std::size_t j = 0; j < names.size(); ++j) {
        auto s = causim::rng::Stream::derived(seed, 100 + j);
        std::vector<double> v(n);
        for (auto& x : v) x = s.normal();
        d.add_column(names[j], std::move(v));
    }
    return d;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

}  // namespace testing
