#pragma once

#include <string>
#include <vector>

#include "causim/dataset.hpp"
#include "causim/error.hpp"

namespace causim::detail {

// Columns of `data` named by `features`, in that order. Throws
// MissingFeatureError naming the first absent column.
inline std::vector<std::span<const double>> feature_columns(const Dataset& data,
                                                           const std::vector<std::string>& features) {
    std::vector<std::span<const double>> cols;
    cols.reserve(features.size());
    for (const auto& f : features) {
        if (!data.has_column(f)) throw MissingFeatureError("feature column '" + f + "' not present");
        cols.push_back(data.column(f));
    }
    return cols;
}

}  // namespace causim::detail
