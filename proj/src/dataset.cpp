#include "causim/dataset.hpp"

#include <algorithm>

#include "causim/error.hpp"

namespace causim {

void Dataset::add_column(std::string name, std::vector<double> values) {
    if (values.empty()) {
        throw InsufficientDataError("column '" + name + "' has no rows");
    }
    if (has_column(name)) {
        throw InvalidArgumentError("duplicate column name '" + name + "'");
    }
    if (!names_.empty() && values.size() != n_rows_) {
        throw InvalidArgumentError("column '" + name + "' has " + std::to_string(values.size()) +
                                   " rows, expected " + std::to_string(n_rows_));
    }
    n_rows_ = values.size();
    names_.push_back(std::move(name));
    columns_.push_back(std::move(values));
}

bool Dataset::has_column(std::string_view name) const noexcept {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::size_t Dataset::index_of(std::string_view name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) {
        throw MissingColumnError("no column named '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - names_.begin());
}

std::span<const double> Dataset::column(std::string_view name) const {
    return columns_[index_of(name)];
}

std::span<const double> Dataset::column(std::size_t index) const {
    if (index >= columns_.size()) {
        throw MissingColumnError("column index " + std::to_string(index) + " out of range");
    }
    return columns_[index];
}

std::vector<double> Dataset::row(std::size_t r, std::span<const std::string> columns) const {
    std::vector<double> out;
    out.reserve(columns.size());
    for (const auto& c : columns) out.push_back(column(c)[r]);
    return out;
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
    Dataset out(seed_);
    for (std::size_t c = 0; c < names_.size(); ++c) {
        std::vector<double> values;
        values.reserve(rows.size());
        for (const auto r : rows) {
            if (r >= n_rows_) throw InvalidArgumentError("row index out of range");
            values.push_back(columns_[c][r]);
        }
        out.add_column(names_[c], std::move(values));
    }
    return out;
}

Dataset Dataset::select_columns(std::span<const std::string> columns) const {
    Dataset out(seed_);
    for (const auto& name : columns) {
        const auto col = column(name);
        out.add_column(name, std::vector<double>(col.begin(), col.end()));
    }
    return out;
}

}  // namespace causim
