#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace causim {

// Named real-valued columns of equal length N > 0, plus the seed that
// produced them. Columns keep insertion order.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::uint64_t seed) : seed_(seed) {}

    void add_column(std::string name, std::vector<double> values);

    std::size_t n_rows() const noexcept { return n_rows_; }
    std::size_t n_cols() const noexcept { return names_.size(); }
    bool empty() const noexcept { return names_.empty(); }
    std::uint64_t seed() const noexcept { return seed_; }

    const std::vector<std::string>& names() const noexcept { return names_; }
    bool has_column(std::string_view name) const noexcept;
    std::span<const double> column(std::string_view name) const;
    std::span<const double> column(std::size_t index) const;

    // Row-major copy of the given columns for one row.
    std::vector<double> row(std::size_t r, std::span<const std::string> columns) const;

    Dataset select_rows(std::span<const std::size_t> rows) const;
    Dataset select_columns(std::span<const std::string> columns) const;

private:
    std::size_t index_of(std::string_view name) const;

    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
    std::size_t n_rows_ = 0;
    std::uint64_t seed_ = 0;
};

}  // namespace causim
