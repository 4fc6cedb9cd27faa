#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace causim::exp {

// Plain-text key-value document: one `key = value` per line, `#` starts a
// comment, blank lines ignored. Throws ParseError (with line number) on a
// line without '=' or a repeated key, IoError when the file cannot be read.
std::map<std::string, std::string> parse_config(std::string_view text);
std::map<std::string, std::string> read_config_file(const std::string& path);

// Declared experiment parameters with string defaults. Values are parsed on
// access; malformed or out-of-range values throw ConfigValidationError
// naming the key.
class ParamSet {
public:
    void declare(std::string key, std::string default_value, std::string help);
    // Throws ConfigValidationError for keys that were never declared.
    void apply(const std::map<std::string, std::string>& overrides);

    bool contains(std::string_view key) const;
    const std::string& raw(std::string_view key) const;
    double real(std::string_view key) const;
    double real_in(std::string_view key, double lo, double hi) const;
    std::size_t count(std::string_view key, std::size_t min_value = 0) const;
    std::uint64_t u64(std::string_view key) const;
    std::vector<double> reals(std::string_view key) const;
    std::vector<std::size_t> counts(std::string_view key, std::size_t min_value = 0) const;

    struct Entry {
        std::string key;
        std::string value;
        std::string help;
    };
    const std::vector<Entry>& entries() const noexcept { return entries_; }

    // Resolved values in declaration order.
    nlohmann::ordered_json to_json() const;

private:
    const Entry& entry(std::string_view key) const;

    std::vector<Entry> entries_;
};

}  // namespace causim::exp
