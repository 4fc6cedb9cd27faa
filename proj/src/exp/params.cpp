#include "causim/exp/params.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "causim/error.hpp"

namespace causim::exp {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const auto end = comma == std::string_view::npos ? s.size() : comma;
        out.push_back(trim(s.substr(start, end - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_real(std::string_view key, std::string_view text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
        throw ConfigValidationError("parameter '" + std::string(key) + "': '" + std::string(text) +
                                    "' is not a finite number");
    }
    return v;
}

std::uint64_t parse_u64(std::string_view key, std::string_view text) {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigValidationError("parameter '" + std::string(key) + "': '" + std::string(text) +
                                    "' is not a non-negative integer");
    }
    return v;
}

}  // namespace

std::map<std::string, std::string> parse_config(std::string_view text) {
    std::map<std::string, std::string> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const auto key = std::string(trim(line.substr(0, eq)));
        const auto value = std::string(trim(line.substr(eq + 1)));
        if (key.empty()) throw ParseError("config line " + std::to_string(line_no) + ": empty key");
        if (!out.emplace(key, value).second) {
            throw ParseError("config line " + std::to_string(line_no) + ": key '" + key + "' repeated");
        }
    }
    return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void ParamSet::declare(std::string key, std::string default_value, std::string help) {
    entries_.push_back({std::move(key), std::move(default_value), std::move(help)});
}

void ParamSet::apply(const std::map<std::string, std::string>& overrides) {
    for (const auto& [k, v] : overrides) {
        bool found = false;
        for (auto& e : entries_) {
            if (e.key == k) {
                e.value = v;
                found = true;
            }
        }
        if (!found) throw ConfigValidationError("unknown parameter '" + k + "'");
    }
}

bool ParamSet::contains(std::string_view key) const {
    for (const auto& e : entries_) {
        if (e.key == key) return true;
    }
    return false;
}

const ParamSet::Entry& ParamSet::entry(std::string_view key) const {
    for (const auto& e : entries_) {
        if (e.key == key) return e;
    }
    throw ConfigValidationError("parameter '" + std::string(key) + "' is not declared");
}

const std::string& ParamSet::raw(std::string_view key) const { return entry(key).value; }

double ParamSet::real(std::string_view key) const { return parse_real(key, trim(raw(key))); }

double ParamSet::real_in(std::string_view key, double lo, double hi) const {
    const double v = real(key);
    if (v < lo || v > hi) {
        throw ConfigValidationError("parameter '" + std::string(key) + "' must lie in [" + std::to_string(lo) + ", " +
                                    std::to_string(hi) + "]");
    }
    return v;
}

std::size_t ParamSet::count(std::string_view key, std::size_t min_value) const {
    const auto v = parse_u64(key, trim(raw(key)));
    if (v < min_value) {
        throw ConfigValidationError("parameter '" + std::string(key) + "' must be at least " +
                                    std::to_string(min_value));
    }
    return static_cast<std::size_t>(v);
}

std::uint64_t ParamSet::u64(std::string_view key) const { return parse_u64(key, trim(raw(key))); }

std::vector<double> ParamSet::reals(std::string_view key) const {
    std::vector<double> out;
    for (auto item : split_list(raw(key))) out.push_back(parse_real(key, item));
    return out;
}

std::vector<std::size_t> ParamSet::counts(std::string_view key, std::size_t min_value) const {
    std::vector<std::size_t> out;
    for (auto item : split_list(raw(key))) {
        const auto v = parse_u64(key, item);
        if (v < min_value) {
            throw ConfigValidationError("parameter '" + std::string(key) + "' entries must be at least " +
                                        std::to_string(min_value));
        }
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

nlohmann::ordered_json ParamSet::to_json() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& e : entries_) j[e.key] = e.value;
    return j;
}

}  // namespace causim::exp
