#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "causim/exp/params.hpp"

namespace causim::exp {

inline constexpr std::size_t kMinRows = 10;

struct ExperimentConfig {
    std::string name;
    std::uint64_t seed = 0;
    std::optional<std::size_t> n;  // experiment default when empty
    std::map<std::string, std::string> params;
};

// A CSV table. Rendering prepends `experiment` and `seed` columns so every
// file carries the seed.
struct Table {
    std::string file;  // e.g. "table2.csv"
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

struct ExperimentOutput {
    nlohmann::ordered_json results = nlohmann::ordered_json::object();
    std::vector<Table> tables;
};

struct RunContext {
    std::string name;
    std::uint64_t seed = 0;
    std::size_t n = 0;
    ParamSet params;
};

struct ExperimentInfo {
    std::string name;
    std::string summary;
    std::size_t default_n = 0;
    std::function<void(ParamSet&)> declare;
    std::function<ExperimentOutput(const RunContext&)> run;
};

// Registered experiments in listing order.
const std::vector<ExperimentInfo>& registry();
// Throws UnknownExperimentError.
const ExperimentInfo& find_experiment(std::string_view name);

// Rendered run: file name -> contents, in write order (report.json, the
// tables, meta.json). Contents are a pure function of the config.
struct RunFiles {
    std::vector<std::pair<std::string, std::string>> files;

    const std::string& at(std::string_view name) const;
};

// Throws UnknownExperimentError or ConfigValidationError (n < 10, unknown
// or malformed parameters).
RunFiles run_experiment(const ExperimentConfig& config);
// Creates `dir` if needed; throws IoError.
void write_files(const RunFiles& files, const std::string& dir);

// Shortest round-trip decimal form; "nan"/"inf" for non-finite values.
std::string cell(double v);
std::string cell(std::size_t v);
std::string render_csv(const Table& t, std::string_view experiment, std::uint64_t seed);

}  // namespace causim::exp
