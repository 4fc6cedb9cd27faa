#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "causim/gbt.hpp"
#include "causim/mlp.hpp"

namespace causim {

// JSON documents for trained models; see docs/model_json.md. Parsing throws
// ParseError on malformed documents and InvalidModelError when the decoded
// model violates its invariants.
nlohmann::ordered_json mlp_to_json(const MlpModel& model);
MlpModel mlp_from_json(const nlohmann::ordered_json& doc);

nlohmann::ordered_json gbt_to_json(const GbtModel& model);
GbtModel gbt_from_json(const nlohmann::ordered_json& doc);

void save_json(const std::string& path, const nlohmann::ordered_json& doc);
nlohmann::ordered_json load_json(const std::string& path);

}  // namespace causim
