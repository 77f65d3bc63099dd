#pragma once

#include <string>

#include <json.hpp>

#include "core/model.hpp"

namespace chronokg {

// Record (de)serialization with the released field order. Integral ages are
// written as integers ("onset_age_min": 20); scores keep their float form.
nlohmann::ordered_json age_value(const std::optional<double>& v);

nlohmann::ordered_json to_json(const TemporalContext& t);
TemporalContext temporal_from_json(const nlohmann::json& j);

nlohmann::ordered_json to_json(const EvidenceBlock& e);
EvidenceBlock evidence_from_json(const nlohmann::json& j);

nlohmann::ordered_json to_json(const TemporalTriple& t);
// Throws kParse naming the offending field.
TemporalTriple triple_from_json(const nlohmann::json& j);

nlohmann::ordered_json conditions_to_json(const std::optional<std::map<std::string, std::string>>& c);
std::optional<std::map<std::string, std::string>> conditions_from_json(const nlohmann::json& j);

// Single-line JSON with ", " and ": " separators, UTF-8 kept as is.
std::string dump_line(const nlohmann::ordered_json& j);

}  // namespace chronokg
