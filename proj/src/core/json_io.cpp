#include "core/json_io.hpp"

#include <cmath>

#include "common/error.hpp"

namespace chronokg {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::optional<double> opt_number(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) fail(ErrorKind::kParse, std::string("field ") + key + " is not a number");
  return it->get<double>();
}

std::optional<std::string> opt_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  return it->dump();
}

ordered_json opt_json(const std::optional<std::string>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::string req_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string())
    fail(ErrorKind::kParse, std::string("missing string field ") + key);
  return it->get<std::string>();
}

void dump_into(const ordered_json& j, std::string& out) {
  switch (j.type()) {
    case ordered_json::value_t::object: {
      out.push_back('{');
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ", ";
        first = false;
        out += ordered_json(it.key()).dump();
        out += ": ";
        dump_into(it.value(), out);
      }
      out.push_back('}');
      break;
    }
    case ordered_json::value_t::array: {
      out.push_back('[');
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ", ";
        first = false;
        dump_into(v, out);
      }
      out.push_back(']');
      break;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

ordered_json age_value(const std::optional<double>& v) {
  if (!v) return nullptr;
  double r = std::round(*v);
  if (r == *v && std::fabs(r) < 1e15) return static_cast<long long>(r);
  return *v;
}

ordered_json to_json(const TemporalContext& t) {
  ordered_json j = ordered_json::object();
  j["onset_age_min"] = age_value(t.onset_age_min);
  j["onset_age_max"] = age_value(t.onset_age_max);
  j["progression_stage"] = opt_json(t.progression_stage);
  j["milestone"] = opt_json(t.milestone);
  j["temporal_qualifier"] = opt_json(t.temporal_qualifier);
  j["discovery_date"] = opt_json(t.discovery_date);
  j["validity_start"] = opt_json(t.validity_start);
  j["validity_end"] = opt_json(t.validity_end);
  j["superseded_by"] = opt_json(t.superseded_by);
  j["temporal_resolution"] = std::string(to_string(t.temporal_resolution));
  j["duration"] = age_value(t.duration);
  j["treatment_start_age"] = age_value(t.treatment_start_age);
  return j;
}

TemporalContext temporal_from_json(const json& j) {
  TemporalContext t;
  if (j.is_null()) return t;
  if (!j.is_object()) fail(ErrorKind::kParse, "temporal is not an object");
  t.onset_age_min = opt_number(j, "onset_age_min");
  t.onset_age_max = opt_number(j, "onset_age_max");
  t.progression_stage = opt_string(j, "progression_stage");
  t.milestone = opt_string(j, "milestone");
  t.temporal_qualifier = opt_string(j, "temporal_qualifier");
  t.discovery_date = opt_string(j, "discovery_date");
  t.validity_start = opt_string(j, "validity_start");
  t.validity_end = opt_string(j, "validity_end");
  t.superseded_by = opt_string(j, "superseded_by");
  if (auto r = opt_string(j, "temporal_resolution")) t.temporal_resolution = parse_resolution(*r);
  t.duration = opt_number(j, "duration");
  t.treatment_start_age = opt_number(j, "treatment_start_age");
  return t;
}

ordered_json to_json(const EvidenceBlock& e) {
  ordered_json j = ordered_json::object();
  j["tier"] = e.tier;
  j["source_ids"] = e.source_ids;
  j["evidence_text"] = e.evidence_text;
  j["study_type"] = std::string(to_string(e.study_type));
  j["credibility_score"] = e.credibility_score;
  j["consensus_confidence"] = e.consensus_confidence;
  j["extraction_models"] = e.extraction_models;
  j["extraction_method"] = e.extraction_method;
  j["citation_count"] = e.citation_count ? ordered_json(*e.citation_count) : ordered_json(nullptr);
  j["is_retracted"] = e.is_retracted;
  if (e.publication_year) j["publication_year"] = *e.publication_year;
  return j;
}

EvidenceBlock evidence_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::kParse, "evidence is not an object");
  EvidenceBlock e;
  e.tier = j.value("tier", 2);
  try {
    e.source_ids = j.at("source_ids").get<std::vector<std::string>>();
    e.extraction_models = j.value("extraction_models", std::vector<std::string>{});
  } catch (const json::exception& ex) {
    fail(ErrorKind::kParse, std::string("evidence lists: ") + ex.what());
  }
  e.evidence_text = j.value("evidence_text", std::string());
  e.study_type = parse_study_type(j.value("study_type", std::string("other")));
  e.credibility_score = opt_number(j, "credibility_score").value_or(0);
  e.consensus_confidence = opt_number(j, "consensus_confidence").value_or(1);
  e.extraction_method = j.value("extraction_method", std::string("tier2_llm_consensus"));
  if (auto c = opt_number(j, "citation_count")) e.citation_count = static_cast<long>(*c);
  if (auto it = j.find("is_retracted"); it != j.end() && it->is_boolean()) e.is_retracted = *it;
  if (auto y = opt_number(j, "publication_year")) e.publication_year = static_cast<int>(*y);
  return e;
}

ordered_json conditions_to_json(const std::optional<std::map<std::string, std::string>>& c) {
  if (!c) return nullptr;
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : *c) j[k] = v;
  return j;
}

std::optional<std::map<std::string, std::string>> conditions_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_object()) fail(ErrorKind::kParse, "conditions is not an object");
  std::map<std::string, std::string> out;
  for (auto it = j.begin(); it != j.end(); ++it)
    out[it.key()] = it->is_string() ? it->get<std::string>() : it->dump();
  return out;
}

ordered_json to_json(const TemporalTriple& t) {
  ordered_json j = ordered_json::object();
  j["edge_id"] = t.edge_id;
  j["source_id"] = t.source_id;
  j["source_type"] = t.source_type;
  j["source_name"] = t.source_name;
  j["relation"] = t.relation;
  j["target_id"] = t.target_id;
  j["target_type"] = t.target_type;
  j["target_name"] = t.target_name;
  j["temporal"] = to_json(t.temporal);
  j["evidence"] = to_json(t.evidence);
  j["conditions"] = conditions_to_json(t.conditions);
  j["extraction_date"] = t.extraction_date;
  j["pipeline_version"] = t.pipeline_version;
  j["disease_profile_id"] = t.disease_profile_id;
  j["quality_grade"] = std::string(to_string(t.quality_grade));
  return j;
}

TemporalTriple triple_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::kParse, "record is not an object");
  TemporalTriple t;
  t.edge_id = req_string(j, "edge_id");
  t.source_id = req_string(j, "source_id");
  t.source_type = req_string(j, "source_type");
  t.source_name = req_string(j, "source_name");
  t.relation = req_string(j, "relation");
  t.target_id = req_string(j, "target_id");
  t.target_type = req_string(j, "target_type");
  t.target_name = req_string(j, "target_name");
  t.temporal = temporal_from_json(j.contains("temporal") ? j["temporal"] : json());
  if (!j.contains("evidence")) fail(ErrorKind::kParse, "missing field evidence");
  t.evidence = evidence_from_json(j["evidence"]);
  t.conditions = conditions_from_json(j.contains("conditions") ? j["conditions"] : json());
  t.extraction_date = j.value("extraction_date", std::string());
  t.pipeline_version = j.value("pipeline_version", std::string("1.0.0"));
  t.disease_profile_id = j.value("disease_profile_id", std::string());
  t.quality_grade = parse_grade(j.value("quality_grade", std::string("B")));
  return t;
}

std::string dump_line(const ordered_json& j) {
  std::string out;
  dump_into(j, out);
  return out;
}

}  // namespace chronokg
