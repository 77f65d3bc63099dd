#include "core/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>

#include "common/digest.hpp"
#include "common/error.hpp"
#include "common/files.hpp"

namespace chronokg {

namespace fs = std::filesystem;

std::map<StudyType, double> default_study_type_weights() {
  return {
      {StudyType::kMetaAnalysis, 1.0}, {StudyType::kGuideline, 0.95},
      {StudyType::kRct, 0.9},          {StudyType::kDatabase, 0.85},
      {StudyType::kCohort, 0.7},       {StudyType::kCaseControl, 0.6},
      {StudyType::kReview, 0.5},       {StudyType::kCaseSeries, 0.4},
      {StudyType::kCaseReport, 0.3},   {StudyType::kExpertOpinion, 0.2},
      {StudyType::kOther, 0.1},
  };
}

void PipelineConfig::validate() const {
  if (std::fabs(credibility_weights.sum() - 1.0) > 1e-9)
    fail(ErrorKind::kConfig, "credibility weights must sum to 1");
  if (consensus_threshold < 2) fail(ErrorKind::kConfig, "consensus_threshold must be >= 2");
  if (fuzzy_threshold < 0 || fuzzy_threshold > 100)
    fail(ErrorKind::kConfig, "fuzzy_threshold must be a percentage");
  if (!(age_min <= age_max)) fail(ErrorKind::kConfig, "age bounds inverted");
  for (const auto& [type, w] : study_type_weights)
    if (w < 0 || w > 1) fail(ErrorKind::kConfig, "study type weight outside [0,1]");
}

uint64_t PipelineConfig::seed(const std::string& name) const {
  auto it = seeds.find(name);
  return it == seeds.end() ? 42 : it->second;
}

fs::path AppConfig::path(const std::string& key) const {
  auto it = paths.find(key);
  if (it == paths.end()) fail(ErrorKind::kConfig, "config has no path '" + key + "'");
  return it->second;
}

namespace {

ProviderSpec parse_provider(const YAML::Node& n) {
  ProviderSpec p;
  if (!n["name"]) fail(ErrorKind::kConfig, "provider entry without a name");
  p.name = n["name"].as<std::string>();
  if (n["kind"]) p.kind = n["kind"].as<std::string>();
  if (n["model"]) p.model = n["model"].as<std::string>();
  if (n["endpoint"]) p.endpoint = n["endpoint"].as<std::string>();
  if (n["api_key_env"]) p.api_key_env = n["api_key_env"].as<std::string>();
  if (n["temperature"]) p.temperature = n["temperature"].as<double>();
  if (n["timeout_s"]) p.timeout_s = n["timeout_s"].as<double>();
  if (n["max_tokens"]) p.max_tokens = n["max_tokens"].as<int>();
  if (p.kind != "replay" && p.kind != "mock" && p.kind != "http" && p.kind != "record")
    fail(ErrorKind::kConfig, "provider '" + p.name + "' has unknown kind '" + p.kind + "'");
  return p;
}

std::vector<ProviderSpec> parse_provider_list(const YAML::Node& n) {
  std::vector<ProviderSpec> out;
  if (n)
    for (const auto& item : n) out.push_back(parse_provider(item));
  return out;
}

void parse_pipeline(const YAML::Node& n, PipelineConfig& c) {
  if (!n) return;
  if (n["consensus_threshold"]) c.consensus_threshold = n["consensus_threshold"].as<int>();
  if (n["fuzzy_threshold"]) c.fuzzy_threshold = n["fuzzy_threshold"].as<int>();
  if (auto ab = n["age_bounds"]) {
    c.age_min = ab[0].as<double>();
    c.age_max = ab[1].as<double>();
  }
  if (auto w = n["credibility_weights"]) {
    auto& cw = c.credibility_weights;
    if (w["journal_tier"]) cw.journal_tier = w["journal_tier"].as<double>();
    if (w["citation_velocity"]) cw.citation_velocity = w["citation_velocity"].as<double>();
    if (w["study_type"]) cw.study_type = w["study_type"].as<double>();
    if (w["replication"]) cw.replication = w["replication"].as<double>();
    if (w["retraction"]) cw.retraction = w["retraction"].as<double>();
    if (w["llm_consensus"]) cw.llm_consensus = w["llm_consensus"].as<double>();
  }
  if (auto w = n["study_type_weights"]) {
    for (const auto& kv : w)
      c.study_type_weights[parse_study_type(kv.first.as<std::string>())] = kv.second.as<double>();
  }
  if (auto caps = n["document_caps"]) {
    c.document_caps.clear();
    for (const auto& kv : caps) {
      long cap = kv.second.as<long>();
      if (cap >= 0) c.document_caps[parse_literature_tier(kv.first.as<std::string>())] = cap;
    }
  }
  if (n["evidence_text_cap"]) c.evidence_text_cap = n["evidence_text_cap"].as<size_t>();
  if (n["temporal_floor"]) c.temporal_floor = n["temporal_floor"].as<int>();
  if (n["conflict_gap_years"]) c.conflict_gap_years = n["conflict_gap_years"].as<double>();
  if (n["extraction_date"]) c.extraction_date = n["extraction_date"].as<std::string>();
  if (n["pipeline_version"]) c.pipeline_version = n["pipeline_version"].as<std::string>();
  if (n["reference_year"]) c.reference_year = n["reference_year"].as<int>();
}

}  // namespace

AppConfig parse_config(const std::string& yaml_text, const fs::path& base_dir) {
  AppConfig cfg;
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    fail(ErrorKind::kConfig, std::string("config is not valid YAML: ") + e.what());
  }
  try {
    parse_pipeline(root["pipeline"], cfg.pipeline);
    if (auto s = root["seeds"]) {
      for (const auto& kv : s) {
        auto key = kv.first.as<std::string>();
        if (key == "linkpred") {
          cfg.pipeline.linkpred_seeds.clear();
          for (const auto& v : kv.second) cfg.pipeline.linkpred_seeds.push_back(v.as<uint64_t>());
        } else {
          cfg.pipeline.seeds[key] = kv.second.as<uint64_t>();
        }
      }
    }
    if (auto p = root["paths"]) {
      for (const auto& kv : p) {
        fs::path value = kv.second.as<std::string>();
        cfg.paths[kv.first.as<std::string>()] =
            value.is_absolute() ? value : (base_dir / value).lexically_normal();
      }
    }
    if (auto s = root["sources"]) {
      if (s["ontology"]) cfg.ontology_source = s["ontology"].as<std::string>();
      if (s["documents"]) cfg.document_source = s["documents"].as<std::string>();
    }
    if (auto e = root["eutils"]) {
      auto& eu = cfg.eutils;
      if (e["base_url"]) eu.base_url = e["base_url"].as<std::string>();
      if (e["api_key_env"]) eu.api_key_env = e["api_key_env"].as<std::string>();
      if (e["requests_per_second"]) eu.requests_per_second = e["requests_per_second"].as<double>();
      if (e["requests_per_second_with_key"])
        eu.requests_per_second_with_key = e["requests_per_second_with_key"].as<double>();
      if (e["max_retries"]) eu.max_retries = e["max_retries"].as<int>();
      if (e["max_in_flight"]) eu.max_in_flight = e["max_in_flight"].as<int>();
    }
    if (auto p = root["providers"]) {
      cfg.primary_models = parse_provider_list(p["primary"]);
      if (p["tiebreaker"]) cfg.tiebreaker = parse_provider(p["tiebreaker"]);
      cfg.judges = parse_provider_list(p["judges"]);
      cfg.rag_models = parse_provider_list(p["rag"]);
    }
    if (auto d = root["diseases"])
      for (const auto& v : d) cfg.diseases.push_back(v.as<std::string>());
  } catch (const YAML::Exception& e) {
    fail(ErrorKind::kConfig, std::string("bad config value: ") + e.what());
  }
  cfg.pipeline.validate();
  cfg.config_sha256 = sha256_hex(yaml_text);
  return cfg;
}

AppConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) fail(ErrorKind::kConfig, "config-not-found: " + path.string());
  auto cfg = parse_config(files::read_text(path), fs::absolute(path).parent_path());
  cfg.config_path = fs::absolute(path);
  return cfg;
}

}  // namespace chronokg
