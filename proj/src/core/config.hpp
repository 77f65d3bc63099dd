#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/model.hpp"

namespace chronokg {

// Six credibility weights; must sum to 1.
struct CredibilityWeights {
  double journal_tier = 0.15;
  double citation_velocity = 0.15;
  double study_type = 0.25;
  double replication = 0.15;
  double retraction = 0.15;
  double llm_consensus = 0.15;

  double sum() const {
    return journal_tier + citation_velocity + study_type + replication + retraction +
           llm_consensus;
  }
};

std::map<StudyType, double> default_study_type_weights();

struct ProviderSpec {
  std::string name;
  std::string kind = "replay";  // replay | mock | http
  std::string model;            // remote model id for http providers
  std::string endpoint;         // chat-completion URL for http providers
  std::string api_key_env;
  double temperature = 0.0;
  double timeout_s = 120.0;
  int max_tokens = 4096;
};

struct PipelineConfig {
  int consensus_threshold = 2;
  int fuzzy_threshold = 80;
  double age_min = 0;
  double age_max = 120;
  CredibilityWeights credibility_weights;
  std::map<StudyType, double> study_type_weights = default_study_type_weights();
  // Per-tier harvest caps; absent means take everything.
  std::map<LiteratureTier, long> document_caps = {{LiteratureTier::kStandard, 150}};
  size_t evidence_text_cap = kEvidenceTextCap;
  // Second-pass prompt runs when the first pass yields fewer temporal triples.
  int temporal_floor = 1;
  double conflict_gap_years = 10;
  std::string extraction_date = "1970-01-01";
  std::string pipeline_version = "1.0.0";
  int reference_year = 2026;
  std::map<std::string, uint64_t> seeds = {
      {"benchmark", 42}, {"bootstrap", 42}, {"judge_sample", 42}, {"kmeans", 42}};
  std::vector<uint64_t> linkpred_seeds = {42, 7, 123};

  // Throws kConfig when an invariant is broken.
  void validate() const;
  uint64_t seed(const std::string& name) const;
};

struct EutilsSettings {
  std::string base_url = "https://eutils.ncbi.nlm.nih.gov";
  std::string api_key_env = "NCBI_API_KEY";
  double requests_per_second = 3;
  double requests_per_second_with_key = 10;
  int max_retries = 5;
  double backoff_initial_s = 0.5;
  double backoff_max_s = 8.0;
  int max_in_flight = 4;
};

// Everything a CLI invocation needs. Relative paths resolve against the
// directory that holds the config file.
struct AppConfig {
  PipelineConfig pipeline;
  EutilsSettings eutils;
  std::string ontology_source = "fixture";  // fixture | live
  std::string document_source = "fixture";  // fixture | live
  std::map<std::string, std::filesystem::path> paths;
  std::vector<ProviderSpec> primary_models;
  std::optional<ProviderSpec> tiebreaker;
  std::vector<ProviderSpec> judges;
  std::vector<ProviderSpec> rag_models;
  std::vector<std::string> diseases;
  std::string config_sha256;
  std::filesystem::path config_path;

  std::filesystem::path path(const std::string& key) const;
  bool has_path(const std::string& key) const { return paths.count(key) > 0; }
};

AppConfig load_config(const std::filesystem::path& path);
AppConfig parse_config(const std::string& yaml_text, const std::filesystem::path& base_dir);

}  // namespace chronokg
