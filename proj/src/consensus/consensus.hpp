#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/model.hpp"
#include "extraction/extraction.hpp"

namespace chronokg {

struct NormalizedEntity {
  std::string key;
  std::vector<std::string> variants;  // trailing slash-separated components
  bool valid() const { return !key.empty(); }
};

// Lowercase, parenthetical spans removed, whitespace collapsed; "a/b" keeps
// "a" as the key and records "b" as a variant.
NormalizedEntity normalize_entity(const std::string& name);

// Indel similarity in percent, rounded half-up; symmetric; two empty strings
// are 100. Works on code points.
int similarity_ratio(const std::string& a, const std::string& b);

inline constexpr const char* kQuarantineRelation = "quarantine";
const std::vector<std::string>& relation_vocabulary();
// Unknown surface forms map to the quarantine value, which never clusters.
std::string relation_canonical(const std::string& relation);

struct ConsensusTriple {
  RawTriple representative;
  std::string relation;  // canonical
  std::string subject_key;
  std::string object_key;
  std::vector<std::string> subject_variants;
  std::vector<std::string> object_variants;
  double consensus_confidence = 0;
  std::vector<std::string> agreeing_models;  // sorted, distinct
  int cluster_members = 0;
  int total_models = 0;
};

// Per-document consensus. total_models defaults to the number of keys in
// per_model_triples.
std::vector<ConsensusTriple> compute_consensus(
    const std::map<std::string, std::vector<RawTriple>>& per_model_triples, int threshold = 2,
    int fuzzy_threshold = 80, std::optional<int> total_models = std::nullopt);

std::vector<ConsensusTriple> consensus_for_document(const ExtractionResult& extraction,
                                                    const PipelineConfig& config);

// Canonical output order: subject key, relation, object key, pmid, model.
bool consensus_less(const ConsensusTriple& a, const ConsensusTriple& b);

// Cross-document post-step: records sharing (source, relation, target) whose
// onsets overlap (or are both absent) collapse into the first one, with
// source_ids unioned.
std::vector<TemporalTriple> merge_multi_source(const std::vector<TemporalTriple>& triples);

bool onsets_compatible(const TemporalContext& a, const TemporalContext& b);

}  // namespace chronokg
