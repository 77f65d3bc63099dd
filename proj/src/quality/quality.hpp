#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "acquisition/acquisition.hpp"
#include "consensus/consensus.hpp"
#include "core/config.hpp"
#include "core/model.hpp"

namespace chronokg {

struct ValidationOutcome {
  std::vector<std::string> reasons;  // empty-entity, age-bounds, age-order, self-reference, ...
  bool passed() const { return reasons.empty(); }
};

ValidationOutcome validate_triple(const ConsensusTriple& triple, const PipelineConfig& config);

struct CredibilitySignals {
  std::optional<double> journal_tier;
  std::optional<double> citation_velocity;
  double study_type_weight = 0;
  std::optional<double> replication_signal;
  std::optional<double> retraction_check;  // 1 = not retracted
  double llm_consensus = 0;
};

double study_type_weight(StudyType type, const std::map<StudyType, double>& table = default_study_type_weights());
double study_type_weight(const std::string& type,
                         const std::map<StudyType, double>& table = default_study_type_weights());

// Weighted sum with absent signals contributing 0, clamped to [0,1].
double credibility_score(const CredibilitySignals& s, const CredibilityWeights& w = {});

CredibilitySignals signals_for(const SourceDocument* doc, double consensus_confidence,
                               const PipelineConfig& config);

// Reference-KG snapshot: TSV with a header naming head_id, head_type,
// relation, tail_id, tail_type and optionally head_name, tail_name.
class SchemaIndex {
 public:
  static SchemaIndex load(const std::filesystem::path& path);
  static SchemaIndex parse(const std::string& tsv);

  void add_edge(const std::string& head_id, const std::string& head_type,
                const std::string& relation, const std::string& tail_id,
                const std::string& tail_type, const std::string& head_name = {},
                const std::string& tail_name = {});
  bool has_edge(const std::string& head_id, const std::string& relation,
                const std::string& tail_id) const;
  // Exact normalized-name lookup; returns (id, type).
  std::optional<std::pair<std::string, std::string>> resolve(const std::string& name) const;
  const std::set<std::string>& types() const { return types_; }
  size_t edge_count() const { return edges_.size(); }

  struct NamedEdge {
    std::string head_id, head_type, head_name, relation, tail_id, tail_type, tail_name;
  };
  // Edges in insertion order, names as given (possibly empty).
  const std::vector<NamedEdge>& named_edges() const { return named_; }

  static std::string normalize_id(const std::string& id);

 private:
  std::set<std::tuple<std::string, std::string, std::string>> edges_;
  std::map<std::string, std::pair<std::string, std::string>> names_;
  std::set<std::string> types_;
  std::vector<NamedEdge> named_;
};

// Maps a model's entity-type label onto the index vocabulary.
std::string normalize_entity_type(const std::string& type, const SchemaIndex& index);

struct Alignment {
  QualityGrade grade = QualityGrade::kB;
  std::string source_id;
  std::string source_type;
  std::string target_id;
  std::string target_type;
};

// Unresolved names get a stable "novel:<8 hex>" id; the disease itself falls
// back to the local part of the profile CURIE.
Alignment align_schema(const ConsensusTriple& triple, const SchemaIndex& index,
                       const DiseaseProfile* profile = nullptr);

struct Rejection {
  std::string pmid;
  std::string subject;
  std::string relation;
  std::string object;
  std::vector<std::string> reasons;
};

struct Conflict {
  std::string edge_a;
  std::string edge_b;
  std::string source_name;
  std::string relation;
  std::string target_name;
  double gap_years = 0;
};

struct QcResult {
  std::vector<TemporalTriple> validated;
  std::vector<Rejection> rejections;
  std::vector<Conflict> conflicts;
};

// documents supplies credibility metadata by PMID; missing entries simply
// leave those signals absent.
QcResult qc_pipeline(const std::vector<ConsensusTriple>& triples, const PipelineConfig& config,
                     const SchemaIndex& index, const DiseaseProfile& profile,
                     const std::map<std::string, SourceDocument>& documents = {});

std::vector<Conflict> detect_conflicts(const std::vector<TemporalTriple>& triples,
                                       double gap_years);

nlohmann::ordered_json to_json(const Rejection& r);
nlohmann::ordered_json to_json(const Conflict& c);

}  // namespace chronokg
