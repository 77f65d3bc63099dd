#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chronokg {

// Ages are fractional years everywhere; months and days are converted at ingest.
struct AgeRange {
  double min = 0;
  double max = 0;

  double width() const { return max - min; }
  bool operator==(const AgeRange&) const = default;
};

inline bool ranges_overlap(const AgeRange& a, const AgeRange& b) {
  return a.min <= b.max && b.min <= a.max;
}

// Distance between two closed intervals; zero when they touch or overlap.
inline double range_gap(const AgeRange& a, const AgeRange& b) {
  if (ranges_overlap(a, b)) return 0;
  return a.max < b.min ? b.min - a.max : a.min - b.max;
}

enum class QualityGrade { kA, kB };
enum class TemporalResolution { kYear, kMonth, kDay, kUnknown };
enum class LiteratureTier { kStandard, kLight, kMinimal };

enum class StudyType {
  kMetaAnalysis,
  kGuideline,
  kRct,
  kDatabase,
  kCohort,
  kCaseControl,
  kReview,
  kCaseSeries,
  kCaseReport,
  kExpertOpinion,
  kOther,
};

std::string_view to_string(QualityGrade g);
std::string_view to_string(TemporalResolution r);
std::string_view to_string(LiteratureTier t);
std::string_view to_string(StudyType s);

QualityGrade parse_grade(std::string_view s);
TemporalResolution parse_resolution(std::string_view s);
LiteratureTier parse_literature_tier(std::string_view s);
// Unknown names map to kOther.
StudyType parse_study_type(std::string_view s);
const std::vector<StudyType>& all_study_types();

struct TemporalContext {
  std::optional<double> onset_age_min;
  std::optional<double> onset_age_max;
  std::optional<std::string> progression_stage;
  std::optional<std::string> milestone;
  std::optional<std::string> temporal_qualifier;
  // Carried through serialization, not interpreted.
  std::optional<std::string> discovery_date;
  std::optional<std::string> validity_start;
  std::optional<std::string> validity_end;
  std::optional<std::string> superseded_by;
  TemporalResolution temporal_resolution = TemporalResolution::kUnknown;
  std::optional<double> duration;
  std::optional<double> treatment_start_age;

  bool has_onset() const { return onset_age_min.has_value() || onset_age_max.has_value(); }
  // Onset as a closed range; a lone bound becomes a degenerate range.
  std::optional<AgeRange> onset() const;
  // True when any of onset, stage, milestone or qualifier is present.
  bool is_temporal() const;

  bool operator==(const TemporalContext&) const = default;
};

// Reasons a temporal context is implausible; empty when valid.
std::vector<std::string> temporal_violations(const TemporalContext& t, double age_lo = 0,
                                             double age_hi = 120);

struct EvidenceBlock {
  int tier = 2;
  std::vector<std::string> source_ids;
  std::string evidence_text;
  StudyType study_type = StudyType::kOther;
  double credibility_score = 0;
  double consensus_confidence = 1;
  std::vector<std::string> extraction_models;
  std::string extraction_method = "tier2_llm_consensus";
  std::optional<long> citation_count;
  bool is_retracted = false;
  std::optional<int> publication_year;

  bool operator==(const EvidenceBlock&) const = default;
};

inline constexpr size_t kEvidenceTextCap = 300;

struct TemporalTriple {
  std::string edge_id;
  std::string source_id;
  std::string source_type;
  std::string source_name;
  std::string relation;
  std::string target_id;
  std::string target_type;
  std::string target_name;
  TemporalContext temporal;
  EvidenceBlock evidence;
  std::optional<std::map<std::string, std::string>> conditions;
  std::string extraction_date;
  std::string pipeline_version = "1.0.0";
  std::string disease_profile_id;
  QualityGrade quality_grade = QualityGrade::kB;

  bool operator==(const TemporalTriple&) const = default;
};

struct DiseaseProfile {
  std::string disease_id;
  std::string name;
  std::vector<std::string> synonyms;
  std::vector<std::string> differential_diseases;
  std::vector<std::string> known_genes;
  std::vector<std::string> known_phenotypes;
  std::optional<std::string> category;
  std::optional<std::string> inheritance_pattern;
  long pubmed_count = 0;
  bool pmc_fulltext_available = false;
  LiteratureTier tier = LiteratureTier::kMinimal;
};

// Standard >= 100 articles, Light 20..99, Minimal < 20.
LiteratureTier assign_tier(long article_count);

// 12 hex characters of SHA-256 over the tab-joined canonical tuple.
std::string edge_hash(std::string_view source_id, std::string_view relation,
                      std::string_view target_id, std::string_view primary_pmid);

// "PMID:123" -> "123"; bare ids pass through.
std::string strip_pmid_prefix(std::string_view id);

}  // namespace chronokg
