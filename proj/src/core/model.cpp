#include "core/model.hpp"

#include <array>

#include "common/digest.hpp"
#include "common/error.hpp"
#include "common/text.hpp"

namespace chronokg {

namespace {

struct StudyTypeName {
  StudyType type;
  std::string_view name;
};

constexpr std::array<StudyTypeName, 11> kStudyTypeNames{{
    {StudyType::kMetaAnalysis, "meta-analysis"},
    {StudyType::kGuideline, "guideline"},
    {StudyType::kRct, "rct"},
    {StudyType::kDatabase, "database"},
    {StudyType::kCohort, "cohort"},
    {StudyType::kCaseControl, "case-control"},
    {StudyType::kReview, "review"},
    {StudyType::kCaseSeries, "case-series"},
    {StudyType::kCaseReport, "case-report"},
    {StudyType::kExpertOpinion, "expert-opinion"},
    {StudyType::kOther, "other"},
}};

}  // namespace

std::string_view to_string(QualityGrade g) { return g == QualityGrade::kA ? "A" : "B"; }

std::string_view to_string(TemporalResolution r) {
  switch (r) {
    case TemporalResolution::kYear: return "year";
    case TemporalResolution::kMonth: return "month";
    case TemporalResolution::kDay: return "day";
    case TemporalResolution::kUnknown: return "unknown";
  }
  return "unknown";
}

std::string_view to_string(LiteratureTier t) {
  switch (t) {
    case LiteratureTier::kStandard: return "Standard";
    case LiteratureTier::kLight: return "Light";
    case LiteratureTier::kMinimal: return "Minimal";
  }
  return "Minimal";
}

std::string_view to_string(StudyType s) {
  for (const auto& e : kStudyTypeNames)
    if (e.type == s) return e.name;
  return "other";
}

QualityGrade parse_grade(std::string_view s) {
  if (s == "A") return QualityGrade::kA;
  if (s == "B") return QualityGrade::kB;
  fail(ErrorKind::kParse, "unknown quality grade '" + std::string(s) + "'");
}

TemporalResolution parse_resolution(std::string_view s) {
  if (s == "year") return TemporalResolution::kYear;
  if (s == "month") return TemporalResolution::kMonth;
  if (s == "day") return TemporalResolution::kDay;
  return TemporalResolution::kUnknown;
}

LiteratureTier parse_literature_tier(std::string_view s) {
  auto l = text::lower(s);
  if (l == "standard") return LiteratureTier::kStandard;
  if (l == "light") return LiteratureTier::kLight;
  if (l == "minimal") return LiteratureTier::kMinimal;
  fail(ErrorKind::kParse, "unknown literature tier '" + std::string(s) + "'");
}

StudyType parse_study_type(std::string_view s) {
  auto l = text::replace_all(text::lower(text::trim(s)), "_", "-");
  l = text::replace_all(l, " ", "-");
  if (l == "randomized-controlled-trial") return StudyType::kRct;
  for (const auto& e : kStudyTypeNames)
    if (e.name == l) return e.type;
  return StudyType::kOther;
}

const std::vector<StudyType>& all_study_types() {
  static const std::vector<StudyType> kAll = [] {
    std::vector<StudyType> v;
    for (const auto& e : kStudyTypeNames) v.push_back(e.type);
    return v;
  }();
  return kAll;
}

std::optional<AgeRange> TemporalContext::onset() const {
  if (!has_onset()) return std::nullopt;
  double lo = onset_age_min ? *onset_age_min : *onset_age_max;
  double hi = onset_age_max ? *onset_age_max : *onset_age_min;
  return AgeRange{lo, hi};
}

bool TemporalContext::is_temporal() const {
  return (onset_age_min && onset_age_max) || progression_stage || milestone ||
         temporal_qualifier;
}

std::vector<std::string> temporal_violations(const TemporalContext& t, double age_lo,
                                             double age_hi) {
  std::vector<std::string> reasons;
  auto out_of_bounds = [&](const std::optional<double>& v) {
    return v && (*v < age_lo || *v > age_hi);
  };
  if (out_of_bounds(t.onset_age_min) || out_of_bounds(t.onset_age_max))
    reasons.emplace_back("age-bounds");
  if (t.onset_age_min && t.onset_age_max && *t.onset_age_min > *t.onset_age_max)
    reasons.emplace_back("age-order");
  return reasons;
}

LiteratureTier assign_tier(long article_count) {
  if (article_count < 0) fail(ErrorKind::kDomain, "negative article count");
  if (article_count >= 100) return LiteratureTier::kStandard;
  if (article_count >= 20) return LiteratureTier::kLight;
  return LiteratureTier::kMinimal;
}

std::string edge_hash(std::string_view source_id, std::string_view relation,
                      std::string_view target_id, std::string_view primary_pmid) {
  std::string tuple;
  tuple.append(source_id).append("\t").append(relation).append("\t");
  tuple.append(target_id).append("\t").append(strip_pmid_prefix(primary_pmid));
  return sha256_hex(tuple).substr(0, 12);
}

std::string strip_pmid_prefix(std::string_view id) {
  std::string s = text::trim(id);
  if (text::starts_with_ci(s, "PMID:")) return text::trim(s.substr(5));
  return s;
}

}  // namespace chronokg
