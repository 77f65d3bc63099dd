#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/bins.hpp"
#include "core/model.hpp"
#include "extraction/extraction.hpp"
#include "store/store.hpp"

namespace chronokg {

// ---------------------------------------------------------------------------
// Gold standards

enum class GoldSource { kOrphadata, kHpoa, kGeneReviews, kPhenopackets };
std::string_view to_string(GoldSource s);
GoldSource parse_gold_source(std::string_view s);

struct GoldRecord {
  GoldSource source = GoldSource::kOrphadata;
  std::string disease_name;
  std::string disease_key;  // normalize_disease_name(disease_name)
  AgeRange range;
};

// Lowercase, punctuation folded, parentheticals dropped, and the suffix
// tokens "syndrome", "disease", "disorder" plus type numerals removed.
std::string normalize_disease_name(const std::string& name);

// Orphadata-style TSV: disease<TAB>onset, where onset is a category
// ("Childhood", "Adult", "All ages") or a numeric "a-b". Rows of one disease
// are merged into their covering range.
std::vector<GoldRecord> load_orphadata(const std::filesystem::path& path);
std::vector<GoldRecord> parse_orphadata(const std::string& tsv);

// HPOA-style annotation file: onset read from the "onset" column, or from
// aspect-C rows whose hpo_id is an onset term.
std::vector<GoldRecord> load_hpoa(const std::filesystem::path& path);
std::vector<GoldRecord> parse_hpoa(const std::string& tsv);
std::optional<AgeRange> hpo_onset_range(const std::string& term_id);

// GeneReviews-style TSV: disease<TAB>onset_min<TAB>onset_max.
std::vector<GoldRecord> load_genereviews(const std::filesystem::path& path);
std::vector<GoldRecord> parse_genereviews(const std::string& tsv);

struct PhenopacketCase {
  std::string id;
  std::string disease_id;
  std::string disease_name;
  std::optional<double> disease_onset;  // years
  struct Feature {
    std::string id;
    std::string label;
    std::optional<double> onset;
  };
  std::vector<Feature> features;
};

// ISO-8601 durations such as "P3Y6M" or "P10D" to fractional years.
std::optional<double> iso_duration_years(const std::string& iso);
PhenopacketCase parse_phenopacket(const nlohmann::json& j);
// Every *.json file in a directory, sorted by file name.
std::vector<PhenopacketCase> load_phenopackets(const std::filesystem::path& dir);
// Disease-level range per disease across cases (min..max of case onsets).
std::vector<GoldRecord> phenopacket_gold(const std::vector<PhenopacketCase>& cases);

struct DiseaseMatch {
  std::string kg_name;
  size_t gold_index = 0;
};

struct MatchReport {
  std::vector<DiseaseMatch> matched;
  std::vector<std::string> ambiguous;  // names whose key collides on either side
  std::vector<std::string> unmatched;
};

MatchReport match_diseases(const std::vector<std::string>& kg_disease_names,
                           const std::vector<GoldRecord>& gold);

// ---------------------------------------------------------------------------
// Containment and error taxonomy

bool containment(const AgeRange& kg, const AgeRange& gold);

enum class TaxonomyVerdict {
  kContained,
  kAdjacentStage,
  kGranularityMismatch,
  kWiderButOverlaps,
  kSingleTripleNoise,
  kGenuinelyWrong,
};
std::string_view to_string(TaxonomyVerdict v);
const std::vector<TaxonomyVerdict>& all_taxonomy_verdicts();
bool is_error(TaxonomyVerdict v);

// The range compared against gold: the span of per-phenotype median ranges.
std::optional<AgeRange> compared_range(const std::vector<TemporalTriple>& triples);

struct Classification {
  TaxonomyVerdict verdict = TaxonomyVerdict::kGranularityMismatch;
  AgeRange kg_range;
  AgeRange gold_range;
  std::optional<std::string> noise_edge;  // triple removed by the leave-one-out rescue
};

// Rules applied in order: contained, single-triple noise (leave-one-out),
// genuinely wrong (disjoint, gap > wrong_gap), adjacent stage (era indices
// differ by at most one), wider but overlaps, granularity mismatch.
// Throws kDomain when no triple carries an onset.
Classification classify_discrepancy(const std::vector<TemporalTriple>& triples,
                                    const AgeRange& gold, const OnsetBinTable& table,
                                    double wrong_gap = 10);

struct AccuracyReport {
  size_t n = 0;
  double strict_precision = 0;
  double effective_accuracy = 0;
  std::map<TaxonomyVerdict, size_t> counts;
  std::map<TaxonomyVerdict, double> fractions;
};

AccuracyReport accuracy_metrics(const std::vector<TaxonomyVerdict>& verdicts);
nlohmann::ordered_json to_json(const AccuracyReport& r);

// ---------------------------------------------------------------------------
// Coverage gap

struct CoverageRow {
  std::string resource;
  size_t diseases = 0;
  double percent = 0;
};

struct CoverageReport {
  size_t universe = 0;
  std::vector<CoverageRow> resources;  // gold resources in input order
  CoverageRow kg;
  CoverageRow novel;  // kg minus the union of all gold sets
  std::vector<std::string> novel_diseases;
};

// Keys are normalized disease names. Percentages are against the universe.
CoverageReport coverage_gap(const std::set<std::string>& kg,
                            const std::vector<std::pair<std::string, std::set<std::string>>>& resources,
                            size_t universe);
nlohmann::ordered_json to_json(const CoverageReport& r);

// ---------------------------------------------------------------------------
// Novel-coverage sampling and the judge panel

const std::vector<std::string>& timing_lexicon();
// Longest clause of the text that contains a timing keyword; 0 when none.
size_t keyword_span_length(const std::string& text, const std::vector<std::string>& lexicon);

struct NovelCandidate {
  std::string disease_id;
  std::string disease_name;
  LiteratureTier tier = LiteratureTier::kMinimal;
  std::vector<TemporalTriple> triples;
};

struct SampledClaim {
  std::string disease_id;
  std::string disease_name;
  std::string tier;
  std::string era;
  std::string edge_id;
  std::string phenotype;
  std::optional<AgeRange> claim_range;
  std::string claim;
  std::string evidence;
};

struct SampleResult {
  std::vector<SampledClaim> items;
  std::map<std::string, size_t> allocation;  // stratum -> count
  std::vector<std::string> warnings;
};

// Proportional allocation across tier x era strata with largest-remainder
// rounding, seeded shuffle within each stratum.
SampleResult sample_novel(const std::vector<NovelCandidate>& population, size_t n, uint64_t seed,
                          const OnsetBinTable& table,
                          const std::vector<std::string>& lexicon = timing_lexicon());

std::vector<size_t> proportional_allocation(const std::vector<size_t>& sizes, size_t n);

nlohmann::ordered_json to_json(const SampledClaim& c);

enum class Verdict { kSupported, kPartiallySupported, kNotSupported, kUnverifiable };
std::string_view to_string(Verdict v);
std::optional<Verdict> parse_verdict(std::string_view s);

struct JudgeVerdict {
  std::string judge;
  Verdict verdict = Verdict::kUnverifiable;
  std::string rationale;
  std::vector<std::string> diagnostics;
};

std::string build_judge_prompt(const std::string& claim, const std::string& evidence);
// Finds the verdict in a judge response; unparseable text -> unverifiable.
JudgeVerdict parse_judge_response(const std::string& judge, const std::string& response);
// Transport and timeout errors propagate.
JudgeVerdict judge_pair(const std::string& claim, const std::string& evidence,
                        ModelProvider& judge, double timeout_s = 120);

// Translates timing language to an era range: numeric ranges first, then era
// keywords. Empty when the text carries no timing content.
std::optional<AgeRange> evidence_timing_range(const std::string& evidence, const OnsetBinTable& table);

// Applies the era lookup protocol to the claim and evidence lines in a judge prompt.
class MockJudgeProvider : public ModelProvider {
 public:
  explicit MockJudgeProvider(std::string name) : name_(std::move(name)) {}
  const std::string& name() const override { return name_; }
  std::string complete(const std::string& prompt, double temperature, double timeout_s) override;

 private:
  std::string name_;
};

struct PanelReport {
  size_t n = 0;  // items with exactly three judges
  std::map<Verdict, size_t> majority;
  size_t splits = 0;
  size_t unanimous = 0;
  size_t two_of_three = 0;
  double verified_accuracy = 0;
  size_t verifiable = 0;
  std::vector<std::string> warnings;
  std::vector<std::optional<Verdict>> per_item;  // nullopt for splits or excluded items
};

PanelReport aggregate_verdicts(const std::vector<std::vector<JudgeVerdict>>& items);
nlohmann::ordered_json to_json(const PanelReport& r);
std::string render_panel_table(const PanelReport& r);

}  // namespace chronokg
