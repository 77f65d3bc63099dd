#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/bins.hpp"
#include "core/model.hpp"
#include "quality/quality.hpp"
#include "store/store.hpp"
#include "validation/validation.hpp"

namespace chronokg {

enum class QuestionTier { kTier1, kTier2, kStatic, kSupplementary };
enum class TaskType {
  kTemporalWindow,
  kTemporalDifferential,
  kCrossDiseaseComparison,
  kPhenopacketsOnset,
  kPhenotypeOrdering,
  kStageConditional,
  kStaticDrug,
  kStaticGene,
  kNegativeTemporal,
};
enum class Difficulty { kEasy, kMedium, kHard };

std::string_view to_string(QuestionTier t);
std::string_view to_string(TaskType t);
std::string_view to_string(Difficulty d);
QuestionTier parse_question_tier(std::string_view s);
TaskType parse_task_type(std::string_view s);
Difficulty parse_difficulty(std::string_view s);
const std::vector<TaskType>& all_task_types();

QuestionTier tier_of(TaskType t);
Difficulty difficulty_of(TaskType t);

struct QuestionGold {
  std::string label;              // Yes/No, option letter, or disease name
  std::optional<AgeRange> range;  // onset answers and window golds
  std::vector<std::string> items;  // ordering sequence or stage phenotypes
};

struct GoldTrace {
  std::string source;                // orphadata | hpoa | phenopackets | kg | schema
  std::vector<std::string> records;  // disease names, case ids or edge ids
  std::vector<std::string> pmids;
};

// Values the generator used, kept so QC and gold verification can re-check.
struct QuestionParams {
  std::optional<double> probe_age;
  std::optional<std::string> era;
  std::optional<std::string> phenotype;
  std::optional<std::string> disease;  // display name of the asked-about disease
  std::vector<std::optional<AgeRange>> option_ranges;  // parallel to options
  std::vector<double> item_onsets;                     // parallel to gold.items (ordering)
};

struct BenchmarkQuestion {
  std::string id;
  QuestionTier tier = QuestionTier::kTier1;
  TaskType task_type = TaskType::kTemporalWindow;
  std::string prompt;
  std::optional<std::vector<std::string>> options;
  QuestionGold gold;
  GoldTrace gold_source;
  Difficulty difficulty = Difficulty::kMedium;
  QuestionParams params;
};

nlohmann::ordered_json to_json(const BenchmarkQuestion& q);
BenchmarkQuestion question_from_json(const nlohmann::json& j);

struct BenchmarkSources {
  std::vector<GoldRecord> onset_gold;  // window, differential, comparison
  std::vector<GoldRecord> negative_gold;  // rule-out probe (HPOA)
  std::vector<PhenopacketCase> phenopackets;
  const KgStore* kg = nullptr;
  const SchemaIndex* schema = nullptr;
};

struct GenerationResult {
  std::vector<BenchmarkQuestion> questions;
  std::vector<std::string> warnings;
};

inline constexpr double kOutsideProbeMargin = 2.0;
inline constexpr size_t kMinDifferentialEraDistance = 2;

// Deterministic for a given (sources, n, seed). Fewer than n questions with a
// shortfall warning when the sources run out of eligible material.
GenerationResult generate_questions(TaskType type, const BenchmarkSources& sources, size_t n,
                                    uint64_t seed, const OnsetBinTable& table = OnsetBinTable::standard());

// Runs the requested types in parallel; output is ordered by type.
GenerationResult generate_benchmark(const std::map<TaskType, size_t>& counts,
                                    const BenchmarkSources& sources, uint64_t seed,
                                    const OnsetBinTable& table = OnsetBinTable::standard());

BenchmarkQuestion make_window_question(const std::string& id, const GoldRecord& gold, double probe);

struct QcRemoval {
  std::string id;
  std::string reason;  // ambiguous-options | boundary-probe | tied-ordering | overlapping-ranges | malformed-options | duplicate-question
};

struct QcOutcome {
  std::vector<BenchmarkQuestion> kept;
  std::vector<QcRemoval> removed;
};

QcOutcome qc_questions(const std::vector<BenchmarkQuestion>& questions,
                       const OnsetBinTable& table = OnsetBinTable::standard());

struct GoldCheck {
  size_t checked = 0;
  std::vector<std::string> mismatches;  // "<id>: <detail>"
};

// Re-derives every tier1 gold from the source records.
GoldCheck verify_tier1(const std::vector<BenchmarkQuestion>& questions, const BenchmarkSources& sources,
                       const OnsetBinTable& table = OnsetBinTable::standard());

// ---------------------------------------------------------------------------
// Scoring

enum class ScoreOutcome { kCorrect, kIncorrect, kUnparseable };
std::string_view to_string(ScoreOutcome o);

struct ScoreResult {
  ScoreOutcome outcome = ScoreOutcome::kUnparseable;
  std::string diagnostic;
  bool correct() const { return outcome == ScoreOutcome::kCorrect; }
};

struct ParsedRange {
  AgeRange range;
  bool from_keyword = false;
};

// Grammar: NUMBER [UNIT] | NUMBER ("-" | "–" | "to" | "and") NUMBER [UNIT], with an
// optional leading "between" or "at", NUMBER = digits with optional decimals,
// UNIT = years | months | weeks | days (default years). Without a number an
// era keyword such as "infancy" or "adult" yields that era's range.
std::optional<ParsedRange> parse_answer_range(const std::string& text,
                                              const OnsetBinTable& table = OnsetBinTable::standard());

double onset_tolerance(const AgeRange& gold);
bool calibrated_onset_score(const ParsedRange& predicted, const AgeRange& gold,
                            const OnsetBinTable& table = OnsetBinTable::standard());
inline bool calibrated_onset_score(const AgeRange& predicted, const AgeRange& gold) {
  return calibrated_onset_score(ParsedRange{predicted, false}, gold);
}

ScoreResult score_answer(const BenchmarkQuestion& q, const std::string& answer);

struct TypeScore {
  size_t n = 0;
  size_t correct = 0;
  size_t unparseable = 0;
  double accuracy() const { return n ? static_cast<double>(correct) / static_cast<double>(n) : 0.0; }
};

struct BenchmarkScore {
  std::map<TaskType, TypeScore> per_type;
  TypeScore overall;
  std::vector<std::string> missing;  // question ids without an answer (scored incorrect)
};

BenchmarkScore score_benchmark(const std::vector<BenchmarkQuestion>& questions,
                               const std::map<std::string, std::string>& answers);
nlohmann::ordered_json to_json(const BenchmarkScore& s);

// ---------------------------------------------------------------------------
// Files

// <dir>/benchmark.json (all non-supplementary questions), <dir>/supplementary.json,
// and one <dir>/shards/<task_type>.jsonl per type present.
std::vector<std::filesystem::path> write_benchmark(const std::vector<BenchmarkQuestion>& questions,
                                                   const std::filesystem::path& dir);
// A JSON array file or a JSONL shard.
std::vector<BenchmarkQuestion> load_questions(const std::filesystem::path& path);

}  // namespace chronokg
