#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "benchmark/benchmark.hpp"
#include "core/bins.hpp"
#include "extraction/extraction.hpp"
#include "quality/quality.hpp"
#include "store/store.hpp"
#include "validation/validation.hpp"

namespace chronokg {

// ---------------------------------------------------------------------------
// Retrieval conditions

enum class RetrievalCondition { kNone, kStaticKg, kCoarseOnset, kChronoKg };
std::string_view to_string(RetrievalCondition c);
RetrievalCondition parse_retrieval_condition(std::string_view s);

struct RetrievalSources {
  const KgStore* kg = nullptr;
  const SchemaIndex* schema = nullptr;        // static association edges
  std::vector<GoldRecord> coarse_onset;       // disease-level onset records
};

struct RetrievedContext {
  std::string text;
  bool disease_missing = false;
};

// Question disease comes from the question params; phenotype likewise.
RetrievedContext build_context(const BenchmarkQuestion& q, RetrievalCondition condition,
                               const RetrievalSources& sources, size_t k = 5,
                               const OnsetBinTable& table = OnsetBinTable::standard());

std::string build_rag_prompt(const BenchmarkQuestion& q, const std::string& context);

struct ItemResult {
  std::string question_id;
  std::string prompt;
  std::string context;
  std::string answer;
  bool answered = false;
  bool correct = false;
  ScoreOutcome outcome = ScoreOutcome::kIncorrect;
  std::string error;
  bool context_missing = false;
};

struct ConditionResult {
  RetrievalCondition condition = RetrievalCondition::kNone;
  std::string model;
  std::vector<ItemResult> items;
  double accuracy() const;
};

ConditionResult run_condition(const std::vector<BenchmarkQuestion>& questions, ModelProvider& provider,
                              RetrievalCondition condition, const RetrievalSources& sources, size_t k = 5,
                              double timeout_s = 120);

nlohmann::ordered_json to_json(const ConditionResult& r);
ConditionResult condition_result_from_json(const nlohmann::json& j);

// Answers with the first age range in the context, else a fixed wrong answer.
class MockRagProvider : public ModelProvider {
 public:
  explicit MockRagProvider(std::string name) : name_(std::move(name)) {}
  const std::string& name() const override { return name_; }
  std::string complete(const std::string& prompt, double temperature, double timeout_s) override;

  static constexpr const char* kFallbackAnswer = "unknown";

 private:
  std::string name_;
};

// ---------------------------------------------------------------------------
// Statistics

struct Interval {
  double lo = 0;
  double hi = 0;
};

// Percentile bootstrap of the mean. Draws are Rng(seed).index(n), resample
// by resample; quantiles interpolate linearly between order statistics.
Interval bootstrap_ci(const std::vector<double>& outcomes, size_t resamples = 10000, uint64_t seed = 42,
                      double level = 0.95);
Interval bootstrap_ci(const std::vector<bool>& outcomes, size_t resamples = 10000, uint64_t seed = 42,
                      double level = 0.95);
// Linear-interpolation quantile of sorted data, q in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double q);

struct RescueResult {
  size_t n_fail = 0;
  size_t rescued = 0;
  std::optional<double> fraction;  // empty when n_fail = 0
  std::optional<Interval> ci;
  std::vector<std::string> rescued_ids;
};

RescueResult rescue_rate(const ConditionResult& nr, const ConditionResult& condition, size_t resamples = 10000,
                         uint64_t seed = 42);
nlohmann::ordered_json to_json(const RescueResult& r);

// Two-sided exact binomial test on the discordant counts.
double mcnemar_exact(size_t b, size_t c);
double mcnemar_exact(const std::vector<bool>& a, const std::vector<bool>& b);

struct TTest {
  double t = 0;
  double df = 0;
  double p = 1;
};
TTest paired_t(const std::vector<double>& a, const std::vector<double>& b);

// ---------------------------------------------------------------------------
// Link prediction

struct LinkTriple {
  std::string head;
  std::string relation;
  std::string tail;
  std::optional<AgeRange> onset;
  bool operator==(const LinkTriple&) const = default;
};

std::vector<LinkTriple> link_triples(const std::vector<TemporalTriple>& triples);

enum class BinMode { kNone, kFine8, kCoarse5 };
std::string_view to_string(BinMode m);
BinMode parse_bin_mode(std::string_view s);

std::vector<LinkTriple> augment_temporal(const std::vector<LinkTriple>& triples, BinMode mode,
                                         const OnsetBinTable& table = OnsetBinTable::standard());

struct TransEParams {
  size_t dim = 100;
  double margin = 1.0;
  size_t epochs = 100;
  size_t batch_size = 1024;
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct TransEModel {
  size_t dim = 0;
  double margin = 1.0;
  std::vector<std::string> entities;
  std::vector<std::string> relations;
  std::map<std::string, size_t> entity_index;
  std::map<std::string, size_t> relation_index;
  std::vector<double> entity_emb;    // |E| x dim, row-major
  std::vector<double> relation_emb;  // |R| x dim
  std::vector<double> epoch_loss;    // mean margin loss per epoch

  double distance(size_t h, size_t r, size_t t) const;
};

// Vocabulary covers train plus vocab_extra (so held-out entities are known).
// Throws kDomain with fewer than two entities or no training triples.
TransEModel train_transe(const std::vector<LinkTriple>& train, const TransEParams& params, uint64_t seed,
                         const std::vector<LinkTriple>& vocab_extra = {});

enum class RankMode { kRaw, kFiltered };

struct RankingMetrics {
  double mrr = 0;
  double hits1 = 0;
  double hits3 = 0;
  double hits10 = 0;
  size_t rankings = 0;
};

// Mean-of-tied-block rank, averaged over head and tail replacement.
RankingMetrics evaluate_ranking(const TransEModel& model, const std::vector<LinkTriple>& test,
                                const std::vector<LinkTriple>& known, RankMode mode);

struct AblationCondition {
  std::string name;
  BinMode mode = BinMode::kNone;
};

struct AblationRun {
  std::string condition;
  uint64_t seed = 0;
  RankingMetrics raw;
  RankingMetrics filtered;
  double first_epoch_loss = 0;
  double last_epoch_loss = 0;
  double seconds = 0;
};

struct MetricSummary {
  double mean = 0;
  double std = 0;  // sample standard deviation over seeds
  size_t n = 0;
};

struct AblationReport {
  std::vector<AblationRun> runs;
  // condition -> metric name ("filtered_mrr", "raw_hits10", ...) -> summary
  std::map<std::string, std::map<std::string, MetricSummary>> summary;
  // condition -> relative filtered-MRR gain over the first condition
  std::map<std::string, double> relative_gain;
  std::map<std::string, TTest> paired_t_mrr;  // vs the first condition
  std::vector<std::string> condition_order;
};

// The 80/10/10 split is drawn per seed on the base triples, then every
// condition augments the same partitions.
AblationReport ablation_run(const std::vector<LinkTriple>& triples, const std::vector<AblationCondition>& conditions,
                            const std::vector<uint64_t>& seeds = {42, 7, 123}, const TransEParams& params = {},
                            const OnsetBinTable& table = OnsetBinTable::standard());
nlohmann::ordered_json to_json(const AblationReport& r);
std::string ablation_csv(const AblationReport& r);

// ---------------------------------------------------------------------------
// Trajectory clustering

struct DiseaseFeatures {
  std::string disease_id;
  double median_onset = 0;
  double onset_spread = 0;
  double stage_count = 0;
  double milestone_density = 0;
  double fraction_with_onset = 0;
  std::vector<double> vector() const;
};

// Diseases without any onset-bearing triple are skipped (named in skipped).
std::vector<DiseaseFeatures> disease_features(const KgStore& store, std::vector<std::string>* skipped = nullptr);

// Columns to zero mean and unit variance; constant columns become zero.
std::vector<std::vector<double>> standardize(const std::vector<std::vector<double>>& rows);

struct KMeansResult {
  size_t k = 0;
  std::vector<size_t> assignments;
  std::vector<std::vector<double>> centroids;
  std::optional<double> silhouette;  // empty when degenerate
  size_t iterations = 0;
};

KMeansResult kmeans(const std::vector<std::vector<double>>& points, size_t k, uint64_t seed,
                    size_t max_iter = 100);
std::optional<double> silhouette(const std::vector<std::vector<double>>& points,
                                 const std::vector<size_t>& assignments, size_t k);

struct ClusterReport {
  std::vector<KMeansResult> per_k;
  std::optional<size_t> chosen_k;
  bool degenerate = false;
  std::vector<std::string> warnings;
  const KMeansResult* chosen() const;
};

// Points are standardized first. k_range is inclusive.
ClusterReport cluster_trajectories(const std::vector<std::vector<double>>& features, size_t k_min = 4,
                                   size_t k_max = 8, uint64_t seed = 42);
nlohmann::ordered_json to_json(const ClusterReport& r, const std::vector<std::string>& labels = {});

// ---------------------------------------------------------------------------
// Evidence age

struct EvidenceAgeStats {
  size_t total = 0;
  size_t dated = 0;
  double coverage = 0;
  std::optional<double> median_year;
  std::optional<double> fraction_recent;  // reference_year - year <= 5
  std::optional<double> fraction_old;     // reference_year - year > 20
  std::map<int, size_t> histogram;        // year -> triples
};

EvidenceAgeStats evidence_age_stats(const std::vector<TemporalTriple>& triples, int reference_year);
nlohmann::ordered_json to_json(const EvidenceAgeStats& s);

}  // namespace chronokg
