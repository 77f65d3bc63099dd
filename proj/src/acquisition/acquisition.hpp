#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/config.hpp"
#include "core/model.hpp"

namespace chronokg {

struct SourceDocument {
  std::string pmid;
  std::optional<std::string> pmc_id;
  std::string title;
  std::string text;
  std::optional<int> publication_year;
  std::optional<std::string> journal;
  std::vector<std::string> publication_types;
  StudyType study_type = StudyType::kOther;
  double pre_rank_score = 0;
  // Optional credibility metadata, present only when the source supplies it.
  std::optional<double> journal_tier;
  std::optional<double> citation_velocity;
  std::optional<double> replication_signal;
  std::optional<bool> is_retracted;
  std::optional<long> citation_count;

  bool operator==(const SourceDocument&) const = default;
};

// Throws kParse when pmid is not numeric or text is empty.
void check_document(const SourceDocument& doc);

nlohmann::json to_json(const SourceDocument& doc);
SourceDocument document_from_json(const nlohmann::json& j);

class OntologySource {
 public:
  virtual ~OntologySource() = default;
  // Raw metadata for a disease CURIE; throws kNotFound when unknown.
  virtual nlohmann::json lookup(const std::string& disease_id) = 0;
};

class DocumentSource {
 public:
  virtual ~DocumentSource() = default;
  virtual std::vector<std::string> search(const std::string& query) = 0;
  virtual std::vector<SourceDocument> fetch(const std::vector<std::string>& pmids) = 0;
  // Participates in the harvest cache key.
  virtual std::string version() const = 0;
};

// Reads <dir>/<CURIE slug>.json records.
class FixtureOntologySource : public OntologySource {
 public:
  explicit FixtureOntologySource(std::filesystem::path dir) : dir_(std::move(dir)) {}
  nlohmann::json lookup(const std::string& disease_id) override;

 private:
  std::filesystem::path dir_;
};

// One JSON file per PMID under a directory. search() matches the quoted terms
// of the query against title and text, case-insensitively.
class FixtureDocumentSource : public DocumentSource {
 public:
  explicit FixtureDocumentSource(std::filesystem::path dir);
  std::vector<std::string> search(const std::string& query) override;
  std::vector<SourceDocument> fetch(const std::vector<std::string>& pmids) override;
  std::string version() const override { return "fixture-v1"; }

 private:
  std::filesystem::path dir_;
  std::vector<SourceDocument> docs_;
};

// In-memory source used by tests and by callers that already hold documents.
class MemoryDocumentSource : public DocumentSource {
 public:
  explicit MemoryDocumentSource(std::vector<SourceDocument> docs) : docs_(std::move(docs)) {}
  std::vector<std::string> search(const std::string& query) override;
  std::vector<SourceDocument> fetch(const std::vector<std::string>& pmids) override;
  std::string version() const override { return "memory-v1"; }

  int search_calls = 0;
  int fetch_calls = 0;

 private:
  std::vector<SourceDocument> docs_;
};

// Quoted search terms of a query string, in order.
std::vector<std::string> query_terms(const std::string& query);
// ("name"[tiab] OR "synonym"[tiab] ...)
std::string build_search_query(const DiseaseProfile& profile);

LiteratureTier profile_tier(long pubmed_count);

// Throws kNotFound for malformed CURIEs or unknown diseases.
DiseaseProfile profile_disease(const std::string& disease_id, OntologySource& source);
bool is_well_formed_curie(const std::string& id);
nlohmann::json to_json(const DiseaseProfile& p);
DiseaseProfile profile_from_json(const nlohmann::json& j);

// Keyword rules over publication-type metadata; "other" when nothing matches.
StudyType label_study_type(const std::vector<std::string>& publication_types,
                           const std::string& title = {});

struct PreRankSignals {
  std::optional<double> journal_tier;
  std::optional<double> recency;
};

// Equal-weight blend; absent signals contribute 0; clamped to [0,1].
double pre_rank(const PreRankSignals& signals);
PreRankSignals pre_rank_signals(const SourceDocument& doc, int reference_year);
double pre_rank(const SourceDocument& doc, int reference_year);

// Journal name -> tier value (1.0 / 0.75 / 0.5 / 0.25), from a TSV of
// "journal<TAB>level" with level 1..4.
class JournalTierTable {
 public:
  JournalTierTable() = default;
  static JournalTierTable load(const std::filesystem::path& path);
  std::optional<double> lookup(const std::string& journal) const;
  void set(const std::string& journal, int level);

 private:
  std::map<std::string, double> tiers_;
};

struct HarvestOptions {
  std::optional<std::filesystem::path> cache_dir;
  const JournalTierTable* journal_tiers = nullptr;
  int reference_year = 2026;
  size_t fetch_batch = 50;
  int max_in_flight = 4;
};

struct HarvestResult {
  std::vector<SourceDocument> documents;
  std::vector<std::string> warnings;
  bool from_cache = false;
};

// Ranked by descending pre_rank_score, ties by ascending PMID; Standard tier
// capped per config. Cached per (disease, source version).
HarvestResult harvest(const DiseaseProfile& profile, DocumentSource& source,
                      const PipelineConfig& config, const HarvestOptions& options);

bool pmid_less(const std::string& a, const std::string& b);

// ---------------------------------------------------------------------------
// HTTP-backed sources

struct HttpResponse {
  int status = 0;
  std::string body;
  std::map<std::string, std::string> headers;
};

// Performs a GET for a full URL. Swappable so retry logic is testable.
using HttpGetFn = std::function<HttpResponse(const std::string& url)>;
HttpGetFn default_http_get(double timeout_s = 30);

// Token bucket limiter. Clock and sleep are injectable for tests.
class TokenBucket {
 public:
  using Clock = std::function<double()>;  // seconds
  using Sleep = std::function<void(double)>;

  TokenBucket(double rate_per_s, Clock clock = {}, Sleep sleep = {});
  void acquire();

 private:
  double rate_;
  double capacity_;
  double tokens_;
  double last_;
  Clock clock_;
  Sleep sleep_;
  std::mutex mu_;
};

// Rate-limited GET with bounded exponential backoff on 429 and 5xx.
class RetryingClient {
 public:
  RetryingClient(HttpGetFn get, std::shared_ptr<TokenBucket> bucket, int max_retries,
                 double backoff_initial_s, double backoff_max_s,
                 TokenBucket::Sleep sleep = {});
  HttpResponse get(const std::string& url);
  int requests_issued() const { return requests_; }

 private:
  HttpGetFn get_;
  std::shared_ptr<TokenBucket> bucket_;
  int max_retries_;
  double backoff_initial_;
  double backoff_max_;
  TokenBucket::Sleep sleep_;
  int requests_ = 0;
};

class EutilsDocumentSource : public DocumentSource {
 public:
  EutilsDocumentSource(const EutilsSettings& settings, HttpGetFn get = {},
                       TokenBucket::Sleep sleep = {});
  std::vector<std::string> search(const std::string& query) override;
  std::vector<SourceDocument> fetch(const std::vector<std::string>& pmids) override;
  std::string version() const override { return "eutils-v1"; }
  long count(const std::string& query);

 private:
  std::string with_key(std::string url) const;

  EutilsSettings settings_;
  std::string api_key_;
  RetryingClient client_;
};

// Parses an efetch PubmedArticleSet XML payload.
std::vector<SourceDocument> parse_pubmed_xml(const std::string& xml);

// MONDO metadata from the EBI OLS service plus a PubMed article count.
class LiveOntologySource : public OntologySource {
 public:
  LiveOntologySource(std::string ols_base, EutilsDocumentSource& pubmed, HttpGetFn get = {});
  nlohmann::json lookup(const std::string& disease_id) override;

 private:
  std::string ols_base_;
  EutilsDocumentSource& pubmed_;
  HttpGetFn get_;
};

std::string url_encode(const std::string& s);

}  // namespace chronokg
