#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "acquisition/acquisition.hpp"
#include "core/config.hpp"
#include "core/model.hpp"

namespace chronokg {

// Model-reported confidence; recorded, never used for filtering.
enum class ModelConfidence { kHigh, kMedium, kLow };
std::string_view to_string(ModelConfidence c);
ModelConfidence parse_model_confidence(std::string_view s);
int confidence_rank(ModelConfidence c);  // high 2, medium 1, low 0

struct RawTriple {
  std::string subject;
  std::string subject_type;
  std::string relation;
  std::string object;
  std::string object_type;
  ModelConfidence confidence = ModelConfidence::kMedium;
  std::string evidence_text;
  std::optional<TemporalContext> temporal_context;
  std::optional<std::map<std::string, std::string>> conditions;
  // Stamped by the orchestrator from document metadata, never from model output.
  std::string model;
  std::string pmid;
  std::optional<int> publication_year;

  bool is_temporal() const { return temporal_context && temporal_context->is_temporal(); }
  bool operator==(const RawTriple&) const = default;
};

nlohmann::ordered_json to_json(const RawTriple& t);
RawTriple raw_triple_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Prompts

// Placeholder text for an empty list or missing profile field.
inline constexpr const char* kEmptyListMarker = "(none)";

std::string build_primary_prompt(const DiseaseProfile& profile, const SourceDocument& doc);
std::string build_temporal_prompt(const SourceDocument& doc);
// Same template followed by the disease context block.
std::string build_temporal_prompt(const SourceDocument& doc, const DiseaseProfile& profile);

// ---------------------------------------------------------------------------
// Parsing

struct ParseOutcome {
  std::vector<RawTriple> triples;
  std::vector<std::string> diagnostics;
  bool parse_failed = false;
  bool repaired = false;
};

// Never throws. Strict parse, then a bounded repair ladder (fences, outer
// braces, trailing commas). Triples missing required fields are dropped.
ParseOutcome parse_extraction_response(const std::string& text,
                                       size_t evidence_cap = kEvidenceTextCap);

// ---------------------------------------------------------------------------
// Providers

class ModelProvider {
 public:
  virtual ~ModelProvider() = default;
  virtual const std::string& name() const = 0;
  // Throws Error(kTimeout) on deadline, kTransport on network failure,
  // kCacheMiss for replay misses.
  virtual std::string complete(const std::string& prompt, double temperature,
                               double timeout_s) = 0;
};

std::string prompt_key(const std::string& prompt);

// Recorded responses under <dir>/<provider name>/<sha256(prompt)>.json:
//   {"prompt_sha256": ..., "response": "..."}  or  {"error": "timeout"}
class ReplayProvider : public ModelProvider {
 public:
  ReplayProvider(std::string name, std::filesystem::path dir);
  const std::string& name() const override { return name_; }
  std::string complete(const std::string& prompt, double temperature, double timeout_s) override;

 private:
  std::string name_;
  std::filesystem::path dir_;
};

// Passes calls through and records each response in replay layout.
class RecordingProvider : public ModelProvider {
 public:
  RecordingProvider(std::shared_ptr<ModelProvider> inner, std::filesystem::path dir);
  const std::string& name() const override { return inner_->name(); }
  std::string complete(const std::string& prompt, double temperature, double timeout_s) override;

 private:
  std::shared_ptr<ModelProvider> inner_;
  std::filesystem::path dir_;
};

void write_replay_entry(const std::filesystem::path& dir, const std::string& provider,
                        const std::string& prompt, const std::string& response,
                        const std::optional<std::string>& error = std::nullopt);

// Deterministic rule-based extractor. Reads the disease context and source
// text out of the prompt and emits phenotype/gene triples for sentences that
// mention known entities, with onset ranges and stages parsed from the text.
class MockExtractionProvider : public ModelProvider {
 public:
  struct Options {
    // Skip sentence i when (i + offset) % drop_every == 0; 0 disables.
    int drop_every = 0;
    int offset = 0;
    bool return_empty = false;
  };
  explicit MockExtractionProvider(std::string name) : name_(std::move(name)) {}
  MockExtractionProvider(std::string name, Options options)
      : name_(std::move(name)), options_(options) {}
  const std::string& name() const override { return name_; }
  std::string complete(const std::string& prompt, double temperature, double timeout_s) override;

  std::atomic<int> calls{0};

 private:
  std::string name_;
  Options options_;
};

// OpenAI-compatible chat-completion endpoint.
class HttpChatProvider : public ModelProvider {
 public:
  explicit HttpChatProvider(ProviderSpec spec);
  const std::string& name() const override { return spec_.name; }
  std::string complete(const std::string& prompt, double temperature, double timeout_s) override;

 private:
  ProviderSpec spec_;
};

using MockFactory = std::function<std::shared_ptr<ModelProvider>(const ProviderSpec&)>;

// kind "replay" reads replay_dir, "record" wraps http with a recorder that
// writes replay_dir, "mock" uses mock_factory (the extraction mock when empty).
std::shared_ptr<ModelProvider> make_provider(const ProviderSpec& spec,
                                             const std::filesystem::path& replay_dir,
                                             const MockFactory& mock_factory = {});

// ---------------------------------------------------------------------------
// Orchestration

// True iff any primary model returned zero triples.
bool should_invoke_tiebreaker(const std::vector<size_t>& per_model_counts);

struct Diagnostic {
  std::string model;
  std::string kind;  // timeout | transport | cache-miss | parse-failure | repaired | dropped
  std::string detail;
};

struct ExtractionResult {
  std::string pmid;
  std::map<std::string, std::vector<RawTriple>> per_model;
  // Models that returned a response for this document (the consensus denominator).
  std::vector<std::string> models_processed;
  std::vector<Diagnostic> diagnostics;
  bool tiebreaker_invoked = false;
  bool second_pass_run = false;
};

struct ExtractionProviders {
  std::vector<std::shared_ptr<ModelProvider>> primary;
  std::shared_ptr<ModelProvider> tiebreaker;
  double temperature = 0.0;
  double timeout_s = 120.0;
};

ExtractionResult extract_document(const SourceDocument& doc, const DiseaseProfile& profile,
                                  const ExtractionProviders& providers,
                                  const PipelineConfig& config);

}  // namespace chronokg
