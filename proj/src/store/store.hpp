#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "consensus/consensus.hpp"
#include "core/model.hpp"
#include "extraction/extraction.hpp"

namespace chronokg {

enum class Tier { kRaw, kConsensus, kValidated };
std::string_view to_string(Tier t);
Tier parse_tier(std::string_view s);

struct TierFile {
  Tier tier = Tier::kValidated;
  std::filesystem::path path;
  size_t record_count = 0;
  bool compressed = false;
};

nlohmann::ordered_json to_json(const ConsensusTriple& c);
ConsensusTriple consensus_from_json(const nlohmann::json& j);

struct LoadError {
  size_t line = 0;
  std::string message;
};

template <typename T>
struct Loaded {
  std::vector<T> records;
  std::vector<LoadError> errors;
};

struct LoadOptions {
  // Skip malformed lines (recording them) instead of throwing kParse.
  bool skip_malformed = false;
};

// One JSON record per line. Appends never rewrite existing lines; files
// ending in .gz are gzip members appended one per call.
void append_lines(const std::filesystem::path& path, const std::vector<std::string>& lines);
std::vector<std::string> read_lines(const std::filesystem::path& path);
// Atomic whole-file replacement with the same line format.
void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines);

std::string validated_line(const TemporalTriple& t);

TierFile append_records(const std::filesystem::path& path, const std::vector<TemporalTriple>& records);
TierFile append_records(const std::filesystem::path& path, const std::vector<ConsensusTriple>& records);
TierFile append_records(const std::filesystem::path& path, const std::vector<RawTriple>& records);

std::vector<std::string> record_lines(const std::vector<TemporalTriple>& records);
std::vector<std::string> record_lines(const std::vector<ConsensusTriple>& records);
std::vector<std::string> record_lines(const std::vector<RawTriple>& records);

TierFile write_records(const std::filesystem::path& path, const std::vector<TemporalTriple>& records);
TierFile write_records(const std::filesystem::path& path, const std::vector<ConsensusTriple>& records);
TierFile write_records(const std::filesystem::path& path, const std::vector<RawTriple>& records);

Loaded<TemporalTriple> load_validated(const std::filesystem::path& path, LoadOptions options = {});
Loaded<ConsensusTriple> load_consensus(const std::filesystem::path& path, LoadOptions options = {});
Loaded<RawTriple> load_raw(const std::filesystem::path& path, LoadOptions options = {});

// ---------------------------------------------------------------------------
// Aggregation and queries

struct PhenotypeOnset {
  std::string phenotype;  // display name of the first contributing triple
  std::string key;        // normalized name
  AgeRange median_range;
  std::vector<std::string> pmids;
  size_t triples = 0;
};

struct OnsetAggregate {
  std::optional<AgeRange> median_range;  // (median of mins, median of maxs)
  std::optional<AgeRange> pooled_range;  // (min of mins, max of maxs)
  // (min, max) over the per-phenotype median ranges.
  std::optional<AgeRange> phenotype_span;
  std::vector<PhenotypeOnset> per_phenotype;  // sorted by onset min, then name
  bool empty() const { return !median_range.has_value(); }
};

double median(std::vector<double> v);

bool is_phenotype_edge(const TemporalTriple& t);

// Considers onset-bearing phenotype edges only.
OnsetAggregate aggregate_onset(const std::vector<TemporalTriple>& triples,
                               const std::optional<std::string>& phenotype = std::nullopt);

struct OnsetAnswer {
  AgeRange range;
  std::vector<std::string> pmids;
  bool fallback = false;  // disease-level median used
  std::string matched_phenotype;
};

struct ProfileEntry {
  std::string phenotype;
  std::optional<double> onset_min;
  std::optional<double> onset_max;
  std::optional<std::string> stage;
  std::optional<std::string> milestone;
  std::vector<std::string> pmids;
};

struct TemporalProfile {
  std::string disease_id;
  std::string disease_name;
  std::vector<ProfileEntry> entries;  // onset rows by onset min then name; onset-less rows last
};

nlohmann::ordered_json to_json(const TemporalProfile& p);

class KgStore {
 public:
  KgStore() = default;
  explicit KgStore(std::vector<TemporalTriple> triples);
  // A validated JSONL file, or a store root holding validated.jsonl.
  static KgStore open(const std::filesystem::path& path);

  const std::vector<TemporalTriple>& triples() const { return triples_; }
  std::vector<std::string> diseases() const;
  bool has_disease(const std::string& disease) const;
  // Accepts the profile CURIE or the disease name; throws kNotFound.
  const std::vector<TemporalTriple>& triples_for(const std::string& disease) const;
  std::string disease_name(const std::string& disease) const;

  OnsetAnswer query_onset(const std::string& disease, const std::string& phenotype,
                          int fuzzy_threshold = 80) const;
  std::vector<std::string> query_stage(const std::string& disease, const std::string& stage) const;
  TemporalProfile temporal_profile(const std::string& disease) const;

 private:
  const std::string* resolve(const std::string& disease) const;

  std::vector<TemporalTriple> triples_;
  std::map<std::string, std::vector<TemporalTriple>> by_disease_;
  std::map<std::string, std::string> name_to_id_;
  std::map<std::string, std::string> id_to_name_;
};

// Store layout: <root>/{raw.jsonl.gz, consensus.jsonl.gz, validated.jsonl}
// plus <root>/diseases/<curie slug>/ with the same three files. The flat
// files are authoritative.
struct StoreLayout {
  std::filesystem::path root;
  std::filesystem::path flat(Tier t) const;
  std::filesystem::path per_disease(Tier t, const std::string& disease_id) const;
};

}  // namespace chronokg
