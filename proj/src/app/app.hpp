#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "acquisition/acquisition.hpp"
#include "core/config.hpp"
#include "store/store.hpp"

namespace chronokg {

struct RunManifest {
  std::string subcommand;
  std::string config_sha256;
  std::map<std::string, std::string> inputs;
  std::map<std::string, uint64_t> seeds;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
};

nlohmann::ordered_json to_json(const RunManifest& m);
std::string utc_timestamp();

// Per-disease working files live next to the tier files of that disease.
struct DiseaseDir {
  std::filesystem::path dir;
  std::filesystem::path profile() const { return dir / "profile.json"; }
  std::filesystem::path documents() const { return dir / "documents.jsonl"; }
  std::filesystem::path extraction() const { return dir / "extraction.json"; }
  std::filesystem::path rejections() const { return dir / "rejections.jsonl"; }
  std::filesystem::path conflicts() const { return dir / "conflicts.jsonl"; }
};

DiseaseDir disease_dir(const StoreLayout& layout, const std::string& disease_id);

// Stage runners. Each reads the previous stage's files from the disease dir,
// writes its own outputs atomically and records them in the manifest.
struct StageContext {
  const AppConfig& cfg;
  StoreLayout layout;
  RunManifest& manifest;
  // When set, providers are wrapped so every response is recorded here.
  std::filesystem::path record_to;
};

DiseaseProfile run_profile(StageContext& ctx, const std::string& disease_id);
std::vector<SourceDocument> run_harvest(StageContext& ctx, const std::string& disease_id);
size_t run_extract(StageContext& ctx, const std::string& disease_id);
size_t run_consensus(StageContext& ctx, const std::string& disease_id);
nlohmann::ordered_json run_qc(StageContext& ctx, const std::string& disease_id);
// Rebuilds the flat tier files from every per-disease directory, in slug order.
nlohmann::ordered_json run_merge(StageContext& ctx);

// Dispatches a subcommand ("bench gen", "store merge", ...). args carries the
// parsed flags. Returns the summary printed by --json; the manifest is
// written as run_manifest.<subcommand>.json in the output directory.
nlohmann::ordered_json run_command(const std::string& name, const AppConfig& cfg,
                                   const nlohmann::json& args);

const std::vector<std::string>& command_names();

}  // namespace chronokg
