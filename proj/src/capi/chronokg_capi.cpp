#include "chronokg/chronokg.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>

#include "app/app.hpp"
#include "benchmark/benchmark.hpp"
#include "common/error.hpp"
#include "common/text.hpp"
#include "consensus/consensus.hpp"
#include "core/json_io.hpp"
#include "quality/quality.hpp"
#include "store/store.hpp"

struct ckg_context {
  chronokg::AppConfig cfg;
};

struct ckg_store {
  chronokg::KgStore kg;
};

namespace {

using chronokg::ErrorKind;
using nlohmann::json;
using nlohmann::ordered_json;

thread_local std::string g_last_error;

ckg_status status_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::kDomain: return CKG_ERR_DOMAIN;
    case ErrorKind::kNotFound: return CKG_ERR_NOT_FOUND;
    case ErrorKind::kTransport: return CKG_ERR_TRANSPORT;
    case ErrorKind::kTimeout: return CKG_ERR_TIMEOUT;
    case ErrorKind::kParse: return CKG_ERR_PARSE;
    case ErrorKind::kConfig: return CKG_ERR_CONFIG;
    case ErrorKind::kCacheMiss: return CKG_ERR_CACHE_MISS;
    case ErrorKind::kIo: return CKG_ERR_IO;
  }
  return CKG_ERR_INTERNAL;
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

ckg_status bad_arg(const char* what) {
  g_last_error = std::string("invalid argument: ") + what;
  return CKG_ERR_INVALID_ARGUMENT;
}

// Runs fn and turns any exception into a status plus the thread's last error.
template <typename F>
ckg_status guarded(F&& fn) {
  try {
    fn();
    g_last_error.clear();
    return CKG_OK;
  } catch (const chronokg::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const json::exception& e) {
    g_last_error = e.what();
    return CKG_ERR_PARSE;
  } catch (const std::filesystem::filesystem_error& e) {
    g_last_error = e.what();
    return CKG_ERR_IO;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CKG_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return CKG_ERR_INTERNAL;
  }
}

}  // namespace

extern "C" {

const char* ckg_version(void) { return "1.0.0"; }

const char* ckg_status_name(ckg_status status) {
  switch (status) {
    case CKG_OK: return "ok";
    case CKG_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case CKG_ERR_INTERNAL: return "internal";
    default: break;
  }
  if (status > CKG_OK && status < CKG_ERR_INVALID_ARGUMENT)
    return chronokg::error_kind_name(static_cast<ErrorKind>(status - 1));
  return "unknown";
}

const char* ckg_last_error(void) { return g_last_error.c_str(); }

void ckg_free_string(char* s) { std::free(s); }

ckg_status ckg_open(const char* config_path, ckg_context** out) {
  if (!out) return bad_arg("out is NULL");
  *out = nullptr;
  if (!config_path) return bad_arg("config_path is NULL");
  return guarded([&] { *out = new ckg_context{chronokg::load_config(config_path)}; });
}

void ckg_close(ckg_context* ctx) { delete ctx; }

ckg_status ckg_run(ckg_context* ctx, const char* command, const char* args_json, char** result_json) {
  if (!ctx || !command || !result_json) return bad_arg("ctx, command and result_json are required");
  *result_json = nullptr;
  return guarded([&] {
    json args = json::object();
    if (args_json && *args_json) {
      try {
        args = json::parse(args_json);
      } catch (const json::parse_error& e) {
        chronokg::fail(ErrorKind::kConfig, std::string("arguments are not valid JSON: ") + e.what());
      }
    }
    *result_json = dup(chronokg::run_command(command, ctx->cfg, args).dump());
  });
}

ckg_status ckg_command_names(char** result_json) {
  if (!result_json) return bad_arg("result_json is NULL");
  return guarded([&] { *result_json = dup(json(chronokg::command_names()).dump()); });
}

ckg_status ckg_edge_hash(const char* source_id, const char* relation, const char* target_id, const char* pmid,
                         char** out) {
  if (!source_id || !relation || !target_id || !pmid || !out) return bad_arg("NULL string");
  return guarded([&] { *out = dup(chronokg::edge_hash(source_id, relation, target_id, pmid)); });
}

ckg_status ckg_similarity_ratio(const char* a, const char* b, int* out) {
  if (!a || !b || !out) return bad_arg("NULL argument");
  return guarded([&] { *out = chronokg::similarity_ratio(a, b); });
}

ckg_status ckg_credibility(const double signals[6], const double* weights, double* out) {
  if (!signals || !out) return bad_arg("NULL argument");
  return guarded([&] {
    auto opt = [](double v) { return std::isnan(v) ? std::optional<double>() : std::optional<double>(v); };
    chronokg::CredibilitySignals s;
    s.journal_tier = opt(signals[0]);
    s.citation_velocity = opt(signals[1]);
    s.study_type_weight = std::isnan(signals[2]) ? 0 : signals[2];
    s.replication_signal = opt(signals[3]);
    s.retraction_check = opt(signals[4]);
    s.llm_consensus = std::isnan(signals[5]) ? 0 : signals[5];
    chronokg::CredibilityWeights w;
    if (weights) w = {weights[0], weights[1], weights[2], weights[3], weights[4], weights[5]};
    *out = chronokg::credibility_score(s, w);
  });
}

ckg_status ckg_calibrated_onset(const char* answer, double gold_min, double gold_max, int* parsed, int* correct) {
  if (!answer || !correct) return bad_arg("NULL argument");
  return guarded([&] {
    chronokg::AgeRange gold{gold_min, gold_max};
    chronokg::check_age_range(gold);
    auto p = chronokg::parse_answer_range(answer);
    if (parsed) *parsed = p ? 1 : 0;
    *correct = p && chronokg::calibrated_onset_score(*p, gold) ? 1 : 0;
  });
}

ckg_status ckg_validate_record(const char* record_json, char** normalized_json) {
  if (!record_json || !normalized_json) return bad_arg("NULL argument");
  *normalized_json = nullptr;
  return guarded([&] {
    auto t = chronokg::triple_from_json(json::parse(record_json));
    auto v = chronokg::temporal_violations(t.temporal);
    if (t.evidence.source_ids.empty()) v.push_back("missing-provenance");
    if (chronokg::text::utf8_length(t.evidence.evidence_text) > chronokg::kEvidenceTextCap)
      v.push_back("evidence-too-long");
    if (!v.empty()) chronokg::fail(ErrorKind::kDomain, "record violates: " + chronokg::text::join(v, ", "));
    *normalized_json = dup(chronokg::dump_line(chronokg::to_json(t)));
  });
}

ckg_status ckg_store_open(const char* path, ckg_store** out) {
  if (!out) return bad_arg("out is NULL");
  *out = nullptr;
  if (!path) return bad_arg("path is NULL");
  return guarded([&] { *out = new ckg_store{chronokg::KgStore::open(path)}; });
}

void ckg_store_close(ckg_store* store) { delete store; }

ckg_status ckg_store_disease_count(const ckg_store* store, size_t* out) {
  if (!store || !out) return bad_arg("NULL argument");
  *out = store->kg.diseases().size();
  g_last_error.clear();
  return CKG_OK;
}

ckg_status ckg_store_query_onset(const ckg_store* store, const char* disease, const char* phenotype,
                                 char** result_json) {
  if (!store || !disease || !phenotype || !result_json) return bad_arg("NULL argument");
  *result_json = nullptr;
  return guarded([&] {
    auto a = store->kg.query_onset(disease, phenotype);
    ordered_json j = ordered_json::object();
    j["onset_min"] = a.range.min;
    j["onset_max"] = a.range.max;
    j["pmids"] = a.pmids;
    j["fallback"] = a.fallback;
    j["matched_phenotype"] = a.matched_phenotype;
    *result_json = dup(j.dump());
  });
}

ckg_status ckg_store_query_stage(const ckg_store* store, const char* disease, const char* stage,
                                 char** result_json) {
  if (!store || !disease || !stage || !result_json) return bad_arg("NULL argument");
  *result_json = nullptr;
  return guarded([&] { *result_json = dup(json(store->kg.query_stage(disease, stage)).dump()); });
}

ckg_status ckg_store_profile(const ckg_store* store, const char* disease, char** result_json) {
  if (!store || !disease || !result_json) return bad_arg("NULL argument");
  *result_json = nullptr;
  return guarded([&] { *result_json = dup(chronokg::to_json(store->kg.temporal_profile(disease)).dump()); });
}

}  // extern "C"
