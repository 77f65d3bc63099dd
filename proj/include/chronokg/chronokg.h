#ifndef CHRONOKG_CHRONOKG_H
#define CHRONOKG_CHRONOKG_H

#include <stddef.h>

#if defined(_WIN32)
#  ifdef CHRONOKG_BUILDING_LIBRARY
#    define CHRONOKG_API __declspec(dllexport)
#  else
#    define CHRONOKG_API __declspec(dllimport)
#  endif
#else
#  define CHRONOKG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ckg_status {
  CKG_OK = 0,
  CKG_ERR_DOMAIN = 1,
  CKG_ERR_NOT_FOUND = 2,
  CKG_ERR_TRANSPORT = 3,
  CKG_ERR_TIMEOUT = 4,
  CKG_ERR_PARSE = 5,
  CKG_ERR_CONFIG = 6,
  CKG_ERR_CACHE_MISS = 7,
  CKG_ERR_IO = 8,
  CKG_ERR_INVALID_ARGUMENT = 9,
  CKG_ERR_INTERNAL = 10
} ckg_status;

typedef struct ckg_context ckg_context;
typedef struct ckg_store ckg_store;

CHRONOKG_API const char* ckg_version(void);
/* Short kebab-case name: "domain", "not-found", "config", ... */
CHRONOKG_API const char* ckg_status_name(ckg_status status);
/* Message of the last failed call on this thread; empty after a success. */
CHRONOKG_API const char* ckg_last_error(void);
/* Every char* handed out by the library is released with this. */
CHRONOKG_API void ckg_free_string(char* s);

/* Loads a YAML config. On failure *out is NULL. */
CHRONOKG_API ckg_status ckg_open(const char* config_path, ckg_context** out);
CHRONOKG_API void ckg_close(ckg_context* ctx);
/* Runs a subcommand such as "bench gen" with flags as a JSON object
   (NULL for none). *result_json receives the summary. */
CHRONOKG_API ckg_status ckg_run(ckg_context* ctx, const char* command, const char* args_json,
                                char** result_json);
/* JSON array of subcommand names. */
CHRONOKG_API ckg_status ckg_command_names(char** result_json);

/* 12 hex characters identifying (source, relation, target, primary PMID). */
CHRONOKG_API ckg_status ckg_edge_hash(const char* source_id, const char* relation, const char* target_id,
                                      const char* pmid, char** out);
/* Indel similarity in percent. */
CHRONOKG_API ckg_status ckg_similarity_ratio(const char* a, const char* b, int* out);
/* signals: journal tier, citation velocity, study-type weight, replication,
   retraction check, model consensus; NaN marks an absent signal.
   weights: six values in the same order, or NULL for the defaults. */
CHRONOKG_API ckg_status ckg_credibility(const double signals[6], const double* weights, double* out);
/* Parses a free-text age answer and scores it against a gold range. A
   parse failure is not an error: *correct is 0 and *parsed is 0. */
CHRONOKG_API ckg_status ckg_calibrated_onset(const char* answer, double gold_min, double gold_max,
                                             int* parsed, int* correct);
/* Checks one validated-tier record and returns it re-serialized. */
CHRONOKG_API ckg_status ckg_validate_record(const char* record_json, char** normalized_json);

/* A validated JSONL file or a store root. */
CHRONOKG_API ckg_status ckg_store_open(const char* path, ckg_store** out);
CHRONOKG_API void ckg_store_close(ckg_store* store);
CHRONOKG_API ckg_status ckg_store_disease_count(const ckg_store* store, size_t* out);
CHRONOKG_API ckg_status ckg_store_query_onset(const ckg_store* store, const char* disease, const char* phenotype,
                                              char** result_json);
CHRONOKG_API ckg_status ckg_store_query_stage(const ckg_store* store, const char* disease, const char* stage,
                                              char** result_json);
CHRONOKG_API ckg_status ckg_store_profile(const ckg_store* store, const char* disease, char** result_json);

#ifdef __cplusplus
}
#endif

#endif
