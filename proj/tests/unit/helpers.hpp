#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "consensus/consensus.hpp"
#include "core/model.hpp"
#include "extraction/extraction.hpp"

namespace testing {

using namespace chronokg;

inline RawTriple raw(const std::string& model, const std::string& subject, const std::string& object,
                     const std::string& relation = "disease_phenotype_positive",
                     ModelConfidence conf = ModelConfidence::kMedium, const std::string& pmid = "100") {
  RawTriple t;
  t.model = model;
  t.subject = subject;
  t.subject_type = "disease";
  t.relation = relation;
  t.object = object;
  t.object_type = "phenotype";
  t.confidence = conf;
  t.evidence_text = subject + " with " + object;
  t.pmid = pmid;
  return t;
}

inline TemporalTriple onset_triple(const std::string& disease, const std::string& phenotype, double lo, double hi,
                                   const std::string& edge, const std::string& pmid = "PMID:1") {
  TemporalTriple t;
  t.edge_id = edge;
  t.source_id = "MONDO:1";
  t.source_type = "disease";
  t.source_name = disease;
  t.relation = "disease_phenotype_positive";
  t.target_id = "HP:" + phenotype;
  t.target_type = "effect/phenotype";
  t.target_name = phenotype;
  t.temporal.onset_age_min = lo;
  t.temporal.onset_age_max = hi;
  t.evidence.source_ids = {pmid};
  t.evidence.evidence_text = phenotype + " at " + std::to_string(lo) + " years";
  t.disease_profile_id = "MONDO:1";
  return t;
}

// Scratch directory removed on scope exit.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() / ("ckg_test_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

inline std::filesystem::path fixtures() { return CHRONOKG_FIXTURES; }

}  // namespace testing
