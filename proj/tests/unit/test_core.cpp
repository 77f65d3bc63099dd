#include <doctest.h>

#include <cmath>
#include <cstdio>

#include <openssl/sha.h>

#include "common/error.hpp"
#include "common/text.hpp"
#include "core/bins.hpp"
#include "core/config.hpp"
#include "core/json_io.hpp"
#include "helpers.hpp"

using namespace chronokg;
using nlohmann::json;

namespace {

std::string sha_prefix(const std::string& s) {
  unsigned char md[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(s.data()), s.size(), md);
  char hex[65];
  for (int i = 0; i < 32; ++i) std::snprintf(hex + 2 * i, 3, "%02x", md[i]);
  return std::string(hex, 12);
}

}  // namespace

TEST_CASE("edge hash is the 12-char prefix of sha256 over the tab-joined tuple") {
  auto h = edge_hash("MONDO:0010311", "disease_phenotype_positive", "HP:0001638", "38224155");
  CHECK(h.size() == 12);
  CHECK(h == sha_prefix("MONDO:0010311\tdisease_phenotype_positive\tHP:0001638\t38224155"));
  CHECK(h != edge_hash("MONDO:0010311", "disease_phenotype_positive", "HP:0001638", "1"));
  CHECK(edge_hash("a", "b", "c", "PMID:7") == edge_hash("a", "b", "c", "7"));
}

TEST_CASE("temporal context invariants") {
  TemporalContext t;
  CHECK(temporal_violations(t).empty());
  CHECK_FALSE(t.is_temporal());
  t.onset_age_min = 20;
  t.onset_age_max = 40;
  CHECK(temporal_violations(t).empty());
  CHECK(t.onset() == AgeRange{20, 40});
  t.onset_age_min = 50;
  CHECK_FALSE(temporal_violations(t).empty());
  t.onset_age_min = 130;
  t.onset_age_max = 140;
  CHECK_FALSE(temporal_violations(t).empty());
  TemporalContext s;
  s.progression_stage = "ambulatory";
  CHECK(s.is_temporal());
  CHECK_FALSE(s.has_onset());
  TemporalContext lone;
  lone.onset_age_max = 4;
  CHECK(lone.onset() == AgeRange{4, 4});
}

TEST_CASE("literature tiers follow the article-count thresholds") {
  CHECK(assign_tier(0) == LiteratureTier::kMinimal);
  CHECK(assign_tier(19) == LiteratureTier::kMinimal);
  CHECK(assign_tier(20) == LiteratureTier::kLight);
  CHECK(assign_tier(99) == LiteratureTier::kLight);
  CHECK(assign_tier(100) == LiteratureTier::kStandard);
}

TEST_CASE("pmid prefix handling") {
  CHECK(strip_pmid_prefix("PMID:123") == "123");
  CHECK(strip_pmid_prefix("123") == "123");
}

TEST_CASE("fine bins partition 0..120 and collapse onto coarse bins") {
  const auto& t = OnsetBinTable::standard();
  REQUIRE(t.fine_bins.size() == 8);
  CHECK(t.coarse_bins.size() == 5);
  CHECK(t.fine_bins.front().lo == 0);
  CHECK(t.fine_bins.back().hi == 120);
  for (size_t i = 1; i < t.fine_bins.size(); ++i) CHECK(t.fine_bins[i].lo == t.fine_bins[i - 1].hi);
  for (const auto& b : t.fine_bins) {
    auto mid = (b.lo + b.hi) / 2;
    CHECK(range_to_fine_bin({mid, mid}, t) == b.name);
  }
  CHECK(range_to_fine_bin({0, 0.05}, t) == "neonatal");
  CHECK(collapse_bin("neonatal", t) == "antenatal-infantile");
  CHECK(collapse_bin("young_adult", t) == "adult");
}

TEST_CASE("clinical era lookup") {
  const auto& t = OnsetBinTable::standard();
  CHECK(era_of_range({30, 60}, t) == "adulthood");
  CHECK(era_of_range({0, 1}, t) == "infancy");
  CHECK(era_of_range({70, 80}, t) == "older adulthood");
  CHECK(era_of_range({14, 16}, t) == "adolescence");
  auto juvenile = category_to_range("juvenile", t);
  REQUIRE(juvenile);
  CHECK(*juvenile == AgeRange{10, 18});
  CHECK(category_to_range("Neonatal", t).has_value());
  CHECK_FALSE(category_to_range("sometime", t).has_value());
  CHECK_THROWS_AS(check_age_range({5, 2}), Error);
  CHECK_THROWS_AS(check_age_range({-1, 2}), Error);
}

TEST_CASE("text helpers") {
  CHECK(text::collapse_ws("  a \t b\n c ") == "a b c");
  CHECK(text::utf8_length("a\xc3\xa9z") == 3);
  CHECK(text::utf8_truncate("\xc3\xa9\xc3\xa9\xc3\xa9", 2) == "\xc3\xa9\xc3\xa9");
  CHECK(text::format_number(2) == "2");
  CHECK(text::format_number(2.5) == "2.5");
  CHECK(text::format_number(0.08) == "0.08");
  CHECK(text::curie_slug("MONDO:0010679") == "MONDO_0010679");
  CHECK(text::parse_double("1.5") == 1.5);
  CHECK_FALSE(text::parse_double("1.5x").has_value());
}

namespace {

// The published example record, line breaks inside the evidence string folded to spaces.
const char* kExampleRecord = R"({"edge_id": "ef58608a735b",
 "source_id": "10311", "source_type": "disease",
 "source_name": "Becker muscular dystrophy",
 "relation": "disease_phenotype_positive",
 "target_id": "1638", "target_type": "phenotype",
 "target_name": "cardiomyopathy",
 "temporal": {"onset_age_min": 20, "onset_age_max": 40,
              "progression_stage": "adult",
              "milestone": "cardiac involvement",
              "temporal_qualifier": null,
              "discovery_date": null, "validity_start": null,
              "validity_end": null, "superseded_by": null,
              "temporal_resolution": "unknown",
              "duration": null, "treatment_start_age": null},
 "evidence": {"tier": 2,
              "source_ids": ["PMID:38224155"],
              "evidence_text": "Cardiac involvement in BMD often manifests in the third to fourth decade",
              "study_type": "review",
              "credibility_score": 0.395,
              "consensus_confidence": 1.0,
              "extraction_models": ["claude-haiku"],
              "extraction_method": "tier2_llm_consensus",
              "citation_count": null, "is_retracted": false},
 "conditions": null,
 "extraction_date": "2026-04-03",
 "pipeline_version": "1.0.0",
 "disease_profile_id": "MONDO:10311",
 "quality_grade": "A"})";

}  // namespace

TEST_CASE("released record round-trips field for field") {
  auto in = json::parse(kExampleRecord);
  auto t = triple_from_json(in);
  CHECK(t.temporal.onset() == AgeRange{20, 40});
  CHECK(t.temporal.progression_stage == "adult");
  CHECK(t.temporal.milestone == "cardiac involvement");
  CHECK(t.evidence.study_type == StudyType::kReview);
  CHECK(t.evidence.credibility_score == doctest::Approx(0.395));
  CHECK_FALSE(t.evidence.citation_count.has_value());
  CHECK(t.quality_grade == QualityGrade::kA);
  CHECK(temporal_violations(t.temporal).empty());

  auto out = to_json(t);
  // publication_year is absent from the released record and written as null.
  auto back = json::parse(out.dump());
  for (auto& [k, v] : in.items()) {
    if (v.is_object()) {
      for (auto& [k2, v2] : v.items()) CHECK_MESSAGE(back[k][k2] == v2, k << "." << k2);
    } else {
      CHECK_MESSAGE(back[k] == v, k);
    }
  }
  CHECK(triple_from_json(back) == t);
  // integral ages stay integers on the wire
  CHECK(dump_line(out).find("\"onset_age_min\": 20,") != std::string::npos);
}

TEST_CASE("record parsing names the offending field") {
  auto j = json::parse(kExampleRecord);
  j["temporal"]["onset_age_min"] = "twenty";
  try {
    triple_from_json(j);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParse);
    CHECK(std::string(e.what()).find("onset_age_min") != std::string::npos);
  }
}

TEST_CASE("config parsing resolves paths and validates invariants") {
  auto cfg = parse_config(R"(
pipeline:
  consensus_threshold: 2
  fuzzy_threshold: 85
paths:
  store: out/store
providers:
  primary:
    - name: a
      kind: mock
    - name: b
      kind: mock
diseases: [MONDO:1]
)",
                          "/base");
  CHECK(cfg.pipeline.fuzzy_threshold == 85);
  CHECK(cfg.path("store") == std::filesystem::path("/base/out/store"));
  CHECK(cfg.primary_models.size() == 2);
  CHECK(cfg.diseases == std::vector<std::string>{"MONDO:1"});
  CHECK_THROWS_AS(parse_config("pipeline:\n  consensus_threshold: 1\n", "/"), Error);
  CHECK_THROWS_AS(parse_config("pipeline: [\n", "/"), Error);
  PipelineConfig p;
  p.credibility_weights.study_type = 0.5;
  CHECK_THROWS_AS(p.validate(), Error);
  try {
    load_config("/nonexistent/config.yaml");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kConfig);
  }
}
