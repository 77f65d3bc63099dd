#include <doctest.h>

#include <fstream>

#include "common/error.hpp"
#include "helpers.hpp"
#include "store/store.hpp"

using namespace chronokg;
using testing::onset_triple;
using testing::TempDir;

namespace {

std::vector<TemporalTriple> dmd_triples() {
  std::vector<TemporalTriple> v = {
      onset_triple("Duchenne muscular dystrophy", "walking delay", 2, 5, "a1", "PMID:11"),
      onset_triple("Duchenne muscular dystrophy", "Gowers sign", 5, 8, "a2", "PMID:12"),
      onset_triple("Duchenne muscular dystrophy", "loss of ambulation", 8, 12, "a3", "PMID:13"),
      onset_triple("Duchenne muscular dystrophy", "cardiomyopathy", 10, 18, "a4", "PMID:14"),
      onset_triple("Duchenne muscular dystrophy", "cardiomyopathy", 12, 20, "a5", "PMID:15"),
  };
  for (auto& t : v) {
    t.source_id = "MONDO:0010679";
    t.disease_profile_id = "MONDO:0010679";
  }
  v[2].temporal.progression_stage = "non-ambulatory";
  v[1].temporal.progression_stage = "ambulatory";
  TemporalTriple gene = v[0];
  gene.edge_id = "g1";
  gene.relation = "disease_protein";
  gene.target_name = "DMD";
  gene.temporal = {};
  v.push_back(gene);
  return v;
}

}  // namespace

TEST_CASE("validated tier round-trips through plain and gzip files") {
  TempDir tmp;
  auto triples = dmd_triples();
  for (auto name : {"validated.jsonl", "validated.jsonl.gz"}) {
    auto path = tmp.path / name;
    auto info = write_records(path, triples);
    CHECK(info.record_count == triples.size());
    auto back = load_validated(path);
    CHECK(back.errors.empty());
    CHECK(back.records == triples);
  }
  // the same input always produces the same bytes
  write_records(tmp.path / "again.jsonl.gz", triples);
  std::ifstream a(tmp.path / "validated.jsonl.gz", std::ios::binary), b(tmp.path / "again.jsonl.gz", std::ios::binary);
  std::string sa((std::istreambuf_iterator<char>(a)), {}), sb((std::istreambuf_iterator<char>(b)), {});
  CHECK(sa == sb);
}

TEST_CASE("appends add lines without rewriting earlier ones") {
  TempDir tmp;
  auto triples = dmd_triples();
  for (auto name : {"t.jsonl", "t.jsonl.gz"}) {
    auto path = tmp.path / name;
    append_records(path, std::vector<TemporalTriple>(triples.begin(), triples.begin() + 2));
    append_records(path, std::vector<TemporalTriple>(triples.begin() + 2, triples.end()));
    CHECK(load_validated(path).records == triples);
  }
}

TEST_CASE("malformed lines are fatal unless skipping is requested") {
  TempDir tmp;
  auto path = tmp.path / "bad.jsonl";
  auto lines = record_lines(dmd_triples());
  lines.insert(lines.begin() + 1, "{not json");
  write_lines(path, lines);
  CHECK_THROWS_AS(load_validated(path), Error);
  auto loaded = load_validated(path, {true});
  CHECK(loaded.records.size() == dmd_triples().size());
  REQUIRE(loaded.errors.size() == 1);
  CHECK(loaded.errors[0].line == 2);
}

TEST_CASE("onset aggregation") {
  auto agg = aggregate_onset(dmd_triples());
  REQUIRE(agg.median_range);
  CHECK(*agg.median_range == AgeRange{8, 12});
  CHECK(*agg.pooled_range == AgeRange{2, 20});
  REQUIRE(agg.per_phenotype.size() == 4);
  CHECK(agg.per_phenotype.front().key == "walking delay");
  CHECK(agg.per_phenotype.back().key == "cardiomyopathy");
  CHECK(agg.per_phenotype.back().median_range == AgeRange{11, 19});
  CHECK(*agg.phenotype_span == AgeRange{2, 19});
  CHECK(median({3, 1, 2}) == 2);
  CHECK(median({4, 1, 2, 3}) == 2.5);
  CHECK(aggregate_onset({}).empty());
}

TEST_CASE("store queries") {
  KgStore kg(dmd_triples());
  CHECK(kg.diseases() == std::vector<std::string>{"MONDO:0010679"});
  CHECK(kg.has_disease("Duchenne muscular dystrophy"));
  CHECK(kg.has_disease("MONDO:0010679"));
  CHECK_FALSE(kg.has_disease("Becker muscular dystrophy"));
  CHECK_THROWS_AS(kg.triples_for("nothing"), Error);

  auto a = kg.query_onset("Duchenne muscular dystrophy", "Cardiomyopathy");
  CHECK(a.range == AgeRange{11, 19});
  CHECK_FALSE(a.fallback);
  CHECK(a.pmids == std::vector<std::string>{"PMID:14", "PMID:15"});
  auto fuzzy = kg.query_onset("MONDO:0010679", "cardiomyopathies");
  CHECK(fuzzy.matched_phenotype == "cardiomyopathy");
  auto fb = kg.query_onset("MONDO:0010679", "hearing loss");
  CHECK(fb.fallback);
  CHECK(fb.range == AgeRange{8, 12});

  CHECK(kg.query_stage("Duchenne muscular dystrophy", "non-ambulatory") ==
        std::vector<std::string>{"loss of ambulation"});
  CHECK(kg.query_stage("Duchenne muscular dystrophy", "respiratory").empty());

  auto prof = kg.temporal_profile("MONDO:0010679");
  // phenotype edges only, grouped by normalized name and ordered by onset
  REQUIRE(prof.entries.size() == 4);
  CHECK(prof.entries.front().phenotype == "walking delay");
  CHECK(prof.entries.back().phenotype == "cardiomyopathy");
  CHECK(*prof.entries.back().onset_min == 11);
  CHECK(prof.entries.back().pmids.size() == 2);
}

TEST_CASE("store opens a root directory or a file") {
  TempDir tmp;
  StoreLayout layout{tmp.path};
  write_records(layout.flat(Tier::kValidated), dmd_triples());
  CHECK(KgStore::open(tmp.path).triples().size() == 6);
  CHECK(KgStore::open(layout.flat(Tier::kValidated)).triples().size() == 6);
  CHECK(layout.per_disease(Tier::kRaw, "MONDO:0010679") == tmp.path / "diseases" / "MONDO_0010679" / "raw.jsonl.gz");
  CHECK_THROWS_AS(KgStore::open(tmp.path / "missing"), Error);
}
