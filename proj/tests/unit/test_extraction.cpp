#include <doctest.h>

#include <fstream>

#include "common/error.hpp"
#include "extraction/extraction.hpp"
#include "helpers.hpp"

using namespace chronokg;
using testing::fixtures;

namespace {

// Answers from a fixed script keyed on whether the prompt is the second pass.
class Scripted : public ModelProvider {
 public:
  Scripted(std::string name, std::string first, std::string second = "[]", std::optional<ErrorKind> err = {})
      : name_(std::move(name)), first_(std::move(first)), second_(std::move(second)), err_(err) {}
  const std::string& name() const override { return name_; }
  std::string complete(const std::string& prompt, double, double) override {
    ++calls;
    if (err_) fail(*err_, name_ + " failed");
    return prompt == first_prompt || first_prompt.empty() ? (first_prompt = prompt, first_) : second_;
  }
  int calls = 0;
  std::string first_prompt;

 private:
  std::string name_, first_, second_;
  std::optional<ErrorKind> err_;
};

const char* kOne = R"({"triples": [{"subject": "DMD", "subject_type": "disease", "relation": "disease_phenotype_positive",
  "object": "cardiomyopathy", "object_type": "phenotype", "confidence": "high",
  "evidence_text": "Cardiomyopathy develops by 18 years.", "pmid": "999",
  "temporal_context": {"onset_age_min": "10", "onset_age_max": 18}}]})";

const char* kStatic = R"([{"subject": "DMD", "subject_type": "disease", "relation": "disease_protein",
  "object": "dystrophin", "object_type": "gene", "evidence_text": "DMD encodes dystrophin."}])";

SourceDocument document() {
  SourceDocument d;
  d.pmid = "30000001";
  d.title = "Natural history";
  d.text = "Cardiomyopathy develops by 18 years.";
  d.publication_year = 2021;
  return d;
}

DiseaseProfile profile() {
  DiseaseProfile p;
  p.disease_id = "MONDO:0010679";
  p.name = "Duchenne muscular dystrophy";
  return p;
}

}  // namespace

TEST_CASE("strict parse of a well-formed response") {
  auto r = parse_extraction_response(kOne);
  CHECK_FALSE(r.parse_failed);
  CHECK_FALSE(r.repaired);
  REQUIRE(r.triples.size() == 1);
  CHECK(r.triples[0].temporal_context->onset() == AgeRange{10, 18});
  CHECK(r.triples[0].confidence == ModelConfidence::kHigh);
  CHECK(parse_extraction_response(kStatic).triples.size() == 1);
}

TEST_CASE("repair ladder recovers fenced, wrapped and trailing-comma output") {
  std::string base = kStatic;
  auto fenced = parse_extraction_response("```json\n" + base + "\n```");
  CHECK(fenced.repaired);
  CHECK(fenced.triples.size() == 1);
  auto prose = parse_extraction_response("Here are the triples:\n" + base + "\nHope this helps.");
  CHECK(prose.repaired);
  CHECK(prose.triples.size() == 1);
  auto comma = parse_extraction_response(R"({"triples": [{"subject": "a, b", "relation": "r", "object": "c",},]})");
  CHECK(comma.repaired);
  REQUIRE(comma.triples.size() == 1);
  CHECK(comma.triples[0].subject == "a, b");
  auto junk = parse_extraction_response("I could not find anything.");
  CHECK(junk.parse_failed);
  CHECK(junk.triples.empty());
  CHECK(parse_extraction_response(R"({"answer": 1})").parse_failed);
}

TEST_CASE("triples missing required fields are dropped and evidence is capped") {
  auto r = parse_extraction_response(
      R"([{"subject": "", "relation": "r", "object": "o"}, {"subject": "s", "relation": "r", "object": "o",
          "evidence_text": ")" + std::string(400, 'e') + R"("}])");
  REQUIRE(r.triples.size() == 1);
  CHECK(r.triples[0].evidence_text.size() == kEvidenceTextCap);
  CHECK_FALSE(r.diagnostics.empty());
}

TEST_CASE("tiebreaker rule") {
  CHECK(should_invoke_tiebreaker({0, 3}));
  CHECK(should_invoke_tiebreaker({2, 0, 1}));
  CHECK_FALSE(should_invoke_tiebreaker({1, 1}));
  CHECK_FALSE(should_invoke_tiebreaker({}));
}

TEST_CASE("orchestration stamps provenance and calls the tiebreaker on an empty model") {
  auto a = std::make_shared<Scripted>("a", kOne);
  auto b = std::make_shared<Scripted>("b", "[]");
  auto t = std::make_shared<Scripted>("t", kOne);
  ExtractionProviders providers{{a, b}, t, 0.0, 5};
  auto r = extract_document(document(), profile(), providers, PipelineConfig{});
  CHECK(r.tiebreaker_invoked);
  CHECK_FALSE(r.second_pass_run);
  CHECK(r.models_processed == std::vector<std::string>{"a", "b", "t"});
  REQUIRE(r.per_model["a"].size() == 1);
  const auto& tr = r.per_model["a"][0];
  CHECK(tr.model == "a");
  CHECK(tr.pmid == "30000001");  // the document's PMID, not the one the model wrote
  CHECK(tr.publication_year == 2021);
  CHECK(r.per_model["b"].empty());
}

TEST_CASE("no tiebreaker when every model contributes") {
  auto a = std::make_shared<Scripted>("a", kOne);
  auto b = std::make_shared<Scripted>("b", kOne);
  auto t = std::make_shared<Scripted>("t", kOne);
  auto r = extract_document(document(), profile(), {{a, b}, t, 0.0, 5}, PipelineConfig{});
  CHECK_FALSE(r.tiebreaker_invoked);
  CHECK(t->calls == 0);
}

TEST_CASE("second pass runs when the first yields too few temporal triples") {
  auto a = std::make_shared<Scripted>("a", kStatic, kOne);
  auto b = std::make_shared<Scripted>("b", kStatic, kOne);
  auto r = extract_document(document(), profile(), {{a, b}, nullptr, 0.0, 5}, PipelineConfig{});
  CHECK(r.second_pass_run);
  CHECK(a->calls == 2);
  CHECK(r.per_model["a"].size() == 2);
}

TEST_CASE("a failed model is recorded and left out of the denominator") {
  auto a = std::make_shared<Scripted>("a", kOne);
  auto b = std::make_shared<Scripted>("b", kOne);
  auto c = std::make_shared<Scripted>("c", kOne, "[]", ErrorKind::kTimeout);
  auto r = extract_document(document(), profile(), {{a, b, c}, nullptr, 0.0, 5}, PipelineConfig{});
  CHECK(r.models_processed == std::vector<std::string>{"a", "b"});
  bool timeout = false;
  for (const auto& d : r.diagnostics) timeout |= d.model == "c" && d.kind == "timeout";
  CHECK(timeout);

  auto miss = std::make_shared<Scripted>("m", kOne, "[]", ErrorKind::kCacheMiss);
  CHECK_THROWS_AS(extract_document(document(), profile(), {{a, miss}, nullptr, 0.0, 5}, PipelineConfig{}), Error);
  CHECK_THROWS_AS(extract_document(document(), profile(), {{a}, nullptr, 0.0, 5}, PipelineConfig{}), Error);
}

TEST_CASE("replay provider serves recorded responses and errors") {
  testing::TempDir tmp;
  write_replay_entry(tmp.path, "m", "prompt one", "response one");
  write_replay_entry(tmp.path, "m", "prompt two", "", std::string("timeout"));
  ReplayProvider replay("m", tmp.path);
  CHECK(replay.complete("prompt one", 0, 1) == "response one");
  try {
    replay.complete("prompt two", 0, 1);
    FAIL("expected a timeout");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kTimeout);
  }
  try {
    replay.complete("never recorded", 0, 1);
    FAIL("expected a cache miss");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kCacheMiss);
  }
  CHECK(prompt_key("x").size() == 64);
  CHECK(std::filesystem::exists(tmp.path / "m" / (prompt_key("prompt one") + ".json")));

  auto inner = std::make_shared<Scripted>("rec", "hello");
  RecordingProvider rec(inner, tmp.path);
  CHECK(rec.complete("p", 0, 1) == "hello");
  CHECK(ReplayProvider("rec", tmp.path).complete("p", 0, 1) == "hello");
}

TEST_CASE("mock extractor is deterministic and honors its drop options") {
  std::ifstream in(fixtures() / "documents" / "30000001.json");
  auto doc = document_from_json(nlohmann::json::parse(in));
  FixtureOntologySource onto(fixtures() / "ontology");
  auto prof = profile_disease("MONDO:0010679", onto);
  auto prompt = build_primary_prompt(prof, doc);
  CHECK(prompt.find(prof.name) != std::string::npos);
  CHECK(prompt.find(doc.text.substr(0, 40)) != std::string::npos);

  MockExtractionProvider m1("x"), m2("x");
  auto r1 = m1.complete(prompt, 0, 1);
  CHECK(r1 == m2.complete(prompt, 0, 1));
  auto full = parse_extraction_response(r1);
  CHECK_FALSE(full.parse_failed);
  CHECK_FALSE(full.triples.empty());
  MockExtractionProvider dropping("y", {2, 0, false});
  CHECK(parse_extraction_response(dropping.complete(prompt, 0, 1)).triples.size() < full.triples.size());
  MockExtractionProvider empty("z", {0, 0, true});
  CHECK(parse_extraction_response(empty.complete(prompt, 0, 1)).triples.empty());
}

TEST_CASE("raw triples round-trip") {
  auto t = testing::raw("a", "DMD", "cardiomyopathy");
  t.temporal_context = TemporalContext{};
  t.temporal_context->onset_age_min = 10;
  t.publication_year = 2020;
  CHECK(raw_triple_from_json(nlohmann::json::parse(to_json(t).dump())) == t);
}
