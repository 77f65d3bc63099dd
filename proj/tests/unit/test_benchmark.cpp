#include <doctest.h>

#include <fstream>

#include "benchmark/benchmark.hpp"
#include "helpers.hpp"

using namespace chronokg;
using testing::fixtures;
using testing::onset_triple;

namespace {

GoldRecord gold(const std::string& name, AgeRange r, GoldSource src = GoldSource::kOrphadata) {
  return {src, name, normalize_disease_name(name), r};
}

std::vector<TemporalTriple> dmd_course() {
  return {onset_triple("Duchenne muscular dystrophy", "diagnosis", 3, 5, "o1", "PMID:21"),
          onset_triple("Duchenne muscular dystrophy", "loss of ambulation", 10, 12, "o2", "PMID:22"),
          onset_triple("Duchenne muscular dystrophy", "cardiomyopathy", 15, 20, "o3", "PMID:23")};
}

struct FixtureSources {
  std::vector<GoldRecord> orpha = load_orphadata(fixtures() / "gold" / "orphadata.tsv");
  std::vector<GoldRecord> hpoa = load_hpoa(fixtures() / "gold" / "hpoa.tsv");
  std::vector<PhenopacketCase> cases = load_phenopackets(fixtures() / "phenopackets");
  KgStore kg{dmd_course()};
  BenchmarkSources sources() const { return {orpha, hpoa, cases, &kg, nullptr}; }
};

BenchmarkQuestion onset_question(AgeRange r) {
  BenchmarkQuestion q;
  q.id = "q";
  q.task_type = TaskType::kPhenopacketsOnset;
  q.gold.range = r;
  return q;
}

}  // namespace

TEST_CASE("window question with a probe outside the gold range") {
  auto q = make_window_question("w1", gold("Angelman syndrome", {0, 2}), 8);
  CHECK(q.gold.label == "No");
  CHECK(q.prompt.find("age 8 years") != std::string::npos);
  CHECK(q.prompt.find("Angelman syndrome") != std::string::npos);
  CHECK(score_answer(q, "No").correct());
  CHECK(score_answer(q, "no, onset is usually in infancy").correct());
  CHECK_FALSE(score_answer(q, "Yes").correct());
  CHECK(make_window_question("w2", gold("Angelman syndrome", {0, 2}), 1).gold.label == "Yes");
}

TEST_CASE("answer range grammar") {
  auto p = [](const std::string& s) { return parse_answer_range(s); };
  CHECK(p("2-5 years")->range == AgeRange{2, 5});
  CHECK(p("between 3 and 7")->range == AgeRange{3, 7});
  CHECK(p("10 to 20 years")->range == AgeRange{10, 20});
  CHECK(p("at 6 months")->range.max == doctest::Approx(0.5));
  CHECK(p("6-18 months")->range.min == doctest::Approx(0.5));
  CHECK(p("at 4")->range == AgeRange{4, 4});
  CHECK(p("9–3 years")->range == AgeRange{3, 9});
  auto k = p("onset in infancy");
  REQUIRE(k);
  CHECK(k->from_keyword);
  CHECK_FALSE(p("no idea").has_value());
}

TEST_CASE("calibrated onset scoring") {
  CHECK(score_answer(onset_question({0, 2.7}), "0-3 years").correct());
  CHECK_FALSE(score_answer(onset_question({0, 2.7}), "30-40 years").correct());
  CHECK(score_answer(onset_question({0, 2.7}), "gibberish").outcome == ScoreOutcome::kIncorrect);
  // a broad era keyword may not win by spanning everything
  CHECK_FALSE(score_answer(onset_question({0, 2.7}), "adult").correct());
}

TEST_CASE("tolerance is half the gold width clamped to [0.5, 2]") {
  const std::vector<std::pair<double, double>> sweep = {{0, 0.5}, {1, 0.5}, {3, 1.5}, {4, 2}, {10, 2}};
  for (auto [w, tol] : sweep) {
    AgeRange g{10, 10 + w};
    CHECK(onset_tolerance(g) == tol);
    // just inside and just outside the expanded band
    CHECK(calibrated_onset_score(AgeRange{g.max + tol - 1e-9, g.max + tol + 5}, g));
    CHECK_FALSE(calibrated_onset_score(AgeRange{g.max + tol + 1e-6, g.max + tol + 5}, g));
    CHECK(calibrated_onset_score(AgeRange{0, g.min - tol}, g));
    CHECK_FALSE(calibrated_onset_score(AgeRange{0, g.min - tol - 1e-6}, g));
  }
}

TEST_CASE("option questions take letters or option text") {
  BenchmarkQuestion q;
  q.task_type = TaskType::kTemporalDifferential;
  q.options = std::vector<std::string>{"Rett syndrome", "Huntington disease", "Krabbe disease", "Pompe disease"};
  q.gold.label = "C";
  CHECK(score_answer(q, "C").correct());
  CHECK(score_answer(q, "(C) Krabbe disease").correct());
  CHECK(score_answer(q, "Krabbe disease").correct());
  CHECK_FALSE(score_answer(q, "A").correct());
  CHECK(score_answer(q, "").outcome == ScoreOutcome::kUnparseable);
  CHECK(score_answer(q, "I am not sure").outcome == ScoreOutcome::kUnparseable);
}

TEST_CASE("ordering and stage answers") {
  BenchmarkQuestion q;
  q.task_type = TaskType::kPhenotypeOrdering;
  q.gold.items = {"diagnosis", "loss of ambulation", "cardiomyopathy"};
  CHECK(score_answer(q, "diagnosis -> loss of ambulation -> cardiomyopathy").correct());
  CHECK(score_answer(q, "1. Diagnosis\n2. Loss of ambulation\n3. Cardiomyopathy").correct());
  CHECK_FALSE(score_answer(q, "loss of ambulation, diagnosis, cardiomyopathy").correct());

  BenchmarkQuestion s;
  s.task_type = TaskType::kStageConditional;
  s.gold.items = {"scoliosis", "cardiomyopathy"};
  CHECK(score_answer(s, "Scoliosis and cardiomyopathy").correct());
  CHECK_FALSE(score_answer(s, "scoliosis only").correct());
}

TEST_CASE("qc removes boundary probes and ambiguous options") {
  auto boundary = make_window_question("w", gold("Rett syndrome", {1, 3}), 3);
  auto fine = make_window_question("v", gold("Rett syndrome", {1, 3}), 9);
  BenchmarkQuestion diff;
  diff.id = "d";
  diff.task_type = TaskType::kTemporalDifferential;
  diff.prompt = "Which disease typically begins in infancy?";
  diff.options = std::vector<std::string>{"A1", "B1", "C1", "D1"};
  diff.gold.label = "A";
  diff.params.era = "infancy";
  diff.params.option_ranges = {AgeRange{0, 1}, AgeRange{0.1, 0.9}, AgeRange{30, 40}, AgeRange{60, 70}};
  auto dup = fine;
  dup.id = "v2";
  auto out = qc_questions({boundary, fine, diff, dup});
  REQUIRE(out.kept.size() == 1);
  CHECK(out.kept[0].id == "v");
  REQUIRE(out.removed.size() == 3);
  CHECK(out.removed[0].reason == "boundary-probe");
  CHECK(out.removed[1].reason == "ambiguous-options");
  CHECK(out.removed[2].reason == "duplicate-question");
}

TEST_CASE("generation is deterministic and golds trace back to sources") {
  FixtureSources fx;
  auto src = fx.sources();
  std::map<TaskType, size_t> counts = {{TaskType::kTemporalWindow, 20},
                                       {TaskType::kTemporalDifferential, 10},
                                       {TaskType::kCrossDiseaseComparison, 10},
                                       {TaskType::kPhenopacketsOnset, 5},
                                       {TaskType::kPhenotypeOrdering, 1}};
  auto a = generate_benchmark(counts, src, 42);
  auto b = generate_benchmark(counts, src, 42);
  REQUIRE(a.questions.size() == b.questions.size());
  for (size_t i = 0; i < a.questions.size(); ++i) CHECK(to_json(a.questions[i]) == to_json(b.questions[i]));
  auto c = generate_benchmark(counts, src, 43);
  bool differs = c.questions.size() != a.questions.size();
  for (size_t i = 0; !differs && i < a.questions.size(); ++i)
    differs = to_json(a.questions[i]) != to_json(c.questions[i]);
  CHECK(differs);

  CHECK(verify_tier1(a.questions, src).mismatches.empty());
  for (const auto& q : a.questions) {
    CHECK(question_from_json(to_json(q)).prompt == q.prompt);
    if (q.task_type == TaskType::kTemporalWindow) {
      bool inside = *q.params.probe_age >= q.gold.range->min && *q.params.probe_age <= q.gold.range->max;
      CHECK(q.gold.label == (inside ? "Yes" : "No"));
    }
    if (q.task_type == TaskType::kPhenotypeOrdering)
      CHECK(q.gold.items == std::vector<std::string>{"diagnosis", "loss of ambulation", "cardiomyopathy"});
  }

  // a corrupted gold is caught by re-derivation
  auto broken = a.questions;
  for (auto& q : broken)
    if (q.task_type == TaskType::kTemporalWindow) {
      q.gold.label = q.gold.label == "Yes" ? "No" : "Yes";
      break;
    }
  CHECK(verify_tier1(broken, src).mismatches.size() == 1);
}

TEST_CASE("benchmark files round-trip") {
  FixtureSources fx;
  auto qs = generate_questions(TaskType::kTemporalWindow, fx.sources(), 5, 1).questions;
  testing::TempDir tmp;
  write_benchmark(qs, tmp.path);
  auto back = load_questions(tmp.path / "benchmark.json");
  REQUIRE(back.size() == qs.size());
  for (size_t i = 0; i < qs.size(); ++i) CHECK(to_json(back[i]) == to_json(qs[i]));
  CHECK(load_questions(tmp.path / "shards" / "temporal_window.jsonl").size() == qs.size());
}

TEST_CASE("benchmark scoring counts missing answers as incorrect") {
  auto q1 = make_window_question("a", gold("X", {0, 2}), 8);
  auto q2 = make_window_question("b", gold("Y", {0, 2}), 1);
  auto s = score_benchmark({q1, q2}, {{"a", "No"}});
  CHECK(s.overall.n == 2);
  CHECK(s.overall.correct == 1);
  CHECK(s.missing == std::vector<std::string>{"b"});
  CHECK(s.per_type[TaskType::kTemporalWindow].accuracy() == 0.5);
}
