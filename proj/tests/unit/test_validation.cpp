#include <doctest.h>

#include <algorithm>
#include <set>

#include "common/error.hpp"
#include "helpers.hpp"
#include "validation/validation.hpp"

using namespace chronokg;
using testing::onset_triple;

namespace {

JudgeVerdict v(const std::string& judge, Verdict verdict) { return {judge, verdict, "", {}}; }

std::vector<JudgeVerdict> item(Verdict a, Verdict b, Verdict c) { return {v("j1", a), v("j2", b), v("j3", c)}; }

}  // namespace

TEST_CASE("disease names normalize for matching") {
  CHECK(normalize_disease_name("Duchenne Muscular Dystrophy") == normalize_disease_name("duchenne muscular dystrophy"));
  CHECK(normalize_disease_name("Rett syndrome") == normalize_disease_name("Rett"));
  CHECK(normalize_disease_name("Spinal muscular atrophy type 1") == normalize_disease_name("spinal muscular atrophy"));
}

TEST_CASE("matching is one-to-one and reports ambiguity") {
  auto gold = parse_orphadata("disease\tonset\nRett syndrome\t1-3\nRett disease\t2-4\nKrabbe disease\tInfancy\n");
  auto m = match_diseases({"Rett", "Krabbe disease", "Unknown disorder X"}, gold);
  REQUIRE(m.matched.size() == 1);
  CHECK(m.matched[0].kg_name == "Krabbe disease");
  CHECK(std::count(m.ambiguous.begin(), m.ambiguous.end(), "Rett") == 1);
  CHECK(std::count(m.ambiguous.begin(), m.ambiguous.end(), "Rett syndrome") == 1);
  CHECK(m.unmatched == std::vector<std::string>{"Unknown disorder X"});
}

TEST_CASE("gold loaders") {
  auto orpha = parse_orphadata("Rett syndrome\t1-3\nMarfan syndrome\tChildhood\nPompe disease\tAll ages\nX\tAdult\nX\tChildhood\n");
  REQUIRE(orpha.size() == 4);
  CHECK(orpha[0].range == AgeRange{1, 3});
  CHECK(orpha[1].range == AgeRange{1, 11});
  CHECK(orpha[2].range == AgeRange{0, 120});
  CHECK(orpha[3].range == AgeRange{1, 65});  // rows of one disease merge into their cover
  CHECK(parse_orphadata("Bad\tsoon\n").empty());  // unrecognized labels carry no range

  auto hpoa = parse_hpoa(
      "database_id\tdisease_name\tqualifier\thpo_id\treference\tevidence\tonset\tfrequency\tsex\tmodifier\taspect\n"
      "OMIM:1\tTay-Sachs disease\t\tHP:0003593\tPMID:1\tTAS\t\t\t\t\tC\n"
      "OMIM:2\tHuntington disease\t\tHP:0001250\tPMID:1\tTAS\tHP:0003596\t\t\t\tP\n");
  REQUIRE(hpoa.size() == 2);
  CHECK(hpoa[0].range.max == doctest::Approx(1));
  CHECK(hpo_onset_range("HP:0003593").has_value());
  CHECK_FALSE(hpo_onset_range("HP:0001250").has_value());

  auto gr = parse_genereviews("disease\tonset_min\tonset_max\nFriedreich ataxia\t10\t15\n");
  REQUIRE(gr.size() == 1);
  CHECK(gr[0].range == AgeRange{10, 15});

  CHECK(iso_duration_years("P3Y6M") == doctest::Approx(3.5));
  CHECK(iso_duration_years("P6M") == doctest::Approx(0.5));
  CHECK_FALSE(iso_duration_years("three years").has_value());
}

TEST_CASE("phenopacket parsing and disease-level gold") {
  auto j = nlohmann::json::parse(R"({"id": "c1",
    "phenotypicFeatures": [{"type": {"id": "HP:0001252", "label": "Hypotonia"}, "onset": {"age": {"iso8601duration": "P2M"}}},
                           {"type": {"id": "HP:1", "label": "Excluded"}, "excluded": true}],
    "diseases": [{"term": {"id": "MONDO:1", "label": "SMA1"}, "onset": {"age": {"iso8601duration": "P3M"}}}]})");
  auto c = parse_phenopacket(j);
  CHECK(c.disease_name == "SMA1");
  CHECK(c.disease_onset == doctest::Approx(0.25));
  REQUIRE(c.features.size() == 1);
  CHECK(c.features[0].onset == doctest::Approx(2.0 / 12));
  auto c2 = c;
  c2.id = "c2";
  c2.disease_onset = 0.5;
  auto gold = phenopacket_gold({c, c2});
  REQUIRE(gold.size() == 1);
  CHECK(gold[0].range.min == doctest::Approx(0.25));
  CHECK(gold[0].range.max == doctest::Approx(0.5));
}

TEST_CASE("containment") {
  CHECK(containment({2, 5}, {1, 5}));
  CHECK(containment({3, 4}, {3, 4}));
  CHECK_FALSE(containment({30, 60}, {0, 1}));
}

TEST_CASE("taxonomy worked examples") {
  const auto& t = OnsetBinTable::standard();
  CHECK(classify_discrepancy({onset_triple("DMD", "walking delay", 2, 5, "e")}, {1, 5}, t).verdict ==
        TaxonomyVerdict::kContained);
  CHECK(classify_discrepancy({onset_triple("Z", "p", 30, 60, "e")}, {0, 1}, t).verdict ==
        TaxonomyVerdict::kGenuinelyWrong);

  std::vector<TemporalTriple> noisy;
  for (int i = 0; i < 49; ++i) noisy.push_back(onset_triple("Y", "p" + std::to_string(i % 7), 2, 8, "e" + std::to_string(i)));
  noisy.push_back(onset_triple("Y", "outlier", 60, 60, "zz"));
  auto c = classify_discrepancy(noisy, {2, 8}, t);
  CHECK(c.verdict == TaxonomyVerdict::kSingleTripleNoise);
  CHECK(c.noise_edge == "zz");

  CHECK(classify_discrepancy({onset_triple("X", "p", 2, 12, "e")}, {5, 15}, t).verdict == TaxonomyVerdict::kAdjacentStage);
  std::vector<TemporalTriple> marfan = {onset_triple("M", "aortic dilation", 0, 1, "m1"),
                                        onset_triple("M", "aortic root dilation", 30, 40, "m2")};
  CHECK(classify_discrepancy(marfan, {5, 12}, t).verdict == TaxonomyVerdict::kWiderButOverlaps);
  std::vector<TemporalTriple> fine = {onset_triple("G", "a", 0, 1, "g1"), onset_triple("G", "b", 2, 4, "g2"),
                                      onset_triple("G", "c", 6, 8, "g3")};
  CHECK(classify_discrepancy(fine, {5, 30}, t).verdict == TaxonomyVerdict::kGranularityMismatch);

  CHECK_THROWS_AS(classify_discrepancy({}, {0, 1}, t), Error);
}

TEST_CASE("genuinely wrong always means disjoint with a gap over the threshold") {
  const auto& t = OnsetBinTable::standard();
  for (double lo = 0; lo <= 100; lo += 7)
    for (double w = 0; w <= 20; w += 5)
      for (double glo = 0; glo <= 100; glo += 9) {
        AgeRange gold{glo, std::min(120.0, glo + 3)};
        auto c = classify_discrepancy({onset_triple("D", "p", lo, std::min(120.0, lo + w), "e")}, gold, t);
        if (c.verdict == TaxonomyVerdict::kGenuinelyWrong) {
          CHECK_FALSE(ranges_overlap(c.kg_range, gold));
          CHECK(range_gap(c.kg_range, gold) > 10);
        }
      }
}

TEST_CASE("accuracy metrics count verdicts") {
  using TV = TaxonomyVerdict;
  std::vector<TV> v = {TV::kContained,       TV::kContained,         TV::kContained,  TV::kAdjacentStage,
                       TV::kAdjacentStage,   TV::kGranularityMismatch, TV::kWiderButOverlaps,
                       TV::kSingleTripleNoise, TV::kGenuinelyWrong,  TV::kGenuinelyWrong};
  auto r = accuracy_metrics(v);
  CHECK(r.n == 10);
  CHECK(r.strict_precision == doctest::Approx(0.3));
  CHECK(r.effective_accuracy == doctest::Approx(0.8));
  CHECK(r.counts[TV::kAdjacentStage] == 2);
  CHECK(r.effective_accuracy + r.fractions[TV::kGenuinelyWrong] == 1.0);
  auto all = accuracy_metrics(std::vector<TV>(4, TV::kContained));
  CHECK(all.strict_precision == 1.0);
  CHECK(all.effective_accuracy == 1.0);
  CHECK_THROWS_AS(accuracy_metrics({}), Error);
}

TEST_CASE("coverage gap matches set algebra") {
  std::set<std::string> kg = {"a", "b", "c", "x", "y"};
  std::set<std::string> g1 = {"a", "b", "d", "e", "f"};
  std::set<std::string> g2 = {"c", "d", "g", "h", "i"};
  auto r = coverage_gap(kg, {{"g1", g1}, {"g2", g2}}, 20);
  CHECK(r.kg.diseases == 5);
  CHECK(r.kg.percent == doctest::Approx(25));
  CHECK(r.resources[1].diseases == 5);
  CHECK(r.novel.diseases == 2);
  CHECK(r.novel_diseases == std::vector<std::string>{"x", "y"});
  auto none = coverage_gap({"a"}, {{"g1", g1}}, 10);
  CHECK(none.novel.diseases == 0);
}

TEST_CASE("proportional allocation with largest remainders") {
  CHECK(proportional_allocation({50, 50}, 10) == std::vector<size_t>{5, 5});
  CHECK(proportional_allocation({1, 1, 1}, 2) == std::vector<size_t>{1, 1, 0});
  CHECK(proportional_allocation({7, 2, 1}, 5) == std::vector<size_t>{4, 1, 0});
  CHECK_THROWS_AS(proportional_allocation({1}, 2), Error);
}

TEST_CASE("novel sampling is stratified and reproducible") {
  std::vector<NovelCandidate> pop;
  for (int i = 0; i < 20; ++i) {
    NovelCandidate c;
    c.disease_id = "D" + std::to_string(i);
    c.disease_name = c.disease_id;
    c.tier = i < 10 ? LiteratureTier::kStandard : LiteratureTier::kMinimal;
    auto t = onset_triple(c.disease_name, "p", 30, 40, "e" + std::to_string(i));
    t.evidence.evidence_text = "Onset was in adult life at age 30 to 40 years.";
    auto short_t = onset_triple(c.disease_name, "q", 30, 40, "f" + std::to_string(i));
    short_t.evidence.evidence_text = "Seen at age 30.";
    c.triples = {short_t, t};
    pop.push_back(c);
  }
  auto a = sample_novel(pop, 10, 42, OnsetBinTable::standard());
  auto b = sample_novel(pop, 10, 42, OnsetBinTable::standard());
  REQUIRE(a.items.size() == 10);
  CHECK(a.allocation.size() == 2);
  for (const auto& [k, n] : a.allocation) CHECK(n == 5);
  for (size_t i = 0; i < a.items.size(); ++i) {
    CHECK(to_json(a.items[i]) == to_json(b.items[i]));
    CHECK(a.items[i].phenotype == "p");  // the longer keyword-bearing evidence wins
  }
}

TEST_CASE("mock judge applies the era lookup") {
  MockJudgeProvider judge("j");
  CHECK(judge_pair("X: p onset 0-1 years", "Symptoms began with onset in infancy.", judge).verdict ==
        Verdict::kSupported);
  CHECK(judge_pair("X: p onset 0-1 years", "The patients were studied.", judge).verdict == Verdict::kUnverifiable);
  CHECK(judge_pair("X: p onset 0-5 years", "A case of elderly onset was described.", judge).verdict ==
        Verdict::kNotSupported);
  auto prompt = build_judge_prompt("c", "e");
  CHECK(prompt.find("infancy") != std::string::npos);
}

TEST_CASE("judge responses parse into the four-way verdict") {
  CHECK(parse_judge_response("j", "Reasoning...\nVERDICT: partially_supported").verdict == Verdict::kPartiallySupported);
  auto junk = parse_judge_response("j", "I cannot decide");
  CHECK(junk.verdict == Verdict::kUnverifiable);
  CHECK_FALSE(junk.diagnostics.empty());
}

TEST_CASE("panel aggregation on the published majority counts") {
  using V = Verdict;
  std::vector<std::vector<JudgeVerdict>> items;
  auto add = [&](size_t n, std::vector<JudgeVerdict> it) {
    for (size_t i = 0; i < n; ++i) items.push_back(it);
  };
  // 66 unanimous, 28 two-of-three, 6 three-way splits
  add(60, item(V::kSupported, V::kSupported, V::kSupported));
  add(16, item(V::kSupported, V::kSupported, V::kNotSupported));
  add(4, item(V::kPartiallySupported, V::kPartiallySupported, V::kSupported));
  add(5, item(V::kNotSupported, V::kNotSupported, V::kNotSupported));
  add(6, item(V::kNotSupported, V::kNotSupported, V::kUnverifiable));
  add(1, item(V::kUnverifiable, V::kUnverifiable, V::kUnverifiable));
  add(2, item(V::kUnverifiable, V::kUnverifiable, V::kSupported));
  add(6, item(V::kSupported, V::kNotSupported, V::kUnverifiable));
  auto r = aggregate_verdicts(items);
  CHECK(r.n == 100);
  CHECK(r.majority[V::kSupported] == 76);
  CHECK(r.majority[V::kPartiallySupported] == 4);
  CHECK(r.majority[V::kNotSupported] == 11);
  CHECK(r.majority[V::kUnverifiable] == 3);
  CHECK(r.splits == 6);
  CHECK(r.unanimous == 66);
  CHECK(r.two_of_three == 28);
  CHECK(r.verifiable == 91);
  CHECK(r.verified_accuracy == doctest::Approx(80.0 / 91.0));
  CHECK(r.verifiable + r.majority[V::kUnverifiable] + r.splits == r.n);

  auto missing = aggregate_verdicts({{v("j1", V::kSupported), v("j2", V::kSupported)}});
  CHECK(missing.n == 0);
  CHECK_FALSE(missing.warnings.empty());
}
