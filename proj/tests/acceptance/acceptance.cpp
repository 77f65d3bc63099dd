// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "app/app.hpp"
#include "benchmark/benchmark.hpp"
#include "common/files.hpp"
#include "common/random.hpp"
#include "common/text.hpp"
#include "consensus/consensus.hpp"
#include "consensus_oracle.hpp"
#include "core/config.hpp"
#include "core/json_io.hpp"
#include "evaluation/evaluation.hpp"
#include "helpers.hpp"
#include "quality/quality.hpp"
#include "stats_oracle.hpp"
#include "store/store.hpp"
#include "validation/validation.hpp"

using namespace chronokg;
namespace fs = std::filesystem;
using nlohmann::json;
using testing::onset_triple;
using testing::raw;

namespace {

// Collects failed checks for one criterion.
struct Check {
  std::vector<std::string> failures;
  std::string detail;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    if (!(std::fabs(got - want) <= tol))
      failures.push_back(what + ": got " + std::to_string(got) + ", want " + std::to_string(want));
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100 * v);
  return buf;
}

// Every regular file under root keyed by relative path, skipping run manifests (they carry timestamps).
std::map<std::string, std::string> tree_bytes(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    auto rel = fs::relative(e.path(), root).string();
    if (e.path().filename().string().rfind("run_manifest.", 0) == 0) continue;
    std::ifstream in(e.path(), std::ios::binary);
    out[rel] = std::string(std::istreambuf_iterator<char>(in), {});
  }
  return out;
}

// ---------------------------------------------------------------------------

void consensus_oracle(Check& c) {
  Rng rng(2024);
  auto t0 = std::chrono::steady_clock::now();
  size_t clusters = 0;
  for (int inst = 0; inst < 200; ++inst) {
    auto per = oracle::random_instance(rng);
    auto got = compute_consensus(per, 2, 80);
    std::multiset<oracle::Sig> g, w;
    for (const auto& x : got) g.insert(oracle::sig(x));
    for (const auto& x : oracle::components(per, 2, 80)) w.insert(oracle::sig(x));
    c.expect(g == w, "instance " + std::to_string(inst) + " differs from the oracle");
    for (const auto& x : compute_consensus(per, 3, 80))
      c.expect(g.count(oracle::sig(x)) == 1, "threshold-3 cluster missing at threshold 2 in instance " +
                                                  std::to_string(inst));
    clusters += got.size();
  }
  double secs = seconds_since(t0);
  c.expect(secs < 10, "runtime " + std::to_string(secs) + " s");
  c.detail = "200 instances, " + std::to_string(clusters) + " clusters, " + text::format_number(std::round(secs * 100) / 100) + " s";
}

void consensus_confidence(Check& c) {
  std::map<std::string, std::vector<RawTriple>> per = {{"a", {raw("a", "DMD", "cardiomyopathy")}},
                                                       {"b", {raw("b", "DMD", "cardiomyopathy")}},
                                                       {"c", {raw("c", "DMD", "cardiomyopathy")}}};
  auto all = compute_consensus(per);
  c.expect(all.size() == 1, "unanimous fixture should give one triple");
  if (all.size() == 1) c.near(all[0].consensus_confidence, 1.0, 0, "unanimous confidence");
  per["c"] = {raw("c", "DMD", "scoliosis")};
  auto two = compute_consensus(per);
  c.expect(two.size() == 1, "2-of-3 fixture should give one triple");
  if (two.size() == 1) c.near(two[0].consensus_confidence, 0.67, 0.005, "2-of-3 confidence");
  if (!all.empty() && !two.empty())
    c.detail = "unanimous " + text::format_number(all[0].consensus_confidence) + ", 2-of-3 " +
               std::to_string(two[0].consensus_confidence).substr(0, 6);
}

void credibility(Check& c) {
  c.expect(credibility_score(CredibilitySignals{1.0, 1.0, 1.0, 1.0, 1.0, 1.0}) == 1.0, "all-max signals != 1.0");
  CredibilitySignals review;
  review.study_type_weight = study_type_weight(StudyType::kReview);
  review.llm_consensus = 1.0;
  double r = credibility_score(review);
  c.near(r, 0.275, 1e-12, "review with full consensus");
  Rng rng(11);
  size_t violations = 0;
  for (int k = 0; k < 1000; ++k) {
    CredibilitySignals s;
    auto maybe = [&]() -> std::optional<double> {
      if (rng.index(4) == 0) return std::nullopt;
      return rng.uniform01();
    };
    s.journal_tier = maybe();
    s.citation_velocity = maybe();
    s.study_type_weight = rng.uniform01();
    s.replication_signal = maybe();
    s.retraction_check = maybe();
    s.llm_consensus = rng.uniform01();
    auto up = s;
    double d = rng.uniform01() * 0.5;
    switch (rng.index(6)) {
      case 0: up.journal_tier = std::min(1.0, s.journal_tier.value_or(0) + d); break;
      case 1: up.citation_velocity = std::min(1.0, s.citation_velocity.value_or(0) + d); break;
      case 2: up.study_type_weight = std::min(1.0, s.study_type_weight + d); break;
      case 3: up.replication_signal = std::min(1.0, s.replication_signal.value_or(0) + d); break;
      case 4: up.retraction_check = std::min(1.0, s.retraction_check.value_or(0) + d); break;
      default: up.llm_consensus = std::min(1.0, s.llm_consensus + d); break;
    }
    if (credibility_score(up) < credibility_score(s)) ++violations;
  }
  c.expect(violations == 0, std::to_string(violations) + " monotonicity violations");
  c.detail = "max 1.0, review " + text::format_number(r) + ", 1000 perturbations monotone";
}

// One synthetic disease per taxonomy category; each was checked by hand.
std::vector<TemporalTriple> category_case(TaxonomyVerdict v, int i, AgeRange& gold) {
  auto d = "D" + std::to_string(i);
  auto e = [&](int k) { return d + "-" + std::to_string(k); };
  switch (v) {
    case TaxonomyVerdict::kContained:
      gold = {1, 5};
      return {onset_triple(d, "walking delay", 2, 5, e(0))};
    case TaxonomyVerdict::kAdjacentStage:
      gold = {5, 15};
      return {onset_triple(d, "p", 2, 12, e(0))};
    case TaxonomyVerdict::kGranularityMismatch:
      gold = {5, 30};
      return {onset_triple(d, "a", 0, 1, e(0)), onset_triple(d, "b", 2, 4, e(1)), onset_triple(d, "c", 6, 8, e(2))};
    case TaxonomyVerdict::kWiderButOverlaps:
      gold = {5, 12};
      return {onset_triple(d, "aortic dilation", 0, 1, e(0)), onset_triple(d, "aortic root dilation", 30, 40, e(1))};
    case TaxonomyVerdict::kSingleTripleNoise:
      gold = {2, 8};
      return {onset_triple(d, "a", 2, 8, e(0)), onset_triple(d, "b", 2, 8, e(1)), onset_triple(d, "c", 2, 8, e(2)),
              onset_triple(d, "outlier", 60, 60, e(3))};
    case TaxonomyVerdict::kGenuinelyWrong:
      gold = {0, 1};
      return {onset_triple(d, "p", 30, 60, e(0))};
  }
  return {};
}

void taxonomy(Check& c) {
  const auto& table = OnsetBinTable::standard();
  // Published fractions per 1000; they sum to 992, the rest goes to the catch-all category.
  const std::vector<std::pair<TaxonomyVerdict, int>> cohort = {
      {TaxonomyVerdict::kContained, 501},         {TaxonomyVerdict::kAdjacentStage, 156},
      {TaxonomyVerdict::kGranularityMismatch, 146}, {TaxonomyVerdict::kWiderButOverlaps, 67},
      {TaxonomyVerdict::kSingleTripleNoise, 57},  {TaxonomyVerdict::kGenuinelyWrong, 73}};
  std::vector<TaxonomyVerdict> verdicts;
  int i = 0;
  size_t misclassified = 0;
  for (const auto& [want, n] : cohort)
    for (int k = 0; k < n; ++k) {
      AgeRange gold;
      auto triples = category_case(want, i++, gold);
      auto got = classify_discrepancy(triples, gold, table).verdict;
      if (got != want) ++misclassified;
      verdicts.push_back(got);
    }
  c.expect(misclassified == 0, std::to_string(misclassified) + " cohort members misclassified");
  auto r = accuracy_metrics(verdicts);
  c.near(r.effective_accuracy, 0.927, 0.001, "effective accuracy");
  c.near(r.strict_precision, 0.501, 0.001, "strict precision");

  auto e1 = classify_discrepancy({onset_triple("Duchenne muscular dystrophy", "walking delay", 2, 5, "e1")}, {1, 5}, table);
  c.expect(e1.verdict == TaxonomyVerdict::kContained, "DMD 2-5 vs 1-5 should be contained");
  std::vector<TemporalTriple> y;
  for (int k = 0; k < 49; ++k) y.push_back(onset_triple("Disease Y", "p" + std::to_string(k % 7), 2, 8, "y" + std::to_string(100 + k)));
  y.push_back(onset_triple("Disease Y", "comorbid outlier", 60, 60, "y999"));
  auto e5 = classify_discrepancy(y, {2, 8}, table);
  c.expect(e5.verdict == TaxonomyVerdict::kSingleTripleNoise, "49 + 1 outlier should be single-triple noise");
  auto e6 = classify_discrepancy({onset_triple("Disease Z", "p", 30, 60, "z")}, {0, 1}, table);
  c.expect(e6.verdict == TaxonomyVerdict::kGenuinelyWrong, "30-60 vs 0-1 should be genuinely wrong");
  c.detail = "cohort of " + std::to_string(r.n) + ": effective " + pct(r.effective_accuracy) + ", strict " +
             pct(r.strict_precision) + "; worked examples " + std::string(to_string(e1.verdict)) + ", " +
             std::string(to_string(e5.verdict)) + ", " + std::string(to_string(e6.verdict));
}

void judge_panel(Check& c) {
  using V = Verdict;
  std::vector<std::vector<JudgeVerdict>> items;
  auto add = [&](int n, V a, V b, V d) {
    for (int k = 0; k < n; ++k) items.push_back({{"j1", a, "", {}}, {"j2", b, "", {}}, {"j3", d, "", {}}});
  };
  add(60, V::kSupported, V::kSupported, V::kSupported);
  add(16, V::kSupported, V::kSupported, V::kNotSupported);
  add(4, V::kPartiallySupported, V::kPartiallySupported, V::kSupported);
  add(5, V::kNotSupported, V::kNotSupported, V::kNotSupported);
  add(6, V::kNotSupported, V::kNotSupported, V::kUnverifiable);
  add(1, V::kUnverifiable, V::kUnverifiable, V::kUnverifiable);
  add(2, V::kUnverifiable, V::kUnverifiable, V::kSupported);
  add(6, V::kSupported, V::kNotSupported, V::kUnverifiable);
  auto r = aggregate_verdicts(items);
  c.expect(r.majority[V::kSupported] == 76 && r.majority[V::kPartiallySupported] == 4 &&
               r.majority[V::kNotSupported] == 11 && r.majority[V::kUnverifiable] == 3 && r.splits == 6,
           "majority counts differ from 76/4/11/3 + 6");
  c.near(r.verified_accuracy, 80.0 / 91.0, 0.0005, "verified accuracy");
  c.detail = std::to_string(r.verifiable) + " verifiable, accuracy " + pct(r.verified_accuracy);
}

void coverage(Check& c) {
  auto range = [](size_t lo, size_t hi) {
    std::set<std::string> s;
    for (size_t i = lo; i < hi; ++i) s.insert("d" + std::to_string(i));
    return s;
  };
  auto kg = range(0, 2685);
  auto novel = range(10000, 16250);
  kg.insert(novel.begin(), novel.end());
  auto r = coverage_gap(kg, {{"Orphadata", range(0, 5796)}, {"HPOA", range(0, 1429)}, {"Phenopackets", range(0, 518)}},
                        17080);
  auto one = [](double v) {
    char b[16];
    std::snprintf(b, sizeof b, "%.1f", v);
    return std::string(b);
  };
  c.expect(one(r.kg.percent) == "52.3", "KG " + one(r.kg.percent));
  c.expect(one(r.resources[0].percent) == "33.9", "Orphadata " + one(r.resources[0].percent));
  c.expect(one(r.resources[1].percent) == "8.4", "HPOA " + one(r.resources[1].percent));
  c.expect(one(r.resources[2].percent) == "3.0", "Phenopackets " + one(r.resources[2].percent));
  c.expect(r.novel.diseases == 6250, "novel count " + std::to_string(r.novel.diseases));
  c.expect(one(r.novel.percent) == "36.6", "novel " + one(r.novel.percent));
  c.detail = "KG " + one(r.kg.percent) + "%, Orphadata " + one(r.resources[0].percent) + "%, HPOA " +
             one(r.resources[1].percent) + "%, Phenopackets " + one(r.resources[2].percent) + "%, novel " +
             std::to_string(r.novel.diseases) + " = " + one(r.novel.percent) + "%";
}

void benchmark_determinism(Check& c, const AppConfig& cfg) {
  testing::TempDir tmp;
  auto run = [&](const std::string& tag) {
    return run_command("bench gen", cfg, {{"store", (tmp.path / "store").string()}, {"out", (tmp.path / tag).string()}});
  };
  auto a = run("a");
  auto b = run("b");
  auto ta = tree_bytes(tmp.path / "a"), tb = tree_bytes(tmp.path / "b");
  c.expect(!ta.empty(), "no benchmark files written");
  c.expect(ta == tb, "two seed-42 runs differ");
  size_t checked = a.value("tier1_checked", size_t(0));
  c.expect(checked > 0, "no tier1 questions checked");
  c.expect(a["tier1_mismatches"].empty(), std::to_string(a["tier1_mismatches"].size()) + " tier1 gold mismatches");
  GoldRecord g{GoldSource::kOrphadata, "Angelman syndrome", normalize_disease_name("Angelman syndrome"), {0, 2}};
  auto q = make_window_question("d4", g, 8);
  c.expect(q.gold.label == "No" && score_answer(q, "No").correct() && !score_answer(q, "Yes").correct(),
           "window probe 8 vs 0-2 should have gold No");
  c.detail = std::to_string(a.value("kept", size_t(0))) + " questions, " + std::to_string(ta.size()) +
             " files identical, " + std::to_string(checked) + " tier1 golds re-derived, window example gold " +
             q.gold.label;
}

void scorer(Check& c) {
  BenchmarkQuestion q;
  q.task_type = TaskType::kPhenopacketsOnset;
  q.gold.range = AgeRange{0.0, 2.7};
  c.expect(score_answer(q, "0-3 years").correct(), "(0,3) should be accepted for (0,2.7)");
  c.expect(!score_answer(q, "30-40 years").correct(), "(30,40) should be rejected for (0,2.7)");
  // hand arithmetic: w=0 -> max(0.5,0)=0.5; w=1 -> 0.5; w=3 -> 1.5; w=4 -> 2; w=10 -> min(2,5)=2
  const std::vector<std::pair<double, double>> sweep = {{0, 0.5}, {1, 0.5}, {3, 1.5}, {4, 2.0}, {10, 2.0}};
  std::vector<std::string> shown;
  for (auto [w, tol] : sweep) {
    AgeRange g{10, 10 + w};
    c.near(onset_tolerance(g), tol, 0, "tolerance at width " + text::format_number(w));
    c.expect(calibrated_onset_score(AgeRange{g.max + tol, g.max + tol + 3}, g), "edge of band rejected at width " + text::format_number(w));
    c.expect(!calibrated_onset_score(AgeRange{g.max + tol + 0.01, g.max + tol + 3}, g), "outside band accepted at width " + text::format_number(w));
    shown.push_back(text::format_number(onset_tolerance(g)));
  }
  c.detail = "(0,3) accepted, (30,40) rejected, tolerances " + text::join(shown, "/");
}

void rescue(Check& c) {
  // 35 long-tail questions; the store holds the right onset for 21 of them.
  std::vector<TemporalTriple> triples;
  std::vector<BenchmarkQuestion> questions;
  for (int i = 0; i < 35; ++i) {
    auto name = "Rare disease " + std::to_string(i);
    auto t = onset_triple(name, "hypotonia", i < 21 ? 1 : 60, i < 21 ? 3 : 70, "r" + std::to_string(i),
                          "PMID:" + std::to_string(5000 + i));
    t.source_id = t.disease_profile_id = "MONDO:" + std::to_string(9000000 + i);
    triples.push_back(t);
    BenchmarkQuestion q;
    q.id = "pp" + std::to_string(i);
    q.task_type = TaskType::kPhenopacketsOnset;
    q.prompt = "At what age does hypotonia begin in " + name + "?";
    q.gold.range = AgeRange{1, 3};
    q.params.disease = name;
    q.params.phenotype = "hypotonia";
    questions.push_back(q);
  }
  KgStore kg(triples);
  RetrievalSources sources;
  sources.kg = &kg;
  MockRagProvider mock("rag-mock");
  auto nr = run_condition(questions, mock, RetrievalCondition::kNone, sources);
  auto with_kg = run_condition(questions, mock, RetrievalCondition::kChronoKg, sources);
  auto r1 = rescue_rate(nr, with_kg, 10000, 42);
  auto r2 = rescue_rate(nr, with_kg, 10000, 42);
  c.expect(r1.n_fail == 35, "NR failures " + std::to_string(r1.n_fail));
  c.expect(r1.fraction.has_value(), "no rescue fraction");
  if (r1.fraction) c.near(*r1.fraction, 0.60, 1e-12, "rescue fraction");
  c.expect(r1.ci && r2.ci && r1.ci->lo == r2.ci->lo && r1.ci->hi == r2.ci->hi, "CI differs between runs");
  if (r1.ci && r1.fraction)
    c.detail = std::to_string(r1.rescued) + "/" + std::to_string(r1.n_fail) + " rescued = " + pct(*r1.fraction) +
               ", 95% CI [" + pct(r1.ci->lo) + ", " + pct(r1.ci->hi) + "] reproduced";
}

void statistics(Check& c) {
  double p = mcnemar_exact(10, 0);
  c.near(p, 0.001953, 1e-6, "mcnemar(10,0)");
  for (size_t b = 0; b < 20; ++b)
    for (size_t d = 0; d < 20; ++d)
      if (b + d) c.near(mcnemar_exact(b, d), oracle::binomial_two_sided(b, d), 1e-12, "mcnemar oracle");

  Rng rng(99);
  for (int v = 0; v < 5; ++v) {
    std::vector<double> x(10 + 7 * v);
    for (auto& e : x) e = v % 2 ? static_cast<double>(rng.index(2)) : rng.uniform01() * 10;
    auto ci = bootstrap_ci(x, 5000, 42 + v);
    auto ref = oracle::bootstrap_reference(x, 5000, 42 + v, 0.95);
    c.near(ci.lo, ref.first, 1e-12, "bootstrap lo on vector " + std::to_string(v));
    c.near(ci.hi, ref.second, 1e-12, "bootstrap hi on vector " + std::to_string(v));
  }

  // three seeds per condition, as in the ablation
  double worst = 0;
  for (int k = 0; k < 10; ++k) {
    std::vector<double> a(3), b(3);
    for (int i = 0; i < 3; ++i) {
      a[i] = 0.02 + 0.01 * rng.uniform01();
      b[i] = 0.01 + 0.01 * rng.uniform01();
    }
    auto t = paired_t(a, b);
    double want = 2 * oracle::t_upper_tail(t.t, t.df);
    worst = std::max(worst, std::fabs(t.p - want));
  }
  c.expect(worst <= 1e-6, "paired t differs from the numeric oracle by " + std::to_string(worst));
  char buf[160];
  std::snprintf(buf, sizeof buf, "mcnemar(10,0) = %.6f, bootstrap equal on 5 vectors, paired t max error %.1e", p,
                worst);
  c.detail = buf;
}

void link_prediction(Check& c) {
  // 25 diseases x 8 onset bins. Each disease takes one of five phenotypes per bin at random,
  // so without the bin on the relation every phenotype is an equally good guess.
  const auto& table = OnsetBinTable::standard();
  std::vector<LinkTriple> triples;
  Rng pick(1);
  for (int i = 0; i < 25; ++i)
    for (size_t b = 0; b < table.fine_bins.size(); ++b) {
      const auto& bin = table.fine_bins[b];
      double mid = (bin.lo + std::min(bin.hi, 100.0)) / 2;
      triples.push_back({"disease" + std::to_string(i), "has_phenotype",
                         "phen_" + bin.name + "_" + std::to_string(pick.index(5)), AgeRange{mid, mid}});
    }
  TransEParams params;
  params.epochs = 100;
  auto t0 = std::chrono::steady_clock::now();
  auto report = ablation_run(triples, {{"structural", BinMode::kNone}, {"temporal", BinMode::kFine8}},
                             {42, 7, 123}, params);
  double total = seconds_since(t0);
  std::map<uint64_t, std::map<std::string, const AblationRun*>> by_seed;
  double slowest = 0;
  for (const auto& r : report.runs) {
    by_seed[r.seed][r.condition] = &r;
    slowest = std::max(slowest, r.seconds);
    c.expect(r.filtered.mrr >= r.raw.mrr, "filtered < raw on " + r.condition + " seed " + std::to_string(r.seed));
    c.expect(r.seconds < 60, r.condition + " seed " + std::to_string(r.seed) + " took " + std::to_string(r.seconds) + " s");
  }
  c.expect(by_seed.size() == 3, "expected three seeds");
  std::vector<std::string> shown;
  for (const auto& [seed, runs] : by_seed) {
    double s = runs.at("structural")->filtered.mrr, t = runs.at("temporal")->filtered.mrr;
    c.expect(t > s, "temporal MRR not above structural on seed " + std::to_string(seed));
    char buf[64];
    std::snprintf(buf, sizeof buf, "seed %llu %.3f vs %.3f", static_cast<unsigned long long>(seed), t, s);
    shown.push_back(buf);
  }
  char tail[64];
  std::snprintf(tail, sizeof tail, "; slowest run %.1f s, total %.1f s", slowest, total);
  c.detail = "filtered MRR temporal vs structural: " + text::join(shown, ", ") + tail;
}

void pipeline(Check& c, const AppConfig& cfg) {
  testing::TempDir tmp;
  auto run = [&](const std::string& tag) {
    return run_command("pipeline run", cfg,
                       {{"store", (tmp.path / tag / "store").string()}, {"out", (tmp.path / tag / "out").string()}});
  };
  auto a = run("a");
  run("b");
  size_t diseases = 0, input = 0, validated = 0, rejected = 0;
  for (const auto& [id, d] : a["diseases"].items()) {
    ++diseases;
    size_t in = d["input"], v = d["validated"], r = d["rejected"];
    c.expect(in == v + r, id + ": input " + std::to_string(in) + " != validated + rejected");
    input += in;
    validated += v;
    rejected += r;
  }
  c.expect(diseases == 3, "expected 3 diseases, got " + std::to_string(diseases));
  StoreLayout layout{tmp.path / "a" / "store"};
  auto loaded = load_validated(layout.flat(Tier::kValidated));
  size_t with_pmid = 0, short_text = 0, per_disease = 0;
  for (const auto& t : loaded.records) {
    bool pmid = std::any_of(t.evidence.source_ids.begin(), t.evidence.source_ids.end(),
                            [](const std::string& s) { return s.rfind("PMID:", 0) == 0 && s.size() > 5; });
    with_pmid += pmid;
    short_text += text::utf8_length(t.evidence.evidence_text) <= kEvidenceTextCap;
  }
  for (const auto& e : fs::directory_iterator(layout.root / "diseases")) {
    auto v = load_validated(e.path() / "validated.jsonl");
    per_disease += v.records.size();
    for (const auto& t : v.records) c.expect(!t.evidence.source_ids.empty(), "per-disease record without PMID");
  }
  c.expect(!loaded.records.empty(), "no validated records");
  c.expect(per_disease == validated, "per-disease validated files hold " + std::to_string(per_disease));
  c.expect(with_pmid == loaded.records.size(), "records without a PMID");
  c.expect(short_text == loaded.records.size(), "evidence text over the cap");
  auto sa = tree_bytes(tmp.path / "a" / "store"), sb = tree_bytes(tmp.path / "b" / "store");
  c.expect(!sa.empty() && sa == sb, "re-run store differs");
  c.detail = std::to_string(diseases) + " diseases, " + std::to_string(input) + " in = " + std::to_string(validated) +
             " validated + " + std::to_string(rejected) + " rejected; " + std::to_string(loaded.records.size()) +
             " merged records, 100% PMID, evidence <= 300; " + std::to_string(sa.size()) + " store files identical";
}

// The published example record, line breaks inside the evidence string folded to spaces.
const char* kReleasedRecord = R"({"edge_id": "ef58608a735b",
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

void schema_round_trip(Check& c) {
  auto in = json::parse(kReleasedRecord);
  auto t = triple_from_json(in);
  c.expect(temporal_violations(t.temporal).empty(), "record fails temporal validation");
  c.expect(!t.evidence.source_ids.empty(), "record lacks provenance");
  auto back = json::parse(dump_line(to_json(t)));
  size_t fields = 0;
  for (auto& [k, v] : in.items()) {
    if (v.is_object()) {
      for (auto& [k2, v2] : v.items()) {
        ++fields;
        c.expect(back[k][k2] == v2, k + "." + k2 + " changed");
      }
    } else {
      ++fields;
      c.expect(back[k] == v, k + " changed");
    }
  }
  auto again = triple_from_json(back);
  c.expect(again == t, "second load differs");
  c.expect(again.temporal.onset() == AgeRange{20, 40}, "onset not (20, 40)");
  c.expect(again.temporal.progression_stage == "adult", "stage not adult");
  c.detail = std::to_string(fields) + " fields equal, onset " + text::format_number(again.temporal.onset()->min) + "-" +
             text::format_number(again.temporal.onset()->max) + ", stage " + *again.temporal.progression_stage;
}

}  // namespace

int main() {
  const fs::path fixtures = CHRONOKG_FIXTURES;
  std::optional<AppConfig> cfg;
  std::string cfg_error;
  try {
    cfg = load_config(fixtures / "config.yaml");
  } catch (const std::exception& e) {
    cfg_error = e.what();
  }
  auto need_cfg = [&](std::function<void(Check&, const AppConfig&)> f) {
    return [f, &cfg, &cfg_error](Check& c) {
      if (!cfg) {
        c.failures.push_back("fixture config did not load: " + cfg_error);
        return;
      }
      f(c, *cfg);
    };
  };

  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"consensus matches the component oracle", consensus_oracle},
      {"consensus confidence arithmetic", consensus_confidence},
      {"credibility formula", credibility},
      {"error taxonomy and effective accuracy", taxonomy},
      {"judge panel arithmetic", judge_panel},
      {"coverage gap arithmetic", coverage},
      {"benchmark determinism and gold verification", need_cfg(benchmark_determinism)},
      {"calibrated onset scorer", scorer},
      {"rescue arithmetic", rescue},
      {"statistics oracles", statistics},
      {"temporal relations help link prediction", link_prediction},
      {"end-to-end fixture pipeline", need_cfg(pipeline)},
      {"released record round-trip", schema_round_trip},
  };

  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    bool ok = c.failures.empty();
    failed += !ok;
    std::cout << (ok ? "PASS" : "FAIL") << " " << (i + 1 < 10 ? " " : "") << i + 1 << " " << criteria[i].first;
    if (ok) {
      if (!c.detail.empty()) std::cout << ": " << c.detail;
    } else {
      std::cout << ": " << c.failures.front();
      if (c.failures.size() > 1) std::cout << " (+" << c.failures.size() - 1 << " more)";
    }
    std::cout << std::endl;
  }
  std::cout << criteria.size() - failed << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed;
}
