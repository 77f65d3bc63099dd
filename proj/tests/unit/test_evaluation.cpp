#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "common/error.hpp"
#include "common/random.hpp"
#include "evaluation/evaluation.hpp"
#include "helpers.hpp"
#include "stats_oracle.hpp"

using namespace chronokg;
using oracle::binomial_two_sided;
using oracle::t_upper_tail;

namespace {

ItemResult item(const std::string& id, bool correct) {
  ItemResult r;
  r.question_id = id;
  r.correct = correct;
  r.answered = true;
  return r;
}

double brute_rank(const TransEModel& m, size_t h, size_t r, size_t t, bool tail_side,
                  const std::set<std::tuple<size_t, size_t, size_t>>& filter) {
  double target = m.distance(h, r, t);
  std::vector<double> others;
  for (size_t e = 0; e < m.entities.size(); ++e) {
    auto cand = tail_side ? std::make_tuple(h, r, e) : std::make_tuple(e, r, t);
    if (cand == std::make_tuple(h, r, t) || filter.count(cand)) continue;
    others.push_back(tail_side ? m.distance(h, r, e) : m.distance(e, r, t));
  }
  std::sort(others.begin(), others.end());
  auto lo = std::lower_bound(others.begin(), others.end(), target) - others.begin();
  auto hi = std::upper_bound(others.begin(), others.end(), target) - others.begin();
  return static_cast<double>(lo) + 1 + static_cast<double>(hi - lo) / 2;
}

std::vector<LinkTriple> toy_graph() {
  std::vector<LinkTriple> v;
  for (int d = 0; d < 12; ++d)
    for (int p = 0; p < 4; ++p) {
      int ph = (d + p) % 9;
      v.push_back({"d" + std::to_string(d), "has_phenotype", "p" + std::to_string(ph),
                   AgeRange{static_cast<double>(ph * 5), static_cast<double>(ph * 5 + 1)}});
    }
  return v;
}

}  // namespace

TEST_CASE("exact mcnemar against direct binomial summation") {
  CHECK(mcnemar_exact(10, 0) == doctest::Approx(0.001953125));
  CHECK(mcnemar_exact(0, 0) == 1.0);
  CHECK(mcnemar_exact(3, 3) == 1.0);
  for (size_t b = 0; b < 25; ++b)
    for (size_t c = 0; c < 25; ++c)
      if (b + c > 0) CHECK(mcnemar_exact(b, c) == doctest::Approx(binomial_two_sided(b, c)).epsilon(1e-9));
  std::vector<bool> a = {true, true, true, false, true};
  std::vector<bool> b = {false, false, false, false, true};
  CHECK(mcnemar_exact(a, b) == doctest::Approx(0.25));
  CHECK_THROWS_AS(mcnemar_exact(a, std::vector<bool>{true}), Error);
}

TEST_CASE("paired t against numeric integration") {
  Rng rng(5);
  for (int k = 0; k < 20; ++k) {
    size_t n = 3 + rng.index(8);
    std::vector<double> a(n), b(n);
    for (size_t i = 0; i < n; ++i) {
      a[i] = rng.uniform01() + 0.2;
      b[i] = rng.uniform01();
    }
    auto r = paired_t(a, b);
    CHECK(r.df == n - 1);
    CHECK(r.p == doctest::Approx(2 * t_upper_tail(r.t, r.df)).epsilon(1e-6));
  }
  auto same = paired_t({1, 2, 3}, {1, 2, 3});
  CHECK(same.p == 1.0);
  CHECK_THROWS_AS(paired_t({1}, {2}), Error);
}

TEST_CASE("bootstrap matches an independent resampling loop") {
  std::vector<double> x;
  for (int i = 0; i < 35; ++i) x.push_back(i < 21 ? 1 : 0);
  auto ci = bootstrap_ci(x, 2000, 42);
  auto ref = oracle::bootstrap_reference(x, 2000, 42, 0.95);
  CHECK(ci.lo == doctest::Approx(ref.first));
  CHECK(ci.hi == doctest::Approx(ref.second));
  // close to the normal approximation at this size
  double se = std::sqrt(0.6 * 0.4 / 35);
  CHECK(std::fabs(ci.lo - (0.6 - 1.96 * se)) < 0.03);
  CHECK(std::fabs(ci.hi - (0.6 + 1.96 * se)) < 0.03);
  CHECK(ci.lo <= 0.6);
  CHECK(ci.hi >= 0.6);
  auto again = bootstrap_ci(x, 2000, 42);
  CHECK(again.lo == ci.lo);
  auto ones = bootstrap_ci(std::vector<bool>(10, true), 100, 1);
  CHECK(ones.lo == 1.0);
  CHECK(ones.hi == 1.0);
  CHECK_THROWS_AS(bootstrap_ci(std::vector<double>{}, 10, 1), Error);
  CHECK(quantile_sorted({1, 2, 3, 4}, 0.5) == 2.5);
}

TEST_CASE("rescue rate over the no-retrieval failures") {
  ConditionResult nr, kg;
  for (int i = 0; i < 6; ++i) {
    nr.items.push_back(item("q" + std::to_string(i), i < 2));
    kg.items.push_back(item("q" + std::to_string(i), i % 2 == 0));
  }
  auto r = rescue_rate(nr, kg, 500, 42);
  CHECK(r.n_fail == 4);
  CHECK(r.rescued == 2);
  CHECK(*r.fraction == 0.5);
  CHECK(r.rescued_ids == std::vector<std::string>{"q2", "q4"});
  REQUIRE(r.ci);
  CHECK(r.ci->lo <= 0.5);
  CHECK(r.ci->hi >= 0.5);

  ConditionResult all_right;
  all_right.items = {item("q0", true)};
  ConditionResult other;
  other.items = {item("q0", false)};
  auto none = rescue_rate(all_right, other);
  CHECK(none.n_fail == 0);
  CHECK_FALSE(none.fraction.has_value());
  CHECK_THROWS_AS(rescue_rate(nr, other), Error);
}

TEST_CASE("mock rag provider answers from its context") {
  MockRagProvider m("rag");
  BenchmarkQuestion q;
  q.prompt = "When does hypotonia begin?";
  q.task_type = TaskType::kPhenopacketsOnset;
  CHECK(m.complete(build_rag_prompt(q, "hypotonia: onset 0.1-2.5 years (PMID:1)"), 0, 10) == "0.1-2.5 years");
  // the format example in the instructions is not context
  CHECK(m.complete(build_rag_prompt(q, "nothing relevant"), 0, 10) == MockRagProvider::kFallbackAnswer);
  CHECK(m.complete(build_rag_prompt(q, ""), 0, 10) == MockRagProvider::kFallbackAnswer);
}

TEST_CASE("temporal augmentation suffixes the relation with the onset bin") {
  std::vector<LinkTriple> in = {{"d", "has_phenotype", "p", AgeRange{0, 0.05}},
                                {"d", "has_phenotype", "q", std::nullopt},
                                {"d", "has_phenotype", "r", AgeRange{20, 30}}};
  auto fine = augment_temporal(in, BinMode::kFine8);
  CHECK(fine[0].relation == "has_phenotype_onset_neonatal");
  CHECK(fine[1].relation == "has_phenotype");
  auto coarse = augment_temporal(in, BinMode::kCoarse5);
  CHECK(coarse[0].relation == "has_phenotype_onset_antenatal-infantile");
  CHECK(augment_temporal(in, BinMode::kNone) == in);
  for (size_t i = 0; i < in.size(); ++i) {
    CHECK(fine[i].head == in[i].head);
    CHECK(fine[i].tail == in[i].tail);
  }
}

TEST_CASE("transe training is seeded and the loss falls") {
  TransEParams p;
  p.dim = 16;
  p.epochs = 60;
  p.batch_size = 16;
  auto g = toy_graph();
  auto a = train_transe(g, p, 7);
  auto b = train_transe(g, p, 7);
  CHECK(a.entity_emb == b.entity_emb);
  CHECK(a.epoch_loss.size() == 60);
  CHECK(a.epoch_loss.back() < a.epoch_loss.front());
  auto c = train_transe(g, p, 8);
  CHECK(c.entity_emb != a.entity_emb);
  CHECK_THROWS_AS(train_transe({}, p, 1), Error);
}

TEST_CASE("ranking matches a brute-force oracle and filtering never hurts") {
  TransEParams p;
  p.dim = 8;
  p.epochs = 20;
  p.batch_size = 8;
  auto g = toy_graph();
  std::vector<LinkTriple> train(g.begin(), g.end() - 6), test(g.end() - 6, g.end());
  auto m = train_transe(train, p, 3, test);
  auto raw = evaluate_ranking(m, test, g, RankMode::kRaw);
  auto filt = evaluate_ranking(m, test, g, RankMode::kFiltered);
  CHECK(raw.rankings == 12);
  std::set<std::tuple<size_t, size_t, size_t>> known;
  for (const auto& t : g) known.emplace(m.entity_index.at(t.head), m.relation_index.at(t.relation), m.entity_index.at(t.tail));
  double mrr_raw = 0, mrr_filt = 0;
  for (const auto& t : test) {
    size_t h = m.entity_index.at(t.head), r = m.relation_index.at(t.relation), tl = m.entity_index.at(t.tail);
    for (bool side : {true, false}) {
      mrr_raw += 1 / brute_rank(m, h, r, tl, side, {});
      mrr_filt += 1 / brute_rank(m, h, r, tl, side, known);
    }
  }
  CHECK(raw.mrr == doctest::Approx(mrr_raw / 12));
  CHECK(filt.mrr == doctest::Approx(mrr_filt / 12));
  CHECK(filt.mrr >= raw.mrr);
  CHECK(filt.hits10 >= raw.hits10);
  CHECK(raw.hits1 <= raw.hits3);
  CHECK(raw.hits3 <= raw.hits10);
}

TEST_CASE("clustering separates three blobs") {
  Rng rng(1);
  std::vector<std::vector<double>> pts;
  const double centers[3][2] = {{0, 0}, {10, 10}, {0, 10}};
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 15; ++i) pts.push_back({centers[c][0] + rng.uniform01(), centers[c][1] + rng.uniform01()});
  auto report = cluster_trajectories(pts, 2, 5, 42);
  REQUIRE(report.chosen_k);
  CHECK(*report.chosen_k == 3);
  const auto* best = report.chosen();
  REQUIRE(best);
  for (int c = 0; c < 3; ++c)
    for (int i = 1; i < 15; ++i) CHECK(best->assignments[c * 15 + i] == best->assignments[c * 15]);
  CHECK(*best->silhouette > 0.8);

  auto z = standardize({{1, 5}, {3, 5}});
  CHECK(z[0][0] == doctest::Approx(-z[1][0]));
  CHECK(z[0][1] == 0);

  auto tiny = cluster_trajectories({{0.0}, {1.0}}, 4, 8, 42);
  CHECK(tiny.degenerate);
  CHECK_FALSE(tiny.warnings.empty());
}

TEST_CASE("evidence age statistics") {
  std::vector<TemporalTriple> ts(4);
  ts[0].evidence.publication_year = 2005;
  ts[1].evidence.publication_year = 2015;
  ts[2].evidence.publication_year = 2025;
  auto s = evidence_age_stats(ts, 2026);
  CHECK(s.total == 4);
  CHECK(s.dated == 3);
  CHECK(s.coverage == 0.75);
  CHECK(*s.median_year == 2015);
  CHECK(*s.fraction_recent == doctest::Approx(1.0 / 3));
  CHECK(*s.fraction_old == doctest::Approx(1.0 / 3));
  CHECK_FALSE(evidence_age_stats({}, 2026).median_year.has_value());
}
