#include <algorithm>
#include <cstdlib>

#include "common/error.hpp"
#include "validation/validation.hpp"

namespace chronokg {

using nlohmann::ordered_json;

bool containment(const AgeRange& kg, const AgeRange& gold) {
  return kg.min >= gold.min && kg.max <= gold.max;
}

std::string_view to_string(TaxonomyVerdict v) {
  switch (v) {
    case TaxonomyVerdict::kContained: return "contained";
    case TaxonomyVerdict::kAdjacentStage: return "adjacent_stage";
    case TaxonomyVerdict::kGranularityMismatch: return "granularity_mismatch";
    case TaxonomyVerdict::kWiderButOverlaps: return "wider_but_overlaps";
    case TaxonomyVerdict::kSingleTripleNoise: return "single_triple_noise";
    case TaxonomyVerdict::kGenuinelyWrong: return "genuinely_wrong";
  }
  return "granularity_mismatch";
}

const std::vector<TaxonomyVerdict>& all_taxonomy_verdicts() {
  static const std::vector<TaxonomyVerdict> kAll = {
      TaxonomyVerdict::kContained,        TaxonomyVerdict::kAdjacentStage,
      TaxonomyVerdict::kGranularityMismatch, TaxonomyVerdict::kWiderButOverlaps,
      TaxonomyVerdict::kSingleTripleNoise, TaxonomyVerdict::kGenuinelyWrong};
  return kAll;
}

bool is_error(TaxonomyVerdict v) { return v == TaxonomyVerdict::kGenuinelyWrong; }

std::optional<AgeRange> compared_range(const std::vector<TemporalTriple>& triples) {
  return aggregate_onset(triples).phenotype_span;
}

Classification classify_discrepancy(const std::vector<TemporalTriple>& triples, const AgeRange& gold,
                                    const OnsetBinTable& table, double wrong_gap) {
  auto kg = compared_range(triples);
  if (!kg) fail(ErrorKind::kDomain, "no onset-bearing triples to classify");
  Classification c;
  c.kg_range = *kg;
  c.gold_range = gold;

  if (containment(*kg, gold)) {
    c.verdict = TaxonomyVerdict::kContained;
    return c;
  }

  // Leave-one-out: does dropping a single triple restore containment?
  std::vector<size_t> onset_rows;
  for (size_t i = 0; i < triples.size(); ++i)
    if (is_phenotype_edge(triples[i]) && triples[i].temporal.onset()) onset_rows.push_back(i);
  std::sort(onset_rows.begin(), onset_rows.end(),
            [&](size_t a, size_t b) { return triples[a].edge_id < triples[b].edge_id; });
  std::vector<TemporalTriple> rest;
  for (size_t skip : onset_rows) {
    rest.clear();
    for (size_t i = 0; i < triples.size(); ++i)
      if (i != skip) rest.push_back(triples[i]);
    auto r = compared_range(rest);
    if (r && containment(*r, gold)) {
      c.verdict = TaxonomyVerdict::kSingleTripleNoise;
      c.noise_edge = triples[skip].edge_id;
      return c;
    }
  }

  if (!ranges_overlap(*kg, gold) && range_gap(*kg, gold) > wrong_gap) {
    c.verdict = TaxonomyVerdict::kGenuinelyWrong;
    return c;
  }
  auto ek = static_cast<long>(era_index_of_range(*kg, table));
  auto eg = static_cast<long>(era_index_of_range(gold, table));
  if (std::labs(ek - eg) <= 1) {
    c.verdict = TaxonomyVerdict::kAdjacentStage;
    return c;
  }
  if (containment(gold, *kg)) {
    c.verdict = TaxonomyVerdict::kWiderButOverlaps;
    return c;
  }
  c.verdict = TaxonomyVerdict::kGranularityMismatch;
  return c;
}

AccuracyReport accuracy_metrics(const std::vector<TaxonomyVerdict>& verdicts) {
  if (verdicts.empty()) fail(ErrorKind::kDomain, "accuracy over zero verdicts");
  AccuracyReport r;
  r.n = verdicts.size();
  for (auto v : all_taxonomy_verdicts()) r.counts[v] = 0;
  for (auto v : verdicts) ++r.counts[v];
  const double n = static_cast<double>(r.n);
  for (const auto& [v, k] : r.counts) r.fractions[v] = static_cast<double>(k) / n;
  r.strict_precision = r.fractions[TaxonomyVerdict::kContained];
  r.effective_accuracy = 1.0 - r.fractions[TaxonomyVerdict::kGenuinelyWrong];
  return r;
}

ordered_json to_json(const AccuracyReport& r) {
  ordered_json j = ordered_json::object();
  j["n"] = r.n;
  j["strict_precision"] = r.strict_precision;
  j["effective_accuracy"] = r.effective_accuracy;
  ordered_json cats = ordered_json::object();
  for (auto v : all_taxonomy_verdicts()) {
    ordered_json c = ordered_json::object();
    c["count"] = r.counts.at(v);
    c["fraction"] = r.fractions.at(v);
    cats[std::string(to_string(v))] = c;
  }
  j["categories"] = cats;
  return j;
}

}  // namespace chronokg
