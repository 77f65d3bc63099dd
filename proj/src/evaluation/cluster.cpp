#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "common/error.hpp"
#include "common/random.hpp"
#include "common/text.hpp"
#include "evaluation/evaluation.hpp"

namespace chronokg {

using nlohmann::ordered_json;

std::vector<double> DiseaseFeatures::vector() const {
  return {median_onset, onset_spread, stage_count, milestone_density, fraction_with_onset};
}

std::vector<DiseaseFeatures> disease_features(const KgStore& store, std::vector<std::string>* skipped) {
  std::vector<DiseaseFeatures> out;
  for (const auto& d : store.diseases()) {
    const auto& triples = store.triples_for(d);
    auto agg = aggregate_onset(triples);
    if (agg.empty()) {
      if (skipped) skipped->push_back(d);
      continue;
    }
    DiseaseFeatures f;
    f.disease_id = d;
    f.median_onset = (agg.median_range->min + agg.median_range->max) / 2;
    f.onset_spread = agg.pooled_range->width();
    std::set<std::string> stages;
    size_t milestones = 0, onset = 0;
    for (const auto& t : triples) {
      if (t.temporal.progression_stage) stages.insert(text::lower(text::trim(*t.temporal.progression_stage)));
      if (t.temporal.milestone) ++milestones;
      if (t.temporal.has_onset()) ++onset;
    }
    const double n = static_cast<double>(triples.size());
    f.stage_count = static_cast<double>(stages.size());
    f.milestone_density = static_cast<double>(milestones) / n;
    f.fraction_with_onset = static_cast<double>(onset) / n;
    out.push_back(f);
  }
  return out;
}

std::vector<std::vector<double>> standardize(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  const size_t n = rows.size(), d = rows[0].size();
  std::vector<std::vector<double>> out(n, std::vector<double>(d, 0));
  for (size_t j = 0; j < d; ++j) {
    double mean = 0;
    for (const auto& r : rows) mean += r.at(j);
    mean /= static_cast<double>(n);
    double var = 0;
    for (const auto& r : rows) var += (r[j] - mean) * (r[j] - mean);
    double sd = std::sqrt(var / static_cast<double>(n));
    for (size_t i = 0; i < n; ++i) out[i][j] = sd > 0 ? (rows[i][j] - mean) / sd : 0.0;
  }
  return out;
}

namespace {

double dist2(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace

KMeansResult kmeans(const std::vector<std::vector<double>>& points, size_t k, uint64_t seed, size_t max_iter) {
  const size_t n = points.size();
  if (k == 0 || k > n) fail(ErrorKind::kDomain, "k-means needs 1 <= k <= n");
  KMeansResult r;
  r.k = k;
  Rng rng(seed);
  // Greedy farthest-point initialisation from a seeded first centre.
  std::vector<size_t> centres = {rng.index(n)};
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (centres.size() < k) {
    size_t best = 0;
    double best_d = -1;
    for (size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], dist2(points[i], points[centres.back()]));
      if (nearest[i] > best_d) {
        best_d = nearest[i];
        best = i;
      }
    }
    centres.push_back(best);
  }
  for (size_t c : centres) r.centroids.push_back(points[c]);
  r.assignments.assign(n, k);
  for (r.iterations = 0; r.iterations < max_iter; ++r.iterations) {
    bool changed = false;
    for (size_t i = 0; i < n; ++i) {
      size_t best = 0;
      double best_d = dist2(points[i], r.centroids[0]);
      for (size_t c = 1; c < k; ++c) {
        double dd = dist2(points[i], r.centroids[c]);
        if (dd < best_d) {
          best_d = dd;
          best = c;
        }
      }
      if (r.assignments[i] != best) {
        r.assignments[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    for (size_t c = 0; c < k; ++c) {
      std::vector<double> sum(points[0].size(), 0);
      size_t count = 0;
      for (size_t i = 0; i < n; ++i)
        if (r.assignments[i] == c) {
          for (size_t j = 0; j < sum.size(); ++j) sum[j] += points[i][j];
          ++count;
        }
      if (count == 0) continue;  // empty cluster keeps its centre
      for (auto& x : sum) x /= static_cast<double>(count);
      r.centroids[c] = sum;
    }
  }
  r.silhouette = silhouette(points, r.assignments, k);
  return r;
}

std::optional<double> silhouette(const std::vector<std::vector<double>>& points, const std::vector<size_t>& assignments,
                                 size_t k) {
  const size_t n = points.size();
  std::vector<size_t> sizes(k, 0);
  for (size_t a : assignments) ++sizes.at(a);
  if (std::count_if(sizes.begin(), sizes.end(), [](size_t s) { return s > 0; }) < 2) return std::nullopt;
  bool all_same = true;
  for (size_t i = 1; i < n && all_same; ++i) all_same = dist2(points[i], points[0]) == 0;
  if (all_same) return std::nullopt;
  double total = 0;
  for (size_t i = 0; i < n; ++i) {
    std::vector<double> sum(k, 0);
    for (size_t j = 0; j < n; ++j)
      if (j != i) sum[assignments[j]] += std::sqrt(dist2(points[i], points[j]));
    const size_t own = assignments[i];
    if (sizes[own] <= 1) continue;  // singleton scores 0
    double a = sum[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (size_t c = 0; c < k; ++c)
      if (c != own && sizes[c] > 0) b = std::min(b, sum[c] / static_cast<double>(sizes[c]));
    double m = std::max(a, b);
    total += m > 0 ? (b - a) / m : 0.0;
  }
  return total / static_cast<double>(n);
}

const KMeansResult* ClusterReport::chosen() const {
  if (!chosen_k) return nullptr;
  for (const auto& r : per_k)
    if (r.k == *chosen_k) return &r;
  return nullptr;
}

ClusterReport cluster_trajectories(const std::vector<std::vector<double>>& features, size_t k_min, size_t k_max,
                                   uint64_t seed) {
  ClusterReport report;
  const size_t n = features.size();
  if (n < k_max + 1) {
    size_t limit = n > 0 ? n - 1 : 0;
    report.warnings.push_back("only " + std::to_string(n) + " points; k range restricted to at most " +
                              std::to_string(limit));
    k_max = std::min(k_max, limit);
  }
  k_min = std::max<size_t>(k_min, 2);
  if (k_min > k_max) {
    report.degenerate = true;
    report.warnings.push_back("no admissible k");
    return report;
  }
  auto points = standardize(features);
  for (size_t k = k_min; k <= k_max; ++k) {
    auto r = kmeans(points, k, seed);
    if (!r.silhouette) report.degenerate = true;
    if (r.silhouette && (!report.chosen_k || *r.silhouette > *report.chosen()->silhouette)) {
      report.per_k.push_back(std::move(r));
      report.chosen_k = report.per_k.back().k;
    } else {
      report.per_k.push_back(std::move(r));
    }
  }
  if (report.degenerate) {
    report.chosen_k.reset();
    report.warnings.push_back("silhouette undefined: points are not separable");
  }
  return report;
}

ordered_json to_json(const ClusterReport& r, const std::vector<std::string>& labels) {
  ordered_json j = ordered_json::object();
  j["chosen_k"] = r.chosen_k ? ordered_json(*r.chosen_k) : ordered_json(nullptr);
  j["degenerate"] = r.degenerate;
  ordered_json per = ordered_json::array();
  for (const auto& k : r.per_k) {
    ordered_json o = ordered_json::object();
    o["k"] = k.k;
    o["silhouette"] = k.silhouette ? ordered_json(*k.silhouette) : ordered_json(nullptr);
    o["iterations"] = k.iterations;
    per.push_back(o);
  }
  j["per_k"] = per;
  if (const auto* c = r.chosen()) {
    ordered_json assign = ordered_json::object();
    for (size_t i = 0; i < c->assignments.size(); ++i)
      assign[i < labels.size() ? labels[i] : std::to_string(i)] = c->assignments[i];
    j["assignments"] = assign;
    j["centroids"] = c->centroids;
  }
  j["warnings"] = r.warnings;
  return j;
}

}  // namespace chronokg
