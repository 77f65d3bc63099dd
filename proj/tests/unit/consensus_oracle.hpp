#pragma once

// Brute-force reference for compute_consensus: all pairs, flood fill.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "common/random.hpp"
#include "consensus/consensus.hpp"
#include "helpers.hpp"

namespace oracle {

using namespace chronokg;
using testing::raw;


// Plain O(|a||b|) insert/delete distance.
inline int indel_distance(const std::u32string& a, const std::u32string& b) {
  std::vector<std::vector<int>> d(a.size() + 1, std::vector<int>(b.size() + 1));
  for (size_t i = 0; i <= a.size(); ++i) d[i][0] = static_cast<int>(i);
  for (size_t j = 0; j <= b.size(); ++j) d[0][j] = static_cast<int>(j);
  for (size_t i = 1; i <= a.size(); ++i)
    for (size_t j = 1; j <= b.size(); ++j)
      d[i][j] = a[i - 1] == b[j - 1] ? d[i - 1][j - 1] : 1 + std::min(d[i - 1][j], d[i][j - 1]);
  return d[a.size()][b.size()];
}

inline int oracle_ratio(const std::string& a, const std::string& b) {
  std::u32string ua(a.begin(), a.end()), ub(b.begin(), b.end());  // ASCII inputs only
  int total = static_cast<int>(ua.size() + ub.size());
  if (total == 0) return 100;
  double r = 100.0 * (total - indel_distance(ua, ub)) / total;
  return static_cast<int>(std::floor(r + 0.5));
}

inline int rank(ModelConfidence c) { return c == ModelConfidence::kHigh ? 2 : c == ModelConfidence::kMedium ? 1 : 0; }

struct OracleCluster {
  std::set<std::string> models;
  RawTriple rep;
  size_t members = 0;
};

// Enumerate all pairs, flood-fill components, apply the same filters.
inline std::vector<OracleCluster> components(const std::map<std::string, std::vector<RawTriple>>& per_model,
                                              int threshold, int fuzzy) {
  std::vector<RawTriple> all;
  for (const auto& [m, ts] : per_model)
    for (auto t : ts) {
      t.model = m;
      all.push_back(t);
    }
  const size_t n = all.size();
  std::vector<std::vector<size_t>> adj(n);
  auto usable = [&](const RawTriple& t) {
    return normalize_entity(t.subject).valid() && normalize_entity(t.object).valid() &&
           relation_canonical(t.relation) != kQuarantineRelation;
  };
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      const auto &a = all[i], &b = all[j];
      if (!usable(a) || !usable(b)) continue;
      if (a.model == b.model) continue;
      if (relation_canonical(a.relation) != relation_canonical(b.relation)) continue;
      if (oracle_ratio(normalize_entity(a.subject).key, normalize_entity(b.subject).key) < fuzzy) continue;
      if (oracle_ratio(normalize_entity(a.object).key, normalize_entity(b.object).key) < fuzzy) continue;
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
  std::vector<int> comp(n, -1);
  std::vector<OracleCluster> out;
  for (size_t s = 0; s < n; ++s) {
    if (comp[s] >= 0 || !usable(all[s])) continue;
    std::vector<size_t> stack{s}, members;
    comp[s] = static_cast<int>(s);
    while (!stack.empty()) {
      auto u = stack.back();
      stack.pop_back();
      members.push_back(u);
      for (auto v : adj[u])
        if (comp[v] < 0) {
          comp[v] = static_cast<int>(s);
          stack.push_back(v);
        }
    }
    OracleCluster c;
    for (auto m : members) c.models.insert(all[m].model);
    if (static_cast<int>(c.models.size()) < threshold) continue;
    c.members = members.size();
    auto best = members.front();
    for (auto m : members) {
      const auto &x = all[m], &y = all[best];
      if (rank(x.confidence) != rank(y.confidence)) {
        if (rank(x.confidence) > rank(y.confidence)) best = m;
        continue;
      }
      if (std::tie(x.model, x.subject, x.object) < std::tie(y.model, y.subject, y.object)) best = m;
    }
    c.rep = all[best];
    out.push_back(c);
  }
  return out;
}

using Sig = std::tuple<std::string, std::string, std::string, std::set<std::string>, size_t>;

inline Sig sig(const ConsensusTriple& c) {
  return {c.representative.model, c.representative.subject, c.representative.object,
          std::set<std::string>(c.agreeing_models.begin(), c.agreeing_models.end()),
          static_cast<size_t>(c.cluster_members)};
}
inline Sig sig(const OracleCluster& c) { return {c.rep.model, c.rep.subject, c.rep.object, c.models, c.members}; }

inline std::map<std::string, std::vector<RawTriple>> random_instance(Rng& rng) {
  static const std::vector<std::string> subjects = {"Duchenne muscular dystrophy", "duchenne muscular dystrophy (DMD)",
                                                    "Duchene muscular dystrophy", "Becker muscular dystrophy",
                                                    "spinal muscular atrophy"};
  static const std::vector<std::string> objects = {"cardiomyopathy", "Cardiomyopathy", "cardiomyopathies",
                                                   "dilated cardiomyopathy", "proximal weakness",
                                                   "proximal muscle weakness", "weakness/fatigue", "scoliosis",
                                                   "scolioses", "calf hypertrophy"};
  static const std::vector<std::string> relations = {"disease_phenotype_positive", "has phenotype", "disease_protein",
                                                     "causes"};
  static const std::vector<ModelConfidence> confs = {ModelConfidence::kHigh, ModelConfidence::kMedium,
                                                     ModelConfidence::kLow};
  std::map<std::string, std::vector<RawTriple>> per;
  size_t models = 2 + rng.index(3);
  size_t n = 1 + rng.index(30);
  for (size_t m = 0; m < models; ++m) per["m" + std::to_string(m)];
  for (size_t i = 0; i < n; ++i) {
    auto model = "m" + std::to_string(rng.index(models));
    per[model].push_back(raw(model, subjects[rng.index(subjects.size())], objects[rng.index(objects.size())],
                             relations[rng.index(relations.size())], confs[rng.index(3)]));
  }
  return per;
}


}  // namespace oracle
