#include <algorithm>
#include <set>

#include "acquisition/acquisition.hpp"
#include "common/error.hpp"
#include "common/text.hpp"
#include "core/json_io.hpp"
#include "store/store.hpp"

namespace chronokg {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

double median(std::vector<double> v) {
  if (v.empty()) fail(ErrorKind::kDomain, "median of an empty set");
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

bool is_phenotype_edge(const TemporalTriple& t) {
  return t.relation == "disease_phenotype_positive";
}

namespace {

void add_pmids(std::vector<std::string>& into, const std::vector<std::string>& ids) {
  for (const auto& id : ids)
    if (std::find(into.begin(), into.end(), id) == into.end()) into.push_back(id);
}

void sort_pmids(std::vector<std::string>& ids) {
  std::sort(ids.begin(), ids.end(), [](const std::string& a, const std::string& b) {
    return pmid_less(strip_pmid_prefix(a), strip_pmid_prefix(b));
  });
}

// Most frequent value, ties to the lexicographically smallest.
std::optional<std::string> mode(const std::vector<std::string>& values) {
  std::map<std::string, int> counts;
  for (const auto& v : values) ++counts[v];
  std::optional<std::string> best;
  int best_n = 0;
  for (const auto& [v, n] : counts)
    if (n > best_n) {
      best = v;
      best_n = n;
    }
  return best;
}

}  // namespace

OnsetAggregate aggregate_onset(const std::vector<TemporalTriple>& triples,
                               const std::optional<std::string>& phenotype) {
  OnsetAggregate agg;
  std::optional<std::string> filter;
  if (phenotype) filter = normalize_entity(*phenotype).key;

  std::vector<double> mins, maxs;
  std::map<std::string, std::vector<const TemporalTriple*>> groups;
  for (const auto& t : triples) {
    if (!is_phenotype_edge(t)) continue;
    auto onset = t.temporal.onset();
    if (!onset) continue;
    auto key = normalize_entity(t.target_name).key;
    if (filter && key != *filter) continue;
    mins.push_back(onset->min);
    maxs.push_back(onset->max);
    groups[key].push_back(&t);
  }
  if (mins.empty()) return agg;

  agg.median_range = AgeRange{median(mins), median(maxs)};
  agg.pooled_range = AgeRange{*std::min_element(mins.begin(), mins.end()),
                              *std::max_element(maxs.begin(), maxs.end())};
  for (const auto& [key, members] : groups) {
    PhenotypeOnset p;
    p.key = key;
    p.phenotype = members.front()->target_name;
    std::vector<double> gmin, gmax;
    for (const auto* t : members) {
      auto o = *t->temporal.onset();
      gmin.push_back(o.min);
      gmax.push_back(o.max);
      add_pmids(p.pmids, t->evidence.source_ids);
    }
    sort_pmids(p.pmids);
    p.median_range = {median(gmin), median(gmax)};
    p.triples = members.size();
    agg.per_phenotype.push_back(std::move(p));
  }
  std::sort(agg.per_phenotype.begin(), agg.per_phenotype.end(),
            [](const PhenotypeOnset& a, const PhenotypeOnset& b) {
              if (a.median_range.min != b.median_range.min)
                return a.median_range.min < b.median_range.min;
              return a.key < b.key;
            });
  AgeRange span = agg.per_phenotype.front().median_range;
  for (const auto& p : agg.per_phenotype) {
    span.min = std::min(span.min, p.median_range.min);
    span.max = std::max(span.max, p.median_range.max);
  }
  agg.phenotype_span = span;
  return agg;
}

// ---------------------------------------------------------------------------

KgStore::KgStore(std::vector<TemporalTriple> triples) : triples_(std::move(triples)) {
  for (const auto& t : triples_) {
    by_disease_[t.disease_profile_id].push_back(t);
    if (t.source_type == "disease" && !id_to_name_.count(t.disease_profile_id))
      id_to_name_[t.disease_profile_id] = t.source_name;
  }
  for (const auto& [id, name] : id_to_name_) name_to_id_[normalize_entity(name).key] = id;
}

KgStore KgStore::open(const fs::path& path) {
  fs::path file = fs::is_directory(path) ? StoreLayout{path}.flat(Tier::kValidated) : path;
  return KgStore(load_validated(file).records);
}

std::vector<std::string> KgStore::diseases() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : by_disease_) out.push_back(id);
  return out;
}

const std::string* KgStore::resolve(const std::string& disease) const {
  if (auto it = by_disease_.find(disease); it != by_disease_.end()) return &it->first;
  if (auto it = name_to_id_.find(normalize_entity(disease).key); it != name_to_id_.end())
    return &by_disease_.find(it->second)->first;
  return nullptr;
}

bool KgStore::has_disease(const std::string& disease) const { return resolve(disease) != nullptr; }

const std::vector<TemporalTriple>& KgStore::triples_for(const std::string& disease) const {
  const std::string* id = resolve(disease);
  if (!id) fail(ErrorKind::kNotFound, "disease not in store: " + disease);
  return by_disease_.at(*id);
}

std::string KgStore::disease_name(const std::string& disease) const {
  const std::string* id = resolve(disease);
  if (!id) fail(ErrorKind::kNotFound, "disease not in store: " + disease);
  auto it = id_to_name_.find(*id);
  return it == id_to_name_.end() ? *id : it->second;
}

OnsetAnswer KgStore::query_onset(const std::string& disease, const std::string& phenotype,
                                 int fuzzy_threshold) const {
  const auto& triples = triples_for(disease);
  auto agg = aggregate_onset(triples);
  if (agg.empty()) fail(ErrorKind::kNotFound, "no onset data for " + disease);

  auto key = normalize_entity(phenotype).key;
  const PhenotypeOnset* hit = nullptr;
  for (const auto& p : agg.per_phenotype)
    if (p.key == key) hit = &p;
  if (!hit && !key.empty()) {
    int best = -1;
    for (const auto& p : agg.per_phenotype) {
      int r = similarity_ratio(key, p.key);
      if (r >= fuzzy_threshold && (r > best || (r == best && p.key < hit->key))) {
        best = r;
        hit = &p;
      }
    }
  }
  OnsetAnswer a;
  if (hit) {
    a.range = hit->median_range;
    a.pmids = hit->pmids;
    a.matched_phenotype = hit->phenotype;
    return a;
  }
  a.fallback = true;
  a.range = *agg.median_range;
  for (const auto& p : agg.per_phenotype) add_pmids(a.pmids, p.pmids);
  sort_pmids(a.pmids);
  return a;
}

std::vector<std::string> KgStore::query_stage(const std::string& disease,
                                              const std::string& stage) const {
  auto want = text::collapse_ws(text::lower(stage));
  std::set<std::string> out;
  for (const auto& t : triples_for(disease)) {
    if (!is_phenotype_edge(t) || !t.temporal.progression_stage) continue;
    if (text::collapse_ws(text::lower(*t.temporal.progression_stage)) == want)
      out.insert(normalize_entity(t.target_name).key);
  }
  return {out.begin(), out.end()};
}

TemporalProfile KgStore::temporal_profile(const std::string& disease) const {
  const auto& triples = triples_for(disease);
  TemporalProfile prof;
  prof.disease_id = *resolve(disease);
  prof.disease_name = disease_name(disease);

  std::map<std::string, std::vector<const TemporalTriple*>> groups;
  for (const auto& t : triples)
    if (is_phenotype_edge(t) && t.temporal.is_temporal())
      groups[normalize_entity(t.target_name).key].push_back(&t);

  for (const auto& [key, members] : groups) {
    ProfileEntry e;
    e.phenotype = members.front()->target_name;
    std::vector<double> mins, maxs;
    std::vector<std::string> stages, milestones;
    for (const auto* t : members) {
      if (auto o = t->temporal.onset()) {
        mins.push_back(o->min);
        maxs.push_back(o->max);
      }
      if (t->temporal.progression_stage) stages.push_back(*t->temporal.progression_stage);
      if (t->temporal.milestone) milestones.push_back(*t->temporal.milestone);
      add_pmids(e.pmids, t->evidence.source_ids);
    }
    if (!mins.empty()) {
      e.onset_min = median(mins);
      e.onset_max = median(maxs);
    }
    e.stage = mode(stages);
    e.milestone = mode(milestones);
    sort_pmids(e.pmids);
    prof.entries.push_back(std::move(e));
  }
  std::sort(prof.entries.begin(), prof.entries.end(),
            [](const ProfileEntry& a, const ProfileEntry& b) {
              if (a.onset_min.has_value() != b.onset_min.has_value()) return a.onset_min.has_value();
              if (a.onset_min && *a.onset_min != *b.onset_min) return *a.onset_min < *b.onset_min;
              return a.phenotype < b.phenotype;
            });
  return prof;
}

ordered_json to_json(const TemporalProfile& p) {
  ordered_json j = ordered_json::object();
  j["disease_id"] = p.disease_id;
  j["disease_name"] = p.disease_name;
  j["entries"] = ordered_json::array();
  for (const auto& e : p.entries) {
    ordered_json r = ordered_json::object();
    r["phenotype"] = e.phenotype;
    r["onset_min"] = age_value(e.onset_min);
    r["onset_max"] = age_value(e.onset_max);
    r["stage"] = e.stage ? ordered_json(*e.stage) : ordered_json(nullptr);
    r["milestone"] = e.milestone ? ordered_json(*e.milestone) : ordered_json(nullptr);
    r["pmids"] = e.pmids;
    j["entries"].push_back(r);
  }
  return j;
}

}  // namespace chronokg
