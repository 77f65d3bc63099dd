#include "consensus/consensus.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

#include "acquisition/acquisition.hpp"
#include "common/text.hpp"

namespace chronokg {

NormalizedEntity normalize_entity(const std::string& name) {
  std::string stripped;
  int depth = 0;
  for (char c : text::lower(name)) {
    if (c == '(' || c == '[') {
      ++depth;
    } else if ((c == ')' || c == ']') && depth > 0) {
      --depth;
      stripped.push_back(' ');
    } else if (depth == 0) {
      stripped.push_back(c);
    }
  }
  NormalizedEntity out;
  auto parts = text::split(stripped, '/');
  for (size_t i = 0; i < parts.size(); ++i) {
    auto p = text::collapse_ws(parts[i]);
    if (i == 0) {
      out.key = p;
    } else if (!p.empty()) {
      out.variants.push_back(p);
    }
  }
  if (out.key.empty() && !out.variants.empty()) {
    out.key = out.variants.front();
    out.variants.erase(out.variants.begin());
  }
  return out;
}

namespace {

std::u32string decode(const std::string& s) {
  std::u32string out;
  for (size_t i = 0; i < s.size();) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    int len = c < 0x80 ? 1 : (c >> 5) == 6 ? 2 : (c >> 4) == 14 ? 3 : (c >> 3) == 30 ? 4 : 1;
    char32_t cp = len == 1 ? c : len == 2 ? (c & 0x1F) : len == 3 ? (c & 0x0F) : (c & 0x07);
    for (int k = 1; k < len && i + k < s.size(); ++k)
      cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    out.push_back(cp);
    i += static_cast<size_t>(len);
  }
  return out;
}

size_t lcs_length(const std::u32string& a, const std::u32string& b) {
  std::vector<size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

int similarity_ratio(const std::string& a, const std::string& b) {
  auto ua = decode(a), ub = decode(b);
  size_t total = ua.size() + ub.size();
  if (total == 0) return 100;
  // (|a|+|b|-d)/(|a|+|b|) with d = |a|+|b|-2*LCS, rounded half-up exactly.
  size_t lcs = lcs_length(ua, ub);
  return static_cast<int>((400 * lcs + total) / (2 * total));
}

const std::vector<std::string>& relation_vocabulary() {
  static const std::vector<std::string> kVocab = {
      "disease_phenotype_positive", "disease_protein", "indication",   "contraindication",
      "off_label_use",              "disease_disease", "phenotype_protein", "drug_effect",
      "anatomy_involvement",        "exposure_disease"};
  return kVocab;
}

namespace {

std::string relation_form(const std::string& s) {
  std::string r = text::lower(s);
  for (auto& c : r)
    if (c == '_' || c == '-') c = ' ';
  return text::collapse_ws(r);
}

const std::unordered_map<std::string, std::string>& relation_aliases() {
  static const auto kTable = [] {
    std::unordered_map<std::string, std::string> m;
    auto add = [&m](const std::string& canonical, std::initializer_list<const char*> forms) {
      m[relation_form(canonical)] = canonical;
      for (const char* f : forms) m[relation_form(f)] = canonical;
    };
    add("disease_phenotype_positive",
        {"has phenotype", "phenotype", "disease phenotype", "presents with", "manifests as",
         "manifests with", "associated phenotype", "has symptom", "symptom", "clinical feature",
         "has clinical feature", "disease phenotype association"});
    add("disease_protein", {"gene", "disease gene", "caused by", "causal gene", "associated gene",
                            "has gene", "gene association", "disease gene association",
                            "caused by mutation in", "mutated gene"});
    add("indication", {"treated by", "treated with", "treatment", "treats", "indicated for",
                       "therapy", "has treatment"});
    add("contraindication", {"contraindicated", "contraindicated in", "contraindicated for"});
    add("off_label_use", {"off label", "off label treatment"});
    add("disease_disease", {"comorbidity", "comorbid with", "differential diagnosis",
                            "related disease", "subtype of", "associated disease"});
    add("phenotype_protein", {"phenotype gene", "phenotype protein association"});
    add("drug_effect", {"side effect", "adverse effect", "has side effect"});
    add("anatomy_involvement", {"affects", "involves", "anatomy", "disease anatomy",
                                "affects anatomy", "location"});
    add("exposure_disease", {"exposure", "risk factor", "environmental exposure"});
    return m;
  }();
  return kTable;
}

struct Candidate {
  const RawTriple* triple;
  NormalizedEntity subject;
  NormalizedEntity object;
  std::string relation;
};

class UnionFind {
 public:
  explicit UnionFind(size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  size_t find(size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(size_t a, size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<size_t> parent_;
};

// Higher confidence first; then smallest (model, subject, object); the full
// record text settles anything left so the pick never depends on input order.
bool better_representative(const RawTriple& a, const RawTriple& b) {
  int ra = confidence_rank(a.confidence), rb = confidence_rank(b.confidence);
  if (ra != rb) return ra > rb;
  auto ka = std::tie(a.model, a.subject, a.object);
  auto kb = std::tie(b.model, b.subject, b.object);
  if (ka != kb) return ka < kb;
  return to_json(a).dump() < to_json(b).dump();
}

}  // namespace

std::string relation_canonical(const std::string& relation) {
  const auto& table = relation_aliases();
  auto it = table.find(relation_form(relation));
  return it == table.end() ? std::string(kQuarantineRelation) : it->second;
}

bool consensus_less(const ConsensusTriple& a, const ConsensusTriple& b) {
  return std::tie(a.subject_key, a.relation, a.object_key, a.representative.pmid,
                  a.representative.model) < std::tie(b.subject_key, b.relation, b.object_key,
                                                     b.representative.pmid, b.representative.model);
}

std::vector<ConsensusTriple> compute_consensus(
    const std::map<std::string, std::vector<RawTriple>>& per_model_triples, int threshold,
    int fuzzy_threshold, std::optional<int> total_models) {
  std::vector<Candidate> cands;
  for (const auto& [model, triples] : per_model_triples)
    for (const auto& t : triples)
      cands.push_back({&t, normalize_entity(t.subject), normalize_entity(t.object),
                       relation_canonical(t.relation)});
  const int total = total_models.value_or(static_cast<int>(per_model_triples.size()));

  UnionFind uf(cands.size());
  for (size_t i = 0; i < cands.size(); ++i) {
    for (size_t j = i + 1; j < cands.size(); ++j) {
      const auto& a = cands[i];
      const auto& b = cands[j];
      if (a.relation != b.relation || a.relation == kQuarantineRelation) continue;
      if (a.triple->model == b.triple->model) continue;
      if (!a.subject.valid() || !a.object.valid() || !b.subject.valid() || !b.object.valid()) continue;
      if (similarity_ratio(a.subject.key, b.subject.key) < fuzzy_threshold) continue;
      if (similarity_ratio(a.object.key, b.object.key) < fuzzy_threshold) continue;
      uf.unite(i, j);
    }
  }

  std::map<size_t, std::vector<size_t>> clusters;
  for (size_t i = 0; i < cands.size(); ++i) clusters[uf.find(i)].push_back(i);

  std::vector<ConsensusTriple> out;
  for (const auto& [_, members] : clusters) {
    std::set<std::string> models;
    for (size_t m : members) models.insert(cands[m].triple->model);
    if (static_cast<int>(models.size()) < threshold) continue;
    size_t best = members.front();
    for (size_t m : members)
      if (better_representative(*cands[m].triple, *cands[best].triple)) best = m;
    ConsensusTriple c;
    c.representative = *cands[best].triple;
    c.relation = cands[best].relation;
    c.subject_key = cands[best].subject.key;
    c.object_key = cands[best].object.key;
    c.subject_variants = cands[best].subject.variants;
    c.object_variants = cands[best].object.variants;
    c.agreeing_models.assign(models.begin(), models.end());
    c.cluster_members = static_cast<int>(members.size());
    c.total_models = total;
    c.consensus_confidence = total > 0 ? static_cast<double>(models.size()) / total : 0.0;
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), consensus_less);
  return out;
}

std::vector<ConsensusTriple> consensus_for_document(const ExtractionResult& extraction,
                                                    const PipelineConfig& config) {
  std::map<std::string, std::vector<RawTriple>> processed;
  for (const auto& m : extraction.models_processed) {
    auto it = extraction.per_model.find(m);
    processed[m] = it == extraction.per_model.end() ? std::vector<RawTriple>{} : it->second;
  }
  return compute_consensus(processed, config.consensus_threshold, config.fuzzy_threshold,
                           static_cast<int>(extraction.models_processed.size()));
}

bool onsets_compatible(const TemporalContext& a, const TemporalContext& b) {
  auto ra = a.onset(), rb = b.onset();
  if (!ra && !rb) return true;
  if (!ra || !rb) return false;
  return ranges_overlap(*ra, *rb);
}

std::vector<TemporalTriple> merge_multi_source(const std::vector<TemporalTriple>& triples) {
  std::vector<TemporalTriple> out;
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<size_t>> by_key;
  for (const auto& t : triples) {
    auto key = std::make_tuple(normalize_entity(t.source_name).key, t.relation,
                               normalize_entity(t.target_name).key);
    auto& slots = by_key[key];
    bool merged = false;
    for (size_t idx : slots) {
      auto& host = out[idx];
      if (!onsets_compatible(host.temporal, t.temporal)) continue;
      for (const auto& id : t.evidence.source_ids)
        if (std::find(host.evidence.source_ids.begin(), host.evidence.source_ids.end(), id) ==
            host.evidence.source_ids.end())
          host.evidence.source_ids.push_back(id);
      merged = true;
      break;
    }
    if (!merged) {
      slots.push_back(out.size());
      out.push_back(t);
    }
  }
  return out;
}

}  // namespace chronokg
