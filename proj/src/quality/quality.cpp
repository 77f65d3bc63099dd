#include "quality/quality.hpp"

#include <algorithm>

#include "common/digest.hpp"
#include "common/error.hpp"
#include "common/files.hpp"
#include "common/text.hpp"

namespace chronokg {

using nlohmann::ordered_json;

ValidationOutcome validate_triple(const ConsensusTriple& triple, const PipelineConfig& config) {
  ValidationOutcome out;
  if (!normalize_entity(triple.representative.subject).valid() ||
      !normalize_entity(triple.representative.object).valid())
    out.reasons.push_back("empty-entity");
  if (triple.relation == kQuarantineRelation) out.reasons.push_back("unknown-relation");
  if (triple.representative.temporal_context) {
    for (auto& r : temporal_violations(*triple.representative.temporal_context, config.age_min,
                                       config.age_max))
      out.reasons.push_back(r);
  }
  auto s = normalize_entity(triple.representative.subject).key;
  if (!s.empty() && s == normalize_entity(triple.representative.object).key)
    out.reasons.push_back("self-reference");
  return out;
}

double study_type_weight(StudyType type, const std::map<StudyType, double>& table) {
  auto it = table.find(type);
  if (it != table.end()) return it->second;
  auto other = table.find(StudyType::kOther);
  return other == table.end() ? 0.1 : other->second;
}

double study_type_weight(const std::string& type, const std::map<StudyType, double>& table) {
  return study_type_weight(parse_study_type(type), table);
}

double credibility_score(const CredibilitySignals& s, const CredibilityWeights& w) {
  double v = w.journal_tier * s.journal_tier.value_or(0) +
             w.citation_velocity * s.citation_velocity.value_or(0) +
             w.study_type * s.study_type_weight +
             w.replication * s.replication_signal.value_or(0) +
             w.retraction * s.retraction_check.value_or(0) + w.llm_consensus * s.llm_consensus;
  return std::clamp(v, 0.0, 1.0);
}

CredibilitySignals signals_for(const SourceDocument* doc, double consensus_confidence,
                               const PipelineConfig& config) {
  CredibilitySignals s;
  s.llm_consensus = consensus_confidence;
  s.study_type_weight = study_type_weight(doc ? doc->study_type : StudyType::kOther,
                                          config.study_type_weights);
  if (doc) {
    s.journal_tier = doc->journal_tier;
    s.citation_velocity = doc->citation_velocity;
    s.replication_signal = doc->replication_signal;
    if (doc->is_retracted) s.retraction_check = *doc->is_retracted ? 0.0 : 1.0;
  }
  return s;
}

// ---------------------------------------------------------------------------

std::string SchemaIndex::normalize_id(const std::string& id) {
  std::string t = text::trim(id);
  if (!t.empty() && std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    auto nz = t.find_first_not_of('0');
    t = nz == std::string::npos ? "0" : t.substr(nz);
  }
  return t;
}

void SchemaIndex::add_edge(const std::string& head_id, const std::string& head_type,
                           const std::string& relation, const std::string& tail_id,
                           const std::string& tail_type, const std::string& head_name,
                           const std::string& tail_name) {
  auto h = normalize_id(head_id), t = normalize_id(tail_id);
  if (edges_.emplace(h, relation, t).second)
    named_.push_back({h, head_type, head_name, relation, t, tail_type, tail_name});
  if (!head_type.empty()) types_.insert(head_type);
  if (!tail_type.empty()) types_.insert(tail_type);
  auto remember = [this](const std::string& name, const std::string& id, const std::string& type) {
    if (name.empty()) return;
    auto key = normalize_entity(name).key;
    if (!key.empty()) names_.emplace(key, std::make_pair(id, type));
  };
  remember(head_name, h, head_type);
  remember(tail_name, t, tail_type);
}

bool SchemaIndex::has_edge(const std::string& head_id, const std::string& relation,
                           const std::string& tail_id) const {
  auto h = normalize_id(head_id), t = normalize_id(tail_id);
  return edges_.count({h, relation, t}) > 0 || edges_.count({t, relation, h}) > 0;
}

std::optional<std::pair<std::string, std::string>> SchemaIndex::resolve(const std::string& name) const {
  auto n = normalize_entity(name);
  if (auto it = names_.find(n.key); it != names_.end()) return it->second;
  for (const auto& v : n.variants)
    if (auto it = names_.find(v); it != names_.end()) return it->second;
  return std::nullopt;
}

SchemaIndex SchemaIndex::parse(const std::string& tsv) {
  SchemaIndex idx;
  auto lines = text::split(tsv, '\n');
  if (lines.empty()) return idx;
  auto header = text::split(text::trim(lines[0]), '\t');
  std::map<std::string, size_t> col;
  for (size_t i = 0; i < header.size(); ++i) col[text::trim(header[i])] = i;
  for (const char* required : {"head_id", "head_type", "relation", "tail_id", "tail_type"})
    if (!col.count(required))
      fail(ErrorKind::kParse, std::string("schema snapshot lacks column ") + required);
  auto get = [&](const std::vector<std::string>& f, const char* name) -> std::string {
    auto it = col.find(name);
    return it == col.end() || it->second >= f.size() ? std::string() : text::trim(f[it->second]);
  };
  for (size_t n = 1; n < lines.size(); ++n) {
    auto line = lines[n];
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || line[0] == '#') continue;
    auto f = text::split(line, '\t');
    if (f.size() < 5)
      fail(ErrorKind::kParse, "schema snapshot line " + std::to_string(n + 1) + " has too few columns");
    idx.add_edge(get(f, "head_id"), get(f, "head_type"), get(f, "relation"), get(f, "tail_id"),
                 get(f, "tail_type"), get(f, "head_name"), get(f, "tail_name"));
  }
  return idx;
}

SchemaIndex SchemaIndex::load(const std::filesystem::path& path) {
  return parse(files::read_maybe_gzip(path));
}

std::string normalize_entity_type(const std::string& type, const SchemaIndex& index) {
  static const std::map<std::string, std::string> kAliases = {
      {"gene", "gene/protein"},        {"protein", "gene/protein"},
      {"gene/protein", "gene/protein"}, {"phenotype", "phenotype"},
      {"effect/phenotype", "phenotype"}, {"symptom", "phenotype"},
      {"sign", "phenotype"},           {"clinical feature", "phenotype"},
      {"drug", "drug"},                {"medication", "drug"},
      {"treatment", "drug"},           {"disease", "disease"},
      {"disorder", "disease"},         {"condition", "disease"},
      {"anatomy", "anatomy"},          {"tissue", "anatomy"},
      {"organ", "anatomy"},            {"exposure", "exposure"}};
  auto l = text::collapse_ws(text::lower(type));
  if (index.types().count(l)) return l;
  auto it = kAliases.find(l);
  if (it != kAliases.end()) {
    if (index.types().empty() || index.types().count(it->second)) return it->second;
    // The index spells the family differently, e.g. "effect/phenotype".
    for (const auto& t : index.types())
      if (text::contains_ci(t, it->second)) return t;
    return it->second;
  }
  return l.empty() ? std::string("unknown") : l;
}

namespace {

std::string novel_id(const std::string& key) { return "novel:" + sha256_hex(key).substr(0, 8); }

bool names_disease(const std::string& name, const DiseaseProfile& p) {
  auto key = normalize_entity(name).key;
  if (key.empty()) return false;
  if (key == normalize_entity(p.name).key) return true;
  for (const auto& s : p.synonyms)
    if (key == normalize_entity(s).key) return true;
  return false;
}

std::string curie_local(const std::string& curie) {
  auto c = curie.find(':');
  return SchemaIndex::normalize_id(c == std::string::npos ? curie : curie.substr(c + 1));
}

}  // namespace

Alignment align_schema(const ConsensusTriple& triple, const SchemaIndex& index,
                       const DiseaseProfile* profile) {
  Alignment a;
  const auto& r = triple.representative;
  auto side = [&](const std::string& name, const std::string& type, std::string& id_out,
                  std::string& type_out) {
    if (auto hit = index.resolve(name)) {
      id_out = hit->first;
      type_out = hit->second.empty() ? normalize_entity_type(type, index) : hit->second;
      return;
    }
    type_out = normalize_entity_type(type, index);
    id_out = profile && names_disease(name, *profile) ? curie_local(profile->disease_id)
                                                      : novel_id(normalize_entity(name).key);
  };
  side(r.subject, r.subject_type, a.source_id, a.source_type);
  side(r.object, r.object_type, a.target_id, a.target_type);
  a.grade = index.has_edge(a.source_id, triple.relation, a.target_id) ? QualityGrade::kA
                                                                       : QualityGrade::kB;
  return a;
}

// ---------------------------------------------------------------------------

std::vector<Conflict> detect_conflicts(const std::vector<TemporalTriple>& triples, double gap_years) {
  std::vector<Conflict> out;
  for (size_t i = 0; i < triples.size(); ++i) {
    auto ri = triples[i].temporal.onset();
    if (!ri) continue;
    auto si = normalize_entity(triples[i].source_name).key;
    auto ti = normalize_entity(triples[i].target_name).key;
    for (size_t j = i + 1; j < triples.size(); ++j) {
      auto rj = triples[j].temporal.onset();
      if (!rj || triples[j].relation != triples[i].relation) continue;
      if (normalize_entity(triples[j].source_name).key != si ||
          normalize_entity(triples[j].target_name).key != ti)
        continue;
      double gap = range_gap(*ri, *rj);
      if (gap > gap_years)
        out.push_back({triples[i].edge_id, triples[j].edge_id, triples[i].source_name,
                       triples[i].relation, triples[i].target_name, gap});
    }
  }
  return out;
}

QcResult qc_pipeline(const std::vector<ConsensusTriple>& triples, const PipelineConfig& config,
                     const SchemaIndex& index, const DiseaseProfile& profile,
                     const std::map<std::string, SourceDocument>& documents) {
  QcResult result;
  std::set<std::string> seen_edges;
  for (const auto& c : triples) {
    const auto& r = c.representative;
    auto outcome = validate_triple(c, config);
    Alignment align;
    std::string edge;
    if (outcome.passed()) {
      align = align_schema(c, index, &profile);
      edge = edge_hash(align.source_id, c.relation, align.target_id, r.pmid);
      if (seen_edges.count(edge)) outcome.reasons.push_back("duplicate-edge");
    }
    if (!outcome.passed()) {
      result.rejections.push_back({r.pmid, r.subject, r.relation, r.object, outcome.reasons});
      continue;
    }
    seen_edges.insert(edge);

    auto doc_it = documents.find(r.pmid);
    const SourceDocument* doc = doc_it == documents.end() ? nullptr : &doc_it->second;

    TemporalTriple t;
    t.edge_id = edge;
    t.source_id = align.source_id;
    t.source_type = align.source_type;
    t.source_name = text::collapse_ws(r.subject);
    t.relation = c.relation;
    t.target_id = align.target_id;
    t.target_type = align.target_type;
    t.target_name = text::collapse_ws(r.object);
    if (r.temporal_context) t.temporal = *r.temporal_context;
    t.evidence.tier = 2;
    t.evidence.source_ids = {"PMID:" + strip_pmid_prefix(r.pmid)};
    t.evidence.evidence_text = text::utf8_truncate(r.evidence_text, config.evidence_text_cap);
    t.evidence.study_type = doc ? doc->study_type : StudyType::kOther;
    t.evidence.consensus_confidence = c.consensus_confidence;
    t.evidence.credibility_score =
        credibility_score(signals_for(doc, c.consensus_confidence, config), config.credibility_weights);
    t.evidence.extraction_models = {r.model};
    if (doc) {
      t.evidence.citation_count = doc->citation_count;
      t.evidence.is_retracted = doc->is_retracted.value_or(false);
    }
    t.evidence.publication_year = r.publication_year;
    t.conditions = r.conditions;
    t.extraction_date = config.extraction_date;
    t.pipeline_version = config.pipeline_version;
    t.disease_profile_id = profile.disease_id;
    t.quality_grade = align.grade;
    result.validated.push_back(std::move(t));
  }
  result.conflicts = detect_conflicts(result.validated, config.conflict_gap_years);
  return result;
}

ordered_json to_json(const Rejection& r) {
  ordered_json j = ordered_json::object();
  j["pmid"] = r.pmid;
  j["subject"] = r.subject;
  j["relation"] = r.relation;
  j["object"] = r.object;
  j["reasons"] = r.reasons;
  return j;
}

ordered_json to_json(const Conflict& c) {
  ordered_json j = ordered_json::object();
  j["edge_a"] = c.edge_a;
  j["edge_b"] = c.edge_b;
  j["source_name"] = c.source_name;
  j["relation"] = c.relation;
  j["target_name"] = c.target_name;
  j["gap_years"] = c.gap_years;
  return j;
}

}  // namespace chronokg
