#include "acquisition/acquisition.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>

#include "common/error.hpp"
#include "common/files.hpp"
#include "common/text.hpp"

namespace chronokg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename T>
std::optional<T> opt(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

std::vector<std::string> string_list(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  return it->get<std::vector<std::string>>();
}

}  // namespace

void check_document(const SourceDocument& doc) {
  if (doc.pmid.empty() ||
      !std::all_of(doc.pmid.begin(), doc.pmid.end(),
                   [](unsigned char c) { return std::isdigit(c); })) {
    fail(ErrorKind::kParse, "document pmid '" + doc.pmid + "' is not numeric");
  }
  if (text::trim(doc.text).empty())
    fail(ErrorKind::kParse, "document " + doc.pmid + " has no text");
}

json to_json(const SourceDocument& d) {
  json j = json::object();
  j["pmid"] = d.pmid;
  j["pmc_id"] = d.pmc_id ? json(*d.pmc_id) : json(nullptr);
  j["title"] = d.title;
  j["text"] = d.text;
  j["publication_year"] = d.publication_year ? json(*d.publication_year) : json(nullptr);
  j["journal"] = d.journal ? json(*d.journal) : json(nullptr);
  j["publication_types"] = d.publication_types;
  j["study_type"] = std::string(to_string(d.study_type));
  j["pre_rank_score"] = d.pre_rank_score;
  if (d.journal_tier) j["journal_tier"] = *d.journal_tier;
  if (d.citation_velocity) j["citation_velocity"] = *d.citation_velocity;
  if (d.replication_signal) j["replication_signal"] = *d.replication_signal;
  if (d.is_retracted) j["is_retracted"] = *d.is_retracted;
  if (d.citation_count) j["citation_count"] = *d.citation_count;
  return j;
}

SourceDocument document_from_json(const json& j) {
  SourceDocument d;
  try {
    d.pmid = j.at("pmid").is_string() ? j.at("pmid").get<std::string>()
                                      : std::to_string(j.at("pmid").get<long>());
    d.pmc_id = opt<std::string>(j, "pmc_id");
    d.title = j.value("title", "");
    d.text = j.value("text", "");
    if (d.text.empty()) d.text = j.value("abstract", "");
    d.publication_year = opt<int>(j, "publication_year");
    d.journal = opt<std::string>(j, "journal");
    d.publication_types = string_list(j, "publication_types");
    if (auto st = opt<std::string>(j, "study_type"))
      d.study_type = parse_study_type(*st);
    else
      d.study_type = label_study_type(d.publication_types, d.title);
    d.pre_rank_score = j.value("pre_rank_score", 0.0);
    d.journal_tier = opt<double>(j, "journal_tier");
    d.citation_velocity = opt<double>(j, "citation_velocity");
    d.replication_signal = opt<double>(j, "replication_signal");
    d.is_retracted = opt<bool>(j, "is_retracted");
    d.citation_count = opt<long>(j, "citation_count");
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("bad document record: ") + e.what());
  }
  check_document(d);
  return d;
}

// ---------------------------------------------------------------------------

json FixtureOntologySource::lookup(const std::string& disease_id) {
  auto path = dir_ / (text::curie_slug(disease_id) + ".json");
  if (!fs::exists(path)) fail(ErrorKind::kNotFound, "unknown disease " + disease_id);
  try {
    return json::parse(files::read_text(path));
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, path.string() + ": " + e.what());
  }
}

FixtureDocumentSource::FixtureDocumentSource(fs::path dir) : dir_(std::move(dir)) {
  if (!fs::is_directory(dir_)) fail(ErrorKind::kNotFound, "no document directory " + dir_.string());
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir_))
    if (entry.path().extension() == ".json") paths.push_back(entry.path());
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) {
    try {
      docs_.push_back(document_from_json(json::parse(files::read_text(p))));
    } catch (const json::exception& e) {
      fail(ErrorKind::kParse, p.string() + ": " + e.what());
    }
  }
}

namespace {

std::vector<std::string> search_docs(const std::vector<SourceDocument>& docs,
                                     const std::string& query) {
  auto terms = query_terms(query);
  std::vector<std::string> hits;
  for (const auto& d : docs) {
    for (const auto& t : terms) {
      if (text::contains_ci(d.title, t) || text::contains_ci(d.text, t)) {
        hits.push_back(d.pmid);
        break;
      }
    }
  }
  std::sort(hits.begin(), hits.end(), pmid_less);
  return hits;
}

std::vector<SourceDocument> fetch_docs(const std::vector<SourceDocument>& docs,
                                       const std::vector<std::string>& pmids) {
  std::vector<SourceDocument> out;
  for (const auto& id : pmids) {
    auto it = std::find_if(docs.begin(), docs.end(),
                           [&](const SourceDocument& d) { return d.pmid == id; });
    if (it != docs.end()) out.push_back(*it);
  }
  return out;
}

}  // namespace

std::vector<std::string> FixtureDocumentSource::search(const std::string& query) {
  return search_docs(docs_, query);
}

std::vector<SourceDocument> FixtureDocumentSource::fetch(const std::vector<std::string>& pmids) {
  return fetch_docs(docs_, pmids);
}

std::vector<std::string> MemoryDocumentSource::search(const std::string& query) {
  ++search_calls;
  return search_docs(docs_, query);
}

std::vector<SourceDocument> MemoryDocumentSource::fetch(const std::vector<std::string>& pmids) {
  ++fetch_calls;
  return fetch_docs(docs_, pmids);
}

std::vector<std::string> query_terms(const std::string& query) {
  std::vector<std::string> terms;
  static const std::regex kQuoted("\"([^\"]+)\"");
  for (auto it = std::sregex_iterator(query.begin(), query.end(), kQuoted);
       it != std::sregex_iterator(); ++it) {
    terms.push_back((*it)[1].str());
  }
  if (terms.empty() && !text::trim(query).empty()) terms.push_back(text::trim(query));
  return terms;
}

std::string build_search_query(const DiseaseProfile& profile) {
  std::vector<std::string> parts;
  auto add = [&](const std::string& term) {
    auto t = text::trim(text::replace_all(term, "\"", ""));
    if (t.empty()) return;
    std::string clause = "\"" + t + "\"[tiab]";
    if (std::find(parts.begin(), parts.end(), clause) == parts.end()) parts.push_back(clause);
  };
  add(profile.name);
  for (const auto& s : profile.synonyms) add(s);
  return "(" + text::join(parts, " OR ") + ")";
}

// ---------------------------------------------------------------------------

LiteratureTier profile_tier(long pubmed_count) { return assign_tier(pubmed_count); }

bool is_well_formed_curie(const std::string& id) {
  static const std::regex kCurie("^[A-Za-z][A-Za-z0-9_.-]*:[A-Za-z0-9_.-]+$");
  return std::regex_match(id, kCurie);
}

DiseaseProfile profile_from_json(const json& j) {
  DiseaseProfile p;
  try {
    p.disease_id = j.at("disease_id").get<std::string>();
    p.name = j.at("name").get<std::string>();
    p.synonyms = string_list(j, "synonyms");
    p.differential_diseases = string_list(j, "differential_diseases");
    p.known_genes = string_list(j, "known_genes");
    p.known_phenotypes = string_list(j, "known_phenotypes");
    p.category = opt<std::string>(j, "category");
    p.inheritance_pattern = opt<std::string>(j, "inheritance_pattern");
    p.pubmed_count = j.value("pubmed_count", 0L);
    p.pmc_fulltext_available = j.value("pmc_fulltext_available", false);
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("bad ontology record: ") + e.what());
  }
  if (p.pubmed_count < 0) fail(ErrorKind::kParse, "negative pubmed_count for " + p.disease_id);
  p.tier = assign_tier(p.pubmed_count);
  return p;
}

json to_json(const DiseaseProfile& p) {
  json j = json::object();
  j["disease_id"] = p.disease_id;
  j["name"] = p.name;
  j["synonyms"] = p.synonyms;
  j["differential_diseases"] = p.differential_diseases;
  j["known_genes"] = p.known_genes;
  j["known_phenotypes"] = p.known_phenotypes;
  j["category"] = p.category ? json(*p.category) : json(nullptr);
  j["inheritance_pattern"] = p.inheritance_pattern ? json(*p.inheritance_pattern) : json(nullptr);
  j["pubmed_count"] = p.pubmed_count;
  j["pmc_fulltext_available"] = p.pmc_fulltext_available;
  j["tier"] = std::string(to_string(p.tier));
  return j;
}

DiseaseProfile profile_disease(const std::string& disease_id, OntologySource& source) {
  if (!is_well_formed_curie(disease_id))
    fail(ErrorKind::kNotFound, "malformed disease CURIE '" + disease_id + "'");
  json raw = source.lookup(disease_id);
  if (!raw.contains("disease_id")) raw["disease_id"] = disease_id;
  auto p = profile_from_json(raw);
  if (p.disease_id != disease_id)
    fail(ErrorKind::kNotFound, "ontology returned " + p.disease_id + " for " + disease_id);
  return p;
}

// ---------------------------------------------------------------------------

StudyType label_study_type(const std::vector<std::string>& publication_types,
                           const std::string& title) {
  // Ordered from most to least specific; the first hit wins.
  static const std::vector<std::pair<std::string, StudyType>> kRules = {
      {"meta-analysis", StudyType::kMetaAnalysis},
      {"meta analysis", StudyType::kMetaAnalysis},
      {"systematic review", StudyType::kMetaAnalysis},
      {"guideline", StudyType::kGuideline},
      {"consensus statement", StudyType::kGuideline},
      {"randomized controlled trial", StudyType::kRct},
      {"randomised controlled trial", StudyType::kRct},
      {"registry", StudyType::kDatabase},
      {"database", StudyType::kDatabase},
      {"cohort", StudyType::kCohort},
      {"observational study", StudyType::kCohort},
      {"longitudinal", StudyType::kCohort},
      {"case-control", StudyType::kCaseControl},
      {"case control", StudyType::kCaseControl},
      {"review", StudyType::kReview},
      {"case series", StudyType::kCaseSeries},
      {"case report", StudyType::kCaseReport},
      {"expert opinion", StudyType::kExpertOpinion},
      {"editorial", StudyType::kExpertOpinion},
      {"comment", StudyType::kExpertOpinion},
  };
  for (const auto& [needle, type] : kRules)
    for (const auto& pt : publication_types)
      if (text::contains_ci(pt, needle)) return type;
  for (const auto& [needle, type] : kRules)
    if (text::contains_ci(title, needle)) return type;
  return StudyType::kOther;
}

double pre_rank(const PreRankSignals& s) {
  double v = 0.5 * s.journal_tier.value_or(0.0) + 0.5 * s.recency.value_or(0.0);
  return std::clamp(v, 0.0, 1.0);
}

PreRankSignals pre_rank_signals(const SourceDocument& doc, int reference_year) {
  PreRankSignals s;
  s.journal_tier = doc.journal_tier;
  if (doc.publication_year) {
    double age = reference_year - *doc.publication_year;
    s.recency = std::clamp(1.0 - age / 20.0, 0.0, 1.0);
  }
  return s;
}

double pre_rank(const SourceDocument& doc, int reference_year) {
  return pre_rank(pre_rank_signals(doc, reference_year));
}

JournalTierTable JournalTierTable::load(const fs::path& path) {
  JournalTierTable t;
  std::istringstream in(files::read_text(path));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty() || line[0] == '#') continue;
    auto cols = text::split(line, '\t');
    auto level = cols.size() == 2 ? text::parse_long(cols[1]) : std::nullopt;
    if (!level || *level < 1 || *level > 4)
      fail(ErrorKind::kParse, path.string() + ":" + std::to_string(lineno) + ": bad tier row");
    t.set(cols[0], static_cast<int>(*level));
  }
  return t;
}

void JournalTierTable::set(const std::string& journal, int level) {
  static constexpr double kValues[] = {1.0, 0.75, 0.5, 0.25};
  if (level < 1 || level > 4) fail(ErrorKind::kDomain, "journal tier level must be 1..4");
  tiers_[text::lower(text::trim(journal))] = kValues[level - 1];
}

std::optional<double> JournalTierTable::lookup(const std::string& journal) const {
  auto it = tiers_.find(text::lower(text::trim(journal)));
  if (it == tiers_.end()) return std::nullopt;
  return it->second;
}

bool pmid_less(const std::string& a, const std::string& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

}  // namespace chronokg
