#include <algorithm>
#include <regex>

#include "common/error.hpp"
#include "common/files.hpp"
#include "common/text.hpp"
#include "validation/validation.hpp"

namespace chronokg {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(GoldSource s) {
  switch (s) {
    case GoldSource::kOrphadata: return "Orphadata";
    case GoldSource::kHpoa: return "HPOA";
    case GoldSource::kGeneReviews: return "GeneReviews";
    case GoldSource::kPhenopackets: return "Phenopackets";
  }
  return "Orphadata";
}

GoldSource parse_gold_source(std::string_view s) {
  auto l = text::lower(s);
  if (l == "orphadata") return GoldSource::kOrphadata;
  if (l == "hpoa") return GoldSource::kHpoa;
  if (l == "genereviews") return GoldSource::kGeneReviews;
  if (l == "phenopackets") return GoldSource::kPhenopackets;
  fail(ErrorKind::kDomain, "unknown gold source '" + std::string(s) + "'");
}

std::string normalize_disease_name(const std::string& name) {
  std::string s;
  int depth = 0;
  for (char c : text::lower(name)) {
    if (c == '(') {
      ++depth;
    } else if (c == ')' && depth > 0) {
      --depth;
    } else if (depth == 0) {
      s.push_back(std::isalnum(static_cast<unsigned char>(c)) || (c & 0x80) ? c : ' ');
    }
  }
  static const std::set<std::string> kSuffixes = {"syndrome", "disease", "disorder"};
  static const std::regex kNumeral("^([0-9]+[a-z]?|i|ii|iii|iv|v|vi|vii|viii|ix|x)$");
  auto tokens = text::split(text::collapse_ws(s), ' ');
  std::vector<std::string> kept;
  for (size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (t.empty() || kSuffixes.count(t)) continue;
    if (t == "type" && i + 1 < tokens.size() && std::regex_match(tokens[i + 1], kNumeral)) {
      ++i;
      continue;
    }
    kept.push_back(t);
  }
  return text::join(kept, " ");
}

namespace {

std::vector<std::vector<std::string>> tsv_rows(const std::string& tsv) {
  std::vector<std::vector<std::string>> rows;
  for (auto line : text::split(tsv, '\n')) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || line[0] == '#') continue;
    auto f = text::split(line, '\t');
    for (auto& x : f) x = text::trim(x);
    rows.push_back(std::move(f));
  }
  return rows;
}

std::optional<AgeRange> onset_label_range(const std::string& label) {
  auto l = text::collapse_ws(text::lower(label));
  if (l.empty()) return std::nullopt;
  if (l == "all ages") return AgeRange{0, 120};
  static const std::regex kNumeric(R"(^(\d+(?:\.\d+)?)\s*(?:-|–|to)\s*(\d+(?:\.\d+)?)\s*(?:y|years?)?$)");
  std::smatch m;
  if (std::regex_match(l, m, kNumeric))
    return AgeRange{*text::parse_double(m[1].str()), *text::parse_double(m[2].str())};
  return category_to_range(l, OnsetBinTable::standard());
}

// Merges rows of the same disease name into one covering range, keeping
// first-seen order.
std::vector<GoldRecord> merge_by_name(GoldSource source,
                                      const std::vector<std::pair<std::string, AgeRange>>& rows) {
  std::vector<GoldRecord> out;
  std::map<std::string, size_t> index;
  for (const auto& [name, r] : rows) {
    auto it = index.find(name);
    if (it == index.end()) {
      index[name] = out.size();
      out.push_back({source, name, normalize_disease_name(name), r});
    } else {
      auto& g = out[it->second].range;
      g.min = std::min(g.min, r.min);
      g.max = std::max(g.max, r.max);
    }
  }
  return out;
}

bool header_like(const std::vector<std::string>& row, const char* first) {
  return !row.empty() && text::lower(row[0]) == first;
}

}  // namespace

std::vector<GoldRecord> parse_orphadata(const std::string& tsv) {
  std::vector<std::pair<std::string, AgeRange>> rows;
  for (const auto& f : tsv_rows(tsv)) {
    if (header_like(f, "disease") || f.size() < 2) continue;
    if (auto r = onset_label_range(f[1])) rows.emplace_back(f[0], *r);
  }
  return merge_by_name(GoldSource::kOrphadata, rows);
}

std::vector<GoldRecord> load_orphadata(const fs::path& path) {
  return parse_orphadata(files::read_text(path));
}

std::optional<AgeRange> hpo_onset_range(const std::string& term_id) {
  static const std::map<std::string, AgeRange> kTerms = {
      {"HP:0030674", {0, 0}},     // antenatal
      {"HP:0003577", {0, 0}},     // congenital
      {"HP:0003623", {0, 0.08}},  // neonatal
      {"HP:0003593", {0.08, 1}},  // infantile
      {"HP:0011463", {1, 11}},    // childhood
      {"HP:0003621", {10, 18}},   // juvenile
      {"HP:0003581", {18, 65}},   // adult
      {"HP:0011462", {16, 40}},   // young adult
      {"HP:0003596", {40, 60}},   // middle age
      {"HP:0003584", {60, 120}},  // late
  };
  auto it = kTerms.find(text::trim(term_id));
  if (it == kTerms.end()) return std::nullopt;
  return it->second;
}

std::vector<GoldRecord> parse_hpoa(const std::string& tsv) {
  auto rows = tsv_rows(tsv);
  std::map<std::string, size_t> col;
  std::vector<std::pair<std::string, AgeRange>> picked;
  for (const auto& f : rows) {
    if (col.empty()) {
      if (!f.empty() && (text::lower(f[0]) == "database_id" || text::lower(f[0]) == "databaseid")) {
        for (size_t i = 0; i < f.size(); ++i) col[text::lower(f[i])] = i;
        continue;
      }
      fail(ErrorKind::kParse, "HPOA file lacks a database_id header");
    }
    auto get = [&](const char* name) -> std::string {
      auto it = col.find(name);
      return it == col.end() || it->second >= f.size() ? std::string() : f[it->second];
    };
    std::string name = get("disease_name");
    if (name.empty()) continue;
    std::optional<AgeRange> r;
    if (auto onset = get("onset"); !onset.empty()) r = hpo_onset_range(onset);
    if (!r && get("aspect") == "C") r = hpo_onset_range(get("hpo_id"));
    if (r && get("qualifier") != "NOT") picked.emplace_back(name, *r);
  }
  return merge_by_name(GoldSource::kHpoa, picked);
}

std::vector<GoldRecord> load_hpoa(const fs::path& path) { return parse_hpoa(files::read_text(path)); }

std::vector<GoldRecord> parse_genereviews(const std::string& tsv) {
  std::vector<std::pair<std::string, AgeRange>> rows;
  for (const auto& f : tsv_rows(tsv)) {
    if (header_like(f, "disease") || f.size() < 3) continue;
    auto lo = text::parse_double(f[1]), hi = text::parse_double(f[2]);
    if (!lo || !hi) fail(ErrorKind::kParse, "GeneReviews row for " + f[0] + " has a non-numeric onset");
    check_age_range({*lo, *hi});
    rows.emplace_back(f[0], AgeRange{*lo, *hi});
  }
  return merge_by_name(GoldSource::kGeneReviews, rows);
}

std::vector<GoldRecord> load_genereviews(const fs::path& path) {
  return parse_genereviews(files::read_text(path));
}

std::optional<double> iso_duration_years(const std::string& iso) {
  static const std::regex kIso(R"(^P(?:(\d+(?:\.\d+)?)Y)?(?:(\d+(?:\.\d+)?)M)?(?:(\d+(?:\.\d+)?)W)?(?:(\d+(?:\.\d+)?)D)?$)");
  std::smatch m;
  if (iso.size() < 2 || !std::regex_match(iso, m, kIso)) return std::nullopt;
  auto part = [&](int i) { return m[i].matched ? *text::parse_double(m[i].str()) : 0.0; };
  return part(1) + part(2) / 12.0 + part(3) * 7.0 / 365.25 + part(4) / 365.25;
}

namespace {

std::optional<double> onset_of(const json& element) {
  if (!element.contains("onset")) return std::nullopt;
  const auto& o = element["onset"];
  if (o.contains("age") && o["age"].contains("iso8601duration"))
    return iso_duration_years(o["age"]["iso8601duration"].get<std::string>());
  if (o.contains("ontologyClass") && o["ontologyClass"].contains("id")) {
    if (auto r = hpo_onset_range(o["ontologyClass"]["id"].get<std::string>())) return r->min;
  }
  return std::nullopt;
}

}  // namespace

PhenopacketCase parse_phenopacket(const json& j) {
  PhenopacketCase c;
  try {
    c.id = j.value("id", std::string());
    if (!j.contains("diseases") || j["diseases"].empty())
      fail(ErrorKind::kParse, "phenopacket " + c.id + " has no disease");
    const auto& d = j["diseases"][0];
    c.disease_id = d.at("term").value("id", std::string());
    c.disease_name = d.at("term").value("label", std::string());
    c.disease_onset = onset_of(d);
    if (j.contains("phenotypicFeatures"))
      for (const auto& f : j["phenotypicFeatures"]) {
        if (f.value("excluded", false)) continue;
        c.features.push_back({f.at("type").value("id", std::string()),
                              f.at("type").value("label", std::string()), onset_of(f)});
      }
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("phenopacket: ") + e.what());
  }
  return c;
}

std::vector<PhenopacketCase> load_phenopackets(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail(ErrorKind::kNotFound, "no phenopacket directory " + dir.string());
  std::vector<fs::path> paths;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json") paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());
  std::vector<PhenopacketCase> out;
  for (const auto& p : paths) {
    json j = json::parse(files::read_text(p), nullptr, false);
    if (j.is_discarded()) fail(ErrorKind::kParse, "invalid JSON in " + p.string());
    out.push_back(parse_phenopacket(j));
  }
  return out;
}

std::vector<GoldRecord> phenopacket_gold(const std::vector<PhenopacketCase>& cases) {
  std::vector<std::pair<std::string, AgeRange>> rows;
  for (const auto& c : cases)
    if (c.disease_onset) rows.emplace_back(c.disease_name, AgeRange{*c.disease_onset, *c.disease_onset});
  return merge_by_name(GoldSource::kPhenopackets, rows);
}

MatchReport match_diseases(const std::vector<std::string>& kg_disease_names,
                           const std::vector<GoldRecord>& gold) {
  MatchReport report;
  std::map<std::string, std::vector<size_t>> gold_by_key;
  for (size_t i = 0; i < gold.size(); ++i) gold_by_key[gold[i].disease_key].push_back(i);
  std::map<std::string, std::vector<std::string>> kg_by_key;
  for (const auto& n : kg_disease_names) kg_by_key[normalize_disease_name(n)].push_back(n);

  for (const auto& [key, gold_ids] : gold_by_key)
    if (gold_ids.size() > 1)
      for (size_t i : gold_ids) report.ambiguous.push_back(gold[i].disease_name);

  for (const auto& n : kg_disease_names) {
    auto key = normalize_disease_name(n);
    auto g = gold_by_key.find(key);
    bool kg_ambiguous = kg_by_key[key].size() > 1;
    if (kg_ambiguous) {
      report.ambiguous.push_back(n);
    } else if (g == gold_by_key.end() || key.empty()) {
      report.unmatched.push_back(n);
    } else if (g->second.size() > 1) {
      report.ambiguous.push_back(n);
    } else {
      report.matched.push_back({n, g->second.front()});
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

CoverageReport coverage_gap(const std::set<std::string>& kg,
                            const std::vector<std::pair<std::string, std::set<std::string>>>& resources,
                            size_t universe) {
  if (universe == 0) fail(ErrorKind::kDomain, "coverage universe is empty");
  auto pct = [universe](size_t n) { return 100.0 * static_cast<double>(n) / static_cast<double>(universe); };
  CoverageReport r;
  r.universe = universe;
  std::set<std::string> gold_union;
  for (const auto& [name, set] : resources) {
    r.resources.push_back({name, set.size(), pct(set.size())});
    gold_union.insert(set.begin(), set.end());
  }
  r.kg = {"kg", kg.size(), pct(kg.size())};
  std::set_difference(kg.begin(), kg.end(), gold_union.begin(), gold_union.end(),
                      std::back_inserter(r.novel_diseases));
  r.novel = {"novel", r.novel_diseases.size(), pct(r.novel_diseases.size())};
  return r;
}

ordered_json to_json(const CoverageReport& r) {
  auto row = [](const CoverageRow& c) {
    ordered_json j = ordered_json::object();
    j["resource"] = c.resource;
    j["diseases"] = c.diseases;
    j["percent"] = c.percent;
    return j;
  };
  ordered_json j = ordered_json::object();
  j["universe"] = r.universe;
  j["resources"] = ordered_json::array();
  for (const auto& c : r.resources) j["resources"].push_back(row(c));
  j["kg"] = row(r.kg);
  j["novel"] = row(r.novel);
  j["novel_diseases"] = r.novel_diseases;
  return j;
}

}  // namespace chronokg
