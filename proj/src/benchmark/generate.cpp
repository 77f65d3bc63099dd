#include <algorithm>
#include <cmath>
#include <future>
#include <set>

#include "benchmark/benchmark.hpp"
#include "common/error.hpp"
#include "common/random.hpp"
#include "common/text.hpp"

namespace chronokg {

namespace {

const char* kTaskNames[] = {"temporal_window",   "temporal_differential", "cross_disease_comparison",
                            "phenopackets_onset", "phenotype_ordering",    "stage_conditional",
                            "static_drug",        "static_gene",           "negative_temporal"};

constexpr char kLetters[] = "ABCD";

std::string range_label(const AgeRange& r) {
  return text::format_number(r.min) + "-" + text::format_number(r.max) + " years";
}

std::string padded(size_t i) {
  std::string s = std::to_string(i + 1);
  return std::string(s.size() < 4 ? 4 - s.size() : 0, '0') + s;
}

std::string question_id(TaskType t, size_t i) { return std::string(to_string(t)) + "-" + padded(i); }

// One record per disease key, sorted by key.
std::vector<GoldRecord> unique_records(const std::vector<GoldRecord>& in) {
  std::map<std::string, GoldRecord> by_key;
  for (const auto& r : in) {
    if (r.range.min > r.range.max || r.range.min < 0) continue;
    auto key = r.disease_key.empty() ? normalize_disease_name(r.disease_name) : r.disease_key;
    by_key.emplace(key, r);
  }
  std::vector<GoldRecord> out;
  for (auto& [k, r] : by_key) {
    out.push_back(r);
    out.back().disease_key = k;
  }
  return out;
}

std::vector<size_t> shuffled_indices(size_t n, Rng& rng) {
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;
  rng.shuffle(idx);
  return idx;
}

std::optional<double> inside_probe(const AgeRange& r, Rng& rng) {
  std::vector<double> c;
  for (double k = std::floor(r.min) + 1; k < r.max; k += 1)
    if (k > r.min) c.push_back(k);
  if (c.empty()) {
    double mid = std::round((r.min + r.max) * 5.0) / 10.0;
    if (mid > r.min && mid < r.max) return mid;
    return std::nullopt;
  }
  return c[rng.index(c.size())];
}

std::optional<double> outside_probe(const AgeRange& r, Rng& rng) {
  std::vector<double> c;
  for (int k = 0; k <= 90; ++k)
    if (k <= r.min - kOutsideProbeMargin || k >= r.max + kOutsideProbeMargin) c.push_back(k);
  if (c.empty()) return std::nullopt;
  return c[rng.index(c.size())];
}

std::string mcq_prompt(const std::string& stem, const std::vector<std::string>& options) {
  std::string s = stem;
  for (size_t i = 0; i < options.size(); ++i) {
    s += i ? ", " : " ";
    s += std::string("(") + kLetters[i] + ") " + options[i];
  }
  return s + "?";
}

const char* era_phrase(const std::string& era) {
  if (era == "prenatal") return "the prenatal period";
  return nullptr;
}

void shortfall(GenerationResult& r, TaskType t, size_t n) {
  if (r.questions.size() < n)
    r.warnings.push_back("shortfall: " + std::string(to_string(t)) + " generated " +
                         std::to_string(r.questions.size()) + " of " + std::to_string(n) +
                         " requested (insufficient eligible material)");
}

BenchmarkQuestion base_question(TaskType t, size_t i) {
  BenchmarkQuestion q;
  q.id = question_id(t, i);
  q.task_type = t;
  q.tier = tier_of(t);
  q.difficulty = difficulty_of(t);
  return q;
}

// ---------------------------------------------------------------------------

GenerationResult gen_window(const BenchmarkSources& src, size_t n, Rng& rng) {
  GenerationResult out;
  auto recs = unique_records(src.onset_gold);
  auto order = shuffled_indices(recs.size(), rng);
  std::set<std::pair<size_t, bool>> used;
  for (int pass = 0; pass < 2 && out.questions.size() < n; ++pass) {
    for (size_t i : order) {
      if (out.questions.size() >= n) break;
      bool want_yes = out.questions.size() % 2 == 0;
      if (used.count({i, want_yes})) continue;
      auto probe = want_yes ? inside_probe(recs[i].range, rng) : outside_probe(recs[i].range, rng);
      if (!probe) continue;
      used.insert({i, want_yes});
      out.questions.push_back(make_window_question(question_id(TaskType::kTemporalWindow, out.questions.size()),
                                                   recs[i], *probe));
    }
  }
  return out;
}

GenerationResult gen_differential(const BenchmarkSources& src, size_t n, Rng& rng,
                                  const OnsetBinTable& table) {
  GenerationResult out;
  std::vector<GoldRecord> recs;
  for (auto& r : unique_records(src.onset_gold))
    if (r.range.width() <= 20) recs.push_back(r);
  std::vector<size_t> era(recs.size());
  for (size_t i = 0; i < recs.size(); ++i) era[i] = era_index_of_range(recs[i].range, table);
  for (size_t t : shuffled_indices(recs.size(), rng)) {
    if (out.questions.size() >= n) break;
    std::vector<size_t> pool;
    for (size_t j = 0; j < recs.size(); ++j) {
      size_t d = era[j] > era[t] ? era[j] - era[t] : era[t] - era[j];
      if (j != t && d >= kMinDifferentialEraDistance) pool.push_back(j);
    }
    if (pool.empty()) continue;
    rng.shuffle(pool);
    pool.resize(std::min<size_t>(3, pool.size()));
    size_t k = pool.size() + 1;
    size_t gold_pos = rng.index(k);
    std::vector<size_t> chosen;
    for (size_t p = 0, d = 0; p < k; ++p) chosen.push_back(p == gold_pos ? t : pool[d++]);

    auto q = base_question(TaskType::kTemporalDifferential, out.questions.size());
    const std::string era_name = table.era(era[t]).name;
    std::vector<std::string> options;
    for (size_t c : chosen) {
      options.push_back(recs[c].disease_name);
      q.params.option_ranges.push_back(recs[c].range);
      q.gold_source.records.push_back(recs[c].disease_name);
    }
    const char* phrase = era_phrase(era_name);
    q.prompt = mcq_prompt("A patient presents with symptoms during " +
                              (phrase ? std::string(phrase) : era_name) +
                              ". Based on typical age of onset, which of the following diseases is most consistent:",
                          options);
    q.options = options;
    q.gold.label = std::string(1, kLetters[gold_pos]);
    q.gold.range = recs[t].range;
    q.gold_source.source = std::string(to_string(recs[t].source));
    q.params.era = era_name;
    out.questions.push_back(std::move(q));
  }
  return out;
}

GenerationResult gen_comparison(const BenchmarkSources& src, size_t n, Rng& rng) {
  GenerationResult out;
  auto recs = unique_records(src.onset_gold);
  if (recs.size() < 2) return out;
  std::set<std::pair<size_t, size_t>> seen;
  for (size_t attempt = 0; attempt < 50 * n + 100 && out.questions.size() < n; ++attempt) {
    size_t a = rng.index(recs.size()), b = rng.index(recs.size());
    if (a == b || ranges_overlap(recs[a].range, recs[b].range)) continue;
    if (!seen.insert({std::min(a, b), std::max(a, b)}).second) continue;
    auto q = base_question(TaskType::kCrossDiseaseComparison, out.questions.size());
    q.prompt = "Which disease typically has an earlier age of onset: " + recs[a].disease_name + " or " +
               recs[b].disease_name + "?";
    q.options = std::vector<std::string>{recs[a].disease_name, recs[b].disease_name};
    q.params.option_ranges = {recs[a].range, recs[b].range};
    const auto& early = recs[a].range.max < recs[b].range.min ? recs[a] : recs[b];
    q.gold.label = early.disease_name;
    q.gold.range = early.range;
    q.gold_source.source = std::string(to_string(early.source));
    q.gold_source.records = {recs[a].disease_name, recs[b].disease_name};
    out.questions.push_back(std::move(q));
  }
  return out;
}

struct CaseAges {
  std::string disease;
  std::string phenotype;
  std::vector<std::pair<std::string, double>> ages;  // (case id, years)
};

std::map<std::pair<std::string, std::string>, CaseAges> phenotype_case_ages(
    const std::vector<PhenopacketCase>& cases) {
  std::map<std::pair<std::string, std::string>, CaseAges> groups;
  for (const auto& c : cases) {
    for (const auto& f : c.features) {
      auto age = f.onset ? f.onset : c.disease_onset;
      if (!age || f.label.empty() || c.disease_name.empty()) continue;
      auto& g = groups[{c.disease_name, f.label}];
      g.disease = c.disease_name;
      g.phenotype = f.label;
      g.ages.emplace_back(c.id, *age);
    }
  }
  return groups;
}

AgeRange span_of(const std::vector<std::pair<std::string, double>>& ages) {
  AgeRange r{ages.front().second, ages.front().second};
  for (const auto& [id, a] : ages) {
    r.min = std::min(r.min, a);
    r.max = std::max(r.max, a);
  }
  return r;
}

GenerationResult gen_phenopackets(const BenchmarkSources& src, size_t n, Rng& rng) {
  GenerationResult out;
  auto groups = phenotype_case_ages(src.phenopackets);
  std::vector<const CaseAges*> list;
  for (const auto& [k, g] : groups) list.push_back(&g);
  for (size_t i : shuffled_indices(list.size(), rng)) {
    if (out.questions.size() >= n) break;
    const auto& g = *list[i];
    auto q = base_question(TaskType::kPhenopacketsOnset, out.questions.size());
    q.prompt = "At what age does '" + g.phenotype + "' typically present in " + g.disease +
               "? (Based on patient case data)";
    q.gold.range = span_of(g.ages);
    q.gold.label = range_label(*q.gold.range);
    q.gold_source.source = "phenopackets";
    std::set<std::string> ids;
    for (const auto& [id, a] : g.ages) ids.insert(id);
    q.gold_source.records.assign(ids.begin(), ids.end());
    q.params.phenotype = g.phenotype;
    q.params.disease = g.disease;
    out.questions.push_back(std::move(q));
  }
  return out;
}

struct OrderItem {
  std::string label;
  double onset;
  std::vector<std::string> pmids;
};

std::vector<std::string> pmids_of(const TemporalTriple& t) {
  std::vector<std::string> out;
  for (const auto& s : t.evidence.source_ids)
    if (text::starts_with_ci(s, "PMID:")) out.push_back(s);
  return out;
}

// Milestones when a disease has at least three; its phenotypes otherwise.
// Items with tied onsets are dropped.
std::vector<OrderItem> ordering_items(const std::vector<TemporalTriple>& triples) {
  std::map<std::string, std::vector<const TemporalTriple*>> by_milestone;
  for (const auto& t : triples)
    if (is_phenotype_edge(t) && t.temporal.has_onset() && t.temporal.milestone &&
        !text::trim(*t.temporal.milestone).empty())
      by_milestone[text::collapse_ws(text::lower(*t.temporal.milestone))].push_back(&t);
  std::vector<OrderItem> items;
  if (by_milestone.size() >= 3) {
    for (const auto& [key, ts] : by_milestone) {
      std::vector<double> mins;
      std::set<std::string> pmids;
      for (const auto* t : ts) {
        mins.push_back(t->temporal.onset()->min);
        for (auto& p : pmids_of(*t)) pmids.insert(p);
      }
      items.push_back({text::collapse_ws(*ts.front()->temporal.milestone), median(mins),
                       {pmids.begin(), pmids.end()}});
    }
  } else {
    for (const auto& p : aggregate_onset(triples).per_phenotype)
      items.push_back({p.phenotype, p.median_range.min, p.pmids});
  }
  std::map<double, int> counts;
  for (const auto& i : items) ++counts[i.onset];
  items.erase(std::remove_if(items.begin(), items.end(), [&](const OrderItem& i) { return counts[i.onset] > 1; }),
              items.end());
  std::sort(items.begin(), items.end(), [](const OrderItem& a, const OrderItem& b) {
    return a.onset != b.onset ? a.onset < b.onset : a.label < b.label;
  });
  return items;
}

GenerationResult gen_ordering(const BenchmarkSources& src, size_t n, Rng& rng) {
  GenerationResult out;
  if (!src.kg) return out;
  auto diseases = src.kg->diseases();
  std::vector<std::vector<OrderItem>> items(diseases.size());
  for (size_t d = 0; d < diseases.size(); ++d) items[d] = ordering_items(src.kg->triples_for(diseases[d]));
  std::set<std::pair<size_t, std::vector<size_t>>> used;
  for (int pass = 0; pass < 20 && out.questions.size() < n; ++pass) {
    size_t before = out.questions.size();
    for (size_t d : shuffled_indices(diseases.size(), rng)) {
      if (out.questions.size() >= n) break;
      if (items[d].size() < 3) continue;
      std::vector<size_t> pick;
      for (int attempt = 0; attempt < 5; ++attempt) {
        auto idx = shuffled_indices(items[d].size(), rng);
        idx.resize(3);
        std::sort(idx.begin(), idx.end());
        if (!used.count({d, idx})) {
          pick = idx;
          break;
        }
      }
      if (pick.empty()) continue;
      used.insert({d, pick});
      auto q = base_question(TaskType::kPhenotypeOrdering, out.questions.size());
      std::set<std::string> pmids;
      for (size_t i : pick) {
        q.gold.items.push_back(items[d][i].label);
        q.params.item_onsets.push_back(items[d][i].onset);
        for (const auto& p : items[d][i].pmids) pmids.insert(p);
      }
      auto shown = q.gold.items;
      rng.shuffle(shown);
      q.prompt = "Rank the following clinical milestones for " + src.kg->disease_name(diseases[d]) +
                 " by typical age of occurrence: " + text::join(shown, ", ") + ".";
      q.gold.label = text::join(q.gold.items, " -> ");
      q.gold_source.source = "kg";
      q.gold_source.records = {diseases[d]};
      q.gold_source.pmids.assign(pmids.begin(), pmids.end());
      q.params.disease = src.kg->disease_name(diseases[d]);
      out.questions.push_back(std::move(q));
    }
    if (out.questions.size() == before) break;
  }
  return out;
}

GenerationResult gen_stage(const BenchmarkSources& src, size_t n, Rng& rng) {
  GenerationResult out;
  if (!src.kg) return out;
  struct StageCase {
    std::string disease;
    std::string stage;
    std::vector<std::string> items;
    std::vector<std::string> pmids;
  };
  std::vector<StageCase> cases;
  for (const auto& d : src.kg->diseases()) {
    std::map<std::string, std::pair<std::string, std::set<std::string>>> stages;
    for (const auto& t : src.kg->triples_for(d)) {
      if (!is_phenotype_edge(t) || !t.temporal.progression_stage) continue;
      auto display = text::collapse_ws(*t.temporal.progression_stage);
      if (display.empty()) continue;
      auto& s = stages[text::lower(display)];
      if (s.first.empty()) s.first = display;
      for (auto& p : pmids_of(t)) s.second.insert(p);
    }
    for (const auto& [key, s] : stages) {
      auto found = src.kg->query_stage(d, s.first);
      if (found.empty()) continue;
      cases.push_back({d, s.first, found, {s.second.begin(), s.second.end()}});
    }
  }
  for (size_t i : shuffled_indices(cases.size(), rng)) {
    if (out.questions.size() >= n) break;
    const auto& c = cases[i];
    auto q = base_question(TaskType::kStageConditional, out.questions.size());
    q.prompt = "What phenotypes are characteristic of the " + c.stage + " stage of " +
               src.kg->disease_name(c.disease) + "?";
    q.gold.items = c.items;
    q.gold.label = text::join(c.items, ", ");
    q.gold_source.source = "kg";
    q.gold_source.records = {c.disease};
    q.gold_source.pmids = c.pmids;
    q.params.disease = src.kg->disease_name(c.disease);
    out.questions.push_back(std::move(q));
  }
  return out;
}

bool type_has(const std::string& type, std::initializer_list<const char*> words) {
  for (const char* w : words)
    if (text::contains_ci(type, w)) return true;
  return false;
}

GenerationResult gen_static(const BenchmarkSources& src, TaskType type, size_t n, Rng& rng) {
  GenerationResult out;
  if (!src.schema) return out;
  const bool drug = type == TaskType::kStaticDrug;
  auto is_target = [&](const std::string& t) {
    return drug ? type_has(t, {"drug"}) : type_has(t, {"gene", "protein"});
  };
  std::map<std::string, std::string> disease_names, entity_names;
  std::map<std::string, std::set<std::string>> links;
  std::map<std::pair<std::string, std::string>, std::string> edge_record;
  for (const auto& e : src.schema->named_edges()) {
    if (drug && !text::contains_ci(e.relation, "indication")) continue;
    const bool head_disease = type_has(e.head_type, {"disease"});
    const bool tail_disease = type_has(e.tail_type, {"disease"});
    std::string dis, dis_name, ent, ent_name;
    if (head_disease && is_target(e.tail_type)) {
      dis = e.head_id, dis_name = e.head_name, ent = e.tail_id, ent_name = e.tail_name;
    } else if (tail_disease && is_target(e.head_type)) {
      dis = e.tail_id, dis_name = e.tail_name, ent = e.head_id, ent_name = e.head_name;
    } else {
      continue;
    }
    if (dis_name.empty() || ent_name.empty()) continue;
    disease_names.emplace(dis, dis_name);
    entity_names.emplace(ent, ent_name);
    links[dis].insert(ent);
    edge_record.emplace(std::make_pair(dis, ent), e.head_id + "|" + e.relation + "|" + e.tail_id);
  }
  std::vector<std::string> diseases;
  for (const auto& [d, s] : links) diseases.push_back(d);
  std::vector<std::string> entities;
  for (const auto& [e, name] : entity_names) entities.push_back(e);
  for (size_t i : shuffled_indices(diseases.size(), rng)) {
    if (out.questions.size() >= n) break;
    const auto& d = diseases[i];
    std::vector<std::string> linked(links[d].begin(), links[d].end());
    std::vector<std::string> pool;
    for (const auto& e : entities)
      if (!links[d].count(e)) pool.push_back(e);
    if (pool.empty()) continue;
    const std::string gold = linked[rng.index(linked.size())];
    rng.shuffle(pool);
    pool.resize(std::min<size_t>(3, pool.size()));
    size_t k = pool.size() + 1;
    size_t gold_pos = rng.index(k);
    std::vector<std::string> options;
    for (size_t p = 0, j = 0; p < k; ++p) options.push_back(entity_names[p == gold_pos ? gold : pool[j++]]);
    auto q = base_question(type, out.questions.size());
    q.prompt = mcq_prompt(drug ? "Which of the following drugs is indicated for " + disease_names[d] + ":"
                               : "Which of the following genes is associated with " + disease_names[d] + ":",
                          options);
    q.options = options;
    q.gold.label = std::string(1, kLetters[gold_pos]);
    q.gold_source.source = "schema";
    q.gold_source.records = {edge_record[{d, gold}]};
    q.params.disease = disease_names[d];
    out.questions.push_back(std::move(q));
  }
  return out;
}

GenerationResult gen_negative(const BenchmarkSources& src, size_t n, Rng& rng) {
  GenerationResult out;
  auto recs = unique_records(src.negative_gold);
  for (size_t a : shuffled_indices(recs.size(), rng)) {
    if (out.questions.size() >= n) break;
    auto probe = inside_probe(recs[a].range, rng);
    if (!probe) continue;
    const AgeRange point{*probe, *probe};
    std::vector<size_t> consistent, inconsistent;
    for (size_t j = 0; j < recs.size(); ++j) {
      if (j == a) continue;
      if (recs[j].range.min < *probe && *probe < recs[j].range.max) consistent.push_back(j);
      else if (range_gap(recs[j].range, point) >= kOutsideProbeMargin) inconsistent.push_back(j);
    }
    if (inconsistent.empty()) continue;
    rng.shuffle(consistent);
    consistent.resize(std::min<size_t>(2, consistent.size()));
    consistent.insert(consistent.begin(), a);
    const size_t gold = inconsistent[rng.index(inconsistent.size())];
    size_t k = consistent.size() + 1;
    size_t gold_pos = rng.index(k);
    std::vector<size_t> chosen;
    for (size_t p = 0, j = 0; p < k; ++p) chosen.push_back(p == gold_pos ? gold : consistent[j++]);
    auto q = base_question(TaskType::kNegativeTemporal, out.questions.size());
    std::vector<std::string> options;
    for (size_t c : chosen) {
      options.push_back(recs[c].disease_name);
      q.params.option_ranges.push_back(recs[c].range);
      q.gold_source.records.push_back(recs[c].disease_name);
    }
    q.prompt = mcq_prompt("A patient's symptoms began at age " + text::format_number(*probe) +
                              " years. Based on typical age of onset, which of the following diseases is "
                              "inconsistent with this presentation:",
                          options);
    q.options = options;
    q.gold.label = std::string(1, kLetters[gold_pos]);
    q.gold.range = recs[gold].range;
    q.gold_source.source = std::string(to_string(recs[gold].source));
    q.params.probe_age = *probe;
    out.questions.push_back(std::move(q));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(QuestionTier t) {
  switch (t) {
    case QuestionTier::kTier1: return "tier1";
    case QuestionTier::kTier2: return "tier2";
    case QuestionTier::kStatic: return "static";
    case QuestionTier::kSupplementary: return "supplementary";
  }
  return "tier1";
}

std::string_view to_string(TaskType t) { return kTaskNames[static_cast<int>(t)]; }

std::string_view to_string(Difficulty d) {
  switch (d) {
    case Difficulty::kEasy: return "easy";
    case Difficulty::kMedium: return "medium";
    case Difficulty::kHard: return "hard";
  }
  return "medium";
}

QuestionTier parse_question_tier(std::string_view s) {
  for (auto t : {QuestionTier::kTier1, QuestionTier::kTier2, QuestionTier::kStatic, QuestionTier::kSupplementary})
    if (to_string(t) == s) return t;
  fail(ErrorKind::kParse, "unknown question tier " + std::string(s));
}

TaskType parse_task_type(std::string_view s) {
  for (auto t : all_task_types())
    if (to_string(t) == s) return t;
  fail(ErrorKind::kParse, "unknown task type " + std::string(s));
}

Difficulty parse_difficulty(std::string_view s) {
  for (auto d : {Difficulty::kEasy, Difficulty::kMedium, Difficulty::kHard})
    if (to_string(d) == s) return d;
  fail(ErrorKind::kParse, "unknown difficulty " + std::string(s));
}

const std::vector<TaskType>& all_task_types() {
  static const std::vector<TaskType> kAll = {
      TaskType::kTemporalWindow,    TaskType::kTemporalDifferential, TaskType::kCrossDiseaseComparison,
      TaskType::kPhenopacketsOnset, TaskType::kPhenotypeOrdering,    TaskType::kStageConditional,
      TaskType::kStaticDrug,        TaskType::kStaticGene,           TaskType::kNegativeTemporal};
  return kAll;
}

QuestionTier tier_of(TaskType t) {
  switch (t) {
    case TaskType::kTemporalWindow:
    case TaskType::kTemporalDifferential:
    case TaskType::kCrossDiseaseComparison:
    case TaskType::kPhenopacketsOnset: return QuestionTier::kTier1;
    case TaskType::kPhenotypeOrdering:
    case TaskType::kStageConditional: return QuestionTier::kTier2;
    case TaskType::kStaticDrug:
    case TaskType::kStaticGene: return QuestionTier::kStatic;
    case TaskType::kNegativeTemporal: return QuestionTier::kSupplementary;
  }
  return QuestionTier::kTier1;
}

Difficulty difficulty_of(TaskType t) {
  switch (t) {
    case TaskType::kTemporalWindow:
    case TaskType::kCrossDiseaseComparison: return Difficulty::kMedium;
    case TaskType::kStaticDrug:
    case TaskType::kStaticGene: return Difficulty::kEasy;
    default: return Difficulty::kHard;
  }
}

BenchmarkQuestion make_window_question(const std::string& id, const GoldRecord& gold, double probe) {
  BenchmarkQuestion q;
  q.id = id;
  q.task_type = TaskType::kTemporalWindow;
  q.tier = tier_of(q.task_type);
  q.difficulty = difficulty_of(q.task_type);
  q.prompt = "Is age " + text::format_number(probe) + " years within the typical onset window for " +
             gold.disease_name + "?";
  q.options = std::vector<std::string>{"Yes", "No"};
  bool inside = probe >= gold.range.min && probe <= gold.range.max;
  q.gold.label = inside ? "Yes" : "No";
  q.gold.range = gold.range;
  q.gold_source.source = std::string(to_string(gold.source));
  q.gold_source.records = {gold.disease_name};
  q.params.probe_age = probe;
  q.params.disease = gold.disease_name;
  return q;
}

GenerationResult generate_questions(TaskType type, const BenchmarkSources& sources, size_t n,
                                    uint64_t seed, const OnsetBinTable& table) {
  // Each type draws from its own stream so adding a type never shifts another.
  Rng rng(seed * 1000003ULL + static_cast<uint64_t>(type) + 1);
  GenerationResult r;
  switch (type) {
    case TaskType::kTemporalWindow: r = gen_window(sources, n, rng); break;
    case TaskType::kTemporalDifferential: r = gen_differential(sources, n, rng, table); break;
    case TaskType::kCrossDiseaseComparison: r = gen_comparison(sources, n, rng); break;
    case TaskType::kPhenopacketsOnset: r = gen_phenopackets(sources, n, rng); break;
    case TaskType::kPhenotypeOrdering: r = gen_ordering(sources, n, rng); break;
    case TaskType::kStageConditional: r = gen_stage(sources, n, rng); break;
    case TaskType::kStaticDrug:
    case TaskType::kStaticGene: r = gen_static(sources, type, n, rng); break;
    case TaskType::kNegativeTemporal: r = gen_negative(sources, n, rng); break;
  }
  shortfall(r, type, n);
  return r;
}

GenerationResult generate_benchmark(const std::map<TaskType, size_t>& counts, const BenchmarkSources& sources,
                                    uint64_t seed, const OnsetBinTable& table) {
  std::vector<std::future<GenerationResult>> jobs;
  for (const auto& [type, n] : counts)
    jobs.push_back(std::async(std::launch::async, [&, type = type, n = n] {
      return generate_questions(type, sources, n, seed, table);
    }));
  GenerationResult all;
  for (auto& j : jobs) {
    auto r = j.get();
    all.questions.insert(all.questions.end(), r.questions.begin(), r.questions.end());
    all.warnings.insert(all.warnings.end(), r.warnings.begin(), r.warnings.end());
  }
  return all;
}

// ---------------------------------------------------------------------------

namespace {

std::optional<size_t> letter_index(const std::string& label) {
  if (label.size() == 1 && label[0] >= 'A' && label[0] <= 'D') return static_cast<size_t>(label[0] - 'A');
  return std::nullopt;
}

bool malformed_options(const BenchmarkQuestion& q) {
  if (!q.options) return false;
  const auto& o = *q.options;
  if (o.size() < 2 || o.size() > 4) return true;
  if (auto li = letter_index(q.gold.label); li && q.task_type != TaskType::kCrossDiseaseComparison &&
                                            q.task_type != TaskType::kTemporalWindow)
    return *li >= o.size() || std::set<std::string>(o.begin(), o.end()).size() != o.size();
  return std::count(o.begin(), o.end(), q.gold.label) != 1;
}

bool contains(const AgeRange& r, double x) { return r.min <= x && x <= r.max; }

}  // namespace

QcOutcome qc_questions(const std::vector<BenchmarkQuestion>& questions, const OnsetBinTable& table) {
  QcOutcome out;
  std::set<std::string> prompts;
  for (const auto& q : questions) {
    std::string reason;
    const auto& ranges = q.params.option_ranges;
    if (malformed_options(q)) {
      reason = "malformed-options";
    } else if (q.task_type == TaskType::kTemporalWindow && q.params.probe_age && q.gold.range &&
               (*q.params.probe_age == q.gold.range->min || *q.params.probe_age == q.gold.range->max)) {
      reason = "boundary-probe";
    } else if (q.task_type == TaskType::kTemporalDifferential && q.params.era) {
      size_t target = table.era_index(*q.params.era);
      size_t consistent = 0;
      for (const auto& r : ranges)
        if (r && era_index_of_range(*r, table) == target) ++consistent;
      if (consistent >= 2) reason = "ambiguous-options";
    } else if (q.task_type == TaskType::kNegativeTemporal && q.params.probe_age) {
      size_t inconsistent = 0;
      for (const auto& r : ranges)
        if (r && !contains(*r, *q.params.probe_age)) ++inconsistent;
      if (inconsistent >= 2) reason = "ambiguous-options";
    } else if (q.task_type == TaskType::kCrossDiseaseComparison && ranges.size() == 2 && ranges[0] &&
               ranges[1] && ranges_overlap(*ranges[0], *ranges[1])) {
      reason = "ambiguous-options";
    } else if (q.task_type == TaskType::kPhenotypeOrdering) {
      const auto& v = q.params.item_onsets;
      for (size_t i = 1; i < v.size(); ++i)
        if (!(v[i - 1] < v[i])) reason = "tied-ordering";
    }
    if (reason.empty() && !prompts.insert(q.prompt).second) reason = "duplicate-question";
    if (reason.empty()) {
      out.kept.push_back(q);
    } else {
      out.removed.push_back({q.id, reason});
    }
  }
  return out;
}

GoldCheck verify_tier1(const std::vector<BenchmarkQuestion>& questions, const BenchmarkSources& sources,
                       const OnsetBinTable& table) {
  GoldCheck check;
  std::map<std::string, AgeRange> onset, negative;
  for (const auto& r : unique_records(sources.onset_gold)) onset.emplace(r.disease_name, r.range);
  for (const auto& r : unique_records(sources.negative_gold)) negative.emplace(r.disease_name, r.range);
  auto groups = phenotype_case_ages(sources.phenopackets);
  std::map<std::string, const PhenopacketCase*> cases;
  for (const auto& c : sources.phenopackets) cases[c.id] = &c;

  auto bad = [&](const BenchmarkQuestion& q, const std::string& detail) {
    check.mismatches.push_back(q.id + ": " + detail);
  };
  auto option_ranges = [&](const BenchmarkQuestion& q, const std::map<std::string, AgeRange>& table_of,
                           std::vector<AgeRange>& out) {
    for (const auto& name : q.options.value_or(std::vector<std::string>{})) {
      auto it = table_of.find(name);
      if (it == table_of.end()) return false;
      out.push_back(it->second);
    }
    return true;
  };

  for (const auto& q : questions) {
    if (q.tier != QuestionTier::kTier1 && q.tier != QuestionTier::kSupplementary) continue;
    ++check.checked;
    switch (q.task_type) {
      case TaskType::kTemporalWindow: {
        auto it = q.gold_source.records.empty() ? onset.end() : onset.find(q.gold_source.records[0]);
        if (it == onset.end() || !q.params.probe_age) {
          bad(q, "source record not found");
          break;
        }
        std::string expect = contains(it->second, *q.params.probe_age) ? "Yes" : "No";
        if (expect != q.gold.label || q.gold.range != it->second) bad(q, "gold differs from source");
        break;
      }
      case TaskType::kTemporalDifferential: {
        std::vector<AgeRange> rs;
        if (!option_ranges(q, onset, rs) || !q.params.era) {
          bad(q, "source record not found");
          break;
        }
        auto target = table.era_index(*q.params.era);
        std::vector<size_t> hits;
        for (size_t i = 0; i < rs.size(); ++i)
          if (era_index_of_range(rs[i], table) == target) hits.push_back(i);
        if (hits.size() != 1 || std::string(1, kLetters[hits[0]]) != q.gold.label)
          bad(q, "gold differs from source");
        break;
      }
      case TaskType::kCrossDiseaseComparison: {
        std::vector<AgeRange> rs;
        if (!option_ranges(q, onset, rs) || rs.size() != 2) {
          bad(q, "source record not found");
          break;
        }
        const auto& o = *q.options;
        std::string expect = rs[0].max < rs[1].min ? o[0] : rs[1].max < rs[0].min ? o[1] : "";
        if (expect != q.gold.label) bad(q, "gold differs from source");
        break;
      }
      case TaskType::kPhenopacketsOnset: {
        std::vector<std::pair<std::string, double>> ages;
        for (const auto& id : q.gold_source.records) {
          auto it = cases.find(id);
          if (it == cases.end()) continue;
          for (const auto& f : it->second->features) {
            auto age = f.onset ? f.onset : it->second->disease_onset;
            if (age && q.params.phenotype && f.label == *q.params.phenotype) ages.emplace_back(id, *age);
          }
        }
        if (ages.empty() || !q.gold.range || span_of(ages) != *q.gold.range) bad(q, "gold differs from source");
        break;
      }
      case TaskType::kNegativeTemporal: {
        std::vector<AgeRange> rs;
        if (!option_ranges(q, negative, rs) || !q.params.probe_age) {
          bad(q, "source record not found");
          break;
        }
        std::vector<size_t> hits;
        for (size_t i = 0; i < rs.size(); ++i)
          if (range_gap(rs[i], {*q.params.probe_age, *q.params.probe_age}) >= kOutsideProbeMargin) hits.push_back(i);
        if (hits.size() != 1 || std::string(1, kLetters[hits[0]]) != q.gold.label)
          bad(q, "gold differs from source");
        break;
      }
      default:
        break;
    }
  }
  return check;
}

}  // namespace chronokg
