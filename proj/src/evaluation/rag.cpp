#include <algorithm>
#include <regex>

#include "common/error.hpp"
#include "common/text.hpp"
#include "consensus/consensus.hpp"
#include "evaluation/evaluation.hpp"

namespace chronokg {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(RetrievalCondition c) {
  switch (c) {
    case RetrievalCondition::kNone: return "NR";
    case RetrievalCondition::kStaticKg: return "StaticKG";
    case RetrievalCondition::kCoarseOnset: return "CoarseOnset";
    case RetrievalCondition::kChronoKg: return "ChronoKG";
  }
  return "NR";
}

RetrievalCondition parse_retrieval_condition(std::string_view s) {
  auto l = text::lower(s);
  if (l == "nr" || l == "none") return RetrievalCondition::kNone;
  if (l == "statickg" || l == "static") return RetrievalCondition::kStaticKg;
  if (l == "coarseonset" || l == "coarse") return RetrievalCondition::kCoarseOnset;
  if (l == "chronokg" || l == "kg") return RetrievalCondition::kChronoKg;
  fail(ErrorKind::kParse, "unknown retrieval condition " + std::string(s));
}

namespace {

std::string pmid_list(const TemporalTriple& t) {
  std::vector<std::string> ids;
  for (const auto& s : t.evidence.source_ids)
    if (text::starts_with_ci(s, "PMID:")) ids.push_back(s);
  return text::join(ids, ", ");
}

RetrievedContext chrono_context(const BenchmarkQuestion& q, const KgStore& kg, size_t k) {
  RetrievedContext out;
  if (!q.params.disease || !kg.has_disease(*q.params.disease)) {
    out.disease_missing = true;
    return out;
  }
  std::vector<const TemporalTriple*> pool;
  for (const auto& t : kg.triples_for(*q.params.disease))
    if (is_phenotype_edge(t) && t.temporal.has_onset()) pool.push_back(&t);
  auto matches = [&](const TemporalTriple& t) {
    if (!q.params.phenotype) return false;
    auto a = normalize_entity(t.target_name).key, b = normalize_entity(*q.params.phenotype).key;
    return a == b || similarity_ratio(a, b) >= 80;
  };
  std::stable_sort(pool.begin(), pool.end(), [&](const TemporalTriple* a, const TemporalTriple* b) {
    bool ma = matches(*a), mb = matches(*b);
    if (ma != mb) return ma;
    if (a->evidence.credibility_score != b->evidence.credibility_score)
      return a->evidence.credibility_score > b->evidence.credibility_score;
    return a->edge_id < b->edge_id;
  });
  if (pool.size() > k) pool.resize(k);
  std::vector<std::string> lines;
  for (const auto* t : pool) {
    auto r = *t->temporal.onset();
    std::string line = t->source_name + " | " + t->target_name + " | onset " + text::format_number(r.min) + "-" +
                       text::format_number(r.max) + " years";
    if (t->temporal.progression_stage) line += " | stage " + *t->temporal.progression_stage;
    line += " | " + pmid_list(*t);
    lines.push_back(line);
  }
  out.text = text::join(lines, "\n");
  return out;
}

RetrievedContext static_context(const BenchmarkQuestion& q, const SchemaIndex& schema, size_t k) {
  RetrievedContext out;
  if (!q.params.disease) {
    out.disease_missing = true;
    return out;
  }
  const auto key = normalize_disease_name(*q.params.disease);
  std::vector<std::string> lines;
  bool found = false;
  for (const auto& e : schema.named_edges()) {
    bool head = !e.head_name.empty() && normalize_disease_name(e.head_name) == key;
    bool tail = !e.tail_name.empty() && normalize_disease_name(e.tail_name) == key;
    if (!head && !tail) continue;
    found = true;
    if (lines.size() < k)
      lines.push_back((head ? e.head_name : e.tail_name) + " | " + e.relation + " | " +
                      (head ? e.tail_name : e.head_name));
  }
  out.disease_missing = !found;
  out.text = text::join(lines, "\n");
  return out;
}

RetrievedContext coarse_context(const BenchmarkQuestion& q, const std::vector<GoldRecord>& records,
                                const OnsetBinTable& table) {
  RetrievedContext out;
  if (q.params.disease) {
    const auto key = normalize_disease_name(*q.params.disease);
    for (const auto& r : records) {
      if ((r.disease_key.empty() ? normalize_disease_name(r.disease_name) : r.disease_key) != key) continue;
      out.text = r.disease_name + " | onset category " + collapse_bin(range_to_fine_bin(r.range, table), table);
      return out;
    }
  }
  out.disease_missing = true;
  return out;
}

}  // namespace

RetrievedContext build_context(const BenchmarkQuestion& q, RetrievalCondition condition,
                               const RetrievalSources& sources, size_t k, const OnsetBinTable& table) {
  switch (condition) {
    case RetrievalCondition::kNone: return {};
    case RetrievalCondition::kStaticKg:
      if (!sources.schema) fail(ErrorKind::kConfig, "StaticKG condition needs a schema snapshot");
      return static_context(q, *sources.schema, k);
    case RetrievalCondition::kCoarseOnset: return coarse_context(q, sources.coarse_onset, table);
    case RetrievalCondition::kChronoKg:
      if (!sources.kg) fail(ErrorKind::kConfig, "ChronoKG condition needs a store");
      return chrono_context(q, *sources.kg, k);
  }
  return {};
}

std::string build_rag_prompt(const BenchmarkQuestion& q, const std::string& context) {
  std::string p;
  if (!context.empty()) p += "Context:\n" + context + "\n\n";
  p += "Question: " + q.prompt + "\n";
  if (q.task_type == TaskType::kPhenopacketsOnset)
    p += "Answer with an age range in years, for example \"2-5 years\".\n";
  return p + "Answer:";
}

double ConditionResult::accuracy() const {
  if (items.empty()) return 0;
  size_t ok = 0;
  for (const auto& i : items) ok += i.correct;
  return static_cast<double>(ok) / static_cast<double>(items.size());
}

ConditionResult run_condition(const std::vector<BenchmarkQuestion>& questions, ModelProvider& provider,
                              RetrievalCondition condition, const RetrievalSources& sources, size_t k,
                              double timeout_s) {
  ConditionResult result;
  result.condition = condition;
  result.model = provider.name();
  for (const auto& q : questions) {
    ItemResult item;
    item.question_id = q.id;
    auto ctx = build_context(q, condition, sources, k);
    item.context = ctx.text;
    item.context_missing = ctx.disease_missing;
    item.prompt = build_rag_prompt(q, ctx.text);
    try {
      item.answer = provider.complete(item.prompt, 0.0, timeout_s);
      item.answered = true;
      auto s = score_answer(q, item.answer);
      item.outcome = s.outcome;
      item.correct = s.correct();
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kCacheMiss) throw;
      item.error = std::string(error_kind_name(e.kind())) + ": " + e.what();
    }
    result.items.push_back(std::move(item));
  }
  return result;
}

ordered_json to_json(const ConditionResult& r) {
  ordered_json j = ordered_json::object();
  j["condition"] = std::string(to_string(r.condition));
  j["model"] = r.model;
  j["accuracy"] = r.accuracy();
  ordered_json items = ordered_json::array();
  for (const auto& i : r.items) {
    ordered_json o = ordered_json::object();
    o["question_id"] = i.question_id;
    o["answered"] = i.answered;
    o["correct"] = i.correct;
    o["outcome"] = std::string(to_string(i.outcome));
    o["answer"] = i.answer;
    o["context"] = i.context;
    o["context_missing"] = i.context_missing;
    o["prompt"] = i.prompt;
    if (!i.error.empty()) o["error"] = i.error;
    items.push_back(o);
  }
  j["items"] = items;
  return j;
}

ConditionResult condition_result_from_json(const json& j) {
  try {
    ConditionResult r;
    r.condition = parse_retrieval_condition(j.at("condition").get<std::string>());
    r.model = j.value("model", "");
    for (const auto& o : j.at("items")) {
      ItemResult i;
      i.question_id = o.at("question_id").get<std::string>();
      i.answered = o.value("answered", false);
      i.correct = o.at("correct").get<bool>();
      auto outcome = o.value("outcome", std::string("incorrect"));
      i.outcome = outcome == "correct"       ? ScoreOutcome::kCorrect
                  : outcome == "unparseable" ? ScoreOutcome::kUnparseable
                                             : ScoreOutcome::kIncorrect;
      i.answer = o.value("answer", "");
      i.context = o.value("context", "");
      i.context_missing = o.value("context_missing", false);
      i.prompt = o.value("prompt", "");
      i.error = o.value("error", "");
      r.items.push_back(std::move(i));
    }
    return r;
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("condition result: ") + e.what());
  }
}

std::string MockRagProvider::complete(const std::string& prompt, double, double) {
  const std::string open = "Context:\n";
  if (prompt.rfind(open, 0) != 0) return kFallbackAnswer;
  auto end = prompt.find("\n\nQuestion: ");
  auto context = prompt.substr(open.size(), end == std::string::npos ? std::string::npos : end - open.size());
  static const std::regex kRange(R"((\d+(?:\.\d+)?)\s*-\s*(\d+(?:\.\d+)?)\s*years)");
  std::smatch m;
  if (std::regex_search(context, m, kRange)) return m[1].str() + "-" + m[2].str() + " years";
  return kFallbackAnswer;
}

// ---------------------------------------------------------------------------

RescueResult rescue_rate(const ConditionResult& nr, const ConditionResult& cond, size_t resamples, uint64_t seed) {
  std::map<std::string, bool> under;
  for (const auto& i : cond.items) under[i.question_id] = i.correct;
  if (under.size() != nr.items.size())
    fail(ErrorKind::kDomain, "rescue: results cover different question sets");
  RescueResult r;
  std::vector<bool> outcomes;
  for (const auto& i : nr.items) {
    auto it = under.find(i.question_id);
    if (it == under.end()) fail(ErrorKind::kDomain, "rescue: question " + i.question_id + " missing from condition");
    if (i.correct) continue;
    ++r.n_fail;
    outcomes.push_back(it->second);
    if (it->second) {
      ++r.rescued;
      r.rescued_ids.push_back(i.question_id);
    }
  }
  if (r.n_fail == 0) return r;
  r.fraction = static_cast<double>(r.rescued) / static_cast<double>(r.n_fail);
  r.ci = bootstrap_ci(outcomes, resamples, seed);
  return r;
}

ordered_json to_json(const RescueResult& r) {
  ordered_json j = ordered_json::object();
  j["n_fail"] = r.n_fail;
  j["rescued"] = r.rescued;
  j["fraction"] = r.fraction ? ordered_json(*r.fraction) : ordered_json(nullptr);
  j["ci"] = r.ci ? ordered_json::array({r.ci->lo, r.ci->hi}) : ordered_json(nullptr);
  j["rescued_ids"] = r.rescued_ids;
  return j;
}

}  // namespace chronokg
