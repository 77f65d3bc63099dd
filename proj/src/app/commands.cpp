#include <algorithm>
#include <functional>

#include "app/app.hpp"
#include "benchmark/benchmark.hpp"
#include "common/error.hpp"
#include "common/files.hpp"
#include "common/text.hpp"
#include "core/json_io.hpp"
#include "evaluation/evaluation.hpp"
#include "quality/quality.hpp"
#include "validation/validation.hpp"

namespace chronokg {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------
// Flag access

std::optional<std::string> opt_str(const json& args, const char* key) {
  if (!args.contains(key) || args[key].is_null()) return std::nullopt;
  if (args[key].is_string()) return args[key].get<std::string>();
  return args[key].dump();
}

std::string str_arg(const json& args, const char* key, const std::string& def) {
  return opt_str(args, key).value_or(def);
}

template <typename T>
T num_arg(const json& args, const char* key, T def) {
  if (!args.contains(key) || args[key].is_null()) return def;
  const auto& v = args[key];
  if (v.is_number()) return v.get<T>();
  if (v.is_string()) {
    auto d = text::parse_double(v.get<std::string>());
    if (d) return static_cast<T>(*d);
  }
  fail(ErrorKind::kConfig, std::string("flag --") + key + " expects a number");
}

std::vector<std::string> list_arg(const json& args, const char* key) {
  std::vector<std::string> out;
  if (!args.contains(key) || args[key].is_null()) return out;
  const auto& v = args[key];
  if (v.is_array()) {
    for (const auto& x : v) out.push_back(x.get<std::string>());
  } else {
    for (auto& part : text::split(v.get<std::string>(), ','))
      if (auto t = text::trim(part); !t.empty()) out.push_back(t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shared plumbing

struct Run {
  const AppConfig& cfg;
  const json& args;
  RunManifest manifest;
  fs::path store_root;
  fs::path out_dir;

  StageContext stage() {
    StageContext ctx{cfg, StoreLayout{store_root}, manifest, {}};
    if (auto r = opt_str(args, "record_to")) ctx.record_to = *r;
    return ctx;
  }

  fs::path output(const std::string& name) {
    fs::path p = out_dir / name;
    manifest.outputs.push_back(p.string());
    return p;
  }

  void write_json(const std::string& name, const ordered_json& j) {
    files::write_atomic(output(name), j.dump(2) + "\n");
  }

  fs::path input(const std::string& key) {
    if (!cfg.has_path(key)) fail(ErrorKind::kConfig, "paths." + key + " is not set in the config");
    auto p = cfg.path(key);
    manifest.inputs[key] = p.string();
    return p;
  }

  uint64_t seed(const std::string& name) {
    uint64_t s = num_arg<uint64_t>(args, "seed", cfg.pipeline.seed(name));
    manifest.seeds[name] = s;
    return s;
  }

  KgStore store() {
    manifest.inputs["store"] = store_root.string();
    return KgStore::open(store_root);
  }
};

std::vector<std::string> diseases_arg(const Run& run) {
  auto ds = list_arg(run.args, "disease");
  if (ds.empty()) ds = run.cfg.diseases;
  if (ds.empty()) fail(ErrorKind::kConfig, "no disease given (--disease) and none listed in the config");
  return ds;
}

std::vector<GoldRecord> load_gold(Run& run, const std::string& source) {
  switch (parse_gold_source(source)) {
    case GoldSource::kOrphadata: return load_orphadata(run.input("orphadata"));
    case GoldSource::kHpoa: return load_hpoa(run.input("hpoa"));
    case GoldSource::kGeneReviews: return load_genereviews(run.input("genereviews"));
    case GoldSource::kPhenopackets: return phenopacket_gold(load_phenopackets(run.input("phenopackets")));
  }
  return {};
}

// Gold sources present in the config, in a fixed order.
std::vector<std::string> configured_gold(const AppConfig& cfg) {
  std::vector<std::string> out;
  for (const char* s : {"orphadata", "hpoa", "genereviews", "phenopackets"})
    if (cfg.has_path(s)) out.push_back(s);
  return out;
}

std::vector<std::string> kg_names(const KgStore& kg) {
  std::vector<std::string> names;
  for (const auto& id : kg.diseases()) names.push_back(kg.disease_name(id));
  return names;
}

std::string range_str(const AgeRange& r) { return text::format_number(r.min) + "-" + text::format_number(r.max); }

MockFactory judge_mocks() {
  return [](const ProviderSpec& s) { return std::make_shared<MockJudgeProvider>(s.name); };
}

MockFactory rag_mocks() {
  return [](const ProviderSpec& s) { return std::make_shared<MockRagProvider>(s.name); };
}

std::shared_ptr<ModelProvider> provider(Run& run, const ProviderSpec& spec, const MockFactory& mocks) {
  fs::path replay = run.cfg.has_path("replay") ? run.cfg.path("replay") : fs::path("replay");
  auto p = make_provider(spec, replay, mocks);
  if (auto r = opt_str(run.args, "record_to")) return std::make_shared<RecordingProvider>(p, *r);
  return p;
}

// ---------------------------------------------------------------------------
// Pipeline stages

ordered_json for_each_disease(Run& run, const std::function<ordered_json(StageContext&, const std::string&)>& fn) {
  auto ctx = run.stage();
  ordered_json out = ordered_json::object();
  for (const auto& d : diseases_arg(run)) out[d] = fn(ctx, d);
  return out;
}

ordered_json cmd_profile(Run& run) {
  return for_each_disease(run, [](StageContext& c, const std::string& d) {
    auto p = run_profile(c, d);
    return ordered_json{{"name", p.name}, {"tier", std::string(to_string(p.tier))}, {"pubmed_count", p.pubmed_count}};
  });
}

ordered_json cmd_harvest(Run& run) {
  return for_each_disease(run, [](StageContext& c, const std::string& d) {
    return ordered_json{{"documents", run_harvest(c, d).size()}};
  });
}

ordered_json cmd_extract(Run& run) {
  return for_each_disease(run, [](StageContext& c, const std::string& d) {
    return ordered_json{{"raw_triples", run_extract(c, d)}};
  });
}

ordered_json cmd_consensus(Run& run) {
  return for_each_disease(run, [](StageContext& c, const std::string& d) {
    return ordered_json{{"consensus_triples", run_consensus(c, d)}};
  });
}

ordered_json cmd_qc(Run& run) {
  return for_each_disease(run, [](StageContext& c, const std::string& d) { return run_qc(c, d); });
}

ordered_json cmd_merge(Run& run) {
  auto ctx = run.stage();
  return run_merge(ctx);
}

ordered_json cmd_pipeline(Run& run) {
  auto ctx = run.stage();
  ordered_json per = ordered_json::object();
  for (const auto& d : diseases_arg(run)) {
    run_profile(ctx, d);
    auto docs = run_harvest(ctx, d);
    size_t raw = run_extract(ctx, d);
    size_t cons = run_consensus(ctx, d);
    auto qc = run_qc(ctx, d);
    qc["documents"] = docs.size();
    qc["raw"] = raw;
    qc["consensus"] = cons;
    per[d] = qc;
  }
  ordered_json j = ordered_json::object();
  j["diseases"] = per;
  j["store"] = run_merge(ctx);
  return j;
}

// ---------------------------------------------------------------------------
// Validation

ordered_json cmd_validate_gold(Run& run) {
  auto source = str_arg(run.args, "source", "orphadata");
  auto gold = load_gold(run, source);
  auto kg = run.store();
  auto match = match_diseases(kg_names(kg), gold);
  ordered_json rows = ordered_json::array();
  size_t contained = 0, compared = 0;
  for (const auto& m : match.matched) {
    auto range = compared_range(kg.triples_for(m.kg_name));
    if (!range) continue;
    ++compared;
    bool ok = containment(*range, gold[m.gold_index].range);
    contained += ok;
    rows.push_back({{"disease", m.kg_name},
                    {"kg_range", range_str(*range)},
                    {"gold_range", range_str(gold[m.gold_index].range)},
                    {"contained", ok}});
  }
  ordered_json j = ordered_json::object();
  j["source"] = source;
  j["matched"] = match.matched.size();
  j["ambiguous"] = match.ambiguous;
  j["unmatched"] = match.unmatched.size();
  j["compared"] = compared;
  j["contained"] = contained;
  j["strict_precision"] = compared ? static_cast<double>(contained) / static_cast<double>(compared) : 0.0;
  ordered_json file = j;
  file["rows"] = rows;
  run.write_json("validate_gold." + source + ".json", file);
  return j;
}

ordered_json cmd_validate_taxonomy(Run& run) {
  auto source = str_arg(run.args, "source", "orphadata");
  double wrong_gap = num_arg<double>(run.args, "wrong_gap", 10.0);
  auto gold = load_gold(run, source);
  auto kg = run.store();
  auto match = match_diseases(kg_names(kg), gold);
  std::vector<TaxonomyVerdict> verdicts;
  ordered_json rows = ordered_json::array();
  for (const auto& m : match.matched) {
    const auto& triples = kg.triples_for(m.kg_name);
    if (!compared_range(triples)) continue;
    auto c = classify_discrepancy(triples, gold[m.gold_index].range, OnsetBinTable::standard(), wrong_gap);
    verdicts.push_back(c.verdict);
    ordered_json r = {{"disease", m.kg_name},
                      {"verdict", std::string(to_string(c.verdict))},
                      {"kg_range", range_str(c.kg_range)},
                      {"gold_range", range_str(c.gold_range)}};
    if (c.noise_edge) r["noise_edge"] = *c.noise_edge;
    rows.push_back(r);
  }
  auto report = accuracy_metrics(verdicts);
  auto j = to_json(report);
  j["source"] = source;
  ordered_json file = j;
  file["rows"] = rows;
  run.write_json("taxonomy." + source + ".json", file);
  return j;
}

ordered_json cmd_coverage(Run& run) {
  auto kg = run.store();
  std::set<std::string> kg_keys;
  for (const auto& n : kg_names(kg)) kg_keys.insert(normalize_disease_name(n));
  std::vector<std::pair<std::string, std::set<std::string>>> resources;
  std::set<std::string> all = kg_keys;
  auto sources = list_arg(run.args, "sources");
  if (sources.empty()) sources = configured_gold(run.cfg);
  for (const auto& s : sources) {
    std::set<std::string> keys;
    for (const auto& r : load_gold(run, s)) keys.insert(r.disease_key);
    all.insert(keys.begin(), keys.end());
    resources.emplace_back(s, std::move(keys));
  }
  size_t universe = num_arg<size_t>(run.args, "universe", all.size());
  auto report = coverage_gap(kg_keys, resources, universe);
  auto j = to_json(report);
  run.write_json("coverage.json", j);
  std::string csv = "resource,diseases,percent\n";
  auto row = [&](const CoverageRow& r) {
    csv += r.resource + "," + std::to_string(r.diseases) + "," + text::format_number(r.percent) + "\n";
  };
  for (const auto& r : report.resources) row(r);
  row(report.kg);
  row(report.novel);
  files::write_atomic(run.output("coverage_bars.csv"), csv);
  return j;
}

ordered_json cmd_judge(Run& run) {
  auto kg = run.store();
  std::set<std::string> gold_keys;
  for (const auto& s : configured_gold(run.cfg))
    for (const auto& r : load_gold(run, s)) gold_keys.insert(r.disease_key);

  std::vector<NovelCandidate> population;
  StoreLayout layout{run.store_root};
  for (const auto& id : kg.diseases()) {
    auto name = kg.disease_name(id);
    if (gold_keys.count(normalize_disease_name(name))) continue;
    NovelCandidate c{id, name, LiteratureTier::kMinimal, kg.triples_for(id)};
    auto pf = disease_dir(layout, id).profile();
    if (fs::exists(pf)) c.tier = profile_from_json(json::parse(files::read_text(pf))).tier;
    population.push_back(std::move(c));
  }
  size_t n = num_arg<size_t>(run.args, "n", 100);
  if (n > population.size()) {
    run.manifest.warnings.push_back("sample size " + std::to_string(n) + " capped at " +
                                    std::to_string(population.size()) + " novel diseases");
    n = population.size();
  }
  auto sample = sample_novel(population, n, run.seed("judge_sample"), OnsetBinTable::standard());
  for (const auto& w : sample.warnings) run.manifest.warnings.push_back(w);

  std::vector<ProviderSpec> specs = run.cfg.judges;
  if (specs.empty()) fail(ErrorKind::kConfig, "no judges configured");
  std::vector<std::shared_ptr<ModelProvider>> judges;
  for (const auto& s : specs) judges.push_back(provider(run, s, judge_mocks()));

  std::vector<std::vector<JudgeVerdict>> verdicts;
  ordered_json items = ordered_json::array();
  for (const auto& claim : sample.items) {
    std::vector<JudgeVerdict> vs;
    ordered_json item = to_json(claim);
    ordered_json per = ordered_json::array();
    for (size_t i = 0; i < judges.size(); ++i) {
      try {
        auto v = judge_pair(claim.claim, claim.evidence, *judges[i], specs[i].timeout_s);
        per.push_back({{"judge", v.judge}, {"verdict", std::string(to_string(v.verdict))}, {"rationale", v.rationale}});
        vs.push_back(std::move(v));
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::kCacheMiss) throw;
        run.manifest.warnings.push_back(claim.disease_id + ": judge " + specs[i].name + " " +
                                        error_kind_name(e.kind()));
      }
    }
    item["verdicts"] = per;
    items.push_back(item);
    verdicts.push_back(std::move(vs));
  }
  auto panel = aggregate_verdicts(verdicts);
  for (const auto& w : panel.warnings) run.manifest.warnings.push_back(w);
  ordered_json alloc = ordered_json::object();
  for (const auto& [k, v] : sample.allocation) alloc[k] = v;
  ordered_json file = ordered_json::object();
  file["population"] = population.size();
  file["allocation"] = alloc;
  file["panel"] = to_json(panel);
  file["items"] = items;
  run.write_json("judge.json", file);
  files::write_atomic(run.output("judge_table.txt"), render_panel_table(panel));
  auto j = to_json(panel);
  j["population"] = population.size();
  return j;
}

// ---------------------------------------------------------------------------
// Benchmark

std::map<TaskType, size_t> default_counts() {
  return {{TaskType::kTemporalWindow, 800},  {TaskType::kTemporalDifferential, 687},
          {TaskType::kCrossDiseaseComparison, 600}, {TaskType::kPhenopacketsOnset, 147},
          {TaskType::kPhenotypeOrdering, 395}, {TaskType::kStageConditional, 200},
          {TaskType::kStaticDrug, 250},      {TaskType::kStaticGene, 250},
          {TaskType::kNegativeTemporal, 12}};
}

fs::path default_questions(const Run& run) {
  return run.out_dir / "benchmark" / "benchmark.json";
}

ordered_json cmd_bench_gen(Run& run) {
  run.out_dir /= "benchmark";
  auto counts = default_counts();
  auto types = list_arg(run.args, "type");
  if (!types.empty() && !(types.size() == 1 && types[0] == "all")) {
    std::map<TaskType, size_t> chosen;
    for (const auto& t : types) chosen[parse_task_type(t)] = counts[parse_task_type(t)];
    counts = chosen;
  }
  if (run.args.contains("n") && !run.args["n"].is_null()) {
    size_t n = num_arg<size_t>(run.args, "n", 0);
    for (auto& [_, c] : counts) c = n;
  }
  BenchmarkSources src;
  if (run.cfg.has_path("orphadata")) src.onset_gold = load_gold(run, "orphadata");
  if (run.cfg.has_path("hpoa")) src.negative_gold = load_gold(run, "hpoa");
  if (run.cfg.has_path("phenopackets")) src.phenopackets = load_phenopackets(run.input("phenopackets"));
  std::optional<KgStore> kg;
  if (fs::exists(StoreLayout{run.store_root}.flat(Tier::kValidated))) {
    kg = run.store();
    src.kg = &*kg;
  }
  std::optional<SchemaIndex> schema;
  if (run.cfg.has_path("schema")) {
    schema = SchemaIndex::load(run.input("schema"));
    src.schema = &*schema;
  }
  auto gen = generate_benchmark(counts, src, run.seed("benchmark"));
  for (const auto& w : gen.warnings) run.manifest.warnings.push_back(w);
  auto qc = qc_questions(gen.questions);
  auto check = verify_tier1(qc.kept, src);
  for (const auto& p : write_benchmark(qc.kept, run.out_dir)) run.manifest.outputs.push_back(p.string());
  std::vector<std::string> removed;
  for (const auto& r : qc.removed) removed.push_back(dump_line({{"id", r.id}, {"reason", r.reason}}));
  write_lines(run.output("qc_removed.jsonl"), removed);

  ordered_json per = ordered_json::object();
  for (auto t : all_task_types()) {
    size_t k = std::count_if(qc.kept.begin(), qc.kept.end(), [&](const auto& q) { return q.task_type == t; });
    if (k || counts.count(t)) per[std::string(to_string(t))] = k;
  }
  ordered_json j = ordered_json::object();
  j["generated"] = gen.questions.size();
  j["kept"] = qc.kept.size();
  j["removed"] = qc.removed.size();
  j["per_type"] = per;
  j["tier1_checked"] = check.checked;
  j["tier1_mismatches"] = check.mismatches;
  j["warnings"] = gen.warnings;
  run.write_json("bench_report.json", j);
  return j;
}

std::map<std::string, std::string> load_answers(const fs::path& path) {
  std::map<std::string, std::string> out;
  auto body = files::read_text(path);
  auto add = [&](const json& o) {
    out[o.at("id").get<std::string>()] = o.at("answer").is_string() ? o.at("answer").get<std::string>() : o.at("answer").dump();
  };
  try {
    auto trimmed = text::trim(body);
    if (!trimmed.empty() && trimmed[0] == '{' && trimmed.find('\n') == std::string::npos) {
      add(json::parse(trimmed));
    } else if (!trimmed.empty() && (trimmed[0] == '[' || trimmed[0] == '{')) {
      try {
        auto j = json::parse(trimmed);
        if (j.is_array())
          for (const auto& o : j) add(o);
        else
          for (const auto& [k, v] : j.items()) out[k] = v.is_string() ? v.get<std::string>() : v.dump();
        return out;
      } catch (const json::parse_error&) {
        for (const auto& line : text::split(trimmed, '\n'))
          if (!text::trim(line).empty()) add(json::parse(line));
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, "answers file " + path.string() + ": " + e.what());
  }
  return out;
}

ordered_json cmd_bench_score(Run& run) {
  fs::path qpath = str_arg(run.args, "questions", default_questions(run).string());
  auto apath = opt_str(run.args, "answers");
  if (!apath) fail(ErrorKind::kConfig, "bench score needs --answers");
  run.manifest.inputs["questions"] = qpath.string();
  run.manifest.inputs["answers"] = *apath;
  auto score = score_benchmark(load_questions(qpath), load_answers(*apath));
  auto j = to_json(score);
  run.write_json("score.json", j);
  return j;
}

// ---------------------------------------------------------------------------
// Evaluation

ordered_json cmd_rag_run(Run& run) {
  fs::path qpath = str_arg(run.args, "questions", default_questions(run).string());
  run.manifest.inputs["questions"] = qpath.string();
  auto questions = load_questions(qpath);
  if (auto types = list_arg(run.args, "type"); !types.empty()) {
    std::set<TaskType> keep;
    for (const auto& t : types) keep.insert(parse_task_type(t));
    std::erase_if(questions, [&](const BenchmarkQuestion& q) { return !keep.count(q.task_type); });
  }
  if (run.cfg.rag_models.empty()) fail(ErrorKind::kConfig, "no rag models configured");
  auto model = str_arg(run.args, "model", run.cfg.rag_models.front().name);
  auto spec = std::find_if(run.cfg.rag_models.begin(), run.cfg.rag_models.end(),
                           [&](const ProviderSpec& s) { return s.name == model; });
  if (spec == run.cfg.rag_models.end()) fail(ErrorKind::kConfig, "rag model '" + model + "' is not configured");
  auto p = provider(run, *spec, rag_mocks());

  std::vector<RetrievalCondition> conds;
  auto names = list_arg(run.args, "condition");
  if (names.empty() || names == std::vector<std::string>{"all"})
    conds = {RetrievalCondition::kNone, RetrievalCondition::kStaticKg, RetrievalCondition::kCoarseOnset,
             RetrievalCondition::kChronoKg};
  else
    for (const auto& n : names) conds.push_back(parse_retrieval_condition(n));

  RetrievalSources sources;
  std::optional<KgStore> kg;
  std::optional<SchemaIndex> schema;
  for (auto c : conds) {
    if (c == RetrievalCondition::kChronoKg && !kg) kg = run.store();
    if (c == RetrievalCondition::kStaticKg && !schema) schema = SchemaIndex::load(run.input("schema"));
    if (c == RetrievalCondition::kCoarseOnset && sources.coarse_onset.empty())
      sources.coarse_onset = load_gold(run, str_arg(run.args, "coarse_source", "hpoa"));
  }
  if (kg) sources.kg = &*kg;
  if (schema) sources.schema = &*schema;
  size_t k = num_arg<size_t>(run.args, "k", 5);

  ordered_json j = ordered_json::object();
  for (auto c : conds) {
    auto r = run_condition(questions, *p, c, sources, k, spec->timeout_s);
    run.write_json("rag." + model + "." + std::string(to_string(c)) + ".json", to_json(r));
    j[std::string(to_string(c))] = {{"n", r.items.size()}, {"accuracy", r.accuracy()}};
  }
  return j;
}

ordered_json cmd_rag_rescue(Run& run) {
  auto nr_path = opt_str(run.args, "baseline");
  auto cond_path = opt_str(run.args, "condition");
  if (!nr_path || !cond_path) fail(ErrorKind::kConfig, "rag rescue needs --baseline and --condition result files");
  run.manifest.inputs["baseline"] = *nr_path;
  run.manifest.inputs["condition"] = *cond_path;
  auto nr = condition_result_from_json(json::parse(files::read_text(*nr_path)));
  auto cond = condition_result_from_json(json::parse(files::read_text(*cond_path)));
  size_t resamples = num_arg<size_t>(run.args, "resamples", 10000);
  auto r = rescue_rate(nr, cond, resamples, run.seed("bootstrap"));
  auto j = to_json(r);
  std::map<std::string, bool> under;
  for (const auto& i : cond.items) under[i.question_id] = i.correct;
  std::vector<bool> a, b;
  for (const auto& i : nr.items) {
    a.push_back(i.correct);
    b.push_back(under[i.question_id]);
  }
  j["model"] = cond.model;
  j["condition"] = std::string(to_string(cond.condition));
  j["mcnemar_p"] = mcnemar_exact(a, b);
  run.write_json("rescue." + cond.model + "." + std::string(to_string(cond.condition)) + ".json", j);
  return j;
}

ordered_json cmd_linkpred(Run& run) {
  auto kg = run.store();
  TransEParams params;
  params.epochs = num_arg<size_t>(run.args, "epochs", params.epochs);
  params.dim = num_arg<size_t>(run.args, "dim", params.dim);
  params.batch_size = num_arg<size_t>(run.args, "batch_size", params.batch_size);
  params.lr = num_arg<double>(run.args, "lr", params.lr);
  params.margin = num_arg<double>(run.args, "margin", params.margin);
  std::vector<uint64_t> seeds = run.cfg.pipeline.linkpred_seeds;
  if (auto s = list_arg(run.args, "seeds"); !s.empty()) {
    seeds.clear();
    for (const auto& x : s) {
      auto v = text::parse_long(x);
      if (!v || *v < 0) fail(ErrorKind::kConfig, "bad seed " + x);
      seeds.push_back(static_cast<uint64_t>(*v));
    }
  }
  for (size_t i = 0; i < seeds.size(); ++i) run.manifest.seeds["linkpred_" + std::to_string(i)] = seeds[i];
  std::vector<AblationCondition> conds = {{"structural", BinMode::kNone}};
  auto modes = list_arg(run.args, "bins");
  if (modes.empty()) modes = {"fine8", "coarse5"};
  for (const auto& m : modes) conds.push_back({m, parse_bin_mode(m)});
  auto report = ablation_run(link_triples(kg.triples()), conds, seeds, params);
  auto j = to_json(report);
  run.write_json("linkpred.json", j);
  files::write_atomic(run.output("linkpred.csv"), ablation_csv(report));
  return j["summary"];
}

ordered_json cmd_cluster(Run& run) {
  auto kg = run.store();
  std::vector<std::string> skipped;
  auto feats = disease_features(kg, &skipped);
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  for (const auto& f : feats) {
    rows.push_back(f.vector());
    labels.push_back(f.disease_id);
  }
  auto report = cluster_trajectories(rows, num_arg<size_t>(run.args, "k_min", 4), num_arg<size_t>(run.args, "k_max", 8),
                                     run.seed("kmeans"));
  for (const auto& w : report.warnings) run.manifest.warnings.push_back(w);
  auto j = to_json(report, labels);
  j["skipped"] = skipped;
  run.write_json("clusters.json", j);
  std::string csv = "disease_id,median_onset,onset_spread,stage_count,milestone_density,fraction_with_onset,cluster\n";
  const auto* chosen = report.chosen();
  for (size_t i = 0; i < feats.size(); ++i) {
    const auto& f = feats[i];
    csv += f.disease_id + "," + text::format_number(f.median_onset) + "," + text::format_number(f.onset_spread) + "," +
           text::format_number(f.stage_count) + "," + text::format_number(f.milestone_density) + "," +
           text::format_number(f.fraction_with_onset) + "," +
           (chosen ? std::to_string(chosen->assignments[i]) : std::string()) + "\n";
  }
  files::write_atomic(run.output("cluster_scatter.csv"), csv);
  ordered_json s = ordered_json::object();
  s["diseases"] = feats.size();
  s["chosen_k"] = report.chosen_k ? ordered_json(*report.chosen_k) : ordered_json(nullptr);
  s["degenerate"] = report.degenerate;
  return s;
}

ordered_json cmd_decay(Run& run) {
  auto kg = run.store();
  int year = num_arg<int>(run.args, "reference_year", run.cfg.pipeline.reference_year);
  auto stats = evidence_age_stats(kg.triples(), year);
  auto j = to_json(stats);
  j["reference_year"] = year;
  run.write_json("decay.json", j);
  std::string csv = "year,triples\n";
  for (const auto& [y, n] : stats.histogram) csv += std::to_string(y) + "," + std::to_string(n) + "\n";
  files::write_atomic(run.output("decay_histogram.csv"), csv);
  return j;
}

using Handler = ordered_json (*)(Run&);

const std::vector<std::pair<std::string, Handler>>& handlers() {
  static const std::vector<std::pair<std::string, Handler>> h = {
      {"profile", cmd_profile},
      {"harvest", cmd_harvest},
      {"extract", cmd_extract},
      {"consensus", cmd_consensus},
      {"qc", cmd_qc},
      {"store merge", cmd_merge},
      {"validate gold", cmd_validate_gold},
      {"validate taxonomy", cmd_validate_taxonomy},
      {"judge", cmd_judge},
      {"coverage", cmd_coverage},
      {"bench gen", cmd_bench_gen},
      {"bench score", cmd_bench_score},
      {"rag run", cmd_rag_run},
      {"rag rescue", cmd_rag_rescue},
      {"linkpred", cmd_linkpred},
      {"cluster", cmd_cluster},
      {"decay", cmd_decay},
      {"pipeline run", cmd_pipeline},
  };
  return h;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, _] : handlers()) n.push_back(name);
    return n;
  }();
  return names;
}

ordered_json run_command(const std::string& name, const AppConfig& cfg, const json& args) {
  auto it = std::find_if(handlers().begin(), handlers().end(), [&](const auto& h) { return h.first == name; });
  if (it == handlers().end()) fail(ErrorKind::kConfig, "unknown subcommand '" + name + "'");
  if (!args.is_object() && !args.is_null()) fail(ErrorKind::kConfig, "arguments must be a JSON object");
  static const json kEmpty = json::object();
  const json& a = args.is_null() ? kEmpty : args;

  Run run{cfg, a, {}, {}, {}};
  run.manifest.subcommand = name;
  run.manifest.config_sha256 = cfg.config_sha256;
  run.manifest.started_at = utc_timestamp();
  if (!cfg.config_path.empty()) run.manifest.inputs["config"] = cfg.config_path.string();
  if (auto s = opt_str(a, "store"))
    run.store_root = *s;
  else if (cfg.has_path("store"))
    run.store_root = cfg.path("store");
  else
    run.store_root = "store";
  if (auto o = opt_str(a, "out"))
    run.out_dir = *o;
  else if (cfg.has_path("output"))
    run.out_dir = cfg.path("output");
  else
    run.out_dir = run.store_root / "reports";

  auto summary = it->second(run);
  run.manifest.finished_at = utc_timestamp();
  auto mname = "run_manifest." + text::replace_all(name, " ", "_") + ".json";
  files::write_atomic(run.out_dir / mname, to_json(run.manifest).dump(2) + "\n");
  return summary;
}

}  // namespace chronokg
