#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chronokg/chronokg.h"

namespace {

const char* kDefaults =
    "Defaults: consensus threshold 2 of 3 models, fuzzy entity match 80, age bounds 0-120 y,\n"
    "credibility weights journal 0.15, citation 0.15, study type 0.25, replication 0.15,\n"
    "retraction 0.15, model consensus 0.15; evidence text capped at 300 chars; harvest cap\n"
    "150 documents for standard-tier diseases; seeds 42 for benchmark, bootstrap, judge\n"
    "sample and k-means, 42,7,123 for link prediction. CLI flags override config values.";

struct Flag {
  CLI::Option* opt;
  std::string key;
  bool boolean;
};

struct Command {
  std::string name;  // "bench gen"
  CLI::App* app;
  std::vector<Flag> flags;

  Command& opt(const std::string& names, const std::string& help, const std::string& shown = {}) {
    auto* o = app->add_option(names, help);
    if (!shown.empty()) o->default_str(shown);
    flags.push_back({o, key_of(o), false});
    return *this;
  }

  Command& list(const std::string& names, const std::string& help, const std::string& shown = {}) {
    auto* o = app->add_option(names, help)->delimiter(',')->allow_extra_args(false);
    o->expected(1, 1 << 20);
    if (!shown.empty()) o->default_str(shown);
    flags.push_back({o, key_of(o), false});
    return *this;
  }

  static std::string key_of(CLI::Option* o) {
    std::string k = o->get_single_name();
    for (auto& c : k)
      if (c == '-') c = '_';
    return k;
  }

  nlohmann::json args() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& f : flags) {
      if (f.opt->count() == 0) continue;
      auto r = f.opt->results();
      if (f.opt->get_expected_max() > 1)
        j[f.key] = r;
      else
        j[f.key] = r.back();
    }
    return j;
  }
};

int exit_code(ckg_status s) {
  if (s == CKG_OK) return 0;
  if (s == CKG_ERR_CONFIG || s == CKG_ERR_INVALID_ARGUMENT) return 2;
  return 1;
}

int report(ckg_status s) {
  std::fprintf(stderr, "chronokg: error[%s]: %s\n", ckg_status_name(s), ckg_last_error());
  return exit_code(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal disease knowledge graph pipeline and evaluation toolkit", "chronokg"};
  app.footer(kDefaults);
  app.require_subcommand(1);
  std::string config = "config.yaml";
  bool json_out = false;
  app.add_option("--config", config, "YAML config file")->capture_default_str();
  app.add_flag("--json", json_out, "Print a JSON summary on stdout");
  app.set_version_flag("--version", std::string(ckg_version()));

  std::vector<Command> commands;
  auto add = [&](CLI::App* parent, const std::string& sub, const std::string& full, const std::string& help) -> Command& {
    auto* a = parent->add_subcommand(sub, help);
    a->footer(kDefaults);
    commands.push_back({full, a, {}});
    auto& c = commands.back();
    c.opt("--store", "Store root (default: paths.store)");
    c.opt("--out", "Output directory (default: paths.output)");
    return c;
  };
  auto group = [&](const std::string& name, const std::string& help) {
    auto* g = app.add_subcommand(name, help);
    g->require_subcommand(1);
    return g;
  };
  commands.reserve(32);

  const std::string disease_help = "Disease CURIE; repeat or comma-separate (default: config diseases)";
  add(&app, "profile", "profile", "Resolve disease metadata and literature tier").list("--disease", disease_help);
  add(&app, "harvest", "harvest", "Retrieve and pre-rank documents").list("--disease", disease_help);
  add(&app, "extract", "extract", "Run the extraction models over harvested documents")
      .list("--disease", disease_help)
      .opt("--record-to", "Also record every model response under this replay directory");
  add(&app, "consensus", "consensus", "Cluster per-document extractions into consensus triples")
      .list("--disease", disease_help);
  add(&app, "qc", "qc", "Validate, align and score consensus triples").list("--disease", disease_help);
  auto* store = group("store", "Store maintenance");
  add(store, "merge", "store merge", "Rebuild the flat tier files from per-disease directories");
  auto* pipeline = group("pipeline", "Chained stages");
  add(pipeline, "run", "pipeline run", "profile, harvest, extract, consensus, qc and store merge")
      .list("--disease", disease_help)
      .opt("--record-to", "Also record every model response under this replay directory");

  auto* validate = group("validate", "Gold-standard validation");
  add(validate, "gold", "validate gold", "Containment of KG onset ranges in a gold resource")
      .opt("--source", "orphadata | hpoa | genereviews | phenopackets", "orphadata");
  add(validate, "taxonomy", "validate taxonomy", "Error taxonomy and effective accuracy")
      .opt("--source", "orphadata | hpoa | genereviews | phenopackets", "orphadata")
      .opt("--wrong-gap", "Gap in years beyond which disjoint ranges are genuinely wrong", "10");
  add(&app, "judge", "judge", "Sample novel-coverage claims and run the judge panel")
      .opt("--n", "Claims to sample", "100")
      .opt("--seed", "Sampling seed", "42")
      .opt("--record-to", "Also record every judge response under this replay directory");
  add(&app, "coverage", "coverage", "Coverage gap against the gold resources")
      .list("--sources", "Gold resources to compare (default: all configured)")
      .opt("--universe", "Disease universe size (default: union of all sets)");

  auto* bench = group("bench", "Benchmark generation and scoring");
  add(bench, "gen", "bench gen", "Generate, QC and verify benchmark questions")
      .list("--type", "Task types, or all", "all")
      .opt("--n", "Questions per type (default: 800/687/600/147/395/200/250/250/12)")
      .opt("--seed", "Generation seed", "42");
  add(bench, "score", "bench score", "Score answers against a benchmark file")
      .opt("--questions", "Benchmark JSON or JSONL shard (default: <out>/benchmark/benchmark.json)")
      .opt("--answers", "JSON object id->answer, array of {id, answer}, or JSONL");

  auto* rag = group("rag", "Retrieval-augmented evaluation");
  add(rag, "run", "rag run", "Answer questions under retrieval conditions")
      .opt("--questions", "Benchmark JSON or JSONL shard (default: <out>/benchmark/benchmark.json)")
      .list("--condition", "NR, StaticKG, CoarseOnset, ChronoKG or all", "all")
      .opt("--model", "RAG model name from the config (default: first)")
      .opt("--k", "Retrieved context lines", "5")
      .list("--type", "Restrict to these task types")
      .opt("--coarse-source", "Gold resource used for coarse onset context", "hpoa")
      .opt("--record-to", "Also record every model response under this replay directory");
  add(rag, "rescue", "rag rescue", "Long-tail rescue rate with bootstrap CI and McNemar test")
      .opt("--baseline", "No-retrieval result file")
      .opt("--condition", "Retrieval-condition result file")
      .opt("--resamples", "Bootstrap resamples", "10000")
      .opt("--seed", "Bootstrap seed", "42");

  add(&app, "linkpred", "linkpred", "TransE ablation of structural vs temporal relations")
      .opt("--epochs", "Training epochs", "100")
      .opt("--dim", "Embedding dimension", "100")
      .opt("--batch-size", "Mini-batch size", "1024")
      .opt("--lr", "Adam learning rate", "0.01")
      .opt("--margin", "Margin ranking loss margin", "1")
      .list("--seeds", "Split and initialisation seeds", "42,7,123")
      .list("--bins", "Temporal augmentations", "fine8,coarse5");
  add(&app, "cluster", "cluster", "k-means over disease trajectory features")
      .opt("--k-min", "Smallest k", "4")
      .opt("--k-max", "Largest k", "8")
      .opt("--seed", "Initialisation seed", "42");
  add(&app, "decay", "decay", "Evidence-age distribution").opt("--reference-year", "Reference year", "2026");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::fprintf(stderr, "chronokg: error[usage]: %s\n", e.what());
    return 2;
  }

  const Command* chosen = nullptr;
  for (const auto& c : commands)
    if (c.app->parsed()) chosen = &c;
  if (!chosen) {
    std::fprintf(stderr, "chronokg: error[usage]: no subcommand\n");
    return 2;
  }

  ckg_context* ctx = nullptr;
  if (auto s = ckg_open(config.c_str(), &ctx); s != CKG_OK) return report(s);
  char* result = nullptr;
  auto s = ckg_run(ctx, chosen->name.c_str(), chosen->args().dump().c_str(), &result);
  ckg_close(ctx);
  if (s != CKG_OK) return report(s);
  if (json_out) std::cout << nlohmann::ordered_json::parse(result).dump(2) << "\n";
  std::fprintf(stderr, "chronokg: %s done\n", chosen->name.c_str());
  ckg_free_string(result);
  return 0;
}
