#include <algorithm>
#include <chrono>
#include <ctime>

#include "app/app.hpp"
#include "common/error.hpp"
#include "common/files.hpp"
#include "common/text.hpp"
#include "consensus/consensus.hpp"
#include "core/json_io.hpp"
#include "extraction/extraction.hpp"
#include "quality/quality.hpp"

namespace chronokg {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ordered_json to_json(const RunManifest& m) {
  ordered_json j = ordered_json::object();
  j["subcommand"] = m.subcommand;
  j["config_sha256"] = m.config_sha256;
  ordered_json inputs = ordered_json::object();
  for (const auto& [k, v] : m.inputs) inputs[k] = v;
  j["inputs"] = inputs;
  ordered_json seeds = ordered_json::object();
  for (const auto& [k, v] : m.seeds) seeds[k] = v;
  j["seeds"] = seeds;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  j["outputs"] = m.outputs;
  j["warnings"] = m.warnings;
  return j;
}

DiseaseDir disease_dir(const StoreLayout& layout, const std::string& disease_id) {
  return {layout.root / "diseases" / text::curie_slug(disease_id)};
}

namespace {

void note_output(StageContext& ctx, const fs::path& p) { ctx.manifest.outputs.push_back(p.string()); }

void write_json_file(StageContext& ctx, const fs::path& p, const ordered_json& j) {
  files::write_atomic(p, j.dump(2) + "\n");
  note_output(ctx, p);
}

void require(const fs::path& p, const std::string& stage) {
  if (!fs::exists(p)) fail(ErrorKind::kNotFound, p.string() + " is missing; run " + stage + " first");
}

DiseaseProfile load_profile(const DiseaseDir& d) {
  require(d.profile(), "profile");
  return profile_from_json(json::parse(files::read_text(d.profile())));
}

std::vector<SourceDocument> load_documents(const DiseaseDir& d) {
  require(d.documents(), "harvest");
  std::vector<SourceDocument> docs;
  for (const auto& line : read_lines(d.documents())) docs.push_back(document_from_json(json::parse(line)));
  return docs;
}

// Mock extractors read "drop_every=N,offset=M" from the model field so a
// config can make them disagree.
std::shared_ptr<ModelProvider> mock_extractor(const ProviderSpec& spec) {
  MockExtractionProvider::Options o;
  for (const auto& part : text::split(spec.model, ',')) {
    auto kv = text::split(part, '=');
    if (kv.size() != 2) continue;
    auto v = text::parse_long(text::trim(kv[1]));
    if (!v) fail(ErrorKind::kConfig, "bad mock option '" + part + "' for " + spec.name);
    auto k = text::trim(kv[0]);
    if (k == "drop_every") o.drop_every = static_cast<int>(*v);
    else if (k == "offset") o.offset = static_cast<int>(*v);
    else if (k == "empty") o.return_empty = *v != 0;
  }
  return std::make_shared<MockExtractionProvider>(spec.name, o);
}

std::shared_ptr<ModelProvider> provider_for(StageContext& ctx, const ProviderSpec& spec) {
  auto p = make_provider(spec, ctx.cfg.has_path("replay") ? ctx.cfg.path("replay") : fs::path("replay"),
                         mock_extractor);
  if (!ctx.record_to.empty()) return std::make_shared<RecordingProvider>(p, ctx.record_to);
  return p;
}

ordered_json diagnostics_json(const std::vector<Diagnostic>& ds) {
  ordered_json arr = ordered_json::array();
  for (const auto& d : ds) arr.push_back({{"model", d.model}, {"kind", d.kind}, {"detail", d.detail}});
  return arr;
}

}  // namespace

DiseaseProfile run_profile(StageContext& ctx, const std::string& disease_id) {
  DiseaseProfile profile;
  if (ctx.cfg.ontology_source == "live") {
    EutilsDocumentSource pubmed(ctx.cfg.eutils);
    LiveOntologySource source("https://www.ebi.ac.uk/ols4/api", pubmed);
    profile = profile_disease(disease_id, source);
  } else {
    FixtureOntologySource source(ctx.cfg.path("ontology"));
    ctx.manifest.inputs["ontology"] = ctx.cfg.path("ontology").string();
    profile = profile_disease(disease_id, source);
  }
  write_json_file(ctx, disease_dir(ctx.layout, disease_id).profile(), to_json(profile));
  return profile;
}

std::vector<SourceDocument> run_harvest(StageContext& ctx, const std::string& disease_id) {
  auto dir = disease_dir(ctx.layout, disease_id);
  auto profile = load_profile(dir);
  std::unique_ptr<DocumentSource> source;
  if (ctx.cfg.document_source == "live") {
    source = std::make_unique<EutilsDocumentSource>(ctx.cfg.eutils);
  } else {
    source = std::make_unique<FixtureDocumentSource>(ctx.cfg.path("documents"));
    ctx.manifest.inputs["documents"] = ctx.cfg.path("documents").string();
  }
  JournalTierTable tiers;
  HarvestOptions opts;
  opts.reference_year = ctx.cfg.pipeline.reference_year;
  opts.max_in_flight = ctx.cfg.eutils.max_in_flight;
  if (ctx.cfg.has_path("cache")) opts.cache_dir = ctx.cfg.path("cache");
  if (ctx.cfg.has_path("journal_tiers")) {
    tiers = JournalTierTable::load(ctx.cfg.path("journal_tiers"));
    opts.journal_tiers = &tiers;
    ctx.manifest.inputs["journal_tiers"] = ctx.cfg.path("journal_tiers").string();
  }
  auto result = harvest(profile, *source, ctx.cfg.pipeline, opts);
  for (auto& w : result.warnings) ctx.manifest.warnings.push_back(disease_id + ": " + w);
  std::vector<std::string> lines;
  for (const auto& d : result.documents) lines.push_back(to_json(d).dump());
  write_lines(dir.documents(), lines);
  note_output(ctx, dir.documents());
  return result.documents;
}

size_t run_extract(StageContext& ctx, const std::string& disease_id) {
  auto dir = disease_dir(ctx.layout, disease_id);
  auto profile = load_profile(dir);
  auto docs = load_documents(dir);
  if (ctx.cfg.primary_models.empty()) fail(ErrorKind::kConfig, "no primary extraction models configured");

  ExtractionProviders providers;
  for (const auto& spec : ctx.cfg.primary_models) providers.primary.push_back(provider_for(ctx, spec));
  if (ctx.cfg.tiebreaker) providers.tiebreaker = provider_for(ctx, *ctx.cfg.tiebreaker);
  providers.temperature = ctx.cfg.primary_models.front().temperature;
  providers.timeout_s = ctx.cfg.primary_models.front().timeout_s;
  if (ctx.cfg.has_path("replay")) ctx.manifest.inputs["replay"] = ctx.cfg.path("replay").string();

  std::sort(docs.begin(), docs.end(),
            [](const SourceDocument& a, const SourceDocument& b) { return pmid_less(a.pmid, b.pmid); });
  std::vector<RawTriple> raw;
  ordered_json report = ordered_json::array();
  for (const auto& doc : docs) {
    auto r = extract_document(doc, profile, providers, ctx.cfg.pipeline);
    for (const auto& [model, triples] : r.per_model) raw.insert(raw.end(), triples.begin(), triples.end());
    ordered_json e = ordered_json::object();
    e["pmid"] = r.pmid;
    e["models_processed"] = r.models_processed;
    e["tiebreaker_invoked"] = r.tiebreaker_invoked;
    e["second_pass_run"] = r.second_pass_run;
    e["diagnostics"] = diagnostics_json(r.diagnostics);
    report.push_back(e);
    for (const auto& d : r.diagnostics)
      if (d.kind == "timeout" || d.kind == "transport")
        ctx.manifest.warnings.push_back(disease_id + ": PMID " + r.pmid + " " + d.model + " " + d.kind);
  }
  write_json_file(ctx, dir.extraction(), report);
  auto raw_path = ctx.layout.per_disease(Tier::kRaw, disease_id);
  write_records(raw_path, raw);
  note_output(ctx, raw_path);
  return raw.size();
}

size_t run_consensus(StageContext& ctx, const std::string& disease_id) {
  auto dir = disease_dir(ctx.layout, disease_id);
  require(dir.extraction(), "extract");
  auto report = json::parse(files::read_text(dir.extraction()));
  auto raw = load_raw(ctx.layout.per_disease(Tier::kRaw, disease_id)).records;

  std::map<std::string, ExtractionResult> by_pmid;
  for (const auto& e : report) {
    ExtractionResult r;
    r.pmid = e.at("pmid").get<std::string>();
    r.models_processed = e.at("models_processed").get<std::vector<std::string>>();
    by_pmid[r.pmid] = std::move(r);
  }
  for (auto& t : raw) {
    auto it = by_pmid.find(t.pmid);
    if (it == by_pmid.end()) fail(ErrorKind::kParse, "raw triple for PMID " + t.pmid + " has no extraction entry");
    it->second.per_model[t.model].push_back(std::move(t));
  }
  std::vector<std::string> pmids;
  for (const auto& [p, _] : by_pmid) pmids.push_back(p);
  std::sort(pmids.begin(), pmids.end(), pmid_less);

  std::vector<ConsensusTriple> out;
  for (const auto& p : pmids) {
    auto c = consensus_for_document(by_pmid[p], ctx.cfg.pipeline);
    out.insert(out.end(), c.begin(), c.end());
  }
  auto path = ctx.layout.per_disease(Tier::kConsensus, disease_id);
  write_records(path, out);
  note_output(ctx, path);
  return out.size();
}

ordered_json run_qc(StageContext& ctx, const std::string& disease_id) {
  auto dir = disease_dir(ctx.layout, disease_id);
  auto profile = load_profile(dir);
  std::map<std::string, SourceDocument> docs;
  if (fs::exists(dir.documents()))
    for (auto& d : load_documents(dir)) docs[strip_pmid_prefix(d.pmid)] = std::move(d);
  SchemaIndex schema;
  if (ctx.cfg.has_path("schema")) {
    schema = SchemaIndex::load(ctx.cfg.path("schema"));
    ctx.manifest.inputs["schema"] = ctx.cfg.path("schema").string();
  } else {
    ctx.manifest.warnings.push_back("no schema snapshot configured; every edge is grade B");
  }
  auto consensus = load_consensus(ctx.layout.per_disease(Tier::kConsensus, disease_id)).records;
  auto qc = qc_pipeline(consensus, ctx.cfg.pipeline, schema, profile, docs);

  auto vpath = ctx.layout.per_disease(Tier::kValidated, disease_id);
  write_records(vpath, qc.validated);
  note_output(ctx, vpath);
  std::vector<std::string> rej, con;
  for (const auto& r : qc.rejections) rej.push_back(dump_line(to_json(r)));
  for (const auto& c : qc.conflicts) con.push_back(dump_line(to_json(c)));
  write_lines(dir.rejections(), rej);
  write_lines(dir.conflicts(), con);
  note_output(ctx, dir.rejections());
  note_output(ctx, dir.conflicts());

  ordered_json j = ordered_json::object();
  j["disease"] = disease_id;
  j["input"] = consensus.size();
  j["validated"] = qc.validated.size();
  j["rejected"] = qc.rejections.size();
  j["conflicts"] = qc.conflicts.size();
  return j;
}

ordered_json run_merge(StageContext& ctx) {
  std::vector<fs::path> dirs;
  auto base = ctx.layout.root / "diseases";
  if (fs::exists(base))
    for (const auto& e : fs::directory_iterator(base))
      if (e.is_directory()) dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());

  std::vector<std::string> raw, consensus;
  std::vector<TemporalTriple> validated;
  for (const auto& d : dirs) {
    auto take = [&](const char* name, std::vector<std::string>& into) {
      if (fs::exists(d / name)) {
        auto lines = read_lines(d / name);
        into.insert(into.end(), lines.begin(), lines.end());
      }
    };
    take("raw.jsonl.gz", raw);
    take("consensus.jsonl.gz", consensus);
    if (fs::exists(d / "validated.jsonl")) {
      auto v = load_validated(d / "validated.jsonl").records;
      validated.insert(validated.end(), v.begin(), v.end());
    }
  }
  auto merged = merge_multi_source(validated);

  auto gz = [&](Tier t, const std::vector<std::string>& lines) {
    std::string body;
    for (const auto& l : lines) body += l + "\n";
    files::write_gzip_atomic(ctx.layout.flat(t), body);
    note_output(ctx, ctx.layout.flat(t));
  };
  gz(Tier::kRaw, raw);
  gz(Tier::kConsensus, consensus);
  write_records(ctx.layout.flat(Tier::kValidated), merged);
  note_output(ctx, ctx.layout.flat(Tier::kValidated));

  ordered_json j = ordered_json::object();
  j["diseases"] = dirs.size();
  j["raw"] = raw.size();
  j["consensus"] = consensus.size();
  j["validated_per_disease"] = validated.size();
  j["validated"] = merged.size();
  j["multi_source_merged"] = validated.size() - merged.size();
  return j;
}

}  // namespace chronokg
