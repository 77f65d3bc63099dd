#include <algorithm>
#include <future>

#include "acquisition/acquisition.hpp"
#include "common/error.hpp"
#include "common/files.hpp"
#include "common/text.hpp"

namespace chronokg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path cache_dir_for(const fs::path& root, const DiseaseProfile& profile,
                       const std::string& version) {
  return root / text::curie_slug(profile.disease_id) / text::curie_slug(version);
}

std::optional<HarvestResult> read_cache(const fs::path& dir) {
  auto manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path)) return std::nullopt;
  json manifest = json::parse(files::read_text(manifest_path));
  HarvestResult r;
  r.from_cache = true;
  r.warnings = manifest.value("warnings", std::vector<std::string>{});
  for (const auto& pmid : manifest.at("pmids")) {
    auto p = dir / "docs" / (pmid.get<std::string>() + ".json");
    r.documents.push_back(document_from_json(json::parse(files::read_text(p))));
  }
  return r;
}

void write_cache(const fs::path& dir, const DiseaseProfile& profile, const std::string& version,
                 const HarvestResult& r) {
  json manifest = json::object();
  manifest["disease_id"] = profile.disease_id;
  manifest["source_version"] = version;
  manifest["tier"] = std::string(to_string(profile.tier));
  std::vector<std::string> pmids;
  for (const auto& d : r.documents) {
    files::write_atomic(dir / "docs" / (d.pmid + ".json"), to_json(d).dump(2) + "\n");
    pmids.push_back(d.pmid);
  }
  manifest["pmids"] = pmids;
  manifest["warnings"] = r.warnings;
  // manifest last: its presence marks a complete cache entry
  files::write_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace

HarvestResult harvest(const DiseaseProfile& profile, DocumentSource& source,
                      const PipelineConfig& config, const HarvestOptions& options) {
  const std::string version = source.version();
  std::optional<fs::path> cache;
  if (options.cache_dir) {
    cache = cache_dir_for(*options.cache_dir, profile, version);
    if (auto cached = read_cache(*cache)) return *cached;
  }

  HarvestResult result;
  std::vector<std::string> pmids = source.search(build_search_query(profile));

  // Fetch in batches with a bounded number in flight; on the first failed
  // batch keep the retrieved prefix and record a warning.
  const size_t batch = std::max<size_t>(1, options.fetch_batch);
  std::vector<std::vector<std::string>> batches;
  for (size_t i = 0; i < pmids.size(); i += batch)
    batches.emplace_back(pmids.begin() + static_cast<long>(i),
                         pmids.begin() + static_cast<long>(std::min(pmids.size(), i + batch)));

  std::vector<SourceDocument> fetched;
  const size_t in_flight = static_cast<size_t>(std::max(1, options.max_in_flight));
  bool stopped = false;
  for (size_t start = 0; start < batches.size() && !stopped; start += in_flight) {
    std::vector<std::future<std::vector<SourceDocument>>> futures;
    size_t end = std::min(batches.size(), start + in_flight);
    for (size_t b = start; b < end; ++b)
      futures.push_back(std::async(in_flight == 1 ? std::launch::deferred : std::launch::async,
                                   [&source, &batches, b] { return source.fetch(batches[b]); }));
    for (size_t b = start; b < end; ++b) {
      auto& f = futures[b - start];
      if (stopped) {
        try { f.get(); } catch (...) {}
        continue;
      }
      try {
        auto docs = f.get();
        fetched.insert(fetched.end(), docs.begin(), docs.end());
      } catch (const Error& e) {
        result.warnings.push_back("partial fetch: batch " + std::to_string(b) + " failed (" +
                                  e.what() + "); kept " + std::to_string(fetched.size()) +
                                  " of " + std::to_string(pmids.size()) + " documents");
        stopped = true;
      }
    }
  }

  for (auto& d : fetched) {
    if (!d.journal_tier && d.journal && options.journal_tiers)
      d.journal_tier = options.journal_tiers->lookup(*d.journal);
    if (d.study_type == StudyType::kOther)
      d.study_type = label_study_type(d.publication_types, d.title);
    d.pre_rank_score = pre_rank(d, options.reference_year);
  }
  std::sort(fetched.begin(), fetched.end(), [](const SourceDocument& a, const SourceDocument& b) {
    if (a.pre_rank_score != b.pre_rank_score) return a.pre_rank_score > b.pre_rank_score;
    return pmid_less(a.pmid, b.pmid);
  });
  auto cap = config.document_caps.find(profile.tier);
  if (cap != config.document_caps.end() && fetched.size() > static_cast<size_t>(cap->second))
    fetched.resize(static_cast<size_t>(cap->second));
  result.documents = std::move(fetched);

  if (cache) write_cache(*cache, profile, version, result);
  return result;
}

}  // namespace chronokg
