#include <algorithm>
#include <future>
#include <set>
#include <tuple>

#include "common/error.hpp"
#include "common/text.hpp"
#include "extraction/extraction.hpp"

namespace chronokg {

bool should_invoke_tiebreaker(const std::vector<size_t>& per_model_counts) {
  return std::any_of(per_model_counts.begin(), per_model_counts.end(),
                     [](size_t c) { return c == 0; });
}

namespace {

struct CallResult {
  std::optional<std::string> response;
  std::optional<Diagnostic> failure;
};

CallResult call(ModelProvider& p, const std::string& prompt, const ExtractionProviders& cfg) {
  CallResult r;
  try {
    r.response = p.complete(prompt, cfg.temperature, cfg.timeout_s);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kCacheMiss) throw;
    std::string kind = e.kind() == ErrorKind::kTimeout ? "timeout" : "transport";
    r.failure = Diagnostic{p.name(), kind, e.what()};
  }
  return r;
}

// Calls every provider concurrently; results come back in input order.
std::vector<CallResult> fan_out(const std::vector<std::shared_ptr<ModelProvider>>& providers,
                                const std::string& prompt, const ExtractionProviders& cfg) {
  std::vector<std::future<CallResult>> futures;
  futures.reserve(providers.size());
  for (const auto& p : providers)
    futures.push_back(std::async(std::launch::async, [&p, &prompt, &cfg] { return call(*p, prompt, cfg); }));
  std::vector<CallResult> out;
  std::exception_ptr first_error;
  for (auto& f : futures) {
    try {
      out.push_back(f.get());
    } catch (...) {
      if (!first_error) first_error = std::current_exception();
      out.emplace_back();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

std::vector<RawTriple> ingest(const std::string& response, const std::string& model,
                              const SourceDocument& doc, const PipelineConfig& config,
                              std::vector<Diagnostic>& diagnostics) {
  auto parsed = parse_extraction_response(response, config.evidence_text_cap);
  for (const auto& d : parsed.diagnostics) {
    auto colon = d.find(':');
    diagnostics.push_back({model, d.substr(0, colon), text::trim(d.substr(colon + 1))});
  }
  std::vector<RawTriple> out;
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  for (auto& t : parsed.triples) {
    auto key = std::make_tuple(text::trim(t.subject), text::trim(t.relation), text::trim(t.object));
    if (!seen.insert(key).second) continue;
    t.model = model;
    t.pmid = doc.pmid;
    t.publication_year = doc.publication_year;
    out.push_back(std::move(t));
  }
  return out;
}

size_t temporal_count(const ExtractionResult& r) {
  size_t n = 0;
  for (const auto& [_, triples] : r.per_model)
    for (const auto& t : triples) n += t.is_temporal() ? 1 : 0;
  return n;
}

}  // namespace

ExtractionResult extract_document(const SourceDocument& doc, const DiseaseProfile& profile,
                                  const ExtractionProviders& providers,
                                  const PipelineConfig& config) {
  if (providers.primary.size() < 2)
    fail(ErrorKind::kConfig, "extraction needs at least two primary providers");

  ExtractionResult result;
  result.pmid = doc.pmid;
  const std::string prompt = build_primary_prompt(profile, doc);

  std::vector<std::shared_ptr<ModelProvider>> processed;
  auto absorb = [&](const std::shared_ptr<ModelProvider>& p, CallResult r) -> size_t {
    if (r.failure) {
      result.diagnostics.push_back(*r.failure);
      result.per_model[p->name()];
      return 0;
    }
    auto triples = ingest(*r.response, p->name(), doc, config, result.diagnostics);
    size_t n = triples.size();
    result.per_model[p->name()] = std::move(triples);
    processed.push_back(p);
    return n;
  };

  auto first = fan_out(providers.primary, prompt, providers);
  std::vector<size_t> counts;
  for (size_t i = 0; i < providers.primary.size(); ++i)
    counts.push_back(absorb(providers.primary[i], std::move(first[i])));

  if (providers.tiebreaker && should_invoke_tiebreaker(counts)) {
    result.tiebreaker_invoked = true;
    absorb(providers.tiebreaker, call(*providers.tiebreaker, prompt, providers));
  }

  if (temporal_count(result) < static_cast<size_t>(std::max(0, config.temporal_floor)) &&
      !processed.empty()) {
    result.second_pass_run = true;
    const std::string second = build_temporal_prompt(doc, profile);
    auto replies = fan_out(processed, second, providers);
    for (size_t i = 0; i < processed.size(); ++i) {
      const auto& name = processed[i]->name();
      if (replies[i].failure) {
        result.diagnostics.push_back(*replies[i].failure);
        continue;
      }
      auto& existing = result.per_model[name];
      for (auto& t : ingest(*replies[i].response, name, doc, config, result.diagnostics))
        if (std::find(existing.begin(), existing.end(), t) == existing.end())
          existing.push_back(std::move(t));
    }
  }

  for (const auto& p : processed) result.models_processed.push_back(p->name());
  std::sort(result.models_processed.begin(), result.models_processed.end());
  return result;
}

}  // namespace chronokg
