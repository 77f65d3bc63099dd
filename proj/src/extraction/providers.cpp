#include <httplib.h>

#include <cstdlib>
#include <regex>

#include "common/digest.hpp"
#include "common/error.hpp"
#include "common/files.hpp"
#include "common/text.hpp"
#include "extraction/extraction.hpp"

namespace chronokg {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string prompt_key(const std::string& prompt) { return sha256_hex(prompt); }

namespace {

fs::path entry_path(const fs::path& dir, const std::string& provider, const std::string& prompt) {
  return dir / text::curie_slug(provider) / (prompt_key(prompt) + ".json");
}

}  // namespace

void write_replay_entry(const fs::path& dir, const std::string& provider, const std::string& prompt,
                        const std::string& response, const std::optional<std::string>& error) {
  ordered_json j = ordered_json::object();
  j["prompt_sha256"] = prompt_key(prompt);
  if (error) {
    j["error"] = *error;
  } else {
    j["response"] = response;
  }
  files::write_atomic(entry_path(dir, provider, prompt), j.dump(2) + "\n");
}

ReplayProvider::ReplayProvider(std::string name, fs::path dir)
    : name_(std::move(name)), dir_(std::move(dir)) {}

std::string ReplayProvider::complete(const std::string& prompt, double, double) {
  auto path = entry_path(dir_, name_, prompt);
  if (!fs::exists(path))
    fail(ErrorKind::kCacheMiss, "no recorded response for " + name_ + " at " + path.string());
  json j = json::parse(files::read_text(path), nullptr, false);
  if (j.is_discarded() || !j.is_object()) fail(ErrorKind::kParse, "corrupt replay entry " + path.string());
  if (j.contains("error") && !j["error"].is_null()) {
    auto e = j["error"].get<std::string>();
    if (e == "timeout") fail(ErrorKind::kTimeout, name_ + " timed out (recorded)");
    fail(ErrorKind::kTransport, name_ + " failed (recorded): " + e);
  }
  return j.value("response", std::string());
}

RecordingProvider::RecordingProvider(std::shared_ptr<ModelProvider> inner, fs::path dir)
    : inner_(std::move(inner)), dir_(std::move(dir)) {}

std::string RecordingProvider::complete(const std::string& prompt, double temperature,
                                        double timeout_s) {
  try {
    auto r = inner_->complete(prompt, temperature, timeout_s);
    write_replay_entry(dir_, inner_->name(), prompt, r);
    return r;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kTimeout) write_replay_entry(dir_, inner_->name(), prompt, "", "timeout");
    throw;
  }
}

// ---------------------------------------------------------------------------
// Mock extractor

namespace {

std::string line_value(const std::string& prompt, const std::string& prefix) {
  auto pos = prompt.find("\n" + prefix);
  if (pos == std::string::npos) return {};
  pos += prefix.size() + 1;
  auto end = prompt.find('\n', pos);
  return prompt.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
}

std::vector<std::string> list_value(const std::string& prompt, const std::string& prefix) {
  auto v = line_value(prompt, prefix);
  std::vector<std::string> out;
  if (v.empty() || v == kEmptyListMarker) return out;
  for (auto& part : text::split(v, ',')) {
    auto t = text::trim(part);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

std::string source_text(const std::string& prompt) {
  const std::string head = "\nSource text:\n";
  auto start = prompt.rfind(head);
  if (start == std::string::npos) return {};
  start += head.size();
  auto end = prompt.rfind("\n\n");
  if (end == std::string::npos || end < start) end = prompt.size();
  return prompt.substr(start, end - start);
}

std::vector<std::string> sentences(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (size_t i = 0; i < s.size(); ++i) {
    cur.push_back(s[i]);
    bool end = (s[i] == '.' || s[i] == '!' || s[i] == '?') &&
               (i + 1 == s.size() || std::isspace(static_cast<unsigned char>(s[i + 1])));
    if (end) {
      auto t = text::trim(cur);
      if (!t.empty()) out.push_back(t);
      cur.clear();
    }
  }
  auto t = text::trim(cur);
  if (!t.empty()) out.push_back(t);
  return out;
}

double to_years(double v, const std::string& unit) {
  return text::starts_with_ci(unit, "month") ? v / 12.0 : v;
}

TemporalContext read_temporal(const std::string& sentence) {
  static const std::regex kRange(
      R"((\d+(?:\.\d+)?)\s*(?:-|–|to)\s*(\d+(?:\.\d+)?)\s*(years?|months?|y\b))",
      std::regex::icase);
  static const std::regex kBetween(
      R"(between (?:the )?(?:ages? (?:of )?)?(\d+(?:\.\d+)?) and (\d+(?:\.\d+)?)\s*(years?|months?)?)",
      std::regex::icase);
  static const std::regex kAt(R"((?:at|around) (?:the )?age (?:of )?(\d+(?:\.\d+)?)\s*(years?|months?)?)",
                              std::regex::icase);
  static const std::regex kBy(R"(\bby (?:the )?age (?:of )?\d+(?:\.\d+)?)", std::regex::icase);
  static const std::regex kStage(R"(\b([A-Za-z][A-Za-z-]*) stage\b)", std::regex::icase);
  static const std::regex kMilestone(R"(milestone of ([A-Za-z][A-Za-z ]*[A-Za-z]))", std::regex::icase);

  TemporalContext t;
  std::smatch m;
  if (std::regex_search(sentence, m, kRange) || std::regex_search(sentence, m, kBetween)) {
    std::string unit = m.size() > 3 ? m[3].str() : "";
    t.onset_age_min = to_years(*text::parse_double(m[1].str()), unit);
    t.onset_age_max = to_years(*text::parse_double(m[2].str()), unit);
    t.temporal_resolution = TemporalResolution::kYear;
  } else if (std::regex_search(sentence, m, kAt)) {
    double v = to_years(*text::parse_double(m[1].str()), m[2].str());
    t.onset_age_min = v;
    t.onset_age_max = v;
    t.temporal_resolution = TemporalResolution::kYear;
  }
  if (std::regex_search(sentence, m, kBy)) t.temporal_qualifier = text::lower(m[0].str());
  if (std::regex_search(sentence, m, kStage)) t.progression_stage = text::lower(m[1].str());
  if (std::regex_search(sentence, m, kMilestone)) t.milestone = text::lower(m[1].str());
  return t;
}

ordered_json mock_triple(const std::string& subject, const std::string& relation,
                         const std::string& object, const std::string& object_type,
                         const std::string& sentence, const TemporalContext* t) {
  ordered_json j = ordered_json::object();
  j["subject"] = subject;
  j["subject_type"] = "disease";
  j["relation"] = relation;
  j["object"] = object;
  j["object_type"] = object_type;
  j["confidence"] = t && t->has_onset() ? "high" : "medium";
  j["evidence_text"] = text::utf8_truncate(sentence, 200);
  if (t && t->is_temporal()) {
    ordered_json tc = ordered_json::object();
    if (t->onset_age_min) tc["onset_age_min"] = *t->onset_age_min;
    if (t->onset_age_max) tc["onset_age_max"] = *t->onset_age_max;
    if (t->progression_stage) tc["progression_stage"] = *t->progression_stage;
    if (t->milestone) tc["milestone"] = *t->milestone;
    if (t->temporal_qualifier) tc["temporal_qualifier"] = *t->temporal_qualifier;
    j["temporal_context"] = tc;
  } else {
    j["temporal_context"] = nullptr;
  }
  return j;
}

}  // namespace

std::string MockExtractionProvider::complete(const std::string& prompt, double, double) {
  ++calls;
  ordered_json out = ordered_json::object();
  out["triples"] = ordered_json::array();
  if (options_.return_empty) return out.dump();

  const bool second_pass = prompt.rfind("SECOND PASS", 0) == 0;
  const std::string disease = line_value(prompt, "- Name: ");
  if (disease.empty() || disease == kEmptyListMarker) return out.dump();
  const auto phenotypes = list_value(prompt, "- Key phenotypes: ");
  const auto genes = list_value(prompt, "- Known genes: ");

  auto sents = sentences(source_text(prompt));
  for (size_t i = 0; i < sents.size(); ++i) {
    if (options_.drop_every > 0 &&
        (static_cast<int>(i) + options_.offset) % options_.drop_every == 0)
      continue;
    const auto& s = sents[i];
    TemporalContext t = read_temporal(s);
    for (const auto& p : phenotypes) {
      if (!text::contains_ci(s, p)) continue;
      if (second_pass && !t.is_temporal()) continue;
      out["triples"].push_back(
          mock_triple(disease, "disease_phenotype_positive", p, "phenotype", s, &t));
    }
    if (second_pass) continue;
    for (const auto& g : genes) {
      if (!text::contains_ci(s, g)) continue;
      out["triples"].push_back(mock_triple(disease, "disease_protein", g, "gene/protein", s, nullptr));
    }
  }
  return out.dump();
}

// ---------------------------------------------------------------------------
// HTTP chat-completion provider

HttpChatProvider::HttpChatProvider(ProviderSpec spec) : spec_(std::move(spec)) {
  if (spec_.endpoint.empty()) fail(ErrorKind::kConfig, "provider " + spec_.name + " has no endpoint");
}

std::string HttpChatProvider::complete(const std::string& prompt, double temperature,
                                       double timeout_s) {
  auto scheme_end = spec_.endpoint.find("://");
  if (scheme_end == std::string::npos) fail(ErrorKind::kConfig, "bad endpoint " + spec_.endpoint);
  auto path_start = spec_.endpoint.find('/', scheme_end + 3);
  std::string origin = spec_.endpoint.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : spec_.endpoint.substr(path_start);

  httplib::Client client(origin);
  auto secs = static_cast<time_t>(timeout_s);
  client.set_connection_timeout(secs, 0);
  client.set_read_timeout(secs, 0);
  client.set_write_timeout(secs, 0);
  httplib::Headers headers;
  if (!spec_.api_key_env.empty()) {
    const char* key = std::getenv(spec_.api_key_env.c_str());
    if (!key) fail(ErrorKind::kConfig, "environment variable " + spec_.api_key_env + " is not set");
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  json body = {{"model", spec_.model.empty() ? spec_.name : spec_.model},
               {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
               {"temperature", temperature},
               {"max_tokens", spec_.max_tokens}};
  auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) {
    auto err = res.error();
    if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout)
      fail(ErrorKind::kTimeout, spec_.name + " timed out after " + text::format_number(timeout_s) + " s");
    throw TransportError(spec_.name + ": " + httplib::to_string(err), 1, 0);
  }
  if (res->status != 200)
    throw TransportError(spec_.name + ": HTTP " + std::to_string(res->status), 1, res->status);
  json j = json::parse(res->body, nullptr, false);
  try {
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
    fail(ErrorKind::kParse, spec_.name + ": unexpected chat-completion payload");
  }
}

std::shared_ptr<ModelProvider> make_provider(const ProviderSpec& spec, const fs::path& replay_dir,
                                             const MockFactory& mock_factory) {
  if (spec.kind == "replay") return std::make_shared<ReplayProvider>(spec.name, replay_dir);
  if (spec.kind == "mock")
    return mock_factory ? mock_factory(spec) : std::make_shared<MockExtractionProvider>(spec.name);
  if (spec.kind == "http") return std::make_shared<HttpChatProvider>(spec);
  if (spec.kind == "record")
    return std::make_shared<RecordingProvider>(std::make_shared<HttpChatProvider>(spec), replay_dir);
  fail(ErrorKind::kConfig, "unknown provider kind '" + spec.kind + "' for " + spec.name);
}

}  // namespace chronokg
