#include <zlib.h>

#include <fstream>

#include "common/error.hpp"
#include "common/files.hpp"
#include "common/text.hpp"
#include "core/json_io.hpp"
#include "store/store.hpp"

namespace chronokg {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Tier t) {
  switch (t) {
    case Tier::kRaw: return "raw";
    case Tier::kConsensus: return "consensus";
    case Tier::kValidated: return "validated";
  }
  return "validated";
}

Tier parse_tier(std::string_view s) {
  if (s == "raw") return Tier::kRaw;
  if (s == "consensus") return Tier::kConsensus;
  if (s == "validated") return Tier::kValidated;
  fail(ErrorKind::kDomain, "unknown tier '" + std::string(s) + "'");
}

ordered_json to_json(const ConsensusTriple& c) {
  ordered_json j = ordered_json::object();
  j["relation"] = c.relation;
  j["subject_key"] = c.subject_key;
  j["object_key"] = c.object_key;
  j["subject_variants"] = c.subject_variants;
  j["object_variants"] = c.object_variants;
  j["consensus_confidence"] = c.consensus_confidence;
  j["agreeing_models"] = c.agreeing_models;
  j["cluster_members"] = c.cluster_members;
  j["total_models"] = c.total_models;
  j["representative"] = to_json(c.representative);
  return j;
}

ConsensusTriple consensus_from_json(const json& j) {
  if (!j.is_object() || !j.contains("representative"))
    fail(ErrorKind::kParse, "consensus record lacks representative");
  ConsensusTriple c;
  try {
    c.relation = j.at("relation").get<std::string>();
    c.subject_key = j.value("subject_key", std::string());
    c.object_key = j.value("object_key", std::string());
    c.subject_variants = j.value("subject_variants", std::vector<std::string>{});
    c.object_variants = j.value("object_variants", std::vector<std::string>{});
    c.consensus_confidence = j.at("consensus_confidence").get<double>();
    c.agreeing_models = j.at("agreeing_models").get<std::vector<std::string>>();
    c.cluster_members = j.value("cluster_members", 0);
    c.total_models = j.value("total_models", 0);
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("consensus record: ") + e.what());
  }
  c.representative = raw_triple_from_json(j["representative"]);
  return c;
}

std::string validated_line(const TemporalTriple& t) { return dump_line(to_json(t)); }

std::vector<std::string> record_lines(const std::vector<TemporalTriple>& records) {
  std::vector<std::string> out;
  for (const auto& r : records) out.push_back(validated_line(r));
  return out;
}

std::vector<std::string> record_lines(const std::vector<ConsensusTriple>& records) {
  std::vector<std::string> out;
  for (const auto& r : records) out.push_back(dump_line(to_json(r)));
  return out;
}

std::vector<std::string> record_lines(const std::vector<RawTriple>& records) {
  std::vector<std::string> out;
  for (const auto& r : records) out.push_back(dump_line(to_json(r)));
  return out;
}

namespace {

bool is_gz(const fs::path& p) { return p.extension() == ".gz"; }

std::string joined(const std::vector<std::string>& lines) {
  std::string body;
  for (const auto& l : lines) {
    body += l;
    body.push_back('\n');
  }
  return body;
}

template <typename T, typename Parse>
Loaded<T> load_with(const fs::path& path, LoadOptions options, Parse parse) {
  Loaded<T> out;
  auto lines = read_lines(path);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (text::trim(lines[i]).empty()) continue;
    try {
      json j = json::parse(lines[i]);
      out.records.push_back(parse(j));
    } catch (const std::exception& e) {
      std::string msg = path.string() + ":" + std::to_string(i + 1) + ": " + e.what();
      if (!options.skip_malformed) fail(ErrorKind::kParse, msg);
      out.errors.push_back({i + 1, e.what()});
    }
  }
  return out;
}

}  // namespace

void append_lines(const fs::path& path, const std::vector<std::string>& lines) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const std::string body = joined(lines);
  if (is_gz(path)) {
    gzFile gz = gzopen(path.string().c_str(), "ab9");
    if (!gz) fail(ErrorKind::kIo, "cannot append to " + path.string());
    if (!body.empty() && gzwrite(gz, body.data(), static_cast<unsigned>(body.size())) == 0) {
      gzclose(gz);
      fail(ErrorKind::kIo, "gzip append failed for " + path.string());
    }
    gzclose(gz);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) fail(ErrorKind::kIo, "cannot append to " + path.string());
  out << body;
}

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
  if (is_gz(path)) {
    files::write_gzip_atomic(path, joined(lines));
  } else {
    files::write_atomic(path, joined(lines));
  }
}

std::vector<std::string> read_lines(const fs::path& path) {
  if (!fs::exists(path)) fail(ErrorKind::kNotFound, "no such tier file " + path.string());
  auto lines = text::split(files::read_maybe_gzip(path), '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  for (auto& l : lines)
    if (!l.empty() && l.back() == '\r') l.pop_back();
  return lines;
}

TierFile append_records(const fs::path& path, const std::vector<TemporalTriple>& records) {
  append_lines(path, record_lines(records));
  return {Tier::kValidated, path, records.size(), is_gz(path)};
}

TierFile append_records(const fs::path& path, const std::vector<ConsensusTriple>& records) {
  append_lines(path, record_lines(records));
  return {Tier::kConsensus, path, records.size(), is_gz(path)};
}

TierFile append_records(const fs::path& path, const std::vector<RawTriple>& records) {
  append_lines(path, record_lines(records));
  return {Tier::kRaw, path, records.size(), is_gz(path)};
}

TierFile write_records(const fs::path& path, const std::vector<TemporalTriple>& records) {
  write_lines(path, record_lines(records));
  return {Tier::kValidated, path, records.size(), is_gz(path)};
}

TierFile write_records(const fs::path& path, const std::vector<ConsensusTriple>& records) {
  write_lines(path, record_lines(records));
  return {Tier::kConsensus, path, records.size(), is_gz(path)};
}

TierFile write_records(const fs::path& path, const std::vector<RawTriple>& records) {
  write_lines(path, record_lines(records));
  return {Tier::kRaw, path, records.size(), is_gz(path)};
}

Loaded<TemporalTriple> load_validated(const fs::path& path, LoadOptions options) {
  return load_with<TemporalTriple>(path, options, [](const json& j) { return triple_from_json(j); });
}

Loaded<ConsensusTriple> load_consensus(const fs::path& path, LoadOptions options) {
  return load_with<ConsensusTriple>(path, options, [](const json& j) { return consensus_from_json(j); });
}

Loaded<RawTriple> load_raw(const fs::path& path, LoadOptions options) {
  return load_with<RawTriple>(path, options, [](const json& j) { return raw_triple_from_json(j); });
}

fs::path StoreLayout::flat(Tier t) const {
  return root / (t == Tier::kValidated ? std::string("validated.jsonl")
                                       : std::string(to_string(t)) + ".jsonl.gz");
}

fs::path StoreLayout::per_disease(Tier t, const std::string& disease_id) const {
  return root / "diseases" / text::curie_slug(disease_id) /
         (t == Tier::kValidated ? std::string("validated.jsonl")
                                : std::string(to_string(t)) + ".jsonl.gz");
}

}  // namespace chronokg
