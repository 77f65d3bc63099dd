#include <regex>

#include "common/error.hpp"
#include "common/text.hpp"
#include "core/json_io.hpp"
#include "extraction/extraction.hpp"

namespace chronokg {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(ModelConfidence c) {
  switch (c) {
    case ModelConfidence::kHigh: return "high";
    case ModelConfidence::kMedium: return "medium";
    case ModelConfidence::kLow: return "low";
  }
  return "medium";
}

ModelConfidence parse_model_confidence(std::string_view s) {
  auto l = text::lower(text::trim(s));
  if (l == "high") return ModelConfidence::kHigh;
  if (l == "low") return ModelConfidence::kLow;
  return ModelConfidence::kMedium;
}

int confidence_rank(ModelConfidence c) {
  switch (c) {
    case ModelConfidence::kHigh: return 2;
    case ModelConfidence::kMedium: return 1;
    case ModelConfidence::kLow: return 0;
  }
  return 1;
}

ordered_json to_json(const RawTriple& t) {
  ordered_json j = ordered_json::object();
  j["subject"] = t.subject;
  j["subject_type"] = t.subject_type;
  j["relation"] = t.relation;
  j["object"] = t.object;
  j["object_type"] = t.object_type;
  j["confidence"] = std::string(to_string(t.confidence));
  j["evidence_text"] = t.evidence_text;
  j["temporal_context"] = t.temporal_context ? to_json(*t.temporal_context) : ordered_json(nullptr);
  j["conditions"] = conditions_to_json(t.conditions);
  j["model"] = t.model;
  j["pmid"] = t.pmid;
  j["publication_year"] =
      t.publication_year ? ordered_json(*t.publication_year) : ordered_json(nullptr);
  return j;
}

RawTriple raw_triple_from_json(const json& j) {
  RawTriple t;
  t.subject = j.value("subject", std::string());
  t.subject_type = j.value("subject_type", std::string());
  t.relation = j.value("relation", std::string());
  t.object = j.value("object", std::string());
  t.object_type = j.value("object_type", std::string());
  t.confidence = parse_model_confidence(j.value("confidence", std::string("medium")));
  t.evidence_text = j.value("evidence_text", std::string());
  if (j.contains("temporal_context") && !j["temporal_context"].is_null())
    t.temporal_context = temporal_from_json(j["temporal_context"]);
  if (j.contains("conditions")) t.conditions = conditions_from_json(j["conditions"]);
  t.model = j.value("model", std::string());
  t.pmid = j.value("pmid", std::string());
  if (j.contains("publication_year") && j["publication_year"].is_number_integer())
    t.publication_year = j["publication_year"].get<int>();
  return t;
}

namespace {

std::optional<json> try_parse(const std::string& s) {
  json j = json::parse(s, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  return j;
}

std::string strip_fences(const std::string& s) {
  static const std::regex kFence("```[A-Za-z]*[ \\t]*\\r?\\n?([\\s\\S]*?)```");
  std::smatch m;
  if (std::regex_search(s, m, kFence)) return m[1].str();
  return s;
}

std::string outer_braces(const std::string& s) {
  auto open_obj = s.find('{');
  auto open_arr = s.find('[');
  auto open = std::min(open_obj, open_arr);
  if (open == std::string::npos) return {};
  char close_ch = s[open] == '{' ? '}' : ']';
  auto close = s.rfind(close_ch);
  if (close == std::string::npos || close < open) return {};
  return s.substr(open, close - open + 1);
}

// Removes commas that directly precede a closing bracket, outside strings.
std::string drop_trailing_commas(const std::string& s) {
  std::string out;
  bool in_string = false;
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (in_string) {
      out.push_back(c);
      if (c == '\\' && i + 1 < s.size()) {
        out.push_back(s[++i]);
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') in_string = true;
    if (c == ',') {
      size_t k = i + 1;
      while (k < s.size() && std::isspace(static_cast<unsigned char>(s[k]))) ++k;
      if (k < s.size() && (s[k] == '}' || s[k] == ']')) continue;
    }
    out.push_back(c);
  }
  return out;
}

std::optional<double> loose_number(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return text::parse_double(text::trim(v.get<std::string>()));
  return std::nullopt;
}

std::optional<std::string> loose_string(const json& v) {
  if (v.is_null()) return std::nullopt;
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  s = text::trim(s);
  if (s.empty()) return std::nullopt;
  return s;
}

std::optional<TemporalContext> temporal_from_model(const json& j) {
  if (!j.is_object()) return std::nullopt;
  TemporalContext t;
  auto num = [&](const char* k) -> std::optional<double> {
    return j.contains(k) ? loose_number(j[k]) : std::nullopt;
  };
  auto str = [&](const char* k) -> std::optional<std::string> {
    return j.contains(k) ? loose_string(j[k]) : std::nullopt;
  };
  t.onset_age_min = num("onset_age_min");
  t.onset_age_max = num("onset_age_max");
  t.progression_stage = str("progression_stage");
  t.milestone = str("milestone");
  t.temporal_qualifier = str("temporal_qualifier");
  t.discovery_date = str("discovery_year");
  if (!t.discovery_date) t.discovery_date = str("discovery_date");
  t.duration = num("duration");
  t.treatment_start_age = num("treatment_start_age");
  if (!t.has_onset() && !t.progression_stage && !t.milestone && !t.temporal_qualifier &&
      !t.discovery_date && !t.duration && !t.treatment_start_age)
    return std::nullopt;
  return t;
}

}  // namespace

ParseOutcome parse_extraction_response(const std::string& text_in, size_t evidence_cap) {
  ParseOutcome out;
  std::optional<json> doc = try_parse(text_in);
  if (!doc) {
    // Bounded repair ladder; each rung builds on the previous one.
    std::string s = strip_fences(text_in);
    doc = try_parse(s);
    if (!doc) {
      s = outer_braces(s);
      if (!s.empty()) doc = try_parse(s);
      if (!doc && !s.empty()) doc = try_parse(drop_trailing_commas(s));
    }
    if (doc) {
      out.repaired = true;
      out.diagnostics.push_back("repaired: response needed cleanup before parsing");
    }
  }
  if (!doc) {
    out.parse_failed = true;
    out.diagnostics.push_back("parse-failure: no JSON object could be recovered");
    return out;
  }

  const json* list = nullptr;
  if (doc->is_array()) {
    list = &*doc;
  } else if (doc->is_object() && doc->contains("triples") && (*doc)["triples"].is_array()) {
    list = &(*doc)["triples"];
  } else {
    out.parse_failed = true;
    out.diagnostics.push_back("parse-failure: JSON has no 'triples' array");
    return out;
  }

  size_t index = 0;
  for (const auto& item : *list) {
    ++index;
    if (!item.is_object()) {
      out.diagnostics.push_back("dropped: triple " + std::to_string(index) + " is not an object");
      continue;
    }
    auto field = [&](const char* k) {
      return item.contains(k) ? loose_string(item[k]).value_or("") : std::string();
    };
    RawTriple t;
    t.subject = field("subject");
    t.relation = field("relation");
    t.object = field("object");
    if (t.subject.empty() || t.relation.empty() || t.object.empty()) {
      out.diagnostics.push_back("dropped: triple " + std::to_string(index) +
                                " lacks subject, relation or object");
      continue;
    }
    t.subject_type = field("subject_type");
    t.object_type = field("object_type");
    t.confidence = parse_model_confidence(field("confidence"));
    t.evidence_text = text::utf8_truncate(field("evidence_text"), evidence_cap);
    if (item.contains("temporal_context")) t.temporal_context = temporal_from_model(item["temporal_context"]);
    if (item.contains("conditions") && item["conditions"].is_object() && !item["conditions"].empty()) {
      std::map<std::string, std::string> c;
      for (auto it = item["conditions"].begin(); it != item["conditions"].end(); ++it)
        if (auto v = loose_string(it.value())) c[it.key()] = *v;
      if (!c.empty()) t.conditions = std::move(c);
    }
    out.triples.push_back(std::move(t));
  }
  return out;
}

}  // namespace chronokg
