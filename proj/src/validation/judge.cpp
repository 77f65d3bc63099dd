#include <algorithm>
#include <regex>
#include <sstream>

#include "common/error.hpp"
#include "common/random.hpp"
#include "common/text.hpp"
#include "validation/validation.hpp"

namespace chronokg {

using nlohmann::json;
using nlohmann::ordered_json;

const std::vector<std::string>& timing_lexicon() {
  static const std::vector<std::string> kLexicon = {
      "age",    "onset", "year",  "month",    "decade",     "trimester", "neonatal", "infan",
      "child",  "adolescen", "adult", "elderly", "congenital", "prenatal",  "birth"};
  return kLexicon;
}

namespace {

bool has_keyword(const std::string& clause, const std::vector<std::string>& lexicon) {
  auto l = text::lower(clause);
  for (const auto& k : lexicon) {
    for (size_t pos = l.find(k); pos != std::string::npos; pos = l.find(k, pos + 1)) {
      if (pos == 0 || !std::isalpha(static_cast<unsigned char>(l[pos - 1]))) return true;
    }
  }
  return false;
}

std::vector<std::string> clauses(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    bool stop = c == ',' || c == ';' || c == ':' || c == '!' || c == '?' ||
                (c == '.' && (i + 1 == s.size() || std::isspace(static_cast<unsigned char>(s[i + 1]))));
    if (stop) {
      out.push_back(text::trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(text::trim(cur));
  return out;
}

}  // namespace

size_t keyword_span_length(const std::string& text_in, const std::vector<std::string>& lexicon) {
  size_t best = 0;
  for (const auto& c : clauses(text_in))
    if (has_keyword(c, lexicon)) best = std::max(best, text::utf8_length(c));
  return best;
}

std::vector<size_t> proportional_allocation(const std::vector<size_t>& sizes, size_t n) {
  size_t total = 0;
  for (auto s : sizes) total += s;
  if (n > total) fail(ErrorKind::kDomain, "sample size exceeds population");
  std::vector<size_t> out(sizes.size(), 0);
  if (total == 0) return out;
  std::vector<std::pair<size_t, size_t>> remainders;  // (remainder numerator, stratum)
  size_t given = 0;
  for (size_t i = 0; i < sizes.size(); ++i) {
    size_t num = n * sizes[i];
    out[i] = num / total;
    given += out[i];
    remainders.emplace_back(num % total, i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (size_t k = 0; given < n && k < remainders.size(); ++k, ++given) ++out[remainders[k].second];
  return out;
}

namespace {

std::string range_text(const AgeRange& r) {
  return text::format_number(r.min) + "-" + text::format_number(r.max);
}

SampledClaim claim_for(const NovelCandidate& c, const std::string& era,
                       const std::vector<std::string>& lexicon) {
  const TemporalTriple* best = nullptr;
  size_t best_len = 0;
  for (const auto& t : c.triples) {
    if (!is_phenotype_edge(t) || !t.temporal.is_temporal()) continue;
    size_t len = keyword_span_length(t.evidence.evidence_text, lexicon);
    if (!best || len > best_len || (len == best_len && t.edge_id < best->edge_id)) {
      best = &t;
      best_len = len;
    }
  }
  SampledClaim s;
  s.disease_id = c.disease_id;
  s.disease_name = c.disease_name;
  s.tier = std::string(to_string(c.tier));
  s.era = era;
  if (!best) return s;
  s.edge_id = best->edge_id;
  s.phenotype = best->target_name;
  s.evidence = best->evidence.evidence_text;
  s.claim_range = best->temporal.onset();
  if (s.claim_range) {
    s.claim = c.disease_name + ": " + s.phenotype + " onset " + range_text(*s.claim_range) + " years";
  } else {
    std::string q = best->temporal.temporal_qualifier.value_or(
        best->temporal.progression_stage.value_or(best->temporal.milestone.value_or("")));
    s.claim = c.disease_name + ": " + s.phenotype + " onset described as '" + q + "'";
  }
  return s;
}

}  // namespace

SampleResult sample_novel(const std::vector<NovelCandidate>& population, size_t n, uint64_t seed,
                          const OnsetBinTable& table, const std::vector<std::string>& lexicon) {
  SampleResult result;
  std::map<std::string, std::vector<size_t>> strata;
  std::map<std::string, std::string> era_of;
  for (size_t i = 0; i < population.size(); ++i) {
    auto agg = aggregate_onset(population[i].triples);
    std::string era = agg.median_range ? era_of_range(*agg.median_range, table) : "none";
    era_of[population[i].disease_id] = era;
    strata[std::string(to_string(population[i].tier)) + "/" + era].push_back(i);
  }
  std::vector<std::string> keys;
  std::vector<size_t> sizes;
  for (auto& [k, members] : strata) {
    std::sort(members.begin(), members.end(), [&](size_t a, size_t b) {
      return population[a].disease_id < population[b].disease_id;
    });
    keys.push_back(k);
    sizes.push_back(members.size());
  }
  auto quota = proportional_allocation(sizes, n);
  Rng rng(seed);
  for (size_t s = 0; s < keys.size(); ++s) {
    auto members = strata[keys[s]];
    rng.shuffle(members);
    result.allocation[keys[s]] = quota[s];
    if (quota[s] == 0) result.warnings.push_back("stratum " + keys[s] + " received no samples");
    for (size_t k = 0; k < quota[s]; ++k) {
      const auto& cand = population[members[k]];
      auto claim = claim_for(cand, era_of[cand.disease_id], lexicon);
      if (claim.edge_id.empty())
        result.warnings.push_back(cand.disease_id + " has no temporal phenotype triple");
      result.items.push_back(std::move(claim));
    }
  }
  return result;
}

ordered_json to_json(const SampledClaim& c) {
  ordered_json j = ordered_json::object();
  j["disease_id"] = c.disease_id;
  j["disease_name"] = c.disease_name;
  j["tier"] = c.tier;
  j["era"] = c.era;
  j["edge_id"] = c.edge_id;
  j["phenotype"] = c.phenotype;
  j["claim_range"] = c.claim_range ? ordered_json::array({c.claim_range->min, c.claim_range->max})
                                   : ordered_json(nullptr);
  j["claim"] = c.claim;
  j["evidence"] = c.evidence;
  return j;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kSupported: return "supported";
    case Verdict::kPartiallySupported: return "partially_supported";
    case Verdict::kNotSupported: return "not_supported";
    case Verdict::kUnverifiable: return "unverifiable";
  }
  return "unverifiable";
}

std::optional<Verdict> parse_verdict(std::string_view s) {
  auto l = text::collapse_ws(text::lower(s));
  for (auto& c : l)
    if (c == ' ' || c == '-') c = '_';
  if (l == "supported") return Verdict::kSupported;
  if (l == "partially_supported" || l == "partial") return Verdict::kPartiallySupported;
  if (l == "not_supported" || l == "unsupported") return Verdict::kNotSupported;
  if (l == "unverifiable") return Verdict::kUnverifiable;
  return std::nullopt;
}

std::string build_judge_prompt(const std::string& claim, const std::string& evidence) {
  std::ostringstream lookup;
  const auto& eras = OnsetBinTable::standard().clinical_eras;
  for (size_t i = 0; i < eras.size(); ++i) {
    if (i) lookup << ", ";
    lookup << eras[i].name << " ";
    if (eras[i].hi >= 120) {
      lookup << ">=" << text::format_number(eras[i].lo);
    } else {
      lookup << text::format_number(eras[i].lo) << "-" << text::format_number(eras[i].hi);
    }
    if (i == 0) lookup << " y";
  }
  auto one_line = [](const std::string& s) {
    return text::collapse_ws(text::replace_all(text::replace_all(s, "\r", " "), "\n", " "));
  };
  return "You are auditing whether a quoted evidence passage supports a claimed onset age range.\n"
         "Work through these steps in order:\n"
         "1. Quote the timing clause from the evidence verbatim.\n"
         "2. Translate the clause to a numeric age range using this fixed clinical-era lookup: " +
         lookup.str() +
         ".\n"
         "3. Compare this single triple's claimed range, not a disease-level aggregate, against the "
         "translated range.\n"
         "4. Return one verdict: SUPPORTED, PARTIALLY_SUPPORTED, NOT_SUPPORTED or UNVERIFIABLE.\n"
         "\n"
         "Claim: " + one_line(claim) + "\n"
         "Evidence: " + one_line(evidence) + "\n"
         "\n"
         "Answer with JSON only: {\"quote\": \"...\", \"evidence_range\": [min, max] or null, "
         "\"verdict\": \"...\"}";
}

JudgeVerdict parse_judge_response(const std::string& judge, const std::string& response) {
  JudgeVerdict v;
  v.judge = judge;
  auto open = response.find('{');
  auto close = response.rfind('}');
  if (open != std::string::npos && close != std::string::npos && close > open) {
    json j = json::parse(response.substr(open, close - open + 1), nullptr, false);
    if (!j.is_discarded() && j.is_object() && j.contains("verdict") && j["verdict"].is_string()) {
      if (auto p = parse_verdict(j["verdict"].get<std::string>())) {
        v.verdict = *p;
        if (j.contains("quote") && j["quote"].is_string()) v.rationale = j["quote"].get<std::string>();
        return v;
      }
    }
  }
  // Free text: accept exactly one distinct verdict token.
  static const std::regex kToken(R"(\b(partially[_ ]supported|not[_ ]supported|unverifiable|supported)\b)",
                                 std::regex::icase);
  std::set<Verdict> found;
  for (auto it = std::sregex_iterator(response.begin(), response.end(), kToken);
       it != std::sregex_iterator(); ++it)
    if (auto p = parse_verdict((*it)[1].str())) found.insert(*p);
  if (found.size() == 1) {
    v.verdict = *found.begin();
    v.rationale = text::utf8_truncate(text::collapse_ws(response), 300);
    return v;
  }
  v.verdict = Verdict::kUnverifiable;
  v.diagnostics.push_back(found.empty() ? "parse-failure: no verdict in judge response"
                                        : "parse-failure: conflicting verdicts in judge response");
  return v;
}

JudgeVerdict judge_pair(const std::string& claim, const std::string& evidence, ModelProvider& judge,
                        double timeout_s) {
  auto response = judge.complete(build_judge_prompt(claim, evidence), 0.0, timeout_s);
  return parse_judge_response(judge.name(), response);
}

std::optional<AgeRange> evidence_timing_range(const std::string& evidence, const OnsetBinTable& table) {
  static const std::regex kRange(
      R"((\d+(?:\.\d+)?)\s*(?:-|–|to|and)\s*(\d+(?:\.\d+)?)\s*(years?|months?|y\b))", std::regex::icase);
  static const std::regex kAt(R"(\bage (?:of )?(\d+(?:\.\d+)?)\s*(years?|months?)?)", std::regex::icase);
  std::smatch m;
  auto years = [](const std::string& v, const std::string& unit) {
    double x = *text::parse_double(v);
    return text::starts_with_ci(unit, "month") ? x / 12.0 : x;
  };
  if (std::regex_search(evidence, m, kRange))
    return AgeRange{years(m[1].str(), m[3].str()), years(m[2].str(), m[3].str())};
  if (std::regex_search(evidence, m, kAt)) {
    double a = years(m[1].str(), m[2].str());
    return AgeRange{a, a};
  }
  // Era keywords, most specific first.
  static const std::vector<std::pair<std::string, std::string>> kKeywords = {
      {"early childhood", "early childhood"}, {"prenatal", "prenatal"},  {"antenatal", "prenatal"},
      {"trimester", "prenatal"},              {"congenital", "prenatal"}, {"at birth", "prenatal"},
      {"neonatal", "infancy"},                {"newborn", "infancy"},     {"infan", "infancy"},
      {"adolescen", "adolescence"},           {"juvenile", "adolescence"}, {"teen", "adolescence"},
      {"child", "childhood"},                 {"elderly", "older adulthood"},
      {"older adult", "older adulthood"},     {"late adult", "older adulthood"},
      {"adult", "adulthood"}};
  auto l = text::lower(evidence);
  for (const auto& [k, era] : kKeywords)
    if (l.find(k) != std::string::npos) return category_to_range(era, table);
  return std::nullopt;
}

std::string MockJudgeProvider::complete(const std::string& prompt, double, double) {
  auto line = [&](const std::string& prefix) {
    auto pos = prompt.find("\n" + prefix);
    if (pos == std::string::npos) return std::string();
    pos += prefix.size() + 1;
    return prompt.substr(pos, prompt.find('\n', pos) - pos);
  };
  const std::string claim = line("Claim: ");
  const std::string evidence = line("Evidence: ");
  ordered_json out = ordered_json::object();
  auto ev = evidence_timing_range(evidence, OnsetBinTable::standard());
  static const std::regex kClaim(R"((\d+(?:\.\d+)?)\s*-\s*(\d+(?:\.\d+)?))");
  std::smatch m;
  std::optional<AgeRange> cl;
  if (std::regex_search(claim, m, kClaim))
    cl = AgeRange{*text::parse_double(m[1].str()), *text::parse_double(m[2].str())};
  Verdict v;
  if (!ev) {
    v = Verdict::kUnverifiable;
  } else if (!cl) {
    v = Verdict::kNotSupported;
  } else if (cl->min >= ev->min && cl->max <= ev->max) {
    v = Verdict::kSupported;
  } else if (ranges_overlap(*cl, *ev)) {
    v = Verdict::kPartiallySupported;
  } else {
    v = Verdict::kNotSupported;
  }
  out["quote"] = evidence;
  out["evidence_range"] = ev ? ordered_json::array({ev->min, ev->max}) : ordered_json(nullptr);
  std::string verdict(to_string(v));
  std::transform(verdict.begin(), verdict.end(), verdict.begin(), ::toupper);
  out["verdict"] = verdict;
  return out.dump();
}

// ---------------------------------------------------------------------------

PanelReport aggregate_verdicts(const std::vector<std::vector<JudgeVerdict>>& items) {
  PanelReport r;
  for (auto v : {Verdict::kSupported, Verdict::kPartiallySupported, Verdict::kNotSupported,
                 Verdict::kUnverifiable})
    r.majority[v] = 0;
  for (size_t i = 0; i < items.size(); ++i) {
    if (items[i].size() != 3) {
      r.warnings.push_back("item " + std::to_string(i) + " has " + std::to_string(items[i].size()) +
                           " judge verdicts; excluded");
      r.per_item.push_back(std::nullopt);
      continue;
    }
    ++r.n;
    std::map<Verdict, int> votes;
    for (const auto& j : items[i]) ++votes[j.verdict];
    std::optional<Verdict> maj;
    int top = 0;
    for (const auto& [v, k] : votes)
      if (k > top) {
        top = k;
        maj = v;
      }
    if (top == 3) ++r.unanimous;
    if (top == 2) ++r.two_of_three;
    if (top < 2) {
      ++r.splits;
      r.per_item.push_back(std::nullopt);
      continue;
    }
    ++r.majority[*maj];
    r.per_item.push_back(maj);
  }
  size_t verified = r.majority[Verdict::kSupported] + r.majority[Verdict::kPartiallySupported];
  r.verifiable = r.n - r.majority[Verdict::kUnverifiable] - r.splits;
  r.verified_accuracy = r.verifiable ? static_cast<double>(verified) / static_cast<double>(r.verifiable) : 0.0;
  return r;
}

ordered_json to_json(const PanelReport& r) {
  ordered_json j = ordered_json::object();
  j["n"] = r.n;
  ordered_json m = ordered_json::object();
  for (const auto& [v, k] : r.majority) m[std::string(to_string(v))] = k;
  j["majority"] = m;
  j["three_way_split"] = r.splits;
  j["unanimous"] = r.unanimous;
  j["two_of_three"] = r.two_of_three;
  j["verifiable"] = r.verifiable;
  j["verified_accuracy"] = r.verified_accuracy;
  j["warnings"] = r.warnings;
  return j;
}

std::string render_panel_table(const PanelReport& r) {
  std::ostringstream os;
  char buf[128];
  os << "verdict               majority\n";
  for (const auto& [v, k] : r.majority) {
    std::snprintf(buf, sizeof buf, "%-21s %8zu\n", std::string(to_string(v)).c_str(), k);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "%-21s %8zu\n", "three_way_split", r.splits);
  os << buf;
  os << "agreement: " << r.unanimous << "/" << r.n << " unanimous, " << r.two_of_three << "/" << r.n
     << " two-of-three, " << r.splits << "/" << r.n << " split\n";
  std::snprintf(buf, sizeof buf, "verified accuracy: %zu/%zu = %.1f%%\n",
                r.majority.at(Verdict::kSupported) + r.majority.at(Verdict::kPartiallySupported),
                r.verifiable, 100.0 * r.verified_accuracy);
  os << buf;
  return os.str();
}

}  // namespace chronokg
