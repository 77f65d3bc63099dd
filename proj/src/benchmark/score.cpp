#include <algorithm>
#include <regex>
#include <set>

#include "benchmark/benchmark.hpp"
#include "common/error.hpp"
#include "common/files.hpp"
#include "common/text.hpp"
#include "consensus/consensus.hpp"

namespace chronokg {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(ScoreOutcome o) {
  switch (o) {
    case ScoreOutcome::kCorrect: return "correct";
    case ScoreOutcome::kIncorrect: return "incorrect";
    case ScoreOutcome::kUnparseable: return "unparseable";
  }
  return "unparseable";
}

namespace {

double unit_scale(const std::string& unit) {
  auto u = text::lower(unit);
  if (text::starts_with_ci(u, "month") || u == "mo") return 1.0 / 12.0;
  if (text::starts_with_ci(u, "week") || u == "wk") return 7.0 / 365.25;
  if (text::starts_with_ci(u, "day")) return 1.0 / 365.25;
  return 1.0;
}

}  // namespace

std::optional<ParsedRange> parse_answer_range(const std::string& text_in, const OnsetBinTable& table) {
  static const std::string kNum = R"((\d+(?:\.\d+)?))";
  static const std::string kUnit = R"((?:\s*(years?|yrs?|y\b|months?|mo\b|weeks?|wks?|days?))?)";
  static const std::regex kPair(kNum + kUnit + R"(\s*(?:-|–|—|to|and)\s*)" + kNum + kUnit, std::regex::icase);
  static const std::regex kSingle(kNum + kUnit, std::regex::icase);
  std::smatch m;
  if (std::regex_search(text_in, m, kPair)) {
    // A unit after the second number applies to both unless the first has its own.
    std::string u2 = m[4].str();
    std::string u1 = m[2].matched ? m[2].str() : u2;
    double a = *text::parse_double(m[1].str()) * unit_scale(u1);
    double b = *text::parse_double(m[3].str()) * unit_scale(u2);
    if (a > b) std::swap(a, b);
    return ParsedRange{{a, b}, false};
  }
  if (std::regex_search(text_in, m, kSingle)) {
    double a = *text::parse_double(m[1].str()) * unit_scale(m[2].str());
    return ParsedRange{{a, a}, false};
  }
  static const std::vector<std::string> kKeywords = {
      "older adulthood", "early childhood", "prenatal", "antenatal", "congenital", "neonatal", "infancy",
      "infantile", "adolescence", "adolescent", "juvenile", "childhood", "adulthood", "adult", "elderly"};
  auto l = text::lower(text_in);
  for (const auto& k : kKeywords)
    if (l.find(k) != std::string::npos)
      if (auto r = category_to_range(k, table)) return ParsedRange{*r, true};
  return std::nullopt;
}

double onset_tolerance(const AgeRange& gold) {
  return std::min(2.0, std::max(0.5, 0.5 * gold.width()));
}

bool calibrated_onset_score(const ParsedRange& predicted, const AgeRange& gold, const OnsetBinTable&) {
  const double tol = onset_tolerance(gold);
  const AgeRange expanded{gold.min - tol, gold.max + tol};
  if (!ranges_overlap(predicted.range, expanded)) return false;
  if (predicted.from_keyword && predicted.range.width() > gold.width() + 2 * tol) return false;
  return true;
}

namespace {

std::string norm(const std::string& s) {
  auto l = text::lower(s);
  std::string out;
  for (char c : l) out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : ' ');
  return text::collapse_ws(out);
}

bool mentions(const std::string& haystack, const std::string& needle) {
  auto h = norm(haystack), n = norm(needle);
  return !n.empty() && (" " + h + " ").find(" " + n + " ") != std::string::npos;
}

// Which option the answer names: a leading letter, the full option text,
// or a leading Yes/No. Empty when nothing is identifiable.
std::optional<size_t> chosen_option(const BenchmarkQuestion& q, const std::string& answer) {
  const auto& opts = *q.options;
  const auto a = text::trim(answer);
  const bool lettered = q.task_type != TaskType::kTemporalWindow && q.task_type != TaskType::kCrossDiseaseComparison;
  if (lettered) {
    static const std::regex kLetter(R"(^\(?([A-Da-d])\)?(?:[\s.):,]|$))");
    std::smatch m;
    if (std::regex_search(a, m, kLetter)) {
      size_t i = static_cast<size_t>(std::toupper(m[1].str()[0]) - 'A');
      if (i < opts.size()) return i;
    }
  }
  auto na = norm(a);
  for (size_t i = 0; i < opts.size(); ++i)
    if (na == norm(opts[i])) return i;
  if (q.task_type == TaskType::kTemporalWindow) {
    auto first = text::split(na, ' ').front();
    for (size_t i = 0; i < opts.size(); ++i)
      if (first == norm(opts[i])) return i;
  }
  return std::nullopt;
}

std::vector<std::string> split_sequence(const std::string& answer) {
  static const std::regex kSep(R"(\s*(?:→|->|=>|>|,|;|\n|\bthen\b)\s*)", std::regex::icase);
  static const std::regex kNumbering(R"(^\s*\d+[.)]\s*)");
  std::vector<std::string> out;
  for (auto it = std::sregex_token_iterator(answer.begin(), answer.end(), kSep, -1);
       it != std::sregex_token_iterator(); ++it) {
    auto part = std::regex_replace(it->str(), kNumbering, "");
    auto k = norm(part);
    if (k.rfind("and ", 0) == 0) k = k.substr(4);
    if (!k.empty()) out.push_back(k);
  }
  return out;
}

}  // namespace

ScoreResult score_answer(const BenchmarkQuestion& q, const std::string& answer) {
  ScoreResult r;
  if (text::trim(answer).empty()) {
    r.diagnostic = "empty answer";
    return r;
  }
  auto verdict = [&](bool ok) {
    r.outcome = ok ? ScoreOutcome::kCorrect : ScoreOutcome::kIncorrect;
    return r;
  };
  switch (q.task_type) {
    case TaskType::kPhenopacketsOnset: {
      auto p = parse_answer_range(answer);
      if (!p || !q.gold.range) {
        r.outcome = ScoreOutcome::kIncorrect;
        r.diagnostic = "unparseable range";
        return r;
      }
      return verdict(calibrated_onset_score(*p, *q.gold.range));
    }
    case TaskType::kPhenotypeOrdering: {
      auto seq = split_sequence(answer);
      std::vector<std::string> gold;
      for (const auto& g : q.gold.items) gold.push_back(norm(g));
      if (seq.size() < 2) {
        r.diagnostic = "no sequence found";
        return r;
      }
      return verdict(seq == gold);
    }
    case TaskType::kStageConditional: {
      for (const auto& g : q.gold.items)
        if (!mentions(answer, g)) return verdict(false);
      return verdict(!q.gold.items.empty());
    }
    case TaskType::kCrossDiseaseComparison: {
      // Bidirectional substring against each option; naming both is ambiguous.
      const auto& o = *q.options;
      auto na = norm(answer);
      auto hit = [&](const std::string& opt) {
        auto no = norm(opt);
        return na.find(no) != std::string::npos || no.find(na) != std::string::npos;
      };
      bool h0 = hit(o[0]), h1 = hit(o[1]);
      if (h0 && h1) {
        r.diagnostic = "answer names both options";
        return r;
      }
      if (!h0 && !h1) return verdict(false);
      return verdict(norm(h0 ? o[0] : o[1]) == norm(q.gold.label));
    }
    default:
      break;
  }
  if (q.options) {
    auto c = chosen_option(q, answer);
    if (!c) {
      r.diagnostic = "no option identified";
      return r;
    }
    const auto& opts = *q.options;
    if (q.gold.label.size() == 1 && q.task_type != TaskType::kTemporalWindow)
      return verdict(*c == static_cast<size_t>(q.gold.label[0] - 'A'));
    return verdict(norm(opts[*c]) == norm(q.gold.label));
  }
  auto na = norm(answer), ng = norm(q.gold.label);
  return verdict(!ng.empty() && (na.find(ng) != std::string::npos || ng.find(na) != std::string::npos));
}

BenchmarkScore score_benchmark(const std::vector<BenchmarkQuestion>& questions,
                               const std::map<std::string, std::string>& answers) {
  BenchmarkScore s;
  for (const auto& q : questions) {
    auto& t = s.per_type[q.task_type];
    ++t.n;
    ++s.overall.n;
    auto it = answers.find(q.id);
    if (it == answers.end()) {
      s.missing.push_back(q.id);
      continue;
    }
    auto r = score_answer(q, it->second);
    if (r.correct()) {
      ++t.correct;
      ++s.overall.correct;
    } else if (r.outcome == ScoreOutcome::kUnparseable) {
      ++t.unparseable;
      ++s.overall.unparseable;
    }
  }
  return s;
}

ordered_json to_json(const BenchmarkScore& s) {
  auto row = [](const TypeScore& t) {
    ordered_json j = ordered_json::object();
    j["n"] = t.n;
    j["correct"] = t.correct;
    j["unparseable"] = t.unparseable;
    j["accuracy"] = t.accuracy();
    return j;
  };
  ordered_json j = ordered_json::object();
  ordered_json per = ordered_json::object();
  for (const auto& [type, t] : s.per_type) per[std::string(to_string(type))] = row(t);
  j["per_type"] = per;
  j["overall"] = row(s.overall);
  j["missing"] = s.missing;
  return j;
}

// ---------------------------------------------------------------------------

namespace {

ordered_json range_json(const std::optional<AgeRange>& r) {
  return r ? ordered_json::array({r->min, r->max}) : ordered_json(nullptr);
}

std::optional<AgeRange> range_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return AgeRange{j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace

ordered_json to_json(const BenchmarkQuestion& q) {
  ordered_json j = ordered_json::object();
  j["id"] = q.id;
  j["tier"] = std::string(to_string(q.tier));
  j["task_type"] = std::string(to_string(q.task_type));
  j["difficulty"] = std::string(to_string(q.difficulty));
  j["prompt"] = q.prompt;
  j["options"] = q.options ? ordered_json(*q.options) : ordered_json(nullptr);
  ordered_json gold = ordered_json::object();
  gold["label"] = q.gold.label;
  gold["range"] = range_json(q.gold.range);
  gold["items"] = q.gold.items;
  j["gold"] = gold;
  ordered_json src = ordered_json::object();
  src["source"] = q.gold_source.source;
  src["records"] = q.gold_source.records;
  src["pmids"] = q.gold_source.pmids;
  j["gold_source"] = src;
  ordered_json p = ordered_json::object();
  p["probe_age"] = q.params.probe_age ? ordered_json(*q.params.probe_age) : ordered_json(nullptr);
  p["era"] = q.params.era ? ordered_json(*q.params.era) : ordered_json(nullptr);
  p["phenotype"] = q.params.phenotype ? ordered_json(*q.params.phenotype) : ordered_json(nullptr);
  p["disease"] = q.params.disease ? ordered_json(*q.params.disease) : ordered_json(nullptr);
  ordered_json ors = ordered_json::array();
  for (const auto& r : q.params.option_ranges) ors.push_back(range_json(r));
  p["option_ranges"] = ors;
  p["item_onsets"] = q.params.item_onsets;
  j["params"] = p;
  return j;
}

BenchmarkQuestion question_from_json(const json& j) {
  try {
    BenchmarkQuestion q;
    q.id = j.at("id").get<std::string>();
    q.tier = parse_question_tier(j.at("tier").get<std::string>());
    q.task_type = parse_task_type(j.at("task_type").get<std::string>());
    q.difficulty = parse_difficulty(j.at("difficulty").get<std::string>());
    q.prompt = j.at("prompt").get<std::string>();
    if (j.contains("options") && !j["options"].is_null()) q.options = j["options"].get<std::vector<std::string>>();
    const auto& g = j.at("gold");
    q.gold.label = g.value("label", "");
    if (g.contains("range")) q.gold.range = range_from(g["range"]);
    q.gold.items = g.value("items", std::vector<std::string>{});
    if (j.contains("gold_source")) {
      const auto& s = j["gold_source"];
      q.gold_source.source = s.value("source", "");
      q.gold_source.records = s.value("records", std::vector<std::string>{});
      q.gold_source.pmids = s.value("pmids", std::vector<std::string>{});
    }
    if (j.contains("params")) {
      const auto& p = j["params"];
      if (p.contains("probe_age") && !p["probe_age"].is_null()) q.params.probe_age = p["probe_age"].get<double>();
      if (p.contains("era") && !p["era"].is_null()) q.params.era = p["era"].get<std::string>();
      if (p.contains("phenotype") && !p["phenotype"].is_null())
        q.params.phenotype = p["phenotype"].get<std::string>();
      if (p.contains("disease") && !p["disease"].is_null()) q.params.disease = p["disease"].get<std::string>();
      if (p.contains("option_ranges"))
        for (const auto& r : p["option_ranges"]) q.params.option_ranges.push_back(range_from(r));
      q.params.item_onsets = p.value("item_onsets", std::vector<double>{});
    }
    return q;
  } catch (const json::exception& e) {
    fail(ErrorKind::kParse, std::string("question record: ") + e.what());
  }
}

std::vector<fs::path> write_benchmark(const std::vector<BenchmarkQuestion>& questions, const fs::path& dir) {
  ordered_json main = ordered_json::array(), supp = ordered_json::array();
  std::map<TaskType, std::string> shards;
  for (const auto& q : questions) {
    auto j = to_json(q);
    (q.tier == QuestionTier::kSupplementary ? supp : main).push_back(j);
    shards[q.task_type] += j.dump() + "\n";
  }
  std::vector<fs::path> written;
  files::write_atomic(dir / "benchmark.json", main.dump(2) + "\n");
  written.push_back(dir / "benchmark.json");
  files::write_atomic(dir / "supplementary.json", supp.dump(2) + "\n");
  written.push_back(dir / "supplementary.json");
  for (const auto& [type, body] : shards) {
    auto p = dir / "shards" / (std::string(to_string(type)) + ".jsonl");
    files::write_atomic(p, body);
    written.push_back(p);
  }
  return written;
}

std::vector<BenchmarkQuestion> load_questions(const fs::path& path) {
  auto body = files::read_text(path);
  std::vector<BenchmarkQuestion> out;
  auto t = text::trim(body);
  if (!t.empty() && t[0] == '[') {
    json arr = json::parse(t, nullptr, false);
    if (arr.is_discarded()) fail(ErrorKind::kParse, "malformed question file " + path.string());
    for (const auto& j : arr) out.push_back(question_from_json(j));
    return out;
  }
  size_t n = 0;
  for (const auto& line : text::split(body, '\n')) {
    ++n;
    if (text::trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
      fail(ErrorKind::kParse, path.string() + ":" + std::to_string(n) + ": malformed question line");
    out.push_back(question_from_json(j));
  }
  return out;
}

}  // namespace chronokg
