#include "core/bins.hpp"

#include <algorithm>
#include <map>

#include "common/error.hpp"
#include "common/text.hpp"

namespace chronokg {

const OnsetBinTable& OnsetBinTable::standard() {
  static const OnsetBinTable kTable{
      .fine_bins = {{"neonatal", 0, 0.08},
                    {"infantile", 0.08, 1},
                    {"early_childhood", 1, 5},
                    {"childhood", 5, 10},
                    {"juvenile", 10, 16},
                    {"young_adult", 16, 40},
                    {"adult", 40, 60},
                    {"late_onset", 60, 120}},
      .coarse_bins = {"antenatal-infantile", "childhood", "juvenile", "adult", "late-onset"},
      .fine_to_coarse = {"antenatal-infantile", "antenatal-infantile", "childhood", "childhood",
                         "juvenile", "adult", "adult", "late-onset"},
      .clinical_eras = {{"prenatal", 0, 0},
                        {"infancy", 0, 1},
                        {"early childhood", 1, 5},
                        {"childhood", 1, 11},
                        {"adolescence", 10, 18},
                        {"adulthood", 18, 65},
                        {"older adulthood", 65, 120}},
  };
  return kTable;
}

size_t OnsetBinTable::fine_index(std::string_view name) const {
  for (size_t i = 0; i < fine_bins.size(); ++i)
    if (fine_bins[i].name == name) return i;
  fail(ErrorKind::kDomain, "unknown fine onset bin '" + std::string(name) + "'");
}

size_t OnsetBinTable::era_index(std::string_view name) const {
  for (size_t i = 0; i < clinical_eras.size(); ++i)
    if (clinical_eras[i].name == name) return i;
  fail(ErrorKind::kDomain, "unknown clinical era '" + std::string(name) + "'");
}

void check_age_range(const AgeRange& range, double lo, double hi) {
  if (!(range.min >= lo && range.min <= range.max && range.max <= hi)) {
    fail(ErrorKind::kDomain, "age range [" + text::format_number(range.min) + ", " +
                                 text::format_number(range.max) + "] outside [" +
                                 text::format_number(lo) + ", " + text::format_number(hi) + "]");
  }
}

size_t era_index_of_range(const AgeRange& range, const OnsetBinTable& table) {
  check_age_range(range);
  size_t best = 0;
  double best_len = -1;
  bool best_touch = false;
  for (size_t i = 0; i < table.clinical_eras.size(); ++i) {
    const auto& era = table.clinical_eras[i];
    double len = std::min(range.max, era.hi) - std::max(range.min, era.lo);
    bool touch = len >= 0;
    len = std::max(0.0, len);
    // strict comparisons keep the earliest era on ties
    if (len > best_len || (len == best_len && touch && !best_touch)) {
      best = i;
      best_len = len;
      best_touch = touch;
    }
  }
  return best;
}

std::string era_of_range(const AgeRange& range, const OnsetBinTable& table) {
  return table.clinical_eras[era_index_of_range(range, table)].name;
}

std::string range_to_fine_bin(const AgeRange& range, const OnsetBinTable& table) {
  check_age_range(range);
  const double mid = (range.min + range.max) / 2;
  for (size_t i = 0; i < table.fine_bins.size(); ++i) {
    const auto& bin = table.fine_bins[i];
    bool last = i + 1 == table.fine_bins.size();
    if (mid >= bin.lo && (mid < bin.hi || (last && mid <= bin.hi))) return bin.name;
  }
  fail(ErrorKind::kDomain, "no fine bin covers " + text::format_number(mid));
}

std::string collapse_bin(std::string_view fine_bin, const OnsetBinTable& table) {
  return table.fine_to_coarse.at(table.fine_index(fine_bin));
}

std::optional<AgeRange> category_to_range(std::string_view label, const OnsetBinTable& table) {
  std::string key = text::collapse_ws(text::replace_all(text::lower(label), "_", " "));
  for (const char* suffix : {" onset", " period", " stage"}) {
    std::string s(suffix);
    if (key.size() > s.size() && key.compare(key.size() - s.size(), s.size(), s) == 0)
      key.resize(key.size() - s.size());
  }
  static const std::map<std::string, std::string> kAliases = {
      {"antenatal", "prenatal"},       {"congenital", "prenatal"},
      {"fetal", "prenatal"},           {"embryonal", "prenatal"},
      {"neonatal", "infancy"},         {"infantile", "infancy"},
      {"infant", "infancy"},           {"newborn", "infancy"},
      {"toddler", "early childhood"},  {"early childhood", "early childhood"},
      {"child", "childhood"},          {"pediatric", "childhood"},
      {"paediatric", "childhood"},     {"juvenile", "adolescence"},
      {"adolescent", "adolescence"},   {"teen", "adolescence"},
      {"adult", "adulthood"},          {"young adult", "adulthood"},
      {"middle age", "adulthood"},     {"late", "older adulthood"},
      {"elderly", "older adulthood"},  {"older adult", "older adulthood"},
      {"senior", "older adulthood"},
  };
  auto alias = kAliases.find(key);
  if (alias != kAliases.end()) key = alias->second;
  for (const auto& era : table.clinical_eras)
    if (era.name == key) return AgeRange{era.lo, era.hi};
  return std::nullopt;
}

}  // namespace chronokg
