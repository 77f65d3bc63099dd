#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "core/model.hpp"

namespace chronokg {

struct NamedRange {
  std::string name;
  double lo;
  double hi;
};

// Fine onset bins, their coarse collapse, and the clinical-era lookup.
// Fine bins are half-open [lo, hi) except the last, which is closed at 120.
// Clinical eras are closed ranges and overlap (childhood vs adolescence).
struct OnsetBinTable {
  std::vector<NamedRange> fine_bins;
  std::vector<std::string> coarse_bins;
  std::vector<std::string> fine_to_coarse;  // parallel to fine_bins
  std::vector<NamedRange> clinical_eras;

  static const OnsetBinTable& standard();

  size_t fine_index(std::string_view name) const;
  size_t era_index(std::string_view name) const;
  const NamedRange& era(size_t index) const { return clinical_eras.at(index); }
};

// Era with maximal overlap against [min, max]; ties go to the earlier era.
// Point ranges prefer eras that contain the point.
size_t era_index_of_range(const AgeRange& range, const OnsetBinTable& table);
std::string era_of_range(const AgeRange& range, const OnsetBinTable& table);

// Fine bin containing the range midpoint.
std::string range_to_fine_bin(const AgeRange& range, const OnsetBinTable& table);
std::string collapse_bin(std::string_view fine_bin, const OnsetBinTable& table);

// Numeric range for an era name or an onset-category synonym such as
// "neonatal", "juvenile", "late onset", "congenital". Empty when unknown.
std::optional<AgeRange> category_to_range(std::string_view label, const OnsetBinTable& table);

void check_age_range(const AgeRange& range, double lo = 0, double hi = 120);

}  // namespace chronokg
