#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chronokg::text {

std::string lower(std::string_view s);
std::string trim(std::string_view s);
// Trims and collapses internal whitespace runs to a single space.
std::string collapse_ws(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
bool contains_ci(std::string_view haystack, std::string_view needle);
bool starts_with_ci(std::string_view s, std::string_view prefix);
std::string replace_all(std::string s, std::string_view from, std::string_view to);

// Number of code points in a UTF-8 string.
size_t utf8_length(std::string_view s);
// Cuts to at most max_chars code points without splitting a sequence.
std::string utf8_truncate(std::string_view s, size_t max_chars);

// Strict decimal parse of the whole string.
std::optional<double> parse_double(std::string_view s);
std::optional<long> parse_long(std::string_view s);

// Compact number formatting: 2 -> "2", 2.5 -> "2.5", 0.08 -> "0.08".
std::string format_number(double v);

// Filesystem-safe rendering of a CURIE: "MONDO:0010679" -> "MONDO_0010679".
std::string curie_slug(std::string_view curie);

}  // namespace chronokg::text
