#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace chronokg::files {

std::string read_text(const std::filesystem::path& path);

// Writes to a sibling temp file and renames it into place, so readers never
// observe a partially written artifact.
void write_atomic(const std::filesystem::path& path, std::string_view content);

// Reads a possibly gzip-compressed file (detected by magic bytes).
std::string read_maybe_gzip(const std::filesystem::path& path);
void write_gzip_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace chronokg::files
