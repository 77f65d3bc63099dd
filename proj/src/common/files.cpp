#include "common/files.hpp"

#include <zlib.h>

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "common/error.hpp"

namespace chronokg::files {

namespace fs = std::filesystem;

namespace {

fs::path temp_sibling(const fs::path& path) {
  static std::atomic<unsigned> counter{0};
  auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id()) % 100000;
  return path.parent_path() /
         ("." + path.filename().string() + ".tmp" + std::to_string(tid) + "_" +
          std::to_string(counter++));
}

}  // namespace

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kNotFound, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  auto tmp = temp_sibling(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::kIo, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) fail(ErrorKind::kIo, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    fail(ErrorKind::kIo, "rename to " + path.string() + " failed: " + ec.message());
  }
}

std::string read_maybe_gzip(const fs::path& path) {
  std::string raw = read_text(path);
  if (raw.size() < 2 || static_cast<unsigned char>(raw[0]) != 0x1f ||
      static_cast<unsigned char>(raw[1]) != 0x8b) {
    return raw;
  }
  gzFile gz = gzopen(path.string().c_str(), "rb");
  if (!gz) fail(ErrorKind::kIo, "cannot open gzip " + path.string());
  std::string out;
  char buf[1 << 15];
  int n = 0;
  while ((n = gzread(gz, buf, sizeof buf)) > 0) out.append(buf, static_cast<size_t>(n));
  bool bad = n < 0;
  gzclose(gz);
  if (bad) fail(ErrorKind::kParse, "corrupt gzip stream in " + path.string());
  return out;
}

void write_gzip_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  auto tmp = temp_sibling(path);
  // mtime is left zero in the header so identical content gives identical bytes
  gzFile gz = gzopen(tmp.string().c_str(), "wb9");
  if (!gz) fail(ErrorKind::kIo, "cannot write " + tmp.string());
  if (!content.empty() &&
      gzwrite(gz, content.data(), static_cast<unsigned>(content.size())) == 0) {
    gzclose(gz);
    fail(ErrorKind::kIo, "gzip write failed for " + tmp.string());
  }
  gzclose(gz);
  fs::rename(tmp, path);
}

}  // namespace chronokg::files
