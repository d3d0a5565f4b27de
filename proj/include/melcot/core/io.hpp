#pragma once

#include <zlib.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "melcot/core/error.hpp"

namespace melcot::io {

namespace fs = std::filesystem;
using json = nlohmann::json;

// Reads text line by line. gzip input is decompressed transparently, plain
// files pass through unchanged (zlib handles both).
class LineReader {
 public:
  explicit LineReader(const fs::path& path) : path_(path) {
    file_ = gzopen(path.string().c_str(), "rb");
    if (file_ == nullptr) throw Error(Errc::io, "cannot open " + path.string());
    gzbuffer(file_, 1 << 16);
  }
  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;
  ~LineReader() {
    if (file_ != nullptr) gzclose(file_);
  }

  bool next(std::string& line) {
    line.clear();
    char buf[8192];
    while (true) {
      if (gzgets(file_, buf, sizeof buf) == nullptr) {
        int err = 0;
        gzerror(file_, &err);
        if (err != Z_OK && err != Z_STREAM_END)
          throw Error(Errc::io, "read failure in " + path_.string());
        return !line.empty();
      }
      line += buf;
      if (!line.empty() && line.back() == '\n') {
        line.pop_back();
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
      }
    }
  }

 private:
  fs::path path_;
  gzFile file_ = nullptr;
};

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io, "cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(Errc::io, "write failure on " + path.string());
  }
  fs::rename(tmp, path);
}

inline std::vector<json> read_jsonl(const fs::path& path) {
  std::vector<json> out;
  LineReader reader(path);
  std::string line;
  std::size_t lineno = 0;
  while (reader.next(line)) {
    ++lineno;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw Error(Errc::data_validation,
                  path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

inline std::string to_jsonl(const std::vector<json>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

inline void write_jsonl(const fs::path& path, const std::vector<json>& rows) {
  write_file(path, to_jsonl(rows));
}

}  // namespace melcot::io
