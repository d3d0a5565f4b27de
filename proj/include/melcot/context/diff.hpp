#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "melcot/core/error.hpp"

namespace melcot::context {

enum class LineKind { context, added, removed };

struct DiffLine {
  LineKind kind = LineKind::context;
  std::string text;
  // Followed by "\ No newline at end of file".
  bool no_newline = false;
  // Empty context line written without its leading space.
  bool bare = false;

  bool operator==(const DiffLine&) const = default;
};

// Inclusive 1-based line span.
struct LineSpan {
  int start = 1;
  int end = 1;

  int length() const noexcept { return end - start + 1; }
  bool contains(const LineSpan& o) const noexcept { return start <= o.start && o.end <= end; }
  bool operator==(const LineSpan&) const = default;
};

struct DiffHunk {
  std::string file_path;
  int old_start = 1;
  int old_len = 0;
  int new_start = 1;
  int new_len = 0;
  bool old_len_omitted = false;
  bool new_len_omitted = false;
  // Text after the closing "@@", e.g. " def foo():".
  std::string section;
  std::vector<DiffLine> lines;

  std::vector<std::string> old_side() const {
    std::vector<std::string> out;
    for (const auto& l : lines)
      if (l.kind != LineKind::added) out.push_back(l.text);
    return out;
  }
  std::vector<std::string> new_side() const {
    std::vector<std::string> out;
    for (const auto& l : lines)
      if (l.kind != LineKind::removed) out.push_back(l.text);
    return out;
  }

  // Lines the hunk occupies in the old file. A pure insertion occupies the
  // line it is inserted after (line 1 for insertions at the top).
  LineSpan old_span() const noexcept {
    if (old_len == 0) {
      int at = std::max(old_start, 1);
      return {at, at};
    }
    return {old_start, old_start + old_len - 1};
  }
  LineSpan new_span() const noexcept {
    if (new_len == 0) {
      int at = std::max(new_start, 1);
      return {at, at};
    }
    return {new_start, new_start + new_len - 1};
  }

  bool operator==(const DiffHunk&) const = default;
};

struct DiffParseError {
  std::size_t offset = 0;
  std::string message;
};

struct DiffParseResult {
  std::vector<DiffHunk> hunks;
  std::vector<DiffParseError> errors;
};

enum class ParseMode {
  // Hunk bodies must match their header counts.
  strict,
  // A body that ends early is accepted and its lengths are shrunk to what is
  // present. Review-comment payloads carry hunks cut at the commented line.
  partial,
};

namespace detail {

inline bool parse_range(std::string_view s, int& start, int& len, bool& omitted) {
  auto comma = s.find(',');
  auto num = [](std::string_view t, int& v) {
    if (t.empty()) return false;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    return ec == std::errc{} && p == t.data() + t.size() && v >= 0;
  };
  if (comma == std::string_view::npos) {
    omitted = true;
    len = 1;
    return num(s, start);
  }
  omitted = false;
  return num(s.substr(0, comma), start) && num(s.substr(comma + 1), len);
}

// "@@ -a[,b] +c[,d] @@[section]"
inline bool parse_header(std::string_view line, DiffHunk& h) {
  if (line.substr(0, 4) != "@@ -") return false;
  auto plus = line.find(" +", 4);
  if (plus == std::string_view::npos) return false;
  auto close = line.find(" @@", plus + 2);
  if (close == std::string_view::npos) return false;
  if (!parse_range(line.substr(4, plus - 4), h.old_start, h.old_len, h.old_len_omitted))
    return false;
  if (!parse_range(line.substr(plus + 2, close - plus - 2), h.new_start, h.new_len,
                   h.new_len_omitted))
    return false;
  h.section = std::string(line.substr(close + 3));
  if ((h.old_start == 0 && h.old_len != 0) || (h.new_start == 0 && h.new_len != 0)) return false;
  return true;
}

inline std::string strip_prefix_path(std::string_view p) {
  auto tab = p.find('\t');
  if (tab != std::string_view::npos) p = p.substr(0, tab);
  if (p.substr(0, 2) == "a/" || p.substr(0, 2) == "b/") p.remove_prefix(2);
  return std::string(p);
}

}  // namespace detail

// Decodes every "@@" hunk in diff_text. File headers ("diff --git", "---",
// "+++") set file_path on the hunks that follow; other non-hunk lines are
// ignored. A malformed hunk is reported with the byte offset of its header
// and parsing resumes at the next header.
inline DiffParseResult parse_unified_diff(std::string_view diff_text,
                                          ParseMode mode = ParseMode::strict) {
  DiffParseResult result;
  std::string current_path;
  std::size_t pos = 0;

  auto next_line = [&](std::string_view& line, std::size_t& at) {
    if (pos >= diff_text.size()) return false;
    at = pos;
    auto nl = diff_text.find('\n', pos);
    if (nl == std::string_view::npos) {
      line = diff_text.substr(pos);
      pos = diff_text.size();
    } else {
      line = diff_text.substr(pos, nl - pos);
      pos = nl + 1;
    }
    return true;
  };

  std::string_view line;
  std::size_t at = 0;
  bool have_pending = false;
  while (have_pending || next_line(line, at)) {
    have_pending = false;
    if (line.substr(0, 4) == "--- ") {
      auto p = detail::strip_prefix_path(line.substr(4));
      if (p != "/dev/null") current_path = p;
      continue;
    }
    if (line.substr(0, 4) == "+++ ") {
      auto p = detail::strip_prefix_path(line.substr(4));
      if (p != "/dev/null") current_path = p;
      continue;
    }
    if (line.substr(0, 2) != "@@") continue;

    DiffHunk h;
    h.file_path = current_path;
    std::size_t header_offset = at;
    if (!detail::parse_header(line, h)) {
      result.errors.push_back({header_offset, "malformed hunk header: " + std::string(line)});
      continue;
    }
    int old_seen = 0, new_seen = 0;
    bool ok = true;
    while (old_seen < h.old_len || new_seen < h.new_len) {
      std::string_view body;
      std::size_t body_at = 0;
      if (!next_line(body, body_at)) break;
      DiffLine dl;
      if (body.empty()) {
        dl.kind = LineKind::context;
        dl.bare = true;
      } else if (body[0] == ' ') {
        dl.kind = LineKind::context;
        dl.text = std::string(body.substr(1));
      } else if (body[0] == '+') {
        dl.kind = LineKind::added;
        dl.text = std::string(body.substr(1));
      } else if (body[0] == '-') {
        dl.kind = LineKind::removed;
        dl.text = std::string(body.substr(1));
      } else if (body[0] == '\\') {
        if (!h.lines.empty()) h.lines.back().no_newline = true;
        continue;
      } else {
        line = body;
        at = body_at;
        have_pending = true;
        break;
      }
      if (dl.kind != LineKind::added) ++old_seen;
      if (dl.kind != LineKind::removed) ++new_seen;
      if (old_seen > h.old_len || new_seen > h.new_len) {
        ok = false;
        result.errors.push_back({header_offset, "hunk body exceeds header counts"});
        break;
      }
      h.lines.push_back(std::move(dl));
    }
    if (!ok) continue;
    // A trailing "\ No newline" marker belongs to the last line of the body.
    if (!have_pending && pos < diff_text.size() && diff_text[pos] == '\\') {
      std::string_view marker;
      std::size_t marker_at = 0;
      next_line(marker, marker_at);
      if (!h.lines.empty()) h.lines.back().no_newline = true;
    }
    if (old_seen < h.old_len || new_seen < h.new_len) {
      if (mode == ParseMode::strict) {
        result.errors.push_back({header_offset, "hunk body shorter than header counts"});
        continue;
      }
      h.old_len = old_seen;
      h.new_len = new_seen;
      h.old_len_omitted = false;
      h.new_len_omitted = false;
    }
    result.hunks.push_back(std::move(h));
  }
  return result;
}

inline std::string serialize_hunk_header(const DiffHunk& h) {
  std::string out = "@@ -" + std::to_string(h.old_start);
  if (!h.old_len_omitted || h.old_len != 1) out += "," + std::to_string(h.old_len);
  out += " +" + std::to_string(h.new_start);
  if (!h.new_len_omitted || h.new_len != 1) out += "," + std::to_string(h.new_len);
  out += " @@";
  out += h.section;
  return out;
}

inline std::string serialize_hunk(const DiffHunk& h) {
  std::string out = serialize_hunk_header(h);
  out += '\n';
  for (const auto& l : h.lines) {
    if (!l.bare) {
      switch (l.kind) {
        case LineKind::context: out += ' '; break;
        case LineKind::added: out += '+'; break;
        case LineKind::removed: out += '-'; break;
      }
      out += l.text;
    }
    out += '\n';
    if (l.no_newline) out += "\\ No newline at end of file\n";
  }
  return out;
}

inline std::string serialize_hunks(const std::vector<DiffHunk>& hunks) {
  std::string out;
  for (const auto& h : hunks) out += serialize_hunk(h);
  return out;
}

// Copy of h with both header starts moved by -shift; used to present a hunk
// in the coordinates of an excerpt that begins at file line shift + 1.
inline DiffHunk rebase_hunk(DiffHunk h, int shift) {
  if (h.old_start > 0) h.old_start = std::max(1, h.old_start - shift);
  if (h.new_start > 0) h.new_start = std::max(1, h.new_start - shift);
  return h;
}

}  // namespace melcot::context
