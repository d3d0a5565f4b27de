#pragma once

#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "melcot/context/diff.hpp"
#include "melcot/context/git.hpp"
#include "melcot/ingest/events.hpp"

namespace melcot::ingest {

struct FixLink {
  std::string comment_id;
  std::string fix_commit;
  std::set<int> overlap_lines;
};

inline json to_json(const FixLink& f) {
  return json{{"comment_id", f.comment_id},
              {"fix_commit", f.fix_commit},
              {"overlap_lines", std::vector<int>(f.overlap_lines.begin(), f.overlap_lines.end())}};
}

// New-file span of the commented hunk. Review payloads carry a single hunk,
// possibly cut short at the commented line.
inline std::optional<context::LineSpan> commented_span(const ReviewEvent& e) {
  auto parsed = context::parse_unified_diff(e.diff_fragment, context::ParseMode::partial);
  if (parsed.hunks.empty()) return std::nullopt;
  return parsed.hunks.back().new_span();
}

// Earliest commit strictly after the comment that changes at least one line
// of the commented span in the same file. Commits with equal timestamps keep
// their input order.
inline std::optional<FixLink> link_fix_commits(const ReviewEvent& e,
                                               const std::vector<context::CommitChanges>& later) {
  auto span = commented_span(e);
  if (!span) return std::nullopt;
  const context::CommitChanges* best = nullptr;
  std::set<int> best_overlap;
  for (const auto& c : later) {
    if (c.time <= e.created_at) continue;
    if (best && c.time >= best->time) continue;
    auto it = c.changed.find(e.file_path);
    if (it == c.changed.end()) continue;
    std::set<int> overlap;
    for (int line : it->second)
      if (line >= span->start && line <= span->end) overlap.insert(line);
    if (overlap.empty()) continue;
    best = &c;
    best_overlap = std::move(overlap);
  }
  if (!best) return std::nullopt;
  return FixLink{e.comment_id, best->id, std::move(best_overlap)};
}

}  // namespace melcot::ingest
