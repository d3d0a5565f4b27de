#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "melcot/context/diff.hpp"
#include "melcot/context/enclosure.hpp"
#include "melcot/context/git.hpp"
#include "melcot/context/language.hpp"
#include "melcot/core/error.hpp"
#include "melcot/core/line_set.hpp"
#include "melcot/core/text.hpp"
#include "melcot/ingest/events.hpp"

namespace melcot::context {

using json = nlohmann::json;

struct PrecommitState {
  std::string commit;
  std::string text;
  // File line where the hunk's old-side lines were found.
  int old_start = 1;
};

// First line (1-based) at which `needle` occurs verbatim as consecutive lines
// of `hay`, trying `hint` before scanning from the top.
inline std::optional<int> find_lines(const std::vector<std::string>& hay,
                                     const std::vector<std::string>& needle, int hint) {
  auto at = [&](int start) {
    if (start < 1 || start - 1 + needle.size() > hay.size()) return false;
    for (std::size_t k = 0; k < needle.size(); ++k)
      if (hay[static_cast<std::size_t>(start - 1) + k] != needle[k]) return false;
    return true;
  };
  if (at(hint)) return hint;
  for (int s = 1; s + static_cast<int>(needle.size()) - 1 <= static_cast<int>(hay.size()); ++s)
    if (at(s)) return s;
  return std::nullopt;
}

// Walks first-parent history back from commit_ref and returns the first
// state of file_path containing the hunk's old-side lines verbatim. A state
// with the lines at the position named in the hunk header wins over an
// earlier state where they only appear elsewhere.
inline PrecommitState locate_precommit_state(const GitRepo& repo, const std::string& commit_ref,
                                             const std::string& file_path, const DiffHunk& hunk,
                                             int max_depth = 32) {
  auto commit = repo.resolve(commit_ref);
  if (!commit) throw Error(Errc::commit_not_found, "commit not found: " + commit_ref);
  auto history = repo.ancestors(*commit, max_depth);
  if (history.empty())
    throw Error(Errc::state_mismatch, "no history before " + commit_ref + " (truncated)");

  auto old_lines = hunk.old_side();
  int hint = hunk.old_start;
  bool file_seen = false;
  std::optional<PrecommitState> relocated;
  for (const auto& ancestor : history) {
    auto text = repo.file_at(ancestor, file_path);
    if (!text) continue;
    file_seen = true;
    auto lines = text::split_lines(*text);
    if (old_lines.empty()) {
      // Pure insertion: any state with enough lines is consistent.
      if (hunk.old_start <= static_cast<int>(lines.size()))
        return {ancestor, std::move(*text), hunk.old_start};
      continue;
    }
    auto found = find_lines(lines, old_lines, hint);
    if (!found) continue;
    if (*found == hint) return {ancestor, std::move(*text), *found};
    if (!relocated) relocated = PrecommitState{ancestor, std::move(*text), *found};
  }
  if (relocated) return std::move(*relocated);
  if (!file_seen) throw Error(Errc::file_not_found, file_path + " absent before " + commit_ref);
  throw Error(Errc::state_mismatch, "old-side lines of " + file_path + " not found before " +
                                        commit_ref);
}

struct ReconstructedSample {
  std::string sample_id;
  std::string project;
  int pr_number = 0;
  std::string commit_ref;
  std::string parent_ref;
  std::string file_path;
  DiffHunk hunk;  // file coordinates of the pre-commit state
  LineSpan hunk_span;
  EnclosingContext context;
  std::string comment_text;
  LineSet label_lines;  // 1 = first line of context
};

inline json to_json(const ReconstructedSample& s) {
  return json{{"sample_id", s.sample_id},
              {"project", s.project},
              {"pr_number", s.pr_number},
              {"commit_ref", s.commit_ref},
              {"parent_ref", s.parent_ref},
              {"file_path", s.file_path},
              {"language", to_string(s.context.language)},
              {"diff", serialize_hunk(s.hunk)},
              {"hunk_span", {s.hunk_span.start, s.hunk_span.end}},
              {"context",
               {{"unit_kind", to_string(s.context.unit_kind)},
                {"start_line", s.context.start_line},
                {"end_line", s.context.end_line},
                {"text", s.context.source_text}}},
              {"comment", s.comment_text},
              {"label_lines", s.label_lines.lines()}};
}

inline DiffHunk hunk_from_text(const std::string& text, const std::string& path) {
  auto parsed = parse_unified_diff(text);
  if (parsed.hunks.size() != 1 || !parsed.errors.empty())
    throw Error(Errc::data_validation, "expected exactly one hunk");
  auto h = std::move(parsed.hunks.front());
  h.file_path = path;
  return h;
}

inline ReconstructedSample reconstructed_sample_from_json(const json& j) {
  try {
    ReconstructedSample s;
    s.sample_id = j.at("sample_id").get<std::string>();
    s.project = j.at("project").get<std::string>();
    s.pr_number = j.at("pr_number").get<int>();
    s.commit_ref = j.at("commit_ref").get<std::string>();
    s.parent_ref = j.at("parent_ref").get<std::string>();
    s.file_path = j.at("file_path").get<std::string>();
    auto lang = language_from_name(j.at("language").get<std::string>());
    if (!lang) throw Error(Errc::data_validation, "unknown language");
    s.hunk = hunk_from_text(j.at("diff").get<std::string>(), s.file_path);
    s.hunk_span = {j.at("hunk_span").at(0).get<int>(), j.at("hunk_span").at(1).get<int>()};
    const auto& c = j.at("context");
    s.context.language = *lang;
    s.context.unit_kind = unit_kind_from_string(c.at("unit_kind").get<std::string>());
    s.context.start_line = c.at("start_line").get<int>();
    s.context.end_line = c.at("end_line").get<int>();
    s.context.source_text = c.at("text").get<std::string>();
    s.comment_text = j.at("comment").get<std::string>();
    s.label_lines = LineSet(j.at("label_lines").get<std::vector<int>>());
    return s;
  } catch (const json::exception& ex) {
    throw Error(Errc::data_validation, std::string("sample: ") + ex.what());
  }
}

inline std::string make_sample_id(const ingest::ReviewEvent& e) {
  return e.project + "#" + std::to_string(e.pr_number) + "/" + e.comment_id;
}

// Event -> sample: language gate, hunk decode, pre-commit state lookup and
// enclosure extraction. Throws an Error whose code names the drop reason.
inline ReconstructedSample reconstruct_sample(const ingest::ReviewEvent& e, const GitRepo& repo,
                                              int max_depth = 32) {
  Language lang = detect_language(e.file_path);
  if (text::trim(e.comment_text).empty()) throw Error(Errc::malformed, "empty comment");
  auto parsed = parse_unified_diff(e.diff_fragment, ParseMode::partial);
  if (parsed.hunks.empty()) throw Error(Errc::malformed, "no hunk in diff fragment");
  DiffHunk hunk = parsed.hunks.back();
  hunk.file_path = e.file_path;

  auto state = locate_precommit_state(repo, e.commit_ref, e.file_path, hunk, max_depth);
  int shift = hunk.old_len == 0 ? 0 : state.old_start - hunk.old_start;
  hunk.old_start += shift;
  hunk.new_start += shift;
  LineSpan span = hunk.old_span();
  int file_lines = static_cast<int>(text::count_lines(state.text));
  if (file_lines == 0) throw Error(Errc::span_out_of_range, "empty file");
  span.end = std::min(span.end, file_lines);
  span.start = std::min(span.start, span.end);

  ReconstructedSample s;
  s.sample_id = make_sample_id(e);
  s.project = e.project;
  s.pr_number = e.pr_number;
  s.commit_ref = e.commit_ref;
  s.parent_ref = state.commit;
  s.file_path = e.file_path;
  s.hunk = std::move(hunk);
  s.hunk_span = span;
  s.context = extract_enclosure(state.text, lang, span);
  s.comment_text = e.comment_text;
  s.label_lines = LineSet::range(span.start - s.context.start_line + 1,
                                 span.end - s.context.start_line + 1);
  return s;
}

}  // namespace melcot::context
