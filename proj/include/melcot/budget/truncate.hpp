#pragma once

#include <algorithm>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "melcot/budget/tokens.hpp"
#include "melcot/context/reconstruct.hpp"
#include "melcot/core/error.hpp"
#include "melcot/core/line_set.hpp"
#include "melcot/core/text.hpp"

namespace melcot::budget {

using json = nlohmann::json;

inline constexpr int kWindowLines = 3;

// A sample whose code context fits the token budget. Line coordinates
// (diff_span, label_lines) are relative to context_text; context_start_line
// is the file line of its first line.
struct TruncatedSample {
  context::ReconstructedSample source;
  std::string context_text;
  int context_start_line = 1;
  context::LineSpan diff_span;
  LineSet label_lines;
  bool was_truncated = false;
  std::size_t token_count = 0;

  const std::string& sample_id() const { return source.sample_id; }
  // The hunk with its header lines expressed in context coordinates.
  context::DiffHunk local_hunk() const {
    return context::rebase_hunk(source.hunk, context_start_line - 1);
  }
};

inline TruncatedSample untruncated(const context::ReconstructedSample& s,
                                   const TokenCounter& counter) {
  TruncatedSample t;
  t.source = s;
  t.context_text = s.context.source_text;
  t.context_start_line = s.context.start_line;
  t.diff_span = {s.hunk_span.start - s.context.start_line + 1,
                 s.hunk_span.end - s.context.start_line + 1};
  t.label_lines = s.label_lines;
  t.token_count = counter.count(t.context_text);
  return t;
}

// Keeps the context when it fits the budget; otherwise cuts it down to the
// hunk plus three lines on each side (fewer at the context edges). Throws
// budget_too_small when even that window is over budget and
// label_outside_window when a label line would be cut away.
inline TruncatedSample truncate_context(const TruncatedSample& in, const TokenCounter& counter,
                                        std::size_t budget = 1000) {
  if (budget < 1) throw Error(Errc::invalid_argument, "budget must be >= 1");
  TruncatedSample out = in;
  out.token_count = counter.count(in.context_text);
  if (out.token_count <= budget) return out;

  auto lines = text::split_lines(in.context_text);
  int n = static_cast<int>(lines.size());
  int first = std::max(1, in.diff_span.start - kWindowLines);
  int last = std::min(n, in.diff_span.end + kWindowLines);
  std::string window = context::slice_lines(lines, first, last);
  std::size_t cost = counter.count(window);
  if (cost > budget)
    throw Error(Errc::budget_too_small, "window of " + std::to_string(cost) +
                                            " tokens exceeds budget " + std::to_string(budget));
  std::vector<int> labels;
  for (int l : in.label_lines) {
    if (l < first || l > last)
      throw Error(Errc::label_outside_window, "label line " + std::to_string(l) +
                                                  " outside kept window");
    labels.push_back(l - first + 1);
  }
  out.context_text = std::move(window);
  out.context_start_line = in.context_start_line + first - 1;
  out.diff_span = {in.diff_span.start - first + 1, in.diff_span.end - first + 1};
  out.label_lines = LineSet(std::move(labels));
  out.was_truncated = true;
  out.token_count = cost;
  return out;
}

inline TruncatedSample truncate_context(const context::ReconstructedSample& s,
                                        const TokenCounter& counter, std::size_t budget = 1000) {
  return truncate_context(untruncated(s, counter), counter, budget);
}

inline json to_json(const TruncatedSample& t) {
  json j = context::to_json(t.source);
  j["context_text"] = t.context_text;
  j["context_start_line"] = t.context_start_line;
  j["diff_span"] = {t.diff_span.start, t.diff_span.end};
  j["label_lines"] = t.label_lines.lines();
  j["source_label_lines"] = t.source.label_lines.lines();
  j["was_truncated"] = t.was_truncated;
  j["token_count"] = t.token_count;
  return j;
}

inline TruncatedSample truncated_sample_from_json(const json& j) {
  try {
    json src = j;
    src["label_lines"] = j.at("source_label_lines");
    TruncatedSample t;
    t.source = context::reconstructed_sample_from_json(src);
    t.context_text = j.at("context_text").get<std::string>();
    t.context_start_line = j.at("context_start_line").get<int>();
    t.diff_span = {j.at("diff_span").at(0).get<int>(), j.at("diff_span").at(1).get<int>()};
    t.label_lines = LineSet(j.at("label_lines").get<std::vector<int>>());
    t.was_truncated = j.at("was_truncated").get<bool>();
    t.token_count = j.at("token_count").get<std::size_t>();
    return t;
  } catch (const json::exception& ex) {
    throw Error(Errc::data_validation, std::string("truncated sample: ") + ex.what());
  }
}

}  // namespace melcot::budget
