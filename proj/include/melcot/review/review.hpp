#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "melcot/augment/augment.hpp"
#include "melcot/budget/truncate.hpp"
#include "melcot/core/error.hpp"
#include "melcot/core/line_set.hpp"
#include "melcot/core/text.hpp"
#include "melcot/llm/client.hpp"
#include "melcot/llm/template.hpp"

namespace melcot::review {

using json = nlohmann::json;

enum class CotStep { summary, key_code_flows, diff_analyze, issue_check };

inline constexpr std::array<CotStep, 4> kAllSteps{CotStep::summary, CotStep::key_code_flows,
                                                  CotStep::diff_analyze, CotStep::issue_check};

// Command-line spelling.
constexpr std::string_view to_string(CotStep s) noexcept {
  switch (s) {
    case CotStep::summary: return "summary";
    case CotStep::key_code_flows: return "key-code-flows";
    case CotStep::diff_analyze: return "diff-analyze";
    case CotStep::issue_check: return "issue-check";
  }
  return "?";
}

// Heading used in prompts, outputs and report rows.
constexpr std::string_view title(CotStep s) noexcept {
  switch (s) {
    case CotStep::summary: return "Summary";
    case CotStep::key_code_flows: return "Key code flows";
    case CotStep::diff_analyze: return "Diff analyze";
    case CotStep::issue_check: return "Issue check";
  }
  return "?";
}

inline std::string section_name(CotStep s) {
  std::string n(to_string(s));
  for (auto& c : n)
    if (c == '-') c = '_';
  return "step:" + n;
}

inline std::optional<CotStep> step_from_string(std::string_view s) {
  auto n = text::to_lower(text::trim(s));
  for (auto& c : n)
    if (c == '_' || c == ' ') c = '-';
  for (CotStep st : kAllSteps)
    if (n == to_string(st)) return st;
  if (n == "diff-analyse") return CotStep::diff_analyze;
  return std::nullopt;
}

// Ordered subset of the four steps; iteration follows the canonical order.
class CotStepSet {
 public:
  CotStepSet() = default;
  CotStepSet(std::initializer_list<CotStep> steps) {
    for (auto s : steps) bits_ |= bit(s);
  }
  static CotStepSet full() { return {CotStep::summary, CotStep::key_code_flows,
                                     CotStep::diff_analyze, CotStep::issue_check}; }

  bool contains(CotStep s) const noexcept { return (bits_ & bit(s)) != 0; }
  bool empty() const noexcept { return bits_ == 0; }
  std::size_t size() const noexcept {
    std::size_t n = 0;
    for (auto s : kAllSteps) n += contains(s) ? 1 : 0;
    return n;
  }
  std::vector<CotStep> steps() const {
    std::vector<CotStep> out;
    for (auto s : kAllSteps)
      if (contains(s)) out.push_back(s);
    return out;
  }
  CotStepSet with(CotStep s) const {
    CotStepSet r = *this;
    r.bits_ |= bit(s);
    return r;
  }
  CotStepSet without(CotStep s) const {
    CotStepSet r = *this;
    r.bits_ &= static_cast<unsigned>(~bit(s));
    return r;
  }
  bool operator==(const CotStepSet&) const = default;

 private:
  static unsigned bit(CotStep s) noexcept { return 1u << static_cast<unsigned>(s); }
  unsigned bits_ = 0;
};

inline CotStepSet ablate_steps(const CotStepSet& full, CotStep drop) {
  if (!full.contains(drop))
    throw Error(Errc::invalid_argument, "step " + std::string(to_string(drop)) + " not in set");
  return full.without(drop);
}

inline const std::set<std::string> kReviewAllowed{"code", "diff", "steps", "language",
                                                  "file_path"};

struct PromptInputs {
  std::string code;
  std::string diff;
  std::string language;
  std::string file_path;
};

inline PromptInputs prompt_inputs(const budget::TruncatedSample& s) {
  return {text::render_numbered(s.context_text), context::serialize_hunk(s.local_hunk()),
          std::string(context::to_string(s.source.context.language)), s.source.file_path};
}

inline std::string build_longcot_prompt(const PromptInputs& in, const CotStepSet& steps,
                                        const llm::Template& tpl) {
  if (steps.empty()) throw Error(Errc::invalid_argument, "empty step set");
  tpl.validate("body", kReviewAllowed, {"code", "diff", "steps"});
  std::string blocks;
  int index = 0;
  for (CotStep s : steps.steps()) {
    auto name = section_name(s);
    tpl.validate(name, {"index"}, {});
    if (!blocks.empty()) blocks += "\n\n";
    blocks += tpl.render(name, {{"index", std::to_string(++index)}});
  }
  return tpl.render("body", {{"code", in.code},
                             {"diff", in.diff},
                             {"steps", blocks},
                             {"language", in.language},
                             {"file_path", in.file_path}});
}

inline std::string build_longcot_prompt(const budget::TruncatedSample& s, const CotStepSet& steps,
                                        const llm::Template& tpl) {
  return build_longcot_prompt(prompt_inputs(s), steps, tpl);
}

// Single-pass prompt without step blocks (locate, describe, repair).
inline std::string build_regular_prompt(const PromptInputs& in, const llm::Template& tpl) {
  tpl.validate("body", kReviewAllowed, {"code", "diff"});
  return tpl.render("body", {{"code", in.code},
                             {"diff", in.diff},
                             {"steps", ""},
                             {"language", in.language},
                             {"file_path", in.file_path}});
}

inline llm::Attempted<std::string> run_review(llm::Generator& gen, const std::string& prompt,
                                              const llm::GenConfig& cfg, std::uint32_t seed,
                                              const llm::RetryPolicy& policy) {
  llm::ChatRequest req{{}, prompt, cfg, seed};
  try {
    return llm::with_retries(policy, [&] { return gen.generate(req); });
  } catch (const Error& e) {
    if (e.code() == Errc::endpoint) throw Error(Errc::generation_failed, e.what());
    throw;
  }
}

struct ReviewOutput {
  std::string sample_id;
  LineSet predict_lines;
  std::string comment;
  std::map<CotStep, std::string> trace;
  std::string raw;
};

namespace detail {

// Strips markdown emphasis and heading marks in front of a label.
inline std::string_view unmark(std::string_view line) {
  auto t = text::trim(line);
  while (!t.empty() && (t.front() == '*' || t.front() == '_' || t.front() == '#' || t.front() == '>'))
    t.remove_prefix(1);
  return text::trim(t);
}

inline std::optional<std::string_view> after_label(std::string_view line, std::string_view label) {
  auto t = unmark(line);
  if (!text::istarts_with(t, label)) return std::nullopt;
  auto rest = t.substr(label.size());
  while (!rest.empty() && (rest.front() == '*' || rest.front() == '_')) rest.remove_prefix(1);
  return text::trim(rest);
}

inline std::optional<CotStep> step_heading(std::string_view line) {
  auto t = text::trim(line);
  if (t.substr(0, 2) != "##") return std::nullopt;
  auto h = text::to_lower(unmark(t));
  while (!h.empty() && (h.back() == ':' || h.back() == '*')) h.pop_back();
  for (CotStep s : kAllSteps)
    if (h == text::to_lower(title(s))) return s;
  if (h == "diff analysis") return CotStep::diff_analyze;
  return std::nullopt;
}

// Leading run of numbers, ranges and separators ("12, 40-44 in foo" -> "12, 40-44").
inline std::string_view line_list_prefix(std::string_view s) {
  std::size_t k = 0;
  while (k < s.size() && (std::isdigit(static_cast<unsigned char>(s[k])) || s[k] == ',' ||
                          s[k] == '-' || s[k] == ' ' || s[k] == '\t'))
    ++k;
  auto p = text::trim(s.substr(0, k));
  while (!p.empty() && (p.back() == ',' || p.back() == '-')) p.remove_suffix(1);
  return p;
}

}  // namespace detail

// Reads the answer block (last "LINES:" line, then "COMMENT:" and everything
// after it) and any "## <step>" trace sections before it.
inline ReviewOutput parse_review_output(std::string_view raw, std::string sample_id = {}) {
  ReviewOutput out;
  out.sample_id = std::move(sample_id);
  out.raw = std::string(raw);
  auto body = augment::strip_think(raw);
  auto lines = text::split_lines(body);

  std::optional<std::size_t> lines_at;
  for (std::size_t k = lines.size(); k-- > 0;)
    if (detail::after_label(lines[k], "LINES:")) {
      lines_at = k;
      break;
    }
  if (!lines_at) throw Error(Errc::parse_failed, "no LINES: line");
  auto spec = *detail::after_label(lines[*lines_at], "LINES:");
  std::string lower = text::to_lower(spec);
  if (lower.rfind("none", 0) == 0 || lower.empty() || lower == "-" || lower == "n/a") {
    out.predict_lines = {};
  } else {
    auto prefix = detail::line_list_prefix(spec);
    if (prefix.empty()) throw Error(Errc::parse_failed, "unreadable LINES: " + std::string(spec));
    out.predict_lines = parse_line_ranges(prefix);
  }

  std::optional<std::size_t> comment_at;
  for (std::size_t k = *lines_at + 1; k < lines.size(); ++k)
    if (detail::after_label(lines[k], "COMMENT:")) {
      comment_at = k;
      break;
    }
  if (!comment_at) throw Error(Errc::parse_failed, "no COMMENT: after LINES:");
  std::string comment(*detail::after_label(lines[*comment_at], "COMMENT:"));
  for (std::size_t k = *comment_at + 1; k < lines.size(); ++k) {
    comment += '\n';
    comment += lines[k];
  }
  out.comment = std::string(text::trim(comment));
  if (out.comment.empty()) throw Error(Errc::parse_failed, "empty COMMENT");

  std::optional<CotStep> current;
  std::string buf;
  auto flush = [&] {
    if (current) out.trace[*current] = std::string(text::trim(buf));
    buf.clear();
  };
  for (std::size_t k = 0; k < *lines_at; ++k) {
    if (auto s = detail::step_heading(lines[k])) {
      flush();
      current = s;
      continue;
    }
    if (current) {
      buf += lines[k];
      buf += '\n';
    }
  }
  flush();
  return out;
}

inline std::string format_review_output(const ReviewOutput& r) {
  std::string out;
  for (const auto& [step, text] : r.trace) {
    out += "## ";
    out += title(step);
    out += "\n";
    out += text;
    out += "\n\n";
  }
  out += "LINES: " + format_line_ranges(r.predict_lines) + "\n";
  out += "COMMENT: " + r.comment + "\n";
  return out;
}

enum class ReviewStatus { ok, generation_failed, parse_failed };

constexpr std::string_view to_string(ReviewStatus s) noexcept {
  switch (s) {
    case ReviewStatus::ok: return "ok";
    case ReviewStatus::generation_failed: return "generation_failed";
    case ReviewStatus::parse_failed: return "parse_failed";
  }
  return "?";
}

struct ReviewRecord {
  std::string sample_id;
  ReviewStatus status = ReviewStatus::ok;
  ReviewOutput output;
  int retries = 0;
  std::string error;
};

inline json to_json(const ReviewRecord& r) {
  json trace = json::object();
  for (const auto& [step, text] : r.output.trace) trace[std::string(to_string(step))] = text;
  json j{{"sample_id", r.sample_id},
         {"status", to_string(r.status)},
         {"predict_lines", r.output.predict_lines.lines()},
         {"comment", r.output.comment},
         {"trace", trace},
         {"raw", r.output.raw},
         {"retries", r.retries}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

inline ReviewRecord review_record_from_json(const json& j) {
  try {
    ReviewRecord r;
    r.sample_id = j.at("sample_id").get<std::string>();
    auto st = j.at("status").get<std::string>();
    if (st == "ok") r.status = ReviewStatus::ok;
    else if (st == "generation_failed") r.status = ReviewStatus::generation_failed;
    else if (st == "parse_failed") r.status = ReviewStatus::parse_failed;
    else throw Error(Errc::data_validation, "unknown review status " + st);
    r.output.sample_id = r.sample_id;
    r.output.predict_lines = LineSet(j.at("predict_lines").get<std::vector<int>>());
    r.output.comment = j.at("comment").get<std::string>();
    for (const auto& [k, v] : j.at("trace").items())
      if (auto s = step_from_string(k)) r.output.trace[*s] = v.get<std::string>();
    r.output.raw = j.at("raw").get<std::string>();
    r.retries = j.value("retries", 0);
    r.error = j.value("error", "");
    return r;
  } catch (const json::exception& ex) {
    throw Error(Errc::data_validation, std::string("review record: ") + ex.what());
  }
}

}  // namespace melcot::review
