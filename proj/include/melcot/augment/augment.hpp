#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "melcot/budget/truncate.hpp"
#include "melcot/context/language.hpp"
#include "melcot/core/error.hpp"
#include "melcot/core/hash.hpp"
#include "melcot/core/line_set.hpp"
#include "melcot/core/text.hpp"
#include "melcot/llm/client.hpp"
#include "melcot/llm/template.hpp"

namespace melcot::augment {

using json = nlohmann::json;

inline const std::set<std::string> kEnhanceAllowed{"code",     "diff",        "raw_comment",
                                                   "language", "file_path",   "label_lines"};
inline const std::set<std::string> kEnhanceRequired{"code", "diff", "raw_comment"};

// Removes <think>...</think> reasoning blocks that reasoning models prepend.
inline std::string strip_think(std::string_view s) {
  std::string out(s);
  for (;;) {
    auto open = out.find("<think>");
    auto close = out.find("</think>");
    if (close == std::string::npos) break;
    std::size_t from = open == std::string::npos || open > close ? 0 : open;
    out.erase(from, close + 8 - from);
  }
  return std::string(text::trim(out));
}

struct EnhancementQuery {
  std::string query_id;
  std::string code_context;  // numbered code lines
  std::string diff_text;     // hunk in context coordinates
  std::string raw_comment;
  std::string template_id;
  std::string language;
  std::string file_path;
  std::string project;
  std::string commit_ref;
  LineSet label_lines;
};

inline EnhancementQuery make_query(const budget::TruncatedSample& s, std::string template_id) {
  EnhancementQuery q;
  q.query_id = s.sample_id();
  q.code_context = text::render_numbered(s.context_text);
  q.diff_text = context::serialize_hunk(s.local_hunk());
  q.raw_comment = s.source.comment_text;
  q.template_id = std::move(template_id);
  q.language = std::string(context::to_string(s.source.context.language));
  q.file_path = s.source.file_path;
  q.project = s.source.project;
  q.commit_ref = s.source.commit_ref;
  q.label_lines = s.label_lines;
  if (q.code_context.empty() || q.diff_text.empty() || text::trim(q.raw_comment).empty())
    throw Error(Errc::data_validation, "incomplete enhancement query " + q.query_id);
  return q;
}

inline std::string build_enhancement_prompt(const EnhancementQuery& q, const llm::Template& tpl) {
  tpl.validate("body", kEnhanceAllowed, kEnhanceRequired);
  return tpl.render("body", {{"code", q.code_context},
                             {"diff", q.diff_text},
                             {"raw_comment", q.raw_comment},
                             {"language", q.language},
                             {"file_path", q.file_path},
                             {"label_lines", format_line_ranges(q.label_lines)}});
}

inline std::string build_enhancement_prompt(const budget::TruncatedSample& s,
                                            const llm::Template& tpl) {
  return build_enhancement_prompt(make_query(s, tpl.origin()), tpl);
}

enum class Section { location, explanation, impact, suggestion };
inline constexpr std::array<std::pair<Section, std::string_view>, 4> kMarkers{
    {{Section::location, "LOCATION:"},
     {Section::explanation, "EXPLANATION:"},
     {Section::impact, "IMPACT:"},
     {Section::suggestion, "SUGGESTION:"}}};

constexpr std::string_view to_string(Section s) noexcept {
  switch (s) {
    case Section::location: return "location";
    case Section::explanation: return "explanation";
    case Section::impact: return "impact";
    case Section::suggestion: return "suggestion";
  }
  return "?";
}

struct VariantCheck {
  bool valid = false;
  std::vector<Section> missing;
};

// A marker counts when a line starts with it (leading whitespace allowed).
// Order is not checked.
inline VariantCheck validate_variant(std::string_view variant) {
  std::set<Section> present;
  for (const auto& line : text::split_lines(variant)) {
    auto t = text::trim(line);
    for (const auto& [sec, marker] : kMarkers)
      if (t.substr(0, marker.size()) == marker) present.insert(sec);
  }
  VariantCheck c;
  for (const auto& [sec, marker] : kMarkers)
    if (!present.count(sec)) c.missing.push_back(sec);
  c.valid = c.missing.empty();
  return c;
}

struct AnswerVariant {
  std::string query_id;
  int variant_index = 1;
  std::string text;
  std::uint32_t seed = 0;
};

struct DrawOptions {
  int n = 10;
  std::uint64_t base_seed = 0;
  // Attempts per variant before the group is declared incomplete.
  int max_attempts = 3;
  // Redraw byte-identical duplicates instead of keeping them.
  bool dedup = false;
  int retry_delay_ms = 0;
};

// Seed of attempt `attempt` (0-based) for variant `index` (1-based). Distinct
// indices and attempts never collide within a query.
inline std::uint32_t variant_seed(const std::string& query_id, std::uint64_t base_seed, int index,
                                  int attempt, int max_attempts) {
  std::uint64_t origin = splitmix64(fnv1a64(query_id) ^ base_seed) & 0x7fffffffULL;
  std::uint64_t offset = static_cast<std::uint64_t>(index - 1) *
                             static_cast<std::uint64_t>(max_attempts + 1) +
                         static_cast<std::uint64_t>(attempt);
  return static_cast<std::uint32_t>((origin + offset) % 0x80000000ULL);
}

struct DrawResult {
  std::vector<AnswerVariant> variants;
  int retries = 0;
  int duplicates = 0;
};

// n draws for one query, ordered by variant index. Invalid or failed draws
// are retried with a fresh seed; a variant that never validates makes the
// whole group incomplete (Errc::incomplete_group).
inline DrawResult sample_variants(llm::Generator& gen, const std::string& query_id,
                                  const std::string& prompt, const llm::GenConfig& cfg,
                                  const DrawOptions& opt) {
  if (opt.n < 1) throw Error(Errc::invalid_argument, "n must be >= 1");
  DrawResult out;
  std::set<std::string> seen;
  for (int index = 1; index <= opt.n; ++index) {
    bool accepted = false;
    std::string last_problem;
    for (int attempt = 0; attempt < opt.max_attempts && !accepted; ++attempt) {
      llm::ChatRequest req{{}, prompt, cfg,
                           variant_seed(query_id, opt.base_seed, index, attempt, opt.max_attempts)};
      if (attempt > 0) ++out.retries;
      std::string text;
      try {
        text = strip_think(gen.generate(req));
      } catch (const Error& e) {
        if (e.code() != Errc::endpoint) throw;
        last_problem = e.what();
        if (opt.retry_delay_ms > 0)
          std::this_thread::sleep_for(std::chrono::milliseconds(opt.retry_delay_ms << attempt));
        continue;
      }
      auto check = validate_variant(text);
      if (!check.valid) {
        last_problem = "missing section " + std::string(to_string(check.missing.front()));
        continue;
      }
      bool dup = seen.count(text) > 0;
      if (dup && opt.dedup && attempt + 1 < opt.max_attempts) {
        last_problem = "duplicate";
        continue;
      }
      if (dup) ++out.duplicates;
      seen.insert(text);
      out.variants.push_back({query_id, index, std::move(text), req.seed});
      accepted = true;
    }
    if (!accepted)
      throw Error(Errc::incomplete_group, "group " + query_id + " variant " +
                                              std::to_string(index) + ": " + last_problem);
  }
  return out;
}

inline constexpr std::string_view kReviewInstruction =
    "Review the code change below. Identify the lines that contain an issue and write a review "
    "comment giving the location of the issue, an explanation of its root cause, its potential "
    "impact, and a suggested fix.";

struct InstructionRecord {
  std::string group_id;
  int variant_index = 1;
  std::uint32_t seed = 0;
  std::string instruction;
  std::string input;
  std::string output;
  std::string project;
  std::string commit_ref;
  std::string language;
  std::string file_path;
  LineSet label_lines;
};

inline json to_json(const InstructionRecord& r) {
  return json{{"group_id", r.group_id},
              {"variant_index", r.variant_index},
              {"seed", r.seed},
              {"instruction", r.instruction},
              {"input", r.input},
              {"output", r.output},
              {"metadata",
               {{"project", r.project},
                {"commit_ref", r.commit_ref},
                {"language", r.language},
                {"file_path", r.file_path},
                {"label_lines", r.label_lines.lines()}}}};
}

inline std::string instruction_input(const EnhancementQuery& q) {
  return "Language: " + q.language + "\nFile: " + q.file_path + "\n\nCode:\n" + q.code_context +
         "\nDiff:\n" + q.diff_text;
}

// One record per variant, ordered by variant index. Refuses anything but a
// complete group of n valid variants with distinct indices.
inline std::vector<InstructionRecord> emit_instruction_records(
    const EnhancementQuery& q, const std::vector<AnswerVariant>& variants, int n) {
  if (static_cast<int>(variants.size()) != n)
    throw Error(Errc::incomplete_group, "group " + q.query_id + " has " +
                                            std::to_string(variants.size()) + " of " +
                                            std::to_string(n) + " variants");
  std::vector<const AnswerVariant*> sorted;
  for (const auto& v : variants) sorted.push_back(&v);
  std::sort(sorted.begin(), sorted.end(),
            [](auto* a, auto* b) { return a->variant_index < b->variant_index; });
  std::vector<InstructionRecord> out;
  for (int i = 0; i < n; ++i) {
    const auto& v = *sorted[static_cast<std::size_t>(i)];
    if (v.variant_index != i + 1)
      throw Error(Errc::incomplete_group, "group " + q.query_id + ": variant indices not 1.." +
                                              std::to_string(n));
    if (!validate_variant(v.text).valid)
      throw Error(Errc::incomplete_group, "group " + q.query_id + ": invalid variant " +
                                              std::to_string(v.variant_index));
    out.push_back({q.query_id, v.variant_index, v.seed, std::string(kReviewInstruction),
                   instruction_input(q), v.text, q.project, q.commit_ref, q.language,
                   q.file_path, q.label_lines});
  }
  return out;
}

inline int count_duplicates(const std::vector<AnswerVariant>& variants) {
  std::set<std::string> seen;
  int d = 0;
  for (const auto& v : variants)
    if (!seen.insert(v.text).second) ++d;
  return d;
}

}  // namespace melcot::augment
