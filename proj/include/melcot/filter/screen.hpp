#pragma once

#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "melcot/augment/augment.hpp"
#include "melcot/context/reconstruct.hpp"
#include "melcot/core/error.hpp"
#include "melcot/core/parallel.hpp"
#include "melcot/filter/rules.hpp"
#include "melcot/llm/client.hpp"
#include "melcot/llm/template.hpp"

namespace melcot::filter {

using json = nlohmann::json;

inline constexpr std::string_view kScreenRule = "screen";

// KEEP or REJECT:<Category>; anything else is nullopt.
inline std::optional<FilterVerdict> parse_screen_reply(std::string_view raw) {
  auto body = augment::strip_think(raw);
  std::size_t end = 0;
  while (end < body.size() && !std::isspace(static_cast<unsigned char>(body[end]))) ++end;
  std::string token = body.substr(0, end);
  while (!token.empty() && (token.back() == '.' || token.back() == '*' || token.back() == '`'))
    token.pop_back();
  while (!token.empty() && (token.front() == '*' || token.front() == '`')) token.erase(0, 1);
  auto lower = text::to_lower(token);
  if (lower == "keep") return FilterVerdict{};
  if (lower.rfind("reject:", 0) != 0) return std::nullopt;
  auto cat = category_from_string(std::string_view(token).substr(7));
  if (!cat || *cat == Category::none) return std::nullopt;
  return FilterVerdict{Decision::reject, *cat, std::string(kScreenRule)};
}

struct ScreenOptions {
  // Attempts at a well-formed reply; each uses seed + attempt.
  int max_attempts = 3;
  std::uint32_t seed = 0;
  // A missing reply degrades to rules-only instead of failing the stage.
  bool offline = false;
  llm::RetryPolicy transport{3, 0};
};

struct ScreenResult {
  FilterVerdict verdict;
  bool screened = false;
  std::string warning;
};

inline ScreenResult semantic_screen(llm::Generator& gen, std::string_view comment,
                                    const llm::Template& tpl, const llm::GenConfig& cfg,
                                    const ScreenOptions& opt = {}) {
  if (text::trim(comment).empty()) throw Error(Errc::invalid_argument, "empty comment");
  tpl.validate("body", {"comment"}, {"comment"});
  auto prompt = tpl.render("body", {{"comment", std::string(comment)}});
  ScreenResult res;
  int attempts = std::max(opt.max_attempts, 1);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    llm::ChatRequest req{{}, prompt, cfg, opt.seed + static_cast<std::uint32_t>(attempt)};
    std::string reply;
    try {
      reply = llm::with_retries(opt.transport, [&] { return gen.generate(req); }).value;
    } catch (const Error& e) {
      if (e.code() != Errc::endpoint || !opt.offline) throw;
      res.warning = std::string("screen unavailable, rules only: ") + e.what();
      return res;
    }
    if (auto v = parse_screen_reply(reply)) {
      res.verdict = *v;
      res.screened = true;
      return res;
    }
  }
  res.warning = "screen reply malformed after " + std::to_string(attempts) + " attempts, kept";
  return res;
}

struct FilterRow {
  std::string sample_id;
  FilterVerdict verdict;
  std::string source;  // "rules" or "screen"
  std::string warning;
};

inline json to_json(const FilterRow& r) {
  json j{{"sample_id", r.sample_id},
         {"decision", r.verdict.decision == Decision::keep ? "keep" : "reject"},
         {"category", std::string(to_string(r.verdict.category))},
         {"matched_rule", r.verdict.matched_rule},
         {"source", r.source}};
  if (!r.warning.empty()) j["warning"] = r.warning;
  return j;
}

struct FilterOutcome {
  std::vector<context::ReconstructedSample> kept;
  std::vector<FilterRow> rows;  // one per input, input order
  std::map<Category, std::size_t> rejected;
  std::size_t warnings = 0;

  std::size_t rejected_total() const {
    std::size_t n = 0;
    for (const auto& [c, k] : rejected) n += k;
    return n;
  }
};

// Screens the comment of a rule-kept sample; unset means rules only.
using Screener = std::function<ScreenResult(const std::string& comment)>;

inline FilterOutcome filter_corpus(const std::vector<context::ReconstructedSample>& samples,
                                   const RuleSet& rules = RuleSet::defaults(),
                                   const Screener& screen = {}, std::size_t workers = 1) {
  FilterOutcome out;
  out.rows.resize(samples.size());
  parallel_for(samples.size(), workers, [&](std::size_t i) {
    auto& row = out.rows[i];
    row.sample_id = samples[i].sample_id;
    row.source = "rules";
    row.verdict = classify_comment(samples[i].comment_text, rules);
    if (row.verdict.decision == Decision::keep && screen) {
      auto r = screen(samples[i].comment_text);
      row.warning = r.warning;
      if (r.screened) {
        row.verdict = r.verdict;
        row.source = "screen";
      }
    }
  });
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& row = out.rows[i];
    if (!row.warning.empty()) ++out.warnings;
    if (row.verdict.decision == Decision::keep) out.kept.push_back(samples[i]);
    else ++out.rejected[row.verdict.category];
  }
  return out;
}

}  // namespace melcot::filter
