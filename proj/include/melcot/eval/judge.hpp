#pragma once

#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "melcot/augment/augment.hpp"
#include "melcot/core/error.hpp"
#include "melcot/core/text.hpp"
#include "melcot/eval/metrics.hpp"
#include "melcot/llm/client.hpp"
#include "melcot/llm/template.hpp"

namespace melcot::eval {

inline std::string build_judge_prompt(const std::string& generated, const std::string& reference,
                                      const llm::Template& tpl) {
  if (text::trim(generated).empty()) throw Error(Errc::invalid_argument, "empty generated review");
  if (text::trim(reference).empty()) throw Error(Errc::invalid_argument, "empty reference review");
  tpl.validate("body", {"generated", "reference"}, {"generated", "reference"});
  return tpl.render("body", {{"generated", generated}, {"reference", reference}});
}

// YES/NO from the first word of the reply, ignoring case, punctuation and
// markdown emphasis.
inline std::optional<bool> parse_verdict(std::string_view raw) {
  auto body = augment::strip_think(raw);
  std::size_t i = 0;
  while (i < body.size() && !std::isalpha(static_cast<unsigned char>(body[i]))) ++i;
  std::size_t j = i;
  while (j < body.size() && std::isalpha(static_cast<unsigned char>(body[j]))) ++j;
  auto word = text::to_lower(std::string_view(body).substr(i, j - i));
  if (word == "yes") return true;
  if (word == "no") return false;
  return std::nullopt;
}

struct JudgeOptions {
  int max_attempts = 3;
  std::uint32_t seed = 0;
  int retry_delay_ms = 0;
};

// Asks the judge up to max_attempts times (seed + attempt). A reply that
// never parses, or an unreachable judge, yields a miss with judge_failed set.
inline HitVerdict judge(llm::Generator& gen, const std::string& sample_id,
                        const std::string& generated, const std::string& reference,
                        const llm::Template& tpl, const llm::GenConfig& cfg,
                        const JudgeOptions& opt = {}) {
  HitVerdict v;
  v.sample_id = sample_id;
  auto prompt = build_judge_prompt(generated, reference, tpl);
  for (int attempt = 0; attempt < std::max(opt.max_attempts, 1); ++attempt) {
    llm::ChatRequest req{{}, prompt, cfg, opt.seed + static_cast<std::uint32_t>(attempt)};
    std::string reply;
    try {
      reply = gen.generate(req);
    } catch (const Error& e) {
      if (e.code() != Errc::endpoint) throw;
      v.judge_raw = std::string("error: ") + e.what();
      if (opt.retry_delay_ms > 0)
        std::this_thread::sleep_for(std::chrono::milliseconds(opt.retry_delay_ms << attempt));
      continue;
    }
    v.judge_raw = reply;
    if (auto verdict = parse_verdict(reply)) {
      v.hit = *verdict;
      return v;
    }
  }
  if (v.judge_raw.empty()) v.judge_raw = "error: no reply";
  v.hit = false;
  v.judge_failed = true;
  return v;
}

}  // namespace melcot::eval
