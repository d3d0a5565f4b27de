#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "melcot/core/error.hpp"
#include "melcot/core/io.hpp"
#include "melcot/core/text.hpp"

namespace melcot::filter {

enum class Category {
  none,
  SubmissionNotice,
  PullRequestEvent,
  UrlReference,
  Mention,
  Confirmation,
  TestSuggestion,
};

// Evaluation order of the rule categories.
inline constexpr std::array<Category, 6> kRuleOrder{
    Category::SubmissionNotice, Category::PullRequestEvent, Category::UrlReference,
    Category::Mention,          Category::Confirmation,     Category::TestSuggestion};

constexpr std::string_view to_string(Category c) noexcept {
  switch (c) {
    case Category::none: return "none";
    case Category::SubmissionNotice: return "SubmissionNotice";
    case Category::PullRequestEvent: return "PullRequestEvent";
    case Category::UrlReference: return "UrlReference";
    case Category::Mention: return "Mention";
    case Category::Confirmation: return "Confirmation";
    case Category::TestSuggestion: return "TestSuggestion";
  }
  return "?";
}

inline std::optional<Category> category_from_string(std::string_view s) {
  for (Category c : kRuleOrder)
    if (text::to_lower(to_string(c)) == text::to_lower(s)) return c;
  if (text::to_lower(s) == "none") return Category::none;
  return std::nullopt;
}

enum class Decision { keep, reject };

struct FilterVerdict {
  Decision decision = Decision::keep;
  Category category = Category::none;
  std::string matched_rule;

  bool operator==(const FilterVerdict&) const = default;
};

struct Rule {
  std::string id;
  Category category = Category::none;
  std::string pattern;
  std::regex re;
};

// Bundled rule set. Patterns are ECMAScript regular expressions matched
// case-insensitively against the whole comment (search, not full match).
inline constexpr std::string_view kDefaultRules = R"(# id	category	pattern
# Commit hashes: a 7-40 character hex word with at least one digit and one letter.
sub-hash	SubmissionNotice	(^|[^0-9a-z_])(?=[0-9a-f]*[0-9])(?=[0-9a-f]*[a-f])[0-9a-f]{7,40}($|[^0-9a-z_])
sub-bot	SubmissionNotice	^\s*(\[bot\]|this (commit|change) was (pushed|submitted|imported) (by|to))
pr-merged	PullRequestEvent	^\s*(merged|merging|landed|landing|closed|closing|reopened|reopening|opened|rebased)\b[^?]{0,60}$
pr-state	PullRequestEvent	^\s*(this|the)\s+(pr|pull request)\s+(has been|was|is|got)\s+(merged|closed|opened|reopened|superseded|reverted)\b
pr-superseded	PullRequestEvent	^\s*(superseded|replaced|obsoleted)\s+by\s+(#\d+|pr\b|pull request)
pr-opened	PullRequestEvent	^\s*(i\s+)?(opened|created|filed|sent)\s+(a\s+)?(new\s+)?(pr|pull request|#\d+)\b[^?]{0,60}$
url-http	UrlReference	https?://
url-www	UrlReference	(^|\s)www\.[a-z0-9-]+\.
mention-only	Mention	^\s*((cc|/cc|fyi|ping)\s*:?\s*)?(@[a-z0-9_][a-z0-9_.-]*[\s,:]*)+((can you|could you|would you|please)\s+)?(ptal|take a look|have a look|review|thoughts|wdyt|what do you think|any ideas|opinions?|fyi|ping|cc|please|ideas)?\s*[.!?]*\s*$
mention-cc	Mention	^\s*(cc|/cc|fyi|ping)\s*:?\s*(@[a-z0-9_][a-z0-9_.-]*[\s,]*)+[.!]*\s*$
confirm-status	Confirmation	^\s*(done|fixed|addressed|resolved|updated|changed|applied|removed|reverted|ack|acknowledged)\b[^?]{0,50}$
confirm-catch	Confirmation	^\s*(good|nice)\s+catch\b[,!. ]*((done|fixed|addressed|updated|thanks?|thank you)[,!. ]*)*$
test-add	TestSuggestion	^\s*(nit:?\s*)?(please\s+|can you\s+|could you\s+|maybe\s+|should we\s+|let's\s+)?(add|write|include)\s+(a\s+|an\s+|some\s+|more\s+)?(unit\s+|integration\s+|regression\s+|e2e\s+)?tests?\b[^?.]{0,40}[?.!]*\s*$
test-missing	TestSuggestion	^\s*(this\s+)?(needs?|missing|requires?|lacks?)\s+(a\s+|some\s+|more\s+)?(unit\s+|integration\s+|regression\s+)?tests?\b[^?.]{0,30}[?.!]*\s*$
test-please	TestSuggestion	^\s*(tests?|test coverage|a test)\s+(please|would be nice|would be good|here)\b[^?.]{0,20}[?.!]*\s*$
test-what-about	TestSuggestion	^\s*(what about|how about|any)\s+(a\s+|some\s+)?(unit\s+)?tests?\b[^.]{0,20}[?.!]*\s*$
)";

class RuleSet {
 public:
  static RuleSet parse(std::string_view tsv, const std::string& origin = "<rules>") {
    RuleSet rs;
    int lineno = 0;
    for (const auto& raw : text::split_lines(tsv)) {
      ++lineno;
      auto line = text::trim(raw);
      if (line.empty() || line.front() == '#') continue;
      auto t1 = raw.find('\t');
      auto t2 = t1 == std::string::npos ? std::string::npos : raw.find('\t', t1 + 1);
      if (t2 == std::string::npos)
        throw Error(Errc::config, origin + ":" + std::to_string(lineno) +
                                      ": expected id<TAB>category<TAB>pattern");
      Rule r;
      r.id = std::string(text::trim(std::string_view(raw).substr(0, t1)));
      auto cat = category_from_string(text::trim(std::string_view(raw).substr(t1 + 1, t2 - t1 - 1)));
      if (!cat || *cat == Category::none)
        throw Error(Errc::config, origin + ":" + std::to_string(lineno) + ": unknown category");
      r.category = *cat;
      r.pattern = raw.substr(t2 + 1);
      try {
        r.re = std::regex(r.pattern, std::regex::ECMAScript | std::regex::icase |
                                         std::regex::optimize);
      } catch (const std::regex_error& ex) {
        throw Error(Errc::config, origin + ":" + std::to_string(lineno) + ": bad pattern: " +
                                      ex.what());
      }
      rs.rules_.push_back(std::move(r));
    }
    // Category order first, file order within a category.
    std::stable_sort(rs.rules_.begin(), rs.rules_.end(), [](const Rule& a, const Rule& b) {
      return static_cast<int>(a.category) < static_cast<int>(b.category);
    });
    return rs;
  }

  static RuleSet load(const std::filesystem::path& path) {
    return parse(io::read_file(path), path.string());
  }

  static const RuleSet& defaults() {
    static const RuleSet rs = parse(kDefaultRules, "<bundled rules>");
    return rs;
  }

  const std::vector<Rule>& rules() const noexcept { return rules_; }

 private:
  std::vector<Rule> rules_;
};

// First matching rule in category order decides; no match keeps the comment.
inline FilterVerdict classify_comment(std::string_view comment,
                                      const RuleSet& rules = RuleSet::defaults()) {
  auto t = text::trim(comment);
  if (t.empty()) throw Error(Errc::invalid_argument, "empty comment");
  std::string s(t);
  for (const auto& r : rules.rules())
    if (std::regex_search(s, r.re)) return {Decision::reject, r.category, r.id};
  return {};
}

}  // namespace melcot::filter
