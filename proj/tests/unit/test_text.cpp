#include <catch_amalgamated.hpp>

#include <map>
#include <random>

#include "harness.hpp"
#include "melcot/budget/tokens.hpp"
#include "melcot/budget/truncate.hpp"
#include "melcot/context/diff.hpp"
#include "melcot/filter/rules.hpp"
#include "melcot/filter/screen.hpp"
#include "melcot/llm/bundled.hpp"
#include "melcot/llm/cassette.hpp"
#include "melcot/llm/template.hpp"

using namespace melcot;
using context::LineKind;
using context::ParseMode;

namespace {

std::vector<std::string> hunks_of(const std::string& corpus) {
  std::vector<std::string> out;
  for (const auto& line : text::split_lines(corpus)) {
    if (line.rfind("@@", 0) == 0) out.emplace_back();
    out.back() += line + "\n";
  }
  return out;
}

struct LabelledComment {
  std::string expected;
  std::string text;
};

std::vector<LabelledComment> filter_fixture() {
  std::vector<LabelledComment> out;
  for (const auto& line : text::split_lines(testkit::slurp(testkit::fixtures() / "filter" / "comments.tsv"))) {
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    out.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  return out;
}

context::ReconstructedSample sample_with_comment(const std::string& id, const std::string& comment) {
  context::ReconstructedSample s;
  s.sample_id = id;
  s.comment_text = comment;
  return s;
}

}  // namespace

TEST_CASE("diff corpus round-trips byte for byte") {
  auto corpus = testkit::slurp(testkit::fixtures() / "diff" / "corpus.diff");
  REQUIRE(corpus.find("@@ -3 +3 @@\n") != std::string::npos);
  auto parsed = context::parse_unified_diff(corpus);
  CHECK(parsed.errors.empty());
  REQUIRE(parsed.hunks.size() == 50);
  CHECK(context::serialize_hunks(parsed.hunks) == corpus);

  auto pieces = hunks_of(corpus);
  REQUIRE(pieces.size() == 50);
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    auto one = context::parse_unified_diff(pieces[i]);
    REQUIRE(one.hunks.size() == 1);
    CHECK(context::serialize_hunk(one.hunks[0]) == pieces[i]);
    CHECK(one.hunks[0] == parsed.hunks[i]);
  }

  const auto& first = parsed.hunks[0];
  CHECK(first.old_len_omitted);
  CHECK(first.old_start == 3);
  CHECK(first.old_len == 1);
  CHECK(first.new_len == 1);
}

TEST_CASE("diff header forms and line kinds") {
  auto r = context::parse_unified_diff(
      "diff --git a/src/x.py b/src/x.py\n--- a/src/x.py\n+++ b/src/x.py\n"
      "@@ -10,3 +10,4 @@ def f():\n a\n-b\n+B\n+C\n c\n");
  REQUIRE(r.hunks.size() == 1);
  const auto& h = r.hunks[0];
  CHECK(h.file_path == "src/x.py");
  CHECK(h.section == " def f():");
  CHECK(h.old_span() == context::LineSpan{10, 12});
  CHECK(h.new_span() == context::LineSpan{10, 13});
  CHECK(h.old_side() == std::vector<std::string>{"a", "b", "c"});
  CHECK(h.new_side() == std::vector<std::string>{"a", "B", "C", "c"});

  auto ins = context::parse_unified_diff("@@ -0,0 +1,2 @@\n+x\n+y\n");
  REQUIRE(ins.hunks.size() == 1);
  CHECK(ins.hunks[0].old_span() == context::LineSpan{1, 1});

  auto nonl = context::parse_unified_diff("@@ -1 +1 @@\n-a\n\\ No newline at end of file\n+b\n");
  REQUIRE(nonl.hunks.size() == 1);
  CHECK(nonl.hunks[0].lines[0].no_newline);
  CHECK_FALSE(nonl.hunks[0].lines[1].no_newline);
}

TEST_CASE("malformed hunks are reported and skipped") {
  std::string text =
      "@@ -1,2 +1,2 @@\n a\n-b\n+c\n"
      "@@ -x +1 @@\n+q\n"
      "@@ -5,3 +5,3 @@\n a\n b\n"
      "@@ -9 +9 @@\n-z\n+Z\n";
  auto strict = context::parse_unified_diff(text);
  CHECK(strict.hunks.size() == 2);
  REQUIRE(strict.errors.size() == 2);
  CHECK(strict.errors[0].offset == text.find("@@ -x"));
  CHECK(strict.errors[1].offset == text.find("@@ -5,3"));

  auto partial = context::parse_unified_diff("@@ -5,6 +5,7 @@\n a\n b\n+c\n", ParseMode::partial);
  REQUIRE(partial.hunks.size() == 1);
  CHECK(partial.hunks[0].old_len == 2);
  CHECK(partial.hunks[0].new_len == 3);

  auto over = context::parse_unified_diff("@@ -1 +1 @@\n a\n b\n");
  CHECK(over.hunks.size() == 1);
  CHECK(over.errors.empty());
}

TEST_CASE("fallback token counter") {
  budget::FallbackCounter c;
  CHECK(c.count("") == 0);
  CHECK(c.count("int x = 42;") == 5);
  CHECK(c.count("foo_bar(baz)") == 4);
  CHECK(c.count("  \n\t ") == 0);
  CHECK(c.count("caf\xc3\xa9") == 2);
  CHECK(c.count("\xe2\x86\x92\xe2\x86\x92") == 2);
}

TEST_CASE("bpe token counter") {
  testkit::TempDir dir;
  io::write_file(dir / "tok.json",
                 R"({"model": {"vocab": {}, "merges": ["h e", "l l", "he ll", "hell o"]}})");
  auto c = budget::make_counter((dir / "tok.json").string());
  CHECK(c->count("hello") == 1);
  CHECK(c->count("hell") == 1);
  CHECK(c->count("help") == 3);
  CHECK(c->count("hello hello") == 1 + 2);
  CHECK(c->count("hi") == 2);
  io::write_file(dir / "bad.json", "{}");
  CHECK_THROWS_AS(budget::make_counter((dir / "bad.json").string()), Error);
  CHECK_THROWS_AS(budget::make_counter((dir / "missing.json").string()), Error);
}

TEST_CASE("truncation properties over random fixtures") {
  budget::FallbackCounter counter;
  std::mt19937 rng(77);
  auto uni = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); };
  int truncated = 0, kept = 0, refused = 0;
  for (int round = 0; round < 500; ++round) {
    int n = uni(1, 80);
    std::vector<std::string> lines;
    for (int i = 0; i < n; ++i) {
      std::string l;
      for (int w = uni(0, 8); w > 0; --w) l += "tok" + std::to_string(uni(0, 99)) + (uni(0, 1) ? " " : "(");
      lines.push_back(l);
    }
    budget::TruncatedSample in;
    in.context_text = text::join_lines(lines);
    in.context_start_line = uni(1, 300);
    int s = uni(1, n), e = std::min(n, s + uni(0, 6));
    in.diff_span = {s, e};
    std::vector<int> labels;
    for (int l = s; l <= e; ++l)
      if (uni(0, 2)) labels.push_back(l);
    if (labels.empty()) labels.push_back(s);
    in.label_lines = LineSet(labels);

    std::size_t full = counter.count(in.context_text);
    int first = std::max(1, s - 3), last = std::min(n, e + 3);
    std::string window;
    for (int l = first; l <= last; ++l) window += lines[static_cast<std::size_t>(l - 1)] + "\n";
    std::size_t wcost = counter.count(window);
    std::size_t budget = static_cast<std::size_t>(uni(1, static_cast<int>(full) + 20));

    if (wcost > budget && full > budget) {
      try {
        budget::truncate_context(in, counter, budget);
        FAIL("window over budget accepted");
      } catch (const Error& err) {
        CHECK(err.code() == Errc::budget_too_small);
      }
      ++refused;
      continue;
    }
    auto out = budget::truncate_context(in, counter, budget);
    CHECK(out.token_count <= budget);
    if (full <= budget) {
      ++kept;
      CHECK_FALSE(out.was_truncated);
      CHECK(out.context_text == in.context_text);
      CHECK(out.diff_span == in.diff_span);
      CHECK(out.label_lines == in.label_lines);
      continue;
    }
    ++truncated;
    CHECK(out.was_truncated);
    CHECK(out.context_text == window);
    CHECK(out.context_start_line == in.context_start_line + first - 1);
    CHECK(out.diff_span == context::LineSpan{s - first + 1, e - first + 1});
    auto out_lines = text::split_lines(out.context_text);
    for (int l = s; l <= e; ++l)
      CHECK(out_lines[static_cast<std::size_t>(l - first)] == lines[static_cast<std::size_t>(l - 1)]);
    for (int l : in.label_lines)
      CHECK(out.label_lines.contains(l - first + 1));
    CHECK(out.label_lines.size() == in.label_lines.size());
    CHECK(out.diff_span.start - 1 == s - first);
    CHECK(out_lines.size() - static_cast<std::size_t>(out.diff_span.end) ==
          static_cast<std::size_t>(last - e));

    auto again = budget::truncate_context(out, counter, budget);
    CHECK(again.context_text == out.context_text);
    CHECK(again.context_start_line == out.context_start_line);
    CHECK(again.diff_span == out.diff_span);
    CHECK(again.label_lines == out.label_lines);
  }
  CHECK(truncated > 50);
  CHECK(kept > 50);
  CHECK(refused > 10);
}

TEST_CASE("truncation keeps labels inside the window") {
  budget::FallbackCounter counter;
  budget::TruncatedSample in;
  std::vector<std::string> lines(40, "a b c d e");
  in.context_text = text::join_lines(lines);
  in.diff_span = {20, 21};
  in.label_lines = LineSet{2, 20};
  try {
    budget::truncate_context(in, counter, 50);
    FAIL("label outside window accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::label_outside_window);
  }
  CHECK_THROWS_AS(budget::truncate_context(in, counter, 0), Error);
}

TEST_CASE("rule fixture classifies every comment") {
  auto fixture = filter_fixture();
  std::map<std::string, int> per_category;
  for (const auto& c : fixture) {
    ++per_category[c.expected];
    auto v = filter::classify_comment(c.text);
    INFO(c.text);
    CHECK(std::string(filter::to_string(v.category)) == c.expected);
    CHECK((v.decision == filter::Decision::keep) == (c.expected == "none"));
  }
  for (auto cat : filter::kRuleOrder) CHECK(per_category[std::string(filter::to_string(cat))] >= 6);
  CHECK(fixture.size() >= 36);
}

TEST_CASE("filter_corpus conserves counts") {
  std::vector<context::ReconstructedSample> samples;
  auto fixture = filter_fixture();
  for (std::size_t i = 0; i < fixture.size(); ++i)
    samples.push_back(sample_with_comment("s" + std::to_string(i), fixture[i].text));
  auto out = filter::filter_corpus(samples, filter::RuleSet::defaults(), {}, 4);
  CHECK(out.kept.size() + out.rejected_total() == samples.size());
  CHECK(out.rows.size() == samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) CHECK(out.rows[i].sample_id == samples[i].sample_id);
  for (auto cat : filter::kRuleOrder) CHECK(out.rejected[cat] >= 6);
}

TEST_CASE("rule files") {
  CHECK(testkit::slurp(testkit::source_root() / "rules" / "filter-rules.tsv") ==
        std::string(filter::kDefaultRules));
  auto custom = filter::RuleSet::parse("x\tMention\t^hey$\ny\tUrlReference\tftp://\n");
  CHECK(custom.rules().front().category == filter::Category::UrlReference);
  CHECK(filter::classify_comment("HEY", custom).category == filter::Category::Mention);
  CHECK(filter::classify_comment("see ftp://host", custom).matched_rule == "y");
  CHECK_THROWS_AS(filter::RuleSet::parse("x\tNoSuch\tabc\n"), Error);
  CHECK_THROWS_AS(filter::RuleSet::parse("x\tMention\t(\n"), Error);
  CHECK_THROWS_AS(filter::RuleSet::parse("only two\tfields\n"), Error);
  CHECK_THROWS_AS(filter::classify_comment("   "), Error);
}

TEST_CASE("screen replies") {
  using filter::Category;
  CHECK(filter::parse_screen_reply("KEEP")->decision == filter::Decision::keep);
  CHECK(filter::parse_screen_reply("**REJECT:Confirmation**")->category == Category::Confirmation);
  CHECK(filter::parse_screen_reply("reject:mention.")->category == Category::Mention);
  CHECK_FALSE(filter::parse_screen_reply("REJECT:Spam").has_value());
  CHECK_FALSE(filter::parse_screen_reply("I think we should keep it").has_value());
}

TEST_CASE("semantic screen through a cassette") {
  llm::Template tpl(std::string(llm::kScreenTemplate), "screen");
  llm::GenConfig cfg;
  auto prompt = tpl.render("body", {{"comment", "thanks, will do"}});
  auto cassette = std::make_shared<llm::Cassette>();
  cassette->add({llm::ChatRequest{{}, prompt, cfg, 9}.key(), 9, "REJECT:Confirmation", {}});
  llm::CassetteGenerator gen(cassette, llm::CassetteMode::replay);

  filter::ScreenOptions opt;
  opt.seed = 9;
  auto r = filter::semantic_screen(gen, "thanks, will do", tpl, cfg, opt);
  CHECK(r.screened);
  CHECK(r.verdict.decision == filter::Decision::reject);
  CHECK(r.verdict.category == filter::Category::Confirmation);
  CHECK(r.verdict.matched_rule == "screen");

  std::vector<context::ReconstructedSample> samples{sample_with_comment("a", "thanks, will do"),
                                                    sample_with_comment("b", "Done.")};
  auto out = filter::filter_corpus(samples, filter::RuleSet::defaults(), [&](const std::string& c) {
    return filter::semantic_screen(gen, c, tpl, cfg, opt);
  });
  CHECK(out.kept.empty());
  CHECK(out.rejected[filter::Category::Confirmation] == 2);
  CHECK(out.rows[0].source == "screen");
  CHECK(out.rows[1].source == "rules");
}

TEST_CASE("malformed screen replies keep the comment with a warning") {
  llm::Template tpl(std::string(llm::kScreenTemplate), "screen");
  testkit::ScriptedGenerator gen({"maybe", "not sure", "REJECT:Nonsense"});
  filter::ScreenOptions opt;
  opt.seed = 100;
  auto r = filter::semantic_screen(gen, "Rename this variable.", tpl, {}, opt);
  CHECK_FALSE(r.screened);
  CHECK(r.verdict.decision == filter::Decision::keep);
  CHECK_FALSE(r.warning.empty());
  CHECK(gen.seeds == std::vector<std::uint32_t>{100, 101, 102});

  std::vector<context::ReconstructedSample> samples{sample_with_comment("a", "Rename this variable.")};
  testkit::ScriptedGenerator gen2({"??"});
  auto out = filter::filter_corpus(samples, filter::RuleSet::defaults(), [&](const std::string& c) {
    return filter::semantic_screen(gen2, c, tpl, {}, opt);
  });
  CHECK(out.kept.size() == 1);
  CHECK(out.warnings == 1);
}

TEST_CASE("offline screen without a reply degrades to rules") {
  llm::Template tpl(std::string(llm::kScreenTemplate), "screen");
  llm::CassetteGenerator gen(std::make_shared<llm::Cassette>(), llm::CassetteMode::replay);
  filter::ScreenOptions opt;
  opt.offline = true;
  opt.transport = {1, 0};
  auto r = filter::semantic_screen(gen, "Rename this variable.", tpl, {}, opt);
  CHECK_FALSE(r.screened);
  CHECK(r.warning.find("rules only") != std::string::npos);
  opt.offline = false;
  CHECK_THROWS_AS(filter::semantic_screen(gen, "Rename this variable.", tpl, {}, opt), Error);
}

TEST_CASE("bundled templates match the shipped files") {
  auto dir = testkit::source_root() / "templates";
  CHECK(testkit::slurp(dir / "enhance.txt") == std::string(llm::kEnhanceTemplate));
  CHECK(testkit::slurp(dir / "review-longcot.txt") == std::string(llm::kLongCotTemplate));
  CHECK(testkit::slurp(dir / "review-regular.txt") == std::string(llm::kRegularCotTemplate));
  CHECK(testkit::slurp(dir / "judge.txt") == std::string(llm::kJudgeTemplate));
  CHECK(testkit::slurp(dir / "screen.txt") == std::string(llm::kScreenTemplate));
}

TEST_CASE("template sections, escapes and validation") {
  llm::Template t("intro {a}\n\n=== extra ===\n\nx {{literal}} {b}\n\n");
  CHECK(t.section("body") == "intro {a}");
  CHECK(t.render("extra", {{"b", "B"}}) == "x {literal} B");
  CHECK(t.placeholders("body") == std::vector<std::string>{"a"});
  CHECK_NOTHROW(t.validate("body", {"a"}, {"a"}));
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::io;
  };
  CHECK(code_of([&] { t.validate("body", {"z"}, {}); }) == Errc::template_error);
  CHECK(code_of([&] { t.validate("body", {"a", "c"}, {"c"}); }) == Errc::template_error);
  CHECK(code_of([&] { t.render("body", {}); }) == Errc::template_error);
  CHECK(code_of([&] { t.section("nope"); }) == Errc::template_error);
  CHECK(code_of([] { llm::Template("oops {unterminated"); }) == Errc::io);
  CHECK(code_of([] { llm::Template("oops {unterminated").placeholders("body"); }) ==
        Errc::template_error);
  CHECK(code_of([] { llm::Template("a }"); }) == Errc::io);
  CHECK(code_of([] { llm::Template("a }").render("body", {}); }) == Errc::template_error);
  CHECK(code_of([] { llm::Template("=== x ===\na\n=== x ===\nb\n"); }) == Errc::template_error);
}
