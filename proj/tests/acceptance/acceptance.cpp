#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "harness.hpp"
#include "melcot/budget/tokens.hpp"
#include "melcot/budget/truncate.hpp"
#include "melcot/cli/cli.hpp"
#include "melcot/context/diff.hpp"
#include "melcot/context/enclosure.hpp"
#include "melcot/eval/metrics.hpp"
#include "melcot/eval/report.hpp"
#include "melcot/filter/rules.hpp"
#include "melcot/llm/bundled.hpp"
#include "melcot/review/review.hpp"

using namespace melcot;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

Outcome expect(bool ok, std::string detail) { return {ok, std::move(detail)}; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int digits = 2) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

int cli(std::vector<std::string> args, std::string* out = nullptr) {
  args.insert(args.begin(), "melcot");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  return code;
}

// One corpus recorded against the local mock endpoint; offline criteria
// replay its cassette.
struct Recorded {
  testkit::TempDir dir{"acceptance"};
  testkit::MockEndpoint mock;
  testkit::Corpus corpus;
  int record_code = -1;

  Recorded() {
    corpus = testkit::build_corpus(dir.path(), {{"offline", false}, {"endpoint", {{"base_url", mock.base_url()}}}});
    record_code = cli({"run", "-c", corpus.config.string()});
  }
  std::string config() const { return corpus.config.string(); }
  fs::path work() const { return dir / "work"; }
};

Recorded& recorded() {
  static Recorded r;
  return r;
}

Outcome iou_oracle() {
  std::mt19937 rng(1000);
  std::uniform_int_distribution<int> size(0, 50), line(1, 500);
  auto make = [&] {
    std::set<int> s;
    int n = size(rng);
    while (static_cast<int>(s.size()) < n) s.insert(line(rng));
    return s;
  };
  auto t0 = std::chrono::steady_clock::now();
  int mismatches = 0, pairs = 0;
  while (pairs < 1000) {
    auto a = make(), b = make();
    if (a.empty()) continue;
    ++pairs;
    std::set<int> u = a;
    u.insert(b.begin(), b.end());
    std::int64_t inter = 0;
    for (int x : a) inter += static_cast<std::int64_t>(b.count(x));
    auto q = eval::iou(LineSet(std::vector<int>(a.begin(), a.end())), LineSet(std::vector<int>(b.begin(), b.end())));
    if (q.num() * static_cast<std::int64_t>(u.size()) != inter * q.den()) ++mismatches;
  }
  double secs = seconds_since(t0);
  return expect(mismatches == 0 && secs < 5.0,
                std::to_string(pairs) + " pairs, " + std::to_string(mismatches) + " mismatches, " + fmt(secs, 3) + " s");
}

Outcome iou_anchors() {
  LineSet a{5, 6, 7};
  auto id = eval::iou(a, a), disjoint = eval::iou(a, LineSet{1, 2}), partial = eval::iou(a, LineSet{6, 7, 8, 9});
  bool ok = id.value() == 1.0 && disjoint.value() == 0.0 && partial.num() * 5 == partial.den() * 2;
  return expect(ok, "identity " + fmt(id.value()) + ", disjoint " + fmt(disjoint.value()) + ", overlap " +
                        fmt(partial.value()));
}

Outcome truncation() {
  budget::FallbackCounter counter;
  std::mt19937 rng(500);
  auto uni = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); };
  int failures = 0, cut = 0, unchanged = 0, refused = 0, clipped = 0;
  for (int round = 0; round < 500; ++round) {
    int n = uni(1, 80);
    std::vector<std::string> lines;
    for (int i = 0; i < n; ++i) {
      std::string l;
      for (int w = uni(0, 8); w > 0; --w) l += "w" + std::to_string(uni(0, 99)) + (uni(0, 1) ? " " : ".");
      lines.push_back(l);
    }
    budget::TruncatedSample in;
    in.context_text = text::join_lines(lines);
    in.context_start_line = uni(1, 200);
    int s = uni(1, n), e = std::min(n, s + uni(0, 6));
    in.diff_span = {s, e};
    in.label_lines = LineSet::range(s, e);
    int first = std::max(1, s - 3), last = std::min(n, e + 3);
    std::string window;
    for (int l = first; l <= last; ++l) window += lines[static_cast<std::size_t>(l - 1)] + "\n";
    std::size_t full = counter.count(in.context_text);
    std::size_t budget = static_cast<std::size_t>(uni(1, static_cast<int>(full) + 20));
    try {
      auto out = budget::truncate_context(in, counter, budget);
      bool ok;
      if (full <= budget) {
        ok = !out.was_truncated && out.context_text == in.context_text && out.diff_span == in.diff_span &&
             out.label_lines == in.label_lines;
        ++unchanged;
      } else {
        ok = out.was_truncated && out.context_text == window &&
             out.diff_span == context::LineSpan{s - first + 1, e - first + 1} &&
             out.label_lines == LineSet::range(s - first + 1, e - first + 1) &&
             out.context_start_line == in.context_start_line + first - 1 && out.token_count <= budget;
        auto again = budget::truncate_context(out, counter, budget);
        ok = ok && again.context_text == out.context_text && again.diff_span == out.diff_span &&
             again.label_lines == out.label_lines;
        ++cut;
        if (first == 1 || last == n) ++clipped;
      }
      if (!ok) ++failures;
    } catch (const Error& err) {
      bool ok = err.code() == Errc::budget_too_small && counter.count(window) > budget;
      if (!ok) ++failures;
      ++refused;
    }
  }
  return expect(failures == 0 && cut > 0 && unchanged > 0 && clipped > 0,
                "500 fixtures: " + std::to_string(cut) + " truncated (" + std::to_string(clipped) +
                    " at a file edge), " + std::to_string(unchanged) + " unchanged, " + std::to_string(refused) +
                    " refused, " + std::to_string(failures) + " failures");
}

Outcome enclosure() {
  int rows = 0, wrong = 0, not_innermost = 0, languages = 0;
  for (const auto& d : fs::directory_iterator(testkit::fixtures() / "enclosure")) {
    auto lang = *context::language_from_name(d.path().filename().string());
    std::set<std::string> files;
    for (const auto& line : text::split_lines(io::read_file(d.path() / "expect.tsv"))) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ss{std::string(line)};
      std::string file, kind;
      int s = 0, e = 0, us = 0, ue = 0;
      ss >> file >> s >> e >> kind >> us >> ue;
      files.insert(file);
      ++rows;
      auto src = io::read_file(d.path() / file);
      auto c = context::extract_enclosure(src, lang, {s, e});
      if (std::string(context::to_string(c.unit_kind)) != kind || c.start_line != us || c.end_line != ue) ++wrong;
      for (const auto& u : context::make_adapter(lang)->units(src))
        if (u.kind == c.unit_kind && u.start_line <= s && u.end_line >= e &&
            u.end_line - u.start_line < c.end_line - c.start_line)
          ++not_innermost;
    }
    if (files.size() >= 5) ++languages;
  }
  return expect(wrong == 0 && not_innermost == 0 && languages >= 6,
                std::to_string(rows) + " annotated spans over " + std::to_string(languages) + " languages, " +
                    std::to_string(wrong) + " mismatches, " + std::to_string(not_innermost) + " not innermost");
}

Outcome diff_round_trip() {
  auto corpus = io::read_file(testkit::fixtures() / "diff" / "corpus.diff");
  auto parsed = context::parse_unified_diff(corpus);
  bool has_short = corpus.find("@@ -3 +3 @@\n") != std::string::npos;
  bool same = context::serialize_hunks(parsed.hunks) == corpus;
  return expect(has_short && same && parsed.hunks.size() == 50 && parsed.errors.empty(),
                std::to_string(parsed.hunks.size()) + " hunks, " + (same ? "byte-identical" : "differs") +
                    (has_short ? ", short header present" : ", short header missing"));
}

Outcome filter_rules() {
  std::vector<context::ReconstructedSample> samples;
  std::vector<std::string> expected;
  for (const auto& line : text::split_lines(io::read_file(testkit::fixtures() / "filter" / "comments.tsv"))) {
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    context::ReconstructedSample s;
    s.sample_id = "c" + std::to_string(samples.size());
    s.comment_text = line.substr(tab + 1);
    samples.push_back(std::move(s));
    expected.push_back(line.substr(0, tab));
  }
  int wrong = 0;
  std::map<std::string, int> per_category;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    ++per_category[expected[i]];
    if (std::string(filter::to_string(filter::classify_comment(samples[i].comment_text).category)) != expected[i])
      ++wrong;
  }
  int thin = 0;
  for (auto cat : filter::kRuleOrder) thin += per_category[std::string(filter::to_string(cat))] < 6 ? 1 : 0;
  auto out = filter::filter_corpus(samples, filter::RuleSet::defaults(), {}, 4);
  bool conserved = out.kept.size() + out.rejected_total() == samples.size();
  return expect(wrong == 0 && thin == 0 && conserved && samples.size() >= 36,
                std::to_string(samples.size()) + " comments, " + std::to_string(wrong) + " misclassified, " +
                    std::to_string(thin) + " thin categories, counts " + (conserved ? "conserved" : "not conserved"));
}

Outcome me_dataset() {
  auto& r = recorded();
  if (r.record_code != 0) return expect(false, "recording run failed");
  std::vector<std::string> outputs;
  for (const char* name : {"augment-a", "augment-b"}) {
    auto w = r.dir / name;
    fs::create_directories(w);
    fs::copy_file(r.work() / "truncated.jsonl", w / "truncated.jsonl");
    int code = cli({"augment", "-c", r.config(), "--offline", "--n", "10", "--cassette",
                    (r.dir / "cassette.jsonl").string(), "--work-dir", w.string()});
    if (code != 0) return expect(false, std::string(name) + " exited " + std::to_string(code));
    outputs.push_back(io::read_file(w / "dataset.jsonl"));
  }
  std::map<std::string, std::set<std::uint32_t>> seeds;
  std::map<std::string, int> sizes;
  for (const auto& j : io::read_jsonl(r.dir / "augment-a" / "dataset.jsonl")) {
    auto g = j.at("group_id").get<std::string>();
    ++sizes[g];
    seeds[g].insert(j.at("seed").get<std::uint32_t>());
  }
  bool groups_ok = !sizes.empty();
  for (const auto& [g, n] : sizes) groups_ok = groups_ok && n == 10 && seeds[g].size() == 10;

  auto lines = text::split_lines(outputs[0]);
  auto victim = json::parse(lines[3]).at("group_id").get<std::string>();
  lines.erase(lines.begin() + 3);
  auto broken = r.dir / "nine.jsonl";
  io::write_file(broken, text::join_lines(lines));
  std::string report;
  int verify_code = cli({"verify", broken.string(), "--n", "10"}, &report);
  bool named = verify_code == 4 && json::parse(report)["issues"][0]["group_id"] == victim;
  bool identical = outputs[0] == outputs[1];
  return expect(groups_ok && identical && named,
                std::to_string(sizes.size()) + " groups of 10 with distinct seeds: " + (groups_ok ? "yes" : "no") +
                    ", reruns " + (identical ? "byte-identical" : "differ") + ", 9-variant group " +
                    (named ? "named " + victim : "not caught"));
}

Outcome ablation() {
  auto& r = recorded();
  if (r.record_code != 0) return expect(false, "recording run failed");
  auto sample = budget::truncated_sample_from_json(io::read_jsonl(r.work() / "truncated.jsonl").front());
  llm::Template tpl(std::string(llm::kLongCotTemplate), "review");
  std::vector<review::CotStepSet> configs{review::CotStepSet::full()};
  for (auto s : review::kAllSteps) configs.push_back(review::ablate_steps(review::CotStepSet::full(), s));
  int bad = 0;
  for (const auto& set : configs) {
    auto prompt = review::build_longcot_prompt(sample, set, tpl);
    std::size_t blocks = 0;
    for (auto at = prompt.find("(header \"## "); at != std::string::npos; at = prompt.find("(header \"## ", at + 1))
      ++blocks;
    bool ok = blocks == set.size();
    for (auto s : review::kAllSteps) {
      bool present = prompt.find("(header \"## " + std::string(review::title(s)) + "\")") != std::string::npos;
      ok = ok && present == set.contains(s);
    }
    bad += ok ? 0 : 1;
  }

  auto w = r.dir / "ablate";
  fs::create_directories(w);
  fs::copy_file(r.work() / "truncated.jsonl", w / "truncated.jsonl");
  int code = cli({"ablate", "-c", r.config(), "--all", "--work-dir", w.string()});
  int trace_bad = code == 0 ? 0 : 1;
  if (code == 0) {
    for (auto drop : review::kAllSteps) {
      for (const auto& j : io::read_jsonl(w / "ablation" / ("no-" + std::string(review::to_string(drop))) / "reviews.jsonl")) {
        const auto& t = j.at("trace");
        if (t.size() != 3 || t.contains(std::string(review::to_string(drop)))) ++trace_bad;
      }
    }
  }
  double expected_ratio = std::trunc((25.38 - 27.16) / 27.16 * 10000.0) / 100.0;
  std::string ratio = eval::format_ratio(27.16, 25.38);
  bool ratio_ok = ratio == "-6.55%" && std::abs(eval::ratio_percent(27.16, 25.38) - expected_ratio) < 1e-9;
  return expect(bad == 0 && trace_bad == 0 && ratio_ok,
                std::to_string(configs.size()) + " configurations, " + std::to_string(bad) +
                    " with wrong prompt blocks, " + std::to_string(trace_bad) + " ablation runs off, 27.16->25.38 = " +
                    ratio);
}

Outcome kappa() {
  std::vector<int> x, y;
  auto put = [&](int n, int u, int v) {
    for (int i = 0; i < n; ++i) {
      x.push_back(u);
      y.push_back(v);
    }
  };
  put(40, 1, 1);
  put(10, 1, 0);
  put(5, 0, 1);
  put(45, 0, 0);
  double po = 85.0 / 100.0, pe = 0.5 * 0.45 + 0.5 * 0.55;
  double oracle = (po - pe) / (1 - pe);
  double k = eval::cohens_kappa(x, y);
  double ident = eval::cohens_kappa(x, x);
  std::mt19937 rng(10000);
  std::bernoulli_distribution coin(0.5);
  std::vector<int> a, b;
  for (int i = 0; i < 10000; ++i) {
    a.push_back(coin(rng));
    b.push_back(coin(rng));
  }
  double noise = eval::cohens_kappa(a, b);
  bool ok = ident == 1.0 && std::abs(k - 0.7) < 1e-9 && std::abs(k - oracle) < 1e-12 && std::abs(noise) < 0.05;
  return expect(ok, "identical " + fmt(ident, 3) + ", table " + fmt(k, 12) + ", random " + fmt(noise, 4));
}

Outcome end_to_end() {
  auto& r = recorded();
  if (r.record_code != 0) return expect(false, "recording run failed");
  int calls_before = r.mock.calls();
  auto w = r.dir / "offline";
  auto t0 = std::chrono::steady_clock::now();
  int code = cli({"run", "-c", r.config(), "--offline", "--work-dir", w.string()});
  double secs = seconds_since(t0);
  if (code != 0) return expect(false, "offline run exited " + std::to_string(code));
  int unconserved = 0, manifests = 0;
  for (const auto& stage : pipeline::kStages) {
    if (stage == "ablate") continue;
    auto m = pipeline::manifest_from_json(json::parse(io::read_file(w / ("manifest-" + stage + ".json"))));
    ++manifests;
    unconserved += m.conserved() ? 0 : 1;
  }
  auto report = text::split_lines(io::read_file(w / "report.md"));
  bool shaped = report.size() >= 3 &&
                report[0] == "| Method | MelcotCR IoU | MelcotCR Hit Rate | MelcotCR Human Hit | MelcotCR Human Valuable |" &&
                report[2].rfind("| MelcotCR | ", 0) == 0;
  bool replayed = r.mock.calls() == calls_before &&
                  io::read_file(w / "report.md") == io::read_file(r.work() / "report.md");
  return expect(shaped && replayed && unconserved == 0 && secs < 60.0,
                std::to_string(manifests) + " manifests, " + std::to_string(unconserved) + " unconserved, report " +
                    (shaped ? "shaped" : "malformed") + ", offline " + (replayed ? "matches recording" : "diverged") +
                    ", " + fmt(secs, 2) + " s");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"iou-oracle", iou_oracle},   {"iou-anchors", iou_anchors}, {"truncation", truncation},
      {"enclosure", enclosure},     {"diff-round-trip", diff_round_trip}, {"filter-rules", filter_rules},
      {"me-dataset", me_dataset},   {"ablation", ablation},       {"kappa", kappa},
      {"end-to-end-offline", end_to_end}};
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << "\n";
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
