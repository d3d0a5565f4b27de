#pragma once

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "melcot/augment/augment.hpp"
#include "melcot/augment/dataset.hpp"
#include "melcot/budget/tokens.hpp"
#include "melcot/budget/truncate.hpp"
#include "melcot/context/git.hpp"
#include "melcot/context/reconstruct.hpp"
#include "melcot/core/error.hpp"
#include "melcot/core/hash.hpp"
#include "melcot/core/io.hpp"
#include "melcot/core/parallel.hpp"
#include "melcot/eval/judge.hpp"
#include "melcot/eval/metrics.hpp"
#include "melcot/eval/report.hpp"
#include "melcot/filter/rules.hpp"
#include "melcot/filter/screen.hpp"
#include "melcot/ingest/events.hpp"
#include "melcot/ingest/fixlink.hpp"
#include "melcot/llm/cassette.hpp"
#include "melcot/llm/client.hpp"
#include "melcot/pipeline/config.hpp"
#include "melcot/review/review.hpp"

namespace melcot::pipeline {

struct Manifest {
  std::string stage;
  long long input_count = 0;
  long long output_count = 0;
  std::map<std::string, long long> drops;
  long long wall_time_ms = 0;
  json extra = json::object();

  long long dropped() const {
    long long n = 0;
    for (const auto& [k, v] : drops) n += v;
    return n;
  }
  bool conserved() const { return input_count == output_count + dropped(); }
};

inline json to_json(const Manifest& m) {
  return json{{"stage", m.stage},
              {"input_count", m.input_count},
              {"output_count", m.output_count},
              {"drops", m.drops},
              {"wall_time_ms", m.wall_time_ms},
              {"extra", m.extra}};
}

inline Manifest manifest_from_json(const json& j) {
  Manifest m;
  m.stage = j.at("stage").get<std::string>();
  m.input_count = j.at("input_count").get<long long>();
  m.output_count = j.at("output_count").get<long long>();
  m.drops = j.at("drops").get<std::map<std::string, long long>>();
  m.wall_time_ms = j.value("wall_time_ms", 0LL);
  m.extra = j.value("extra", json::object());
  return m;
}

inline const std::vector<std::string> kStages{"ingest",   "reconstruct", "filter", "truncate",
                                              "augment",  "review",      "eval",   "ablate"};

inline std::uint32_t derive_seed(std::uint64_t base, std::string_view purpose, std::string_view id) {
  std::string key(purpose);
  key += '\n';
  key += id;
  return static_cast<std::uint32_t>(splitmix64(fnv1a64(key) ^ base) & 0x7fffffffULL);
}

namespace detail {

inline fs::path require_input(const fs::path& p, const std::string& stage) {
  if (!fs::exists(p))
    throw Error(Errc::stage_order, stage + " needs " + p.filename().string() +
                                       "; run the producing stage first");
  return p;
}

template <class T, class Fn>
std::vector<T> read_records(const fs::path& p, Fn&& decode) {
  std::vector<T> out;
  for (const auto& j : io::read_jsonl(p)) out.push_back(decode(j));
  return out;
}

}  // namespace detail

// The generator a stage talks to, with cassette bookkeeping. Offline runs
// replay the cassette only; online runs with a cassette replay what is
// recorded and record the rest.
class Endpoint {
 public:
  explicit Endpoint(const PipelineConfig& cfg) : cfg_(cfg) {
    if (cfg.cassette) {
      cassette_ = std::make_shared<llm::Cassette>(llm::Cassette::load(*cfg.cassette));
      if (cfg.offline) {
        gen_ = std::make_shared<llm::CassetteGenerator>(cassette_, llm::CassetteMode::replay);
      } else {
        recorder_ = std::make_shared<llm::CassetteGenerator>(
            cassette_, llm::CassetteMode::record,
            std::make_shared<llm::HttpGenerator>(cfg.endpoint));
        gen_ = recorder_;
      }
    } else {
      if (cfg.offline) throw Error(Errc::config, "offline mode needs a cassette");
      gen_ = std::make_shared<llm::HttpGenerator>(cfg.endpoint);
    }
  }

  static bool available(const PipelineConfig& cfg) { return cfg.cassette || !cfg.offline; }

  llm::Generator& generator() { return *gen_; }

  // Writes newly recorded replies back to the cassette file.
  void flush() {
    if (!recorder_ || recorder_->recorded().size() == 0) return;
    auto merged = llm::Cassette::load(*cfg_.cassette);
    merged.absorb(recorder_->recorded());
    merged.save(*cfg_.cassette);
    recorder_->recorded() = llm::Cassette();
  }

  ~Endpoint() {
    try {
      flush();
    } catch (...) {
    }
  }

 private:
  const PipelineConfig& cfg_;
  std::shared_ptr<llm::Cassette> cassette_;
  std::shared_ptr<llm::CassetteGenerator> recorder_;
  std::shared_ptr<llm::Generator> gen_;
};

inline Manifest ingest_stage(const PipelineConfig& cfg) {
  Manifest m;
  if (cfg.archive_dir.empty() || !fs::is_directory(cfg.archive_dir))
    throw Error(Errc::config, "archive_dir missing: " + cfg.archive_dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(cfg.archive_dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());

  std::vector<ingest::StreamResult> parts(files.size());
  std::vector<long long> lines(files.size(), 0);
  parallel_for(files.size(), cfg.concurrency, [&](std::size_t i) {
    io::LineReader reader(files[i]);
    std::string line;
    while (reader.next(line)) {
      if (line.empty()) continue;
      ++lines[i];
      ingest::parse_event_line(line, parts[i]);
    }
  });
  ingest::StatsAccumulator stats;
  std::vector<ingest::ReviewEvent> events;
  for (std::size_t i = 0; i < files.size(); ++i) {
    m.input_count += lines[i];
    m.drops["malformed"] += parts[i].skipped;
    m.drops["not_review_comment"] += parts[i].other;
    stats.merge(parts[i].stats);
    for (auto& e : parts[i].events) events.push_back(std::move(e));
  }
  auto project_rows = stats.stats();
  auto projects = ingest::filter_projects(project_rows, cfg.min_prs, cfg.min_comments);

  std::vector<const ingest::ReviewEvent*> candidates;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& e : events) {
    if (!seen.insert({e.project, e.comment_id}).second) ++m.drops["duplicate"];
    else if (e.created_at < cfg.date_from || e.created_at >= cfg.date_to) ++m.drops["out_of_date_range"];
    else if (!projects.count(e.project)) ++m.drops["below_project_threshold"];
    else candidates.push_back(&e);
  }

  // Later commits per (project, file); link_fix_commits ignores the ones
  // that are not after the comment.
  std::set<std::pair<std::string, std::string>> files_seen;
  for (const auto* e : candidates) files_seen.insert({e->project, e->file_path});
  std::vector<std::pair<std::string, std::string>> keys(files_seen.begin(), files_seen.end());
  std::vector<std::optional<std::vector<context::CommitChanges>>> found(keys.size());
  parallel_for(keys.size(), cfg.concurrency, [&](std::size_t i) {
    context::GitRepo repo(cfg.repos_dir / keys[i].first);
    if (!repo.valid()) return;
    found[i] = repo.commits_touching(keys[i].second, Timestamp{});
  });

  std::vector<json> kept, links;
  for (const auto* e : candidates) {
    auto k = std::lower_bound(keys.begin(), keys.end(), std::make_pair(e->project, e->file_path)) -
             keys.begin();
    if (!found[static_cast<std::size_t>(k)]) {
      ++m.drops["repo_missing"];
      continue;
    }
    auto link = ingest::link_fix_commits(*e, *found[static_cast<std::size_t>(k)]);
    if (!link) {
      ++m.drops["no_fix_commit"];
      continue;
    }
    kept.push_back(ingest::to_json(*e));
    links.push_back(ingest::to_json(*link));
  }
  std::string names;
  for (const auto& p : projects) names += p + "\n";
  fs::create_directories(cfg.work_dir);
  io::write_jsonl(cfg.work_dir / "events.jsonl", kept);
  io::write_jsonl(cfg.work_dir / "fixlinks.jsonl", links);
  io::write_file(cfg.work_dir / "projects.txt", names);
  m.output_count = static_cast<long long>(kept.size());
  m.extra = {{"archive_files", files.size()},
             {"review_comment_events", events.size()},
             {"projects_seen", project_rows.size()},
             {"projects_kept", projects.size()}};
  return m;
}

inline Manifest reconstruct_stage(const PipelineConfig& cfg) {
  Manifest m;
  auto in = detail::require_input(cfg.work_dir / "events.jsonl", "reconstruct");
  auto events = detail::read_records<ingest::ReviewEvent>(in, ingest::review_event_from_json);
  m.input_count = static_cast<long long>(events.size());
  std::vector<std::variant<context::ReconstructedSample, std::string>> results(events.size());
  parallel_for(events.size(), cfg.concurrency, [&](std::size_t i) {
    const auto& e = events[i];
    context::GitRepo repo(cfg.repos_dir / e.project);
    if (!repo.valid()) {
      results[i] = std::string("repo_missing");
      return;
    }
    try {
      results[i] = context::reconstruct_sample(e, repo, cfg.max_depth);
    } catch (const Error& err) {
      results[i] = std::string(to_string(err.code()));
    }
  });
  std::vector<json> out;
  for (auto& r : results) {
    if (auto* s = std::get_if<context::ReconstructedSample>(&r)) out.push_back(context::to_json(*s));
    else ++m.drops[std::get<std::string>(r)];
  }
  io::write_jsonl(cfg.work_dir / "samples.jsonl", out);
  m.output_count = static_cast<long long>(out.size());
  return m;
}

inline Manifest filter_stage(const PipelineConfig& cfg) {
  Manifest m;
  auto in = detail::require_input(cfg.work_dir / "samples.jsonl", "filter");
  auto samples = detail::read_records<context::ReconstructedSample>(
      in, context::reconstructed_sample_from_json);
  m.input_count = static_cast<long long>(samples.size());
  auto rules = cfg.rules ? filter::RuleSet::load(*cfg.rules) : filter::RuleSet::defaults();

  std::unique_ptr<Endpoint> endpoint;
  filter::Screener screener;
  std::optional<llm::Template> tpl;
  if (cfg.screen && Endpoint::available(cfg)) {
    endpoint = std::make_unique<Endpoint>(cfg);
    tpl = cfg.screen_template();
    screener = [&](const std::string& comment) {
      filter::ScreenOptions opt;
      opt.max_attempts = cfg.max_attempts;
      opt.seed = derive_seed(cfg.seed, "screen", comment);
      opt.offline = cfg.offline;
      opt.transport = {cfg.max_attempts, cfg.retry_delay_ms};
      return filter::semantic_screen(endpoint->generator(), comment, *tpl, cfg.gen_screen, opt);
    };
  }
  auto outcome = filter::filter_corpus(samples, rules, screener, cfg.concurrency);
  if (endpoint) endpoint->flush();

  std::vector<json> kept, report;
  for (const auto& s : outcome.kept) kept.push_back(context::to_json(s));
  for (const auto& r : outcome.rows) report.push_back(filter::to_json(r));
  io::write_jsonl(cfg.work_dir / "filtered.jsonl", kept);
  io::write_jsonl(cfg.work_dir / "filter-report.jsonl", report);
  for (const auto& [cat, n] : outcome.rejected)
    m.drops[std::string(filter::to_string(cat))] += static_cast<long long>(n);
  m.output_count = static_cast<long long>(kept.size());
  std::size_t screened = 0;
  for (const auto& r : outcome.rows) screened += r.source == "screen" ? 1 : 0;
  m.extra = {{"screen", static_cast<bool>(screener)},
             {"screen_verdicts", screened},
             {"warnings", outcome.warnings}};
  return m;
}

inline Manifest truncate_stage(const PipelineConfig& cfg) {
  Manifest m;
  auto in = detail::require_input(cfg.work_dir / "filtered.jsonl", "truncate");
  auto samples = detail::read_records<context::ReconstructedSample>(
      in, context::reconstructed_sample_from_json);
  m.input_count = static_cast<long long>(samples.size());
  auto counter = budget::make_counter(cfg.tokenizer);
  std::vector<std::variant<budget::TruncatedSample, std::string>> results(samples.size());
  parallel_for(samples.size(), cfg.concurrency, [&](std::size_t i) {
    try {
      results[i] = budget::truncate_context(samples[i], *counter, cfg.budget);
    } catch (const Error& e) {
      if (e.code() != Errc::budget_too_small && e.code() != Errc::label_outside_window) throw;
      results[i] = std::string(to_string(e.code()));
    }
  });
  std::vector<json> out;
  long long cut = 0;
  for (auto& r : results) {
    if (auto* t = std::get_if<budget::TruncatedSample>(&r)) {
      cut += t->was_truncated ? 1 : 0;
      out.push_back(budget::to_json(*t));
    } else {
      ++m.drops[std::get<std::string>(r)];
    }
  }
  io::write_jsonl(cfg.work_dir / "truncated.jsonl", out);
  m.output_count = static_cast<long long>(out.size());
  m.extra = {{"truncated", cut}, {"budget", cfg.budget}, {"tokenizer", counter->name()}};
  return m;
}

inline Manifest augment_stage(const PipelineConfig& cfg) {
  Manifest m;
  auto in = detail::require_input(cfg.work_dir / "truncated.jsonl", "augment");
  auto samples = detail::read_records<budget::TruncatedSample>(in, budget::truncated_sample_from_json);
  m.input_count = static_cast<long long>(samples.size());
  Endpoint endpoint(cfg);
  auto tpl = cfg.enhance_template();
  struct Group {
    std::vector<augment::InstructionRecord> records;
    int retries = 0, duplicates = 0;
    std::string drop;
  };
  std::vector<Group> groups(samples.size());
  parallel_for(samples.size(), cfg.concurrency, [&](std::size_t i) {
    try {
      auto q = augment::make_query(samples[i], "enhance");
      auto prompt = augment::build_enhancement_prompt(q, tpl);
      augment::DrawOptions opt;
      opt.n = cfg.n;
      opt.base_seed = cfg.seed;
      opt.max_attempts = cfg.max_attempts;
      opt.dedup = cfg.dedup;
      opt.retry_delay_ms = cfg.retry_delay_ms;
      auto draw = augment::sample_variants(endpoint.generator(), q.query_id, prompt,
                                           cfg.gen_augment, opt);
      groups[i].records = augment::emit_instruction_records(q, draw.variants, cfg.n);
      groups[i].retries = draw.retries;
      groups[i].duplicates = draw.duplicates;
    } catch (const Error& e) {
      if (e.code() != Errc::incomplete_group && e.code() != Errc::data_validation) throw;
      groups[i].drop = std::string(to_string(e.code()));
    }
  });
  endpoint.flush();
  std::vector<json> out;
  long long retries = 0, duplicates = 0;
  for (const auto& g : groups) {
    if (!g.drop.empty()) {
      ++m.drops[g.drop];
      continue;
    }
    ++m.output_count;
    retries += g.retries;
    duplicates += g.duplicates;
    for (const auto& r : g.records) out.push_back(augment::to_json(r));
  }
  auto path = cfg.work_dir / "dataset.jsonl";
  io::write_jsonl(path, out);
  auto check = augment::verify_dataset(path, cfg.n);
  if (!check.ok())
    throw Error(Errc::data_validation, "dataset failed verification: " + check.issues.front().message);
  m.extra = {{"records", out.size()}, {"n", cfg.n}, {"retries", retries}, {"duplicates", duplicates}};
  return m;
}

// Reviews every truncated sample with the given step set. Failed samples stay
// in the output with their status so evaluation can count them.
inline Manifest review_stage(const PipelineConfig& cfg, const review::CotStepSet& steps,
                             const fs::path& out_path) {
  Manifest m;
  auto in = detail::require_input(cfg.work_dir / "truncated.jsonl", "review");
  auto samples = detail::read_records<budget::TruncatedSample>(in, budget::truncated_sample_from_json);
  m.input_count = static_cast<long long>(samples.size());
  Endpoint endpoint(cfg);
  auto tpl = cfg.review_template();
  std::vector<review::ReviewRecord> records(samples.size());
  parallel_for(samples.size(), cfg.concurrency, [&](std::size_t i) {
    auto& rec = records[i];
    rec.sample_id = samples[i].sample_id();
    rec.output.sample_id = rec.sample_id;
    auto inputs = review::prompt_inputs(samples[i]);
    auto prompt = cfg.review_mode == "regular" ? review::build_regular_prompt(inputs, tpl)
                                               : review::build_longcot_prompt(inputs, steps, tpl);
    try {
      auto got = review::run_review(endpoint.generator(), prompt, cfg.gen_review,
                                    derive_seed(cfg.seed, "review", rec.sample_id),
                                    {cfg.max_attempts, cfg.retry_delay_ms});
      rec.retries = got.retries;
      rec.output.raw = got.value;
      rec.output = review::parse_review_output(got.value, rec.sample_id);
    } catch (const Error& e) {
      if (e.code() == Errc::generation_failed) rec.status = review::ReviewStatus::generation_failed;
      else if (e.code() == Errc::parse_failed) rec.status = review::ReviewStatus::parse_failed;
      else throw;
      rec.error = e.what();
    }
  });
  endpoint.flush();
  std::vector<json> out;
  std::map<std::string, long long> statuses;
  for (const auto& r : records) {
    ++statuses[std::string(review::to_string(r.status))];
    out.push_back(review::to_json(r));
  }
  fs::create_directories(out_path.parent_path());
  io::write_jsonl(out_path, out);
  m.output_count = static_cast<long long>(out.size());
  json names = json::array();
  for (auto s : steps.steps()) names.push_back(std::string(review::to_string(s)));
  m.extra = {{"statuses", statuses}, {"mode", cfg.review_mode}, {"steps", names}};
  return m;
}

struct EvalOutcome {
  Manifest manifest;
  eval::EvalReport report;
};

inline EvalOutcome eval_stage(const PipelineConfig& cfg, const fs::path& reviews_path,
                              const fs::path& out_dir) {
  EvalOutcome res;
  Manifest& m = res.manifest;
  auto refs_path = detail::require_input(cfg.work_dir / "truncated.jsonl", "eval");
  detail::require_input(reviews_path, "eval");
  std::map<std::string, budget::TruncatedSample> refs;
  for (const auto& j : io::read_jsonl(refs_path)) {
    auto t = budget::truncated_sample_from_json(j);
    refs.emplace(t.sample_id(), std::move(t));
  }
  auto reviews = detail::read_records<review::ReviewRecord>(reviews_path, review::review_record_from_json);
  m.input_count = static_cast<long long>(reviews.size());
  for (const auto& r : reviews)
    if (!refs.count(r.sample_id))
      throw Error(Errc::data_validation, "review for unknown sample " + r.sample_id);

  Endpoint endpoint(cfg);
  auto tpl = cfg.judge_template();
  std::vector<eval::EvalRow> rows(reviews.size());
  std::vector<eval::HitVerdict> verdicts(reviews.size());
  parallel_for(reviews.size(), cfg.concurrency, [&](std::size_t i) {
    const auto& r = reviews[i];
    const auto& ref = refs.at(r.sample_id);
    auto& row = rows[i];
    row.sample_id = r.sample_id;
    row.method = cfg.method;
    row.dataset = cfg.dataset;
    row.status = std::string(review::to_string(r.status));
    if (!ref.label_lines.empty()) row.label = ref.label_lines;
    row.predict = r.output.predict_lines;
    verdicts[i].sample_id = r.sample_id;
    if (r.status != review::ReviewStatus::ok || text::trim(r.output.comment).empty()) return;
    eval::JudgeOptions opt;
    opt.max_attempts = cfg.max_attempts;
    opt.seed = derive_seed(cfg.seed, "judge", r.sample_id);
    opt.retry_delay_ms = cfg.retry_delay_ms;
    verdicts[i] = eval::judge(endpoint.generator(), r.sample_id, r.output.comment,
                              ref.source.comment_text, tpl, cfg.gen_judge, opt);
    row.hit = verdicts[i].hit;
    row.judge_failed = verdicts[i].judge_failed;
  });
  endpoint.flush();

  std::vector<eval::HumanAnnotation> annotations;
  if (cfg.annotations) annotations = eval::load_annotations(*cfg.annotations);
  res.report = eval::aggregate_report(rows, cfg.report, annotations);

  std::vector<json> judged;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    json j{{"sample_id", row.sample_id},
           {"status", row.status},
           {"hit", row.hit},
           {"judge_failed", row.judge_failed},
           {"judge_raw", verdicts[i].judge_raw}};
    if (row.label && row.status == "ok") {
      auto q = eval::iou(*row.label, row.predict);
      j["iou"] = {q.num(), q.den()};
    }
    judged.push_back(std::move(j));
  }
  fs::create_directories(out_dir);
  io::write_jsonl(out_dir / "judgments.jsonl", judged);
  io::write_file(out_dir / "report.md", eval::render_markdown(res.report));
  io::write_jsonl(out_dir / "report.jsonl", eval::report_rows(res.report));
  m.output_count = static_cast<long long>(rows.size());
  long long failures = 0;
  for (const auto& r : rows) failures += r.judge_failed ? 1 : 0;
  m.extra = {{"judge_failures", failures}, {"annotations", annotations.size()}};
  return res;
}

inline std::string ablation_name(std::optional<review::CotStep> drop) {
  if (!drop) return "Full";
  std::string t(review::title(*drop));
  return "- " + t;
}

inline std::string ablation_dir(std::optional<review::CotStep> drop) {
  return drop ? "no-" + std::string(review::to_string(*drop)) : "full";
}

// Full step set plus one run per dropped step; each configuration gets its
// own review and eval outputs under work_dir/ablation.
inline Manifest ablate_stage(const PipelineConfig& cfg, const std::vector<review::CotStep>& drops) {
  Manifest m;
  detail::require_input(cfg.work_dir / "truncated.jsonl", "ablate");
  std::vector<std::optional<review::CotStep>> configs{std::nullopt};
  for (auto d : drops) configs.push_back(d);
  m.input_count = static_cast<long long>(configs.size());
  auto full = review::CotStepSet::full();
  std::vector<eval::AblationRow> table;
  json runs = json::array();
  for (const auto& drop : configs) {
    auto steps = drop ? review::ablate_steps(full, *drop) : full;
    auto dir = cfg.work_dir / "ablation" / ablation_dir(drop);
    auto rm = review_stage(cfg, steps, dir / "reviews.jsonl");
    auto ev = eval_stage(cfg, dir / "reviews.jsonl", dir);
    const auto* cell = ev.report.cell(cfg.method, cfg.dataset);
    eval::AblationRow row{ablation_name(drop), 0, 0};
    if (cell) {
      row.iou = cell->iou_percent(cfg.report.iou_agg).value_or(0);
      row.hit_rate = cell->hit_percent().value_or(0);
    }
    table.push_back(row);
    runs.push_back({{"config", ablation_dir(drop)}, {"review", to_json(rm)}, {"eval", to_json(ev.manifest)}});
  }
  io::write_file(cfg.work_dir / "ablation.md", eval::render_ablation(table));
  io::write_jsonl(cfg.work_dir / "ablation.jsonl", eval::ablation_rows_json(table));
  m.output_count = static_cast<long long>(table.size());
  m.extra = {{"runs", runs}};
  return m;
}

// Runs one stage, stamps its wall time and writes manifest-<stage>.json.
template <class Fn>
Manifest timed(const PipelineConfig& cfg, const std::string& stage, Fn&& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(cfg.work_dir);
  Manifest m = fn();
  m.stage = stage;
  m.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  io::write_file(cfg.work_dir / ("manifest-" + stage + ".json"), to_json(m).dump(2) + "\n");
  return m;
}

inline Manifest run_stage(const std::string& stage, const PipelineConfig& cfg,
                          const std::vector<review::CotStep>& drops = {}) {
  if (stage == "ingest") return timed(cfg, stage, [&] { return ingest_stage(cfg); });
  if (stage == "reconstruct") return timed(cfg, stage, [&] { return reconstruct_stage(cfg); });
  if (stage == "filter") return timed(cfg, stage, [&] { return filter_stage(cfg); });
  if (stage == "truncate") return timed(cfg, stage, [&] { return truncate_stage(cfg); });
  if (stage == "augment") return timed(cfg, stage, [&] { return augment_stage(cfg); });
  if (stage == "review")
    return timed(cfg, stage, [&] { return review_stage(cfg, cfg.steps, cfg.work_dir / "reviews.jsonl"); });
  if (stage == "eval")
    return timed(cfg, stage, [&] {
      return eval_stage(cfg, cfg.work_dir / "reviews.jsonl", cfg.work_dir).manifest;
    });
  if (stage == "ablate") return timed(cfg, stage, [&] { return ablate_stage(cfg, drops); });
  throw Error(Errc::invalid_argument, "unknown stage " + stage);
}

// ingest through eval in order.
inline std::vector<Manifest> run_pipeline(const PipelineConfig& cfg) {
  std::vector<Manifest> out;
  for (const auto& s : kStages) {
    if (s == "ablate") break;
    out.push_back(run_stage(s, cfg));
  }
  return out;
}

}  // namespace melcot::pipeline
