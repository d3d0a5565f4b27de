#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "melcot/core/error.hpp"
#include "melcot/core/io.hpp"
#include "melcot/core/time.hpp"
#include "melcot/eval/report.hpp"
#include "melcot/llm/bundled.hpp"
#include "melcot/llm/client.hpp"
#include "melcot/llm/template.hpp"
#include "melcot/review/review.hpp"

namespace melcot::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct TemplatePaths {
  std::optional<fs::path> enhance, review, regular, judge, screen;
};

struct PipelineConfig {
  fs::path archive_dir;
  fs::path repos_dir;
  fs::path work_dir = "work";

  // Half-open [date_from, date_to) on the comment creation time.
  Timestamp date_from = *parse_utc("2022-01-01");
  Timestamp date_to = *parse_utc("2024-11-01");
  long long min_prs = 1000;
  long long min_comments = 50;

  int max_depth = 32;
  std::size_t budget = 1000;
  std::string tokenizer = "fallback";

  int n = 10;
  int max_attempts = 3;
  bool dedup = false;
  std::uint64_t seed = 0;
  std::size_t concurrency = 4;
  int retry_delay_ms = 500;

  llm::EndpointConfig endpoint;
  llm::GenConfig gen_augment, gen_review, gen_judge, gen_screen;
  TemplatePaths templates;
  std::optional<fs::path> rules;
  std::optional<fs::path> cassette;
  bool offline = false;
  bool screen = true;

  std::string review_mode = "longcot";  // or "regular"
  review::CotStepSet steps = review::CotStepSet::full();

  eval::ReportOptions report;
  std::optional<fs::path> annotations;
  std::string method = "MelcotCR";
  std::string dataset = "MelcotCR";

  llm::Template load_template(const std::optional<fs::path>& p, std::string_view bundled,
                              const char* name) const {
    if (p) return llm::Template::load(*p);
    return llm::Template(std::string(bundled), std::string("<bundled ") + name + ">");
  }
  llm::Template enhance_template() const {
    return load_template(templates.enhance, llm::kEnhanceTemplate, "enhance");
  }
  llm::Template review_template() const {
    return review_mode == "regular"
               ? load_template(templates.regular, llm::kRegularCotTemplate, "regular")
               : load_template(templates.review, llm::kLongCotTemplate, "review");
  }
  llm::Template judge_template() const {
    return load_template(templates.judge, llm::kJudgeTemplate, "judge");
  }
  llm::Template screen_template() const {
    return load_template(templates.screen, llm::kScreenTemplate, "screen");
  }
};

namespace detail {

inline const std::set<std::string> kConfigKeys{
    "archive_dir", "repos_dir",   "work_dir",       "date_from",   "date_to",
    "min_prs",     "min_comments", "max_depth",     "budget",      "tokenizer",
    "n",           "max_attempts", "dedup",         "seed",        "concurrency",
    "retry_delay_ms", "endpoint",  "generation",    "templates",   "rules",
    "cassette",    "offline",     "screen",         "review_mode", "steps",
    "iou_agg",     "failures_as_miss", "annotations", "method",    "dataset"};

inline Timestamp config_time(const json& j, const char* key, Timestamp fallback) {
  if (!j.contains(key)) return fallback;
  auto t = parse_utc(j.at(key).get<std::string>());
  if (!t) throw Error(Errc::config, std::string("bad timestamp for ") + key);
  return *t;
}

}  // namespace detail

// Relative paths resolve against base (the config file's directory).
inline PipelineConfig config_from_json(const json& j, const fs::path& base) {
  if (!j.is_object()) throw Error(Errc::config, "config must be an object");
  for (const auto& [k, v] : j.items())
    if (!detail::kConfigKeys.count(k)) throw Error(Errc::config, "unknown config key '" + k + "'");
  auto path = [&](const json& v) {
    fs::path p = v.get<std::string>();
    return p.is_absolute() ? p : base / p;
  };
  auto opt_path = [&](const json& obj, const char* key) -> std::optional<fs::path> {
    if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
    return path(obj.at(key));
  };
  PipelineConfig c;
  try {
    if (auto p = opt_path(j, "archive_dir")) c.archive_dir = *p;
    if (auto p = opt_path(j, "repos_dir")) c.repos_dir = *p;
    c.work_dir = opt_path(j, "work_dir").value_or(base / "work");
    c.date_from = detail::config_time(j, "date_from", c.date_from);
    c.date_to = detail::config_time(j, "date_to", c.date_to);
    c.min_prs = j.value("min_prs", c.min_prs);
    c.min_comments = j.value("min_comments", c.min_comments);
    c.max_depth = j.value("max_depth", c.max_depth);
    c.budget = j.value("budget", c.budget);
    c.tokenizer = j.value("tokenizer", c.tokenizer);
    if (c.tokenizer != "fallback") {
      fs::path t = c.tokenizer;
      c.tokenizer = (t.is_absolute() ? t : base / t).string();
    }
    c.n = j.value("n", c.n);
    c.max_attempts = j.value("max_attempts", c.max_attempts);
    c.dedup = j.value("dedup", c.dedup);
    c.seed = j.value("seed", c.seed);
    c.concurrency = j.value("concurrency", c.concurrency);
    c.retry_delay_ms = j.value("retry_delay_ms", c.retry_delay_ms);
    if (j.contains("endpoint")) {
      const auto& e = j.at("endpoint");
      c.endpoint.base_url = e.value("base_url", c.endpoint.base_url);
      c.endpoint.api_key_env = e.value("api_key_env", c.endpoint.api_key_env);
      c.endpoint.timeout_s = e.value("timeout_s", c.endpoint.timeout_s);
    }
    if (j.contains("generation")) {
      const auto& g = j.at("generation");
      llm::GenConfig shared = g.contains("default") ? llm::gen_config_from_json(g.at("default"))
                                                    : llm::GenConfig{};
      auto pick = [&](const char* k) {
        return g.contains(k) ? llm::gen_config_from_json(g.at(k), shared) : shared;
      };
      c.gen_augment = pick("augment");
      c.gen_review = pick("review");
      c.gen_judge = pick("judge");
      c.gen_screen = pick("screen");
    }
    if (j.contains("templates")) {
      const auto& t = j.at("templates");
      c.templates.enhance = opt_path(t, "enhance");
      c.templates.review = opt_path(t, "review");
      c.templates.regular = opt_path(t, "regular");
      c.templates.judge = opt_path(t, "judge");
      c.templates.screen = opt_path(t, "screen");
    }
    c.rules = opt_path(j, "rules");
    c.cassette = opt_path(j, "cassette");
    c.offline = j.value("offline", c.offline);
    c.screen = j.value("screen", c.screen);
    c.review_mode = j.value("review_mode", c.review_mode);
    if (c.review_mode != "longcot" && c.review_mode != "regular")
      throw Error(Errc::config, "review_mode must be longcot or regular");
    if (j.contains("steps")) {
      review::CotStepSet s;
      for (const auto& name : j.at("steps")) {
        auto st = review::step_from_string(name.get<std::string>());
        if (!st) throw Error(Errc::config, "unknown step " + name.get<std::string>());
        s = s.with(*st);
      }
      if (s.empty()) throw Error(Errc::config, "steps must not be empty");
      c.steps = s;
    }
    auto agg = j.value("iou_agg", std::string("macro"));
    if (agg == "macro") c.report.iou_agg = eval::IouAggregation::macro;
    else if (agg == "micro") c.report.iou_agg = eval::IouAggregation::micro;
    else throw Error(Errc::config, "iou_agg must be macro or micro");
    c.report.failures_as_miss = j.value("failures_as_miss", c.report.failures_as_miss);
    c.annotations = opt_path(j, "annotations");
    c.method = j.value("method", c.method);
    c.dataset = j.value("dataset", c.dataset);
  } catch (const json::exception& ex) {
    throw Error(Errc::config, std::string("config: ") + ex.what());
  }
  if (c.n < 1) throw Error(Errc::config, "n must be >= 1");
  if (c.budget < 1) throw Error(Errc::config, "budget must be >= 1");
  if (c.max_attempts < 1) throw Error(Errc::config, "max_attempts must be >= 1");
  if (c.concurrency < 1) throw Error(Errc::config, "concurrency must be >= 1");
  if (c.date_to <= c.date_from) throw Error(Errc::config, "date_to must follow date_from");
  for (const auto& p : {c.rules, c.cassette, c.annotations, c.templates.enhance, c.templates.review,
                        c.templates.regular, c.templates.judge, c.templates.screen})
    if (p && p != c.cassette && !fs::exists(*p))
      throw Error(Errc::config, "missing file " + p->string());
  return c;
}

inline PipelineConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) throw Error(Errc::config, "config file not found: " + path.string());
  json j = json::parse(io::read_file(path), nullptr, false);
  if (j.is_discarded()) throw Error(Errc::config, path.string() + ": not valid JSON");
  return config_from_json(j, fs::absolute(path).parent_path());
}

}  // namespace melcot::pipeline
