#pragma once

#include <CLI11.hpp>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "melcot/augment/dataset.hpp"
#include "melcot/core/error.hpp"
#include "melcot/pipeline/config.hpp"
#include "melcot/pipeline/stages.hpp"
#include "melcot/review/review.hpp"

namespace melcot::cli {

using json = nlohmann::json;

inline int exit_code(Errc c) noexcept {
  switch (c) {
    case Errc::config:
    case Errc::template_error: return 2;
    case Errc::stage_order: return 3;
    case Errc::data_validation:
    case Errc::import_error:
    case Errc::incomplete_group: return 4;
    case Errc::endpoint:
    case Errc::generation_failed: return 5;
    default: return 1;
  }
}

struct Overrides {
  std::string config;
  std::optional<std::string> work_dir;
  std::optional<std::string> rules;
  std::optional<std::string> cassette;
  std::optional<std::string> iou_agg;
  std::optional<std::size_t> budget;
  std::optional<int> n;
  bool offline = false;
  bool no_screen = false;
};

inline pipeline::PipelineConfig resolve(const Overrides& o) {
  auto cfg = pipeline::load_config(o.config);
  if (o.work_dir) cfg.work_dir = *o.work_dir;
  if (o.rules) {
    if (!std::filesystem::exists(*o.rules)) throw Error(Errc::config, "missing rules file " + *o.rules);
    cfg.rules = std::filesystem::path(*o.rules);
  }
  if (o.cassette) cfg.cassette = std::filesystem::path(*o.cassette);
  if (o.iou_agg) {
    if (*o.iou_agg == "macro") cfg.report.iou_agg = eval::IouAggregation::macro;
    else if (*o.iou_agg == "micro") cfg.report.iou_agg = eval::IouAggregation::micro;
    else throw Error(Errc::config, "--iou-agg must be macro or micro");
  }
  if (o.budget) {
    if (*o.budget < 1) throw Error(Errc::config, "--budget must be >= 1");
    cfg.budget = *o.budget;
  }
  if (o.n) {
    if (*o.n < 1) throw Error(Errc::config, "--n must be >= 1");
    cfg.n = *o.n;
  }
  if (o.offline) cfg.offline = true;
  if (o.no_screen) cfg.screen = false;
  return cfg;
}

// Entry point shared by the executable and the tests. Manifests go to out
// as one JSON line each; failures go to err as one JSON line.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Review-comment dataset pipeline and evaluation harness", "melcot"};
  app.require_subcommand(1);
  Overrides o;
  std::vector<std::string> drops;
  bool all_drops = false;
  std::string dataset_path;
  int verify_n = 10;

  auto common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", o.config, "Pipeline configuration (JSON)")->required();
    sub->add_option("--work-dir", o.work_dir, "Override the stage directory");
    sub->add_flag("--offline", o.offline, "Replay cassettes only, never contact an endpoint");
  };
  std::vector<CLI::App*> stage_cmds;
  for (const auto& s : pipeline::kStages) {
    auto* sub = app.add_subcommand(s, "Run the " + s + " stage");
    common(sub);
    stage_cmds.push_back(sub);
    if (s == "filter") {
      sub->add_option("--rules", o.rules, "Rules file replacing the bundled rules");
      sub->add_flag("--no-screen", o.no_screen, "Rules only, skip the semantic screen");
    }
    if (s == "truncate") sub->add_option("--budget", o.budget, "Token budget");
    if (s == "augment") {
      sub->add_option("--n", o.n, "Variants per query");
      sub->add_option("--cassette", o.cassette, "Cassette file");
    }
    if (s == "review") sub->add_option("--cassette", o.cassette, "Cassette file");
    if (s == "eval" || s == "ablate") {
      sub->add_option("--iou-agg", o.iou_agg, "macro or micro");
      sub->add_option("--cassette", o.cassette, "Cassette file");
    }
    if (s == "ablate") {
      sub->add_option("--drop", drops, "Step to drop (repeatable)");
      sub->add_flag("--all", all_drops, "Drop each of the four steps in turn");
    }
  }
  auto* run_cmd = app.add_subcommand("run", "Run ingest through eval");
  common(run_cmd);
  run_cmd->add_option("--cassette", o.cassette, "Cassette file");
  auto* verify = app.add_subcommand("verify", "Check a dataset file");
  verify->add_option("dataset", dataset_path, "dataset.jsonl")->required();
  verify->add_option("--n", verify_n, "Expected variants per group");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << json{{"error", "usage"}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }

  try {
    if (verify->parsed()) {
      auto rep = augment::verify_dataset(dataset_path, verify_n);
      out << to_json(rep).dump() << "\n";
      return rep.ok() ? 0 : 4;
    }
    auto cfg = resolve(o);
    if (run_cmd->parsed()) {
      for (const auto& m : pipeline::run_pipeline(cfg)) out << to_json(m).dump() << "\n";
      return 0;
    }
    for (std::size_t i = 0; i < stage_cmds.size(); ++i) {
      if (!stage_cmds[i]->parsed()) continue;
      const auto& stage = pipeline::kStages[i];
      std::vector<review::CotStep> steps;
      if (stage == "ablate") {
        if (all_drops && !drops.empty()) throw Error(Errc::config, "use either --drop or --all");
        if (all_drops) steps.assign(review::kAllSteps.begin(), review::kAllSteps.end());
        for (const auto& d : drops) {
          auto st = review::step_from_string(d);
          if (!st) throw Error(Errc::config, "unknown step '" + d + "'");
          if (std::find(steps.begin(), steps.end(), *st) != steps.end())
            throw Error(Errc::config, "step '" + d + "' dropped twice");
          steps.push_back(*st);
        }
        if (steps.empty()) throw Error(Errc::config, "ablate needs --drop <step> or --all");
      }
      out << to_json(pipeline::run_stage(stage, cfg, steps)).dump() << "\n";
      return 0;
    }
  } catch (const Error& e) {
    err << json{{"error", std::string(to_string(e.code()))}, {"message", e.what()}}.dump() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace melcot::cli
