#include <catch_amalgamated.hpp>

#include <sstream>

#include "harness.hpp"
#include "melcot/cli/cli.hpp"

using namespace melcot;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out, err;
};

CliResult cli_run(std::vector<std::string> args) {
  args.insert(args.begin(), "melcot");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

pipeline::Manifest manifest_of(const CliResult& r) {
  REQUIRE(r.code == 0);
  return pipeline::manifest_from_json(json::parse(r.out));
}

std::vector<std::string> lines_of(const fs::path& p) { return text::split_lines(io::read_file(p)); }

void write_lines(const fs::path& p, const std::vector<std::string>& lines) {
  io::write_file(p, text::join_lines(lines));
}

}  // namespace

TEST_CASE("stages chain through files and replay offline") {
  testkit::TempDir dir;
  testkit::MockEndpoint mock;
  auto corpus = testkit::build_corpus(dir.path(), {{"offline", false}, {"endpoint", {{"base_url", mock.base_url()}}}});
  auto cfg = corpus.config.string();
  auto work = dir / "work";

  auto early = cli_run({"augment", "-c", cfg});
  CHECK(early.code == 3);
  CHECK(json::parse(early.err)["error"] == "stage_order");

  std::map<std::string, pipeline::Manifest> m;
  for (const auto& stage : {"ingest", "reconstruct", "filter", "truncate", "augment", "review", "eval"}) {
    INFO(stage);
    auto r = cli_run({stage, "-c", cfg});
    INFO(r.err);
    m[stage] = manifest_of(r);
    CHECK(m[stage].conserved());
    auto on_disk = pipeline::manifest_from_json(json::parse(io::read_file(work / ("manifest-" + std::string(stage) + ".json"))));
    CHECK(on_disk.output_count == m[stage].output_count);
  }
  CHECK(m["ingest"].output_count == static_cast<long long>(lines_of(work / "events.jsonl").size()));
  CHECK(m["reconstruct"].input_count == m["ingest"].output_count);
  CHECK(m["filter"].input_count == m["reconstruct"].output_count);
  CHECK(m["filter"].output_count == static_cast<long long>(lines_of(work / "filtered.jsonl").size()));
  CHECK(m["filter"].drops.count("Confirmation"));
  CHECK(m["truncate"].input_count == m["filter"].output_count);
  CHECK(m["augment"].input_count == m["truncate"].output_count);
  CHECK(static_cast<long long>(lines_of(work / "dataset.jsonl").size()) == 10 * m["augment"].output_count);
  CHECK(m["review"].input_count == m["truncate"].output_count);
  CHECK(m["eval"].input_count == m["review"].output_count);
  CHECK(io::read_file(work / "report.md").find("| Method |") == 0);
  CHECK(cli_run({"verify", (work / "dataset.jsonl").string()}).code == 0);

  int online_calls = mock.calls();
  CHECK(online_calls > 0);
  auto replay = cli_run({"run", "-c", cfg, "--offline", "--work-dir", (dir / "replay").string()});
  INFO(replay.err);
  REQUIRE(replay.code == 0);
  CHECK(mock.calls() == online_calls);
  for (const auto& f : {"events.jsonl", "samples.jsonl", "filtered.jsonl", "truncated.jsonl", "dataset.jsonl",
                        "reviews.jsonl", "judgments.jsonl", "report.md", "report.jsonl"}) {
    INFO(f);
    CHECK(io::read_file(dir / "replay" / f) == io::read_file(work / f));
  }

  // A prompt the cassette has never seen cannot be answered offline.
  auto other = dir / "other.jsonl";
  io::write_file(other, "");
  auto miss = cli_run({"review", "-c", cfg, "--offline", "--cassette", other.string(), "--work-dir",
                       (dir / "replay").string()});
  CHECK(miss.code == 0);
  for (const auto& j : io::read_jsonl(dir / "replay" / "reviews.jsonl")) CHECK(j["status"] == "generation_failed");
}

TEST_CASE("ablation runs each configuration with its own step set") {
  testkit::TempDir dir;
  testkit::MockEndpoint mock;
  auto corpus = testkit::build_corpus(dir.path(), {{"offline", false}, {"endpoint", {{"base_url", mock.base_url()}}}});
  auto cfg = corpus.config.string();
  for (const auto& stage : {"ingest", "reconstruct", "filter", "truncate"}) REQUIRE(cli_run({stage, "-c", cfg}).code == 0);

  auto r = cli_run({"ablate", "-c", cfg, "--drop", "diff-analyze"});
  INFO(r.err);
  auto m = manifest_of(r);
  CHECK(m.input_count == 2);
  CHECK(m.conserved());
  auto work = dir / "work";
  auto table = io::read_file(work / "ablation.md");
  CHECK(table.find("| Full |") != std::string::npos);
  CHECK(table.find("| - Diff analyze |") != std::string::npos);
  for (const auto& j : io::read_jsonl(work / "ablation" / "no-diff-analyze" / "reviews.jsonl")) {
    REQUIRE(j["status"] == "ok");
    auto trace = j["trace"];
    CHECK(trace.contains("summary"));
    CHECK(trace.contains("key-code-flows"));
    CHECK(trace.contains("issue-check"));
    CHECK_FALSE(trace.contains("diff-analyze"));
  }
  for (const auto& j : io::read_jsonl(work / "ablation" / "full" / "reviews.jsonl")) CHECK(j["trace"].size() == 4);
  CHECK(fs::exists(work / "ablation" / "full" / "report.md"));

  CHECK(cli_run({"ablate", "-c", cfg, "--drop", "summary", "--drop", "summary"}).code == 2);
  CHECK(cli_run({"ablate", "-c", cfg, "--drop", "lint"}).code == 2);
  CHECK(cli_run({"ablate", "-c", cfg}).code == 2);
  CHECK(cli_run({"ablate", "-c", cfg, "--all", "--drop", "summary"}).code == 2);
}

TEST_CASE("verify names broken groups") {
  testkit::TempDir dir;
  std::vector<std::string> lines;
  for (int g = 0; g < 2; ++g)
    for (int k = 1; k <= 10; ++k)
      lines.push_back(json{{"group_id", "g" + std::to_string(g)},
                           {"variant_index", k},
                           {"seed", 100 * g + k},
                           {"instruction", "i"},
                           {"input", "x"},
                           {"output", "y"},
                           {"metadata",
                            {{"project", "p"},
                             {"commit_ref", "abc1234"},
                             {"language", "Go"},
                             {"file_path", "a.go"},
                             {"label_lines", {1, 2}}}}}
                          .dump());
  auto path = dir / "d.jsonl";
  write_lines(path, lines);
  CHECK(cli_run({"verify", path.string()}).code == 0);
  CHECK(cli_run({"verify", path.string(), "--n", "9"}).code == 4);

  auto nine = lines;
  nine.erase(nine.begin() + 13);
  write_lines(path, nine);
  auto r = cli_run({"verify", path.string()});
  CHECK(r.code == 4);
  auto rep = json::parse(r.out);
  CHECK(rep["ok"] == false);
  CHECK(rep["issues"][0]["group_id"] == "g1");

  auto dup = lines;
  auto clone = json::parse(dup[2]);
  clone["seed"] = 999;
  dup[3] = clone.dump();
  write_lines(path, dup);
  r = cli_run({"verify", path.string()});
  CHECK(r.code == 4);
  CHECK(r.out.find("g0") != std::string::npos);

  auto reseeded = lines;
  auto same_seed = json::parse(reseeded[5]);
  same_seed["seed"] = 1;
  reseeded[5] = same_seed.dump();
  write_lines(path, reseeded);
  CHECK(cli_run({"verify", path.string()}).code == 4);

  CHECK(cli_run({"verify", (dir / "absent.jsonl").string()}).code != 0);
}

TEST_CASE("cli usage and configuration errors") {
  testkit::TempDir dir;
  CHECK(cli_run({}).code == 2);
  CHECK(cli_run({"frobnicate"}).code == 2);
  CHECK(cli_run({"ingest"}).code == 2);
  CHECK(cli_run({"--help"}).code == 0);
  auto missing = cli_run({"ingest", "-c", (dir / "nope.json").string()});
  CHECK(missing.code != 0);
  CHECK(json::parse(missing.err).contains("error"));

  io::write_file(dir / "bad.json", R"({"budget": 0})");
  CHECK(cli_run({"ingest", "-c", (dir / "bad.json").string()}).code == 2);
  io::write_file(dir / "ok.json", R"({"work_dir": "w"})");
  CHECK(cli_run({"truncate", "-c", (dir / "ok.json").string(), "--budget", "0"}).code == 2);
  CHECK(cli_run({"augment", "-c", (dir / "ok.json").string(), "--n", "0"}).code == 2);
  CHECK(cli_run({"filter", "-c", (dir / "ok.json").string(), "--rules", (dir / "none.tsv").string()}).code == 2);
  CHECK(cli_run({"eval", "-c", (dir / "ok.json").string(), "--iou-agg", "median"}).code == 2);
  CHECK(cli_run({"review", "-c", (dir / "ok.json").string()}).code == 3);
}

TEST_CASE("derived seeds are stable and purpose-specific") {
  CHECK(pipeline::derive_seed(7, "review", "a") == pipeline::derive_seed(7, "review", "a"));
  CHECK(pipeline::derive_seed(7, "review", "a") != pipeline::derive_seed(7, "judge", "a"));
  CHECK(pipeline::derive_seed(7, "review", "a") != pipeline::derive_seed(8, "review", "a"));
  std::set<std::uint32_t> seen;
  for (int i = 0; i < 1000; ++i) seen.insert(pipeline::derive_seed(1, "review", std::to_string(i)));
  CHECK(seen.size() == 1000);
}

TEST_CASE("exit codes by error kind") {
  CHECK(cli::exit_code(Errc::config) == 2);
  CHECK(cli::exit_code(Errc::template_error) == 2);
  CHECK(cli::exit_code(Errc::stage_order) == 3);
  CHECK(cli::exit_code(Errc::data_validation) == 4);
  CHECK(cli::exit_code(Errc::incomplete_group) == 4);
  CHECK(cli::exit_code(Errc::endpoint) == 5);
  CHECK(cli::exit_code(Errc::generation_failed) == 5);
  CHECK(cli::exit_code(Errc::io) == 1);
}
