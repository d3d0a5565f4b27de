#pragma once

#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <string>
#include <vector>

#include "melcot/core/io.hpp"

namespace melcot::augment {

struct DatasetIssue {
  long long line = 0;  // 0 for group-level findings
  std::string group_id;
  std::string message;
};

struct DatasetReport {
  long long records = 0;
  long long groups = 0;
  std::vector<DatasetIssue> issues;

  bool ok() const noexcept { return issues.empty(); }
};

inline nlohmann::json to_json(const DatasetReport& r) {
  nlohmann::json issues = nlohmann::json::array();
  for (const auto& i : r.issues)
    issues.push_back({{"line", i.line}, {"group_id", i.group_id}, {"message", i.message}});
  return {{"ok", r.ok()}, {"records", r.records}, {"groups", r.groups}, {"issues", issues}};
}

namespace detail {

inline std::string schema_problem(const nlohmann::json& j) {
  if (!j.is_object()) return "record is not an object";
  auto want = [&](const nlohmann::json& obj, const char* key, auto pred, const char* type) {
    auto it = obj.find(key);
    if (it == obj.end()) return std::string("missing field ") + key;
    if (!pred(*it)) return std::string("field ") + key + " is not " + type;
    return std::string();
  };
  auto is_str = [](const nlohmann::json& v) { return v.is_string(); };
  auto is_int = [](const nlohmann::json& v) { return v.is_number_integer(); };
  for (const char* k : {"group_id", "instruction", "input", "output"})
    if (auto p = want(j, k, is_str, "a string"); !p.empty()) return p;
  for (const char* k : {"variant_index", "seed"})
    if (auto p = want(j, k, is_int, "an integer"); !p.empty()) return p;
  auto m = j.find("metadata");
  if (m == j.end() || !m->is_object()) return "missing object metadata";
  for (const char* k : {"project", "commit_ref", "language"})
    if (auto p = want(*m, k, is_str, "a string"); !p.empty()) return "metadata: " + p;
  auto ll = m->find("label_lines");
  if (ll == m->end() || !ll->is_array()) return "metadata: label_lines is not an array";
  for (const auto& v : *ll)
    if (!v.is_number_integer() || v.get<long long>() < 1)
      return "metadata: label_lines must hold integers >= 1";
  if (j["output"].get<std::string>().empty()) return "empty output";
  return {};
}

}  // namespace detail

// Checks schema, (group, index) uniqueness, group completeness (exactly n
// records with indices 1..n) and seed distinctness within each group.
inline DatasetReport verify_dataset(const std::filesystem::path& path, int n) {
  DatasetReport rep;
  struct Group {
    std::map<long long, long long> index_line;
    std::map<long long, long long> seed_line;
  };
  std::map<std::string, Group> groups;
  io::LineReader reader(path);
  std::string line;
  long long lineno = 0;
  while (reader.next(line)) {
    ++lineno;
    if (line.empty()) continue;
    ++rep.records;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      rep.issues.push_back({lineno, "", "invalid JSON"});
      continue;
    }
    if (auto p = detail::schema_problem(j); !p.empty()) {
      rep.issues.push_back({lineno, j.is_object() ? j.value("group_id", "") : "", p});
      continue;
    }
    auto gid = j["group_id"].get<std::string>();
    auto idx = j["variant_index"].get<long long>();
    auto seed = j["seed"].get<long long>();
    auto& g = groups[gid];
    if (idx < 1 || idx > n)
      rep.issues.push_back({lineno, gid, "variant_index " + std::to_string(idx) + " outside 1.." +
                                             std::to_string(n)});
    if (auto [it, fresh] = g.index_line.emplace(idx, lineno); !fresh)
      rep.issues.push_back({lineno, gid, "duplicate variant_index " + std::to_string(idx) +
                                             " (first at line " + std::to_string(it->second) +
                                             ")"});
    if (auto [it, fresh] = g.seed_line.emplace(seed, lineno); !fresh)
      rep.issues.push_back({lineno, gid, "seed " + std::to_string(seed) +
                                             " repeated (first at line " +
                                             std::to_string(it->second) + ")"});
  }
  rep.groups = static_cast<long long>(groups.size());
  for (const auto& [gid, g] : groups) {
    if (static_cast<int>(g.index_line.size()) != n)
      rep.issues.push_back({0, gid, "group " + gid + " has " + std::to_string(g.index_line.size()) +
                                        " distinct variants, expected " + std::to_string(n)});
  }
  return rep;
}

}  // namespace melcot::augment
