#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "melcot/context/diff.hpp"
#include "melcot/core/error.hpp"
#include "melcot/core/process.hpp"
#include "melcot/core/text.hpp"
#include "melcot/core/time.hpp"

namespace melcot::context {

namespace fs = std::filesystem;

struct CommitChanges {
  std::string id;
  Timestamp time;
  // file path -> changed old-side lines
  std::map<std::string, std::set<int>> changed;
};

// Read-only view of a git working copy. Each call spawns `git -C <root>`, so
// concurrent readers are safe.
class GitRepo {
 public:
  explicit GitRepo(fs::path root) : root_(std::move(root)) {}

  const fs::path& root() const noexcept { return root_; }

  bool valid() const {
    auto r = git({"rev-parse", "--git-dir"});
    return r.exit_code == 0;
  }

  // Full commit id, or nullopt when ref does not name a commit here.
  std::optional<std::string> resolve(const std::string& ref) const {
    auto r = git({"rev-parse", "--verify", "--quiet", ref + "^{commit}"});
    if (r.exit_code != 0) return std::nullopt;
    return std::string(text::trim(r.out));
  }

  // First-parent ancestors of `commit`, nearest first, excluding commit
  // itself. Empty when the history stops at commit (root or shallow boundary).
  std::vector<std::string> ancestors(const std::string& commit, int max_count) const {
    auto r = git({"rev-list", "--first-parent", "--max-count=" + std::to_string(max_count + 1),
                  commit});
    std::vector<std::string> out;
    if (r.exit_code != 0) return out;
    auto lines = text::split_lines(r.out);
    for (std::size_t i = 1; i < lines.size(); ++i) out.push_back(lines[i]);
    return out;
  }

  std::optional<std::string> file_at(const std::string& commit, const std::string& path) const {
    auto r = git({"cat-file", "blob", commit + ":" + path});
    if (r.exit_code != 0) return std::nullopt;
    return r.out;
  }

  Timestamp commit_time(const std::string& commit) const {
    auto r = git({"show", "-s", "--format=%ct", commit});
    if (r.exit_code != 0) throw Error(Errc::commit_not_found, "unknown commit " + commit);
    return from_epoch(std::stoll(std::string(text::trim(r.out))));
  }

  // Commits reachable from HEAD that touch `path` and were committed strictly
  // after `after`, oldest first, with their changed old-side line sets.
  std::vector<CommitChanges> commits_touching(const std::string& path, Timestamp after) const {
    auto r = git({"log", "--reverse", "--format=%H %ct", "HEAD", "--", path});
    std::vector<CommitChanges> out;
    if (r.exit_code != 0) return out;
    for (const auto& line : text::split_lines(r.out)) {
      std::istringstream ss(line);
      std::string id;
      long long ct = 0;
      if (!(ss >> id >> ct)) continue;
      auto t = from_epoch(ct);
      if (t <= after) continue;
      CommitChanges c{id, t, {}};
      auto d = git({"diff", "-U0", "--no-color", "--no-ext-diff", id + "^", id, "--", path});
      if (d.exit_code != 0) continue;
      auto parsed = parse_unified_diff(d.out);
      for (const auto& h : parsed.hunks) {
        auto& lines = c.changed[h.file_path.empty() ? path : h.file_path];
        if (h.old_len == 0) {
          lines.insert(std::max(h.old_start, 1));
        } else {
          for (int k = h.old_start; k < h.old_start + h.old_len; ++k) lines.insert(k);
        }
      }
      out.push_back(std::move(c));
    }
    return out;
  }

 private:
  ProcessResult git(std::vector<std::string> args) const {
    std::vector<std::string> argv{"git", "-C", root_.string(), "-c", "core.quotepath=off"};
    argv.insert(argv.end(), args.begin(), args.end());
    return run_process(argv, {"GIT_TERMINAL_PROMPT=0", "LC_ALL=C"});
  }

  fs::path root_;
};

}  // namespace melcot::context
