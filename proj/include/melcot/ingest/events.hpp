#pragma once

#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "melcot/core/error.hpp"
#include "melcot/core/time.hpp"

namespace melcot::ingest {

using json = nlohmann::json;

struct ReviewEvent {
  std::string event_id;
  std::string project;
  int pr_number = 1;
  std::string comment_id;
  std::string comment_text;
  std::string diff_fragment;
  std::string file_path;
  Timestamp created_at{};
  std::string commit_ref;
};

inline json to_json(const ReviewEvent& e) {
  return json{{"event_id", e.event_id},         {"project", e.project},
              {"pr_number", e.pr_number},       {"comment_id", e.comment_id},
              {"comment_text", e.comment_text}, {"diff_fragment", e.diff_fragment},
              {"file_path", e.file_path},       {"created_at", format_utc(e.created_at)},
              {"commit_ref", e.commit_ref}};
}

inline bool is_commit_ref(std::string_view s) {
  if (s.size() < 7 || s.size() > 40) return false;
  for (char c : s)
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  return true;
}

inline ReviewEvent review_event_from_json(const json& j) {
  try {
    ReviewEvent e;
    e.event_id = j.at("event_id").get<std::string>();
    e.project = j.at("project").get<std::string>();
    e.pr_number = j.at("pr_number").get<int>();
    e.comment_id = j.at("comment_id").get<std::string>();
    e.comment_text = j.at("comment_text").get<std::string>();
    e.diff_fragment = j.at("diff_fragment").get<std::string>();
    e.file_path = j.at("file_path").get<std::string>();
    auto t = parse_utc(j.at("created_at").get<std::string>());
    if (!t) throw Error(Errc::data_validation, "bad created_at");
    e.created_at = *t;
    e.commit_ref = j.at("commit_ref").get<std::string>();
    if (e.pr_number < 1 || !is_commit_ref(e.commit_ref))
      throw Error(Errc::data_validation, "invalid review event " + e.event_id);
    return e;
  } catch (const json::exception& ex) {
    throw Error(Errc::data_validation, std::string("review event: ") + ex.what());
  }
}

namespace detail {

inline std::string id_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw Error(Errc::malformed, "id is neither string nor integer");
}

inline const json* find_path(const json& j, std::initializer_list<const char*> keys) {
  const json* cur = &j;
  for (const char* k : keys) {
    if (!cur->is_object()) return nullptr;
    auto it = cur->find(k);
    if (it == cur->end() || it->is_null()) return nullptr;
    cur = &*it;
  }
  return cur;
}

}  // namespace detail

// Per-project counters: distinct pull-request numbers and distinct review
// comment ids. Merging is set union, so totals do not depend on how the
// input was sharded or in what order shards are merged.
class StatsAccumulator {
 public:
  void add_pr(const std::string& project, long long pr) { data_[project].prs.insert(pr); }
  void add_comment(const std::string& project, const std::string& comment_id) {
    data_[project].comments.insert(comment_id);
  }

  void merge(const StatsAccumulator& other) {
    for (const auto& [p, d] : other.data_) {
      auto& mine = data_[p];
      mine.prs.insert(d.prs.begin(), d.prs.end());
      mine.comments.insert(d.comments.begin(), d.comments.end());
    }
  }

  struct Row {
    std::string project;
    long long pr_count = 0;
    long long review_comment_count = 0;
    bool operator==(const Row&) const = default;
  };

  std::vector<Row> stats() const {
    std::vector<Row> out;
    for (const auto& [p, d] : data_)
      out.push_back({p, static_cast<long long>(d.prs.size()),
                     static_cast<long long>(d.comments.size())});
    return out;
  }

 private:
  struct Counts {
    std::set<long long> prs;
    std::set<std::string> comments;
  };
  std::map<std::string, Counts> data_;
};

using ProjectStats = StatsAccumulator::Row;

struct StreamResult {
  std::vector<ReviewEvent> events;
  // Well-formed records that are not review-comment events.
  long long other = 0;
  // Lines that failed to parse or lacked required review-comment fields.
  long long skipped = 0;
  StatsAccumulator stats;
};

// Decodes one archive line. Review-comment events are appended to out.events;
// pull-request activity of every kind feeds out.stats.
inline void parse_event_line(std::string_view line, StreamResult& out) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    ++out.skipped;
    return;
  }
  try {
    const json* type = detail::find_path(j, {"type"});
    const json* repo = detail::find_path(j, {"repo", "name"});
    if (!type || !type->is_string() || !repo || !repo->is_string()) throw Error(Errc::malformed, "");
    std::string project = repo->get<std::string>();
    const json* pr = detail::find_path(j, {"payload", "pull_request", "number"});
    if (!pr) pr = detail::find_path(j, {"payload", "number"});

    if (*type != "PullRequestReviewCommentEvent") {
      if (pr && pr->is_number_integer() &&
          (*type == "PullRequestEvent" || *type == "PullRequestReviewEvent"))
        out.stats.add_pr(project, pr->get<long long>());
      ++out.other;
      return;
    }
    const json* comment = detail::find_path(j, {"payload", "comment"});
    if (!comment || !pr || !pr->is_number_integer()) throw Error(Errc::malformed, "");
    ReviewEvent e;
    e.event_id = detail::id_string(j.at("id"));
    e.project = project;
    e.pr_number = static_cast<int>(pr->get<long long>());
    e.comment_id = detail::id_string(comment->at("id"));
    e.comment_text = comment->at("body").get<std::string>();
    e.diff_fragment = comment->value("diff_hunk", "");
    e.file_path = comment->value("path", "");
    e.commit_ref = comment->value("commit_id", "");
    std::string created = comment->value("created_at", j.value("created_at", ""));
    auto t = parse_utc(created);
    if (!t || e.pr_number < 1 || !is_commit_ref(e.commit_ref) || e.diff_fragment.empty() ||
        e.file_path.empty())
      throw Error(Errc::malformed, "");
    e.created_at = *t;
    out.stats.add_pr(project, e.pr_number);
    out.stats.add_comment(project, e.comment_id);
    out.events.push_back(std::move(e));
  } catch (const std::exception&) {
    ++out.skipped;
  }
}

inline StreamResult parse_event_stream(const std::vector<std::string>& records) {
  StreamResult out;
  for (const auto& r : records) parse_event_line(r, out);
  return out;
}

inline std::set<std::string> filter_projects(const std::vector<ProjectStats>& stats,
                                             long long min_prs = 1000,
                                             long long min_comments = 50) {
  if (min_prs < 0 || min_comments < 0)
    throw Error(Errc::invalid_argument, "thresholds must be non-negative");
  std::set<std::string> out;
  for (const auto& s : stats)
    if (s.pr_count >= min_prs && s.review_comment_count >= min_comments) out.insert(s.project);
  return out;
}

}  // namespace melcot::ingest
