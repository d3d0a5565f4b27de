#pragma once

#include <algorithm>
#include <charconv>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "melcot/core/error.hpp"
#include "melcot/core/text.hpp"

namespace melcot {

// Sorted set of 1-based line numbers.
class LineSet {
 public:
  LineSet() = default;
  LineSet(std::initializer_list<int> lines) : LineSet(std::vector<int>(lines)) {}
  explicit LineSet(std::vector<int> lines) : lines_(std::move(lines)) {
    std::sort(lines_.begin(), lines_.end());
    lines_.erase(std::unique(lines_.begin(), lines_.end()), lines_.end());
    if (!lines_.empty() && lines_.front() < 1)
      throw Error(Errc::invalid_argument, "line numbers must be >= 1");
  }

  static LineSet range(int first, int last) {
    std::vector<int> v;
    for (int i = first; i <= last; ++i) v.push_back(i);
    return LineSet(std::move(v));
  }

  const std::vector<int>& lines() const noexcept { return lines_; }
  std::size_t size() const noexcept { return lines_.size(); }
  bool empty() const noexcept { return lines_.empty(); }
  bool contains(int line) const { return std::binary_search(lines_.begin(), lines_.end(), line); }
  int front() const { return lines_.front(); }
  int back() const { return lines_.back(); }
  auto begin() const noexcept { return lines_.begin(); }
  auto end() const noexcept { return lines_.end(); }

  bool operator==(const LineSet&) const = default;

 private:
  std::vector<int> lines_;
};

// "12, 40-44" style rendering; consecutive runs collapse into ranges.
inline std::string format_line_ranges(const LineSet& s) {
  if (s.empty()) return "none";
  std::string out;
  const auto& v = s.lines();
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j + 1 < v.size() && v[j + 1] == v[j] + 1) ++j;
    if (!out.empty()) out += ", ";
    out += std::to_string(v[i]);
    if (j > i) out += "-" + std::to_string(v[j]);
    i = j + 1;
  }
  return out;
}

// Inverse of format_line_ranges. Accepts "none" (any case) or an empty
// string for the empty set; separators are commas and/or whitespace.
inline LineSet parse_line_ranges(std::string_view s) {
  auto t = text::trim(s);
  if (t.empty() || text::to_lower(t) == "none") return {};
  std::vector<int> out;
  std::size_t i = 0;
  auto read_int = [&](int& v) {
    auto start = i;
    while (i < t.size() && t[i] >= '0' && t[i] <= '9') ++i;
    if (start == i) return false;
    auto [p, ec] = std::from_chars(t.data() + start, t.data() + i, v);
    return ec == std::errc{} && v >= 1;
  };
  while (i < t.size()) {
    while (i < t.size() && (t[i] == ',' || t[i] == ' ' || t[i] == '\t')) ++i;
    if (i >= t.size()) break;
    int a = 0;
    if (!read_int(a)) throw Error(Errc::parse_failed, "bad line list: " + std::string(s));
    int b = a;
    auto after_a = i;
    while (i < t.size() && t[i] == ' ') ++i;
    if (i < t.size() && t[i] == '-') {
      ++i;
      while (i < t.size() && t[i] == ' ') ++i;
      if (!read_int(b) || b < a) throw Error(Errc::parse_failed, "bad range: " + std::string(s));
    } else {
      i = after_a;
    }
    if (b - a > 100000) throw Error(Errc::parse_failed, "range too large: " + std::string(s));
    for (int k = a; k <= b; ++k) out.push_back(k);
    if (i < t.size() && t[i] != ',' && t[i] != ' ' && t[i] != '\t')
      throw Error(Errc::parse_failed, "bad line list: " + std::string(s));
  }
  return LineSet(std::move(out));
}

}  // namespace melcot
