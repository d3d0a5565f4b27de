#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace melcot::text {

// Splits on '\n'. A single trailing newline does not produce an empty last
// line, so split_lines("a\nb\n") == split_lines("a\nb") == {"a", "b"}.
inline std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    auto nl = s.find('\n', pos);
    if (nl == std::string_view::npos) {
      out.emplace_back(s.substr(pos));
      break;
    }
    out.emplace_back(s.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

// Every line is terminated with '\n'.
inline std::string join_lines(std::span<const std::string> lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline bool istarts_with(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i])))
      return false;
  }
  return true;
}

inline bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

inline std::size_t count_lines(std::string_view s) { return split_lines(s).size(); }

// "   7 | code" listing used in prompts; numbering starts at first_line.
inline std::string render_numbered(std::string_view code, int first_line = 1) {
  auto lines = split_lines(code);
  int last = first_line + static_cast<int>(lines.size()) - 1;
  std::size_t width = std::to_string(std::max(last, 1)).size();
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto num = std::to_string(first_line + static_cast<int>(i));
    out.append(width - std::min(width, num.size()), ' ');
    out += num;
    out += " | ";
    out += lines[i];
    out += '\n';
  }
  return out;
}

}  // namespace melcot::text
