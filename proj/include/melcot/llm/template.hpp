#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "melcot/core/error.hpp"
#include "melcot/core/io.hpp"
#include "melcot/core/text.hpp"

namespace melcot::llm {

// A template is plain text with {name} placeholders; "{{" and "}}" stand for
// literal braces. Templates files may hold several named sections, each
// introduced by a line "=== name ===". Text before the first header belongs
// to the section "body".
class Template {
 public:
  Template() = default;
  explicit Template(std::string source, std::string origin = "<template>")
      : source_(std::move(source)), origin_(std::move(origin)) {
    split(source_);
  }

  const std::string& origin() const noexcept { return origin_; }
  bool has_section(const std::string& name) const { return sections_.count(name) > 0; }

  const std::string& section(const std::string& name) const {
    auto it = sections_.find(name);
    if (it == sections_.end())
      throw Error(Errc::template_error, origin_ + ": missing section '" + name + "'");
    return it->second;
  }

  std::vector<std::string> section_names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : sections_) out.push_back(k);
    return out;
  }

  // Placeholders used in a section, in order of first appearance.
  std::vector<std::string> placeholders(const std::string& name) const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    scan(section(name), [&](std::string_view ph) {
      if (seen.insert(std::string(ph)).second) out.emplace_back(ph);
    }, nullptr);
    return out;
  }

  // Checks a section against the allowed and required placeholder names.
  void validate(const std::string& name, const std::set<std::string>& allowed,
                const std::set<std::string>& required) const {
    auto used = placeholders(name);
    for (const auto& p : used)
      if (!allowed.count(p))
        throw Error(Errc::template_error,
                    origin_ + ": unknown placeholder {" + p + "} in section '" + name + "'");
    for (const auto& r : required)
      if (std::find(used.begin(), used.end(), r) == used.end())
        throw Error(Errc::template_error,
                    origin_ + ": section '" + name + "' lacks required placeholder {" + r + "}");
  }

  std::string render(const std::string& name, const std::map<std::string, std::string>& vars) const {
    std::string out;
    scan(section(name), [&](std::string_view ph) {
      auto it = vars.find(std::string(ph));
      if (it == vars.end())
        throw Error(Errc::template_error, origin_ + ": no value for {" + std::string(ph) + "}");
      out += it->second;
    }, &out);
    return out;
  }

  static Template load(const std::filesystem::path& path) {
    return Template(io::read_file(path), path.string());
  }

 private:
  void split(const std::string& src) {
    std::string current = "body";
    std::string buf;
    bool any_header = false;
    for (const auto& line : text::split_lines(src)) {
      auto t = text::trim(line);
      if (t.size() > 8 && t.substr(0, 4) == "=== " && t.substr(t.size() - 4) == " ===") {
        if (any_header || !text::trim(buf).empty()) store(current, buf);
        current = std::string(text::trim(t.substr(4, t.size() - 8)));
        buf.clear();
        any_header = true;
        continue;
      }
      buf += line;
      buf += '\n';
    }
    store(current, buf);
  }

  void store(const std::string& name, std::string body) {
    // Section bodies drop the blank lines that separate them from headers.
    while (!body.empty() && (body.back() == '\n' || body.back() == ' ')) body.pop_back();
    std::size_t lead = 0;
    while (lead < body.size() && body[lead] == '\n') ++lead;
    body.erase(0, lead);
    if (sections_.count(name))
      throw Error(Errc::template_error, origin_ + ": duplicate section '" + name + "'");
    sections_[name] = std::move(body);
  }

  template <class OnPlaceholder>
  void scan(const std::string& s, OnPlaceholder&& on, std::string* literal) const {
    for (std::size_t i = 0; i < s.size(); ++i) {
      char c = s[i];
      if (c == '{' && i + 1 < s.size() && s[i + 1] == '{') {
        if (literal) *literal += '{';
        ++i;
      } else if (c == '}' && i + 1 < s.size() && s[i + 1] == '}') {
        if (literal) *literal += '}';
        ++i;
      } else if (c == '{') {
        auto close = s.find('}', i + 1);
        if (close == std::string::npos)
          throw Error(Errc::template_error, origin_ + ": unterminated placeholder");
        std::string_view name(s.data() + i + 1, close - i - 1);
        bool ok = !name.empty();
        for (char n : name)
          if (!(std::isalnum(static_cast<unsigned char>(n)) || n == '_')) ok = false;
        if (!ok)
          throw Error(Errc::template_error,
                      origin_ + ": bad placeholder {" + std::string(name) + "}");
        on(name);
        i = close;
      } else if (c == '}') {
        throw Error(Errc::template_error, origin_ + ": stray '}' (write '}}')");
      } else if (literal) {
        *literal += c;
      }
    }
  }

  std::string source_;
  std::string origin_;
  std::map<std::string, std::string> sections_;
};

}  // namespace melcot::llm
