#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "melcot/core/error.hpp"
#include "melcot/core/text.hpp"

namespace melcot::context {

enum class Language { java, python, c, cpp, javascript, typescript, go };

inline constexpr std::array<Language, 7> kAllLanguages{
    Language::java,       Language::python,     Language::c,  Language::cpp,
    Language::javascript, Language::typescript, Language::go};

constexpr std::string_view to_string(Language l) noexcept {
  switch (l) {
    case Language::java: return "Java";
    case Language::python: return "Python";
    case Language::c: return "C";
    case Language::cpp: return "C++";
    case Language::javascript: return "JavaScript";
    case Language::typescript: return "TypeScript";
    case Language::go: return "Go";
  }
  return "?";
}

inline std::optional<Language> language_from_name(std::string_view name) {
  auto n = text::to_lower(name);
  if (n == "java") return Language::java;
  if (n == "python" || n == "py") return Language::python;
  if (n == "c") return Language::c;
  if (n == "c++" || n == "cpp" || n == "cxx") return Language::cpp;
  if (n == "javascript" || n == "js") return Language::javascript;
  if (n == "typescript" || n == "ts") return Language::typescript;
  if (n == "go" || n == "golang") return Language::go;
  return std::nullopt;
}

inline std::string_view extension_of(std::string_view path) {
  auto slash = path.find_last_of('/');
  auto base = slash == std::string_view::npos ? path : path.substr(slash + 1);
  auto dot = base.find_last_of('.');
  if (dot == std::string_view::npos || dot == 0) return {};
  return base.substr(dot + 1);
}

inline bool is_documentation_path(std::string_view path) {
  auto ext = text::to_lower(extension_of(path));
  static constexpr std::array<std::string_view, 8> doc_ext{"md",  "markdown", "rst", "txt",
                                                           "adoc", "asciidoc", "rdoc", "textile"};
  for (auto e : doc_ext)
    if (ext == e) return true;
  auto slash = path.find_last_of('/');
  auto base = text::to_lower(slash == std::string_view::npos ? path : path.substr(slash + 1));
  return base == "readme" || base == "changelog" || base == "license" || base == "authors";
}

// Language gate for review samples. Throws documentation for prose files
// and unsupported_language for everything else outside the supported set.
inline Language detect_language(std::string_view path) {
  auto ext = text::to_lower(extension_of(path));
  if (ext == "java") return Language::java;
  if (ext == "py" || ext == "pyi") return Language::python;
  if (ext == "c" || ext == "h") return Language::c;
  if (ext == "cc" || ext == "cpp" || ext == "cxx" || ext == "c++" || ext == "hpp" ||
      ext == "hh" || ext == "hxx" || ext == "ipp" || ext == "inl")
    return Language::cpp;
  if (ext == "js" || ext == "jsx" || ext == "mjs" || ext == "cjs") return Language::javascript;
  if (ext == "ts" || ext == "tsx" || ext == "mts" || ext == "cts") return Language::typescript;
  if (ext == "go") return Language::go;
  if (is_documentation_path(path))
    throw Error(Errc::documentation, "documentation file: " + std::string(path));
  throw Error(Errc::unsupported_language, "unsupported language: " + std::string(path));
}

}  // namespace melcot::context
