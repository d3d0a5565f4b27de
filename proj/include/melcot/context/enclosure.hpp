#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "melcot/context/diff.hpp"
#include "melcot/context/language.hpp"
#include "melcot/context/syntax.hpp"
#include "melcot/core/error.hpp"
#include "melcot/core/text.hpp"

namespace melcot::context {

struct EnclosingContext {
  UnitKind unit_kind = UnitKind::module_scope;
  int start_line = 1;
  int end_line = 1;
  std::string source_text;
  Language language = Language::c;
};

// Lines [first, last] of text, each terminated by '\n'.
inline std::string slice_lines(const std::vector<std::string>& lines, int first, int last) {
  std::string out;
  for (int k = first; k <= last; ++k) {
    out += lines[static_cast<std::size_t>(k - 1)];
    out += '\n';
  }
  return out;
}

// Picks the innermost unit containing span among candidates: functions
// first, then class-like units, else nullptr.
inline const SyntaxUnit* innermost_unit(const std::vector<SyntaxUnit>& units, LineSpan span) {
  const SyntaxUnit* best = nullptr;
  for (UnitKind want : {UnitKind::function, UnitKind::class_like}) {
    for (const auto& u : units) {
      if (u.kind != want || u.start_line > span.start || u.end_line < span.end) continue;
      if (!best || u.end_line - u.start_line < best->end_line - best->start_line ||
          (u.end_line - u.start_line == best->end_line - best->start_line &&
           u.depth > best->depth))
        best = &u;
    }
    if (best) return best;
  }
  return nullptr;
}

inline EnclosingContext extract_enclosure(std::string_view file_text, Language language,
                                          LineSpan span) {
  auto lines = text::split_lines(file_text);
  int n = static_cast<int>(lines.size());
  if (span.start < 1 || span.end < span.start || span.end > n)
    throw Error(Errc::span_out_of_range, "span " + std::to_string(span.start) + "-" +
                                             std::to_string(span.end) + " outside 1.." +
                                             std::to_string(n));
  auto units = make_adapter(language)->units(file_text);
  EnclosingContext ctx;
  ctx.language = language;
  if (const SyntaxUnit* u = innermost_unit(units, span)) {
    ctx.unit_kind = u->kind;
    ctx.start_line = u->start_line;
    ctx.end_line = u->end_line;
  } else {
    ctx.unit_kind = UnitKind::module_scope;
    ctx.start_line = 1;
    ctx.end_line = n;
  }
  ctx.source_text = slice_lines(lines, ctx.start_line, ctx.end_line);
  return ctx;
}

}  // namespace melcot::context
