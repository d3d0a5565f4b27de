#pragma once

#include <algorithm>
#include <cctype>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "melcot/context/language.hpp"
#include "melcot/core/error.hpp"
#include "melcot/core/text.hpp"

// Structural scanners that recover function and class-like units (with their
// line spans) from source text. They are not full parsers: they tokenize far
// enough to skip comments, strings and preprocessor lines, then classify each
// brace block (or Python suite) by the tokens that introduce it.

namespace melcot::context {

enum class UnitKind { function, class_like, module_scope };

constexpr std::string_view to_string(UnitKind k) noexcept {
  switch (k) {
    case UnitKind::function: return "function";
    case UnitKind::class_like: return "class_like";
    case UnitKind::module_scope: return "module_scope";
  }
  return "?";
}

inline UnitKind unit_kind_from_string(std::string_view s) {
  if (s == "function") return UnitKind::function;
  if (s == "class_like") return UnitKind::class_like;
  if (s == "module_scope") return UnitKind::module_scope;
  throw Error(Errc::invalid_argument, "unknown unit kind: " + std::string(s));
}

struct SyntaxUnit {
  UnitKind kind = UnitKind::function;
  int start_line = 1;
  int end_line = 1;
  int depth = 0;
  std::string name;
};

class SyntaxAdapter {
 public:
  virtual ~SyntaxAdapter() = default;
  // All function and class-like units in the file. Throws parse_failed when
  // the text cannot be scanned (unterminated literal, unbalanced nesting).
  virtual std::vector<SyntaxUnit> units(std::string_view source) const = 0;
};

namespace syntax {

struct Token {
  enum class Kind { ident, number, string, punct };
  Kind kind = Kind::punct;
  std::string text;
  int line = 1;

  bool is(std::string_view p) const { return text == p && kind != Kind::string; }
  bool ident() const { return kind == Kind::ident; }
};

struct LexOptions {
  bool preprocessor = false;     // C/C++ '#' lines
  bool cpp_raw_strings = false;  // R"x(...)x"
  bool digit_separators = false; // 1'000
  bool java_text_blocks = false; // """ ... """
  bool js_templates = false;     // `...${}...`
  bool js_regex = false;
  bool go_raw_strings = false;   // `...`
  bool go_semicolons = false;    // automatic ';' at line ends
};

[[noreturn]] inline void fail(int line, const std::string& what) {
  throw Error(Errc::parse_failed, "line " + std::to_string(line) + ": " + what);
}

inline bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '$' ||
         static_cast<unsigned char>(c) >= 0x80;
}
inline bool ident_char(char c) {
  return ident_start(c) || std::isdigit(static_cast<unsigned char>(c)) != 0;
}

class Lexer {
 public:
  Lexer(std::string_view src, LexOptions opt) : s_(src), opt_(opt) {}

  std::vector<Token> run() {
    while (i_ < s_.size()) {
      char c = s_[i_];
      if (c == '\n') {
        if (opt_.go_semicolons) maybe_insert_semicolon();
        ++line_;
        ++i_;
        at_line_start_ = true;
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
        ++i_;
        continue;
      }
      if (opt_.preprocessor && at_line_start_ && c == '#') {
        skip_preprocessor();
        continue;
      }
      at_line_start_ = false;
      if (c == '/' && peek(1) == '/') {
        while (i_ < s_.size() && s_[i_] != '\n') ++i_;
        continue;
      }
      if (c == '/' && peek(1) == '*') {
        skip_block_comment();
        continue;
      }
      if (ident_start(c)) {
        lex_ident();
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) != 0 ||
          (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))) != 0)) {
        lex_number();
        continue;
      }
      if (c == '"') {
        if (opt_.java_text_blocks && peek(1) == '"' && peek(2) == '"') {
          lex_text_block();
        } else {
          lex_quoted('"');
        }
        continue;
      }
      if (c == '\'') {
        lex_quoted('\'');
        continue;
      }
      if (c == '`' && opt_.js_templates) {
        int start = line_;
        ++i_;
        skip_template();
        push(Token::Kind::string, "`", start);
        continue;
      }
      if (c == '`' && opt_.go_raw_strings) {
        int start = line_;
        ++i_;
        while (i_ < s_.size() && s_[i_] != '`') {
          if (s_[i_] == '\n') ++line_;
          ++i_;
        }
        if (i_ >= s_.size()) fail(start, "unterminated raw string");
        ++i_;
        push(Token::Kind::string, "`", start);
        last_end_ = line_;
        continue;
      }
      if (c == '/' && opt_.js_regex && regex_allowed() && lex_regex()) continue;
      lex_punct();
    }
    if (opt_.go_semicolons) maybe_insert_semicolon();
    return std::move(toks_);
  }

 private:
  char peek(std::size_t k) const { return i_ + k < s_.size() ? s_[i_ + k] : '\0'; }

  void push(Token::Kind k, std::string text, int line) {
    toks_.push_back(Token{k, std::move(text), line});
    last_end_ = line;
  }

  void maybe_insert_semicolon() {
    if (toks_.empty()) return;
    const auto& t = toks_.back();
    if (last_end_ != line_) return;
    static const std::unordered_set<std::string> enders{")", "]", "}", "++", "--"};
    static const std::unordered_set<std::string> kw{"break", "continue", "fallthrough", "return"};
    bool ends = t.kind == Token::Kind::number || t.kind == Token::Kind::string ||
                (t.kind == Token::Kind::ident) || (t.kind == Token::Kind::punct && enders.count(t.text));
    if (t.kind == Token::Kind::ident && !kw.count(t.text)) ends = true;
    if (ends) push(Token::Kind::punct, ";", line_);
  }

  void skip_preprocessor() {
    while (i_ < s_.size() && s_[i_] != '\n') {
      if (s_[i_] == '\\' && peek(1) == '\n') {
        i_ += 2;
        ++line_;
        continue;
      }
      if (s_[i_] == '/' && peek(1) == '*') {
        skip_block_comment();
        continue;
      }
      if (s_[i_] == '/' && peek(1) == '/') {
        while (i_ < s_.size() && s_[i_] != '\n') ++i_;
        break;
      }
      ++i_;
    }
  }

  void skip_block_comment() {
    int start = line_;
    i_ += 2;
    while (i_ < s_.size() && !(s_[i_] == '*' && peek(1) == '/')) {
      if (s_[i_] == '\n') ++line_;
      ++i_;
    }
    if (i_ >= s_.size()) fail(start, "unterminated block comment");
    i_ += 2;
  }

  void lex_ident() {
    std::size_t b = i_;
    while (i_ < s_.size() && ident_char(s_[i_])) ++i_;
    std::string id(s_.substr(b, i_ - b));
    if (opt_.cpp_raw_strings && i_ < s_.size() && s_[i_] == '"' &&
        (id == "R" || id == "u8R" || id == "uR" || id == "UR" || id == "LR")) {
      lex_cpp_raw_string();
      return;
    }
    if (opt_.preprocessor && i_ < s_.size() && (s_[i_] == '"' || s_[i_] == '\'') &&
        (id == "u8" || id == "u" || id == "U" || id == "L")) {
      lex_quoted(s_[i_]);
      return;
    }
    push(Token::Kind::ident, std::move(id), line_);
  }

  void lex_number() {
    std::size_t b = i_;
    while (i_ < s_.size()) {
      char c = s_[i_];
      if (std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '.' || c == '_') {
        // exponent sign
        if ((c == 'e' || c == 'E' || c == 'p' || c == 'P') && (peek(1) == '+' || peek(1) == '-')) {
          i_ += 2;
          continue;
        }
        ++i_;
      } else if (c == '\'' && opt_.digit_separators &&
                 std::isalnum(static_cast<unsigned char>(peek(1))) != 0) {
        ++i_;
      } else {
        break;
      }
    }
    push(Token::Kind::number, std::string(s_.substr(b, i_ - b)), line_);
  }

  void lex_quoted(char q) {
    int start = line_;
    ++i_;
    while (i_ < s_.size() && s_[i_] != q) {
      if (s_[i_] == '\\') {
        if (peek(1) == '\n') ++line_;
        i_ += 2;
        continue;
      }
      if (s_[i_] == '\n') fail(start, "unterminated string literal");
      ++i_;
    }
    if (i_ >= s_.size()) fail(start, "unterminated string literal");
    ++i_;
    push(Token::Kind::string, std::string(1, q), start);
  }

  void lex_text_block() {
    int start = line_;
    i_ += 3;
    while (i_ < s_.size() && !(s_[i_] == '"' && peek(1) == '"' && peek(2) == '"')) {
      if (s_[i_] == '\\') {
        if (peek(1) == '\n') ++line_;
        i_ += 2;
        continue;
      }
      if (s_[i_] == '\n') ++line_;
      ++i_;
    }
    if (i_ >= s_.size()) fail(start, "unterminated text block");
    i_ += 3;
    push(Token::Kind::string, "\"\"\"", start);
  }

  void lex_cpp_raw_string() {
    int start = line_;
    ++i_;  // opening quote
    std::size_t paren = s_.find('(', i_);
    if (paren == std::string_view::npos) fail(start, "bad raw string");
    std::string close = ")" + std::string(s_.substr(i_, paren - i_)) + "\"";
    std::size_t end = s_.find(close, paren + 1);
    if (end == std::string_view::npos) fail(start, "unterminated raw string");
    for (std::size_t k = i_; k < end; ++k)
      if (s_[k] == '\n') ++line_;
    i_ = end + close.size();
    push(Token::Kind::string, "R\"", start);
  }

  // Consumes a template literal body after the opening backtick, including
  // nested ${ ... } expressions.
  void skip_template() {
    int start = line_;
    while (i_ < s_.size()) {
      char c = s_[i_];
      if (c == '\\') {
        if (peek(1) == '\n') ++line_;
        i_ += 2;
        continue;
      }
      if (c == '\n') ++line_;
      if (c == '`') {
        ++i_;
        return;
      }
      if (c == '$' && peek(1) == '{') {
        i_ += 2;
        skip_template_expr();
        continue;
      }
      ++i_;
    }
    fail(start, "unterminated template literal");
  }

  void skip_template_expr() {
    int depth = 1;
    int start = line_;
    while (i_ < s_.size()) {
      char c = s_[i_];
      if (c == '\n') ++line_;
      if (c == '`') {
        ++i_;
        skip_template();
        continue;
      }
      if (c == '"' || c == '\'') {
        std::size_t before = toks_.size();
        lex_quoted(c);
        toks_.resize(before);
        continue;
      }
      if (c == '/' && peek(1) == '*') {
        skip_block_comment();
        continue;
      }
      if (c == '{') ++depth;
      if (c == '}' && --depth == 0) {
        ++i_;
        return;
      }
      ++i_;
    }
    fail(start, "unterminated template expression");
  }

  bool regex_allowed() const {
    if (toks_.empty()) return true;
    const auto& t = toks_.back();
    if (t.kind == Token::Kind::number || t.kind == Token::Kind::string) return false;
    if (t.kind == Token::Kind::ident) {
      static const std::unordered_set<std::string> kw{
          "return", "typeof", "case", "do", "else", "in", "of", "new", "delete",
          "void", "throw", "instanceof", "yield", "await"};
      return kw.count(t.text) > 0;
    }
    return !(t.text == ")" || t.text == "]" || t.text == "}" || t.text == "++" || t.text == "--");
  }

  bool lex_regex() {
    std::size_t k = i_ + 1;
    bool in_class = false;
    while (k < s_.size()) {
      char c = s_[k];
      if (c == '\n') return false;
      if (c == '\\') {
        k += 2;
        continue;
      }
      if (c == '[') in_class = true;
      else if (c == ']') in_class = false;
      else if (c == '/' && !in_class) break;
      ++k;
    }
    if (k >= s_.size()) return false;
    ++k;
    while (k < s_.size() && ident_char(s_[k])) ++k;
    i_ = k;
    push(Token::Kind::string, "/", line_);
    return true;
  }

  void lex_punct() {
    static constexpr std::string_view two[] = {"=>", "->", "::", "++", "--"};
    for (auto p : two) {
      if (s_.substr(i_, 2) == p) {
        push(Token::Kind::punct, std::string(p), line_);
        i_ += 2;
        return;
      }
    }
    push(Token::Kind::punct, std::string(1, s_[i_]), line_);
    ++i_;
  }

  std::string_view s_;
  LexOptions opt_;
  std::size_t i_ = 0;
  int line_ = 1;
  bool at_line_start_ = true;
  int last_end_ = 0;  // line where the latest token ends
  std::vector<Token> toks_;
};

// Tokens that introduce a brace block, i.e. everything back to the previous
// statement boundary. Stored as indices into the token vector.
struct Header {
  std::vector<std::size_t> idx;
  const std::vector<Token>* toks = nullptr;

  bool empty() const { return idx.empty(); }
  std::size_t size() const { return idx.size(); }
  const Token& operator[](std::size_t k) const { return (*toks)[idx[k]]; }
  const Token& back() const { return (*toks)[idx.back()]; }
};

enum class Family { c, cpp, java, js, go };

inline bool is_access_specifier(const Token& t) {
  return t.ident() && (t.text == "public" || t.text == "private" || t.text == "protected" ||
                       t.text == "signals" || t.text == "slots");
}

inline Header scan_header(const std::vector<Token>& toks, std::size_t brace, Family fam) {
  Header h;
  h.toks = &toks;
  int depth = 0;
  int angle = 0;
  for (std::size_t j = brace; j-- > 0;) {
    const Token& t = toks[j];
    if (t.kind == Token::Kind::punct) {
      const auto& p = t.text;
      if (fam == Family::js && depth == 0 && !p.empty() &&
          p.find_first_not_of('>') == std::string::npos) {
        angle += static_cast<int>(p.size());
      } else if (fam == Family::js && depth == 0 && p == "<" && angle > 0) {
        --angle;
      }
      if (p == ")" || p == "]") {
        ++depth;
      } else if (p == "}") {
        if (depth == 0) break;
        ++depth;
      } else if (p == "(" || p == "[" || p == "{") {
        if (depth == 0) break;
        --depth;
      } else if (depth == 0 && p == ";") {
        break;
      } else if (depth == 0 && angle == 0 && p == "," && (fam == Family::js || fam == Family::go)) {
        break;
      } else if (depth == 0 && p == ":" && fam == Family::cpp && j > 0 &&
                 is_access_specifier(toks[j - 1])) {
        break;
      }
    }
    // JS has no mandatory semicolons: a line break between a token that can
    // end a statement and one that can start one is a boundary, except after
    // decorator lines.
    if (fam == Family::js && depth == 0 && !h.idx.empty()) {
      const Token& later = toks[h.idx.front()];
      if (later.line > t.line) {
        bool can_end = t.kind != Token::Kind::punct || t.text == ")" || t.text == "]";
        bool can_start = later.kind == Token::Kind::ident || later.is("@") || later.is("[") ||
                         later.is("*") || later.kind == Token::Kind::string;
        bool decorator_line = false;
        for (std::size_t k = j + 1; k-- > 0;) {
          if (toks[k].line != t.line) break;
          decorator_line = toks[k].is("@");
          if (k == 0) break;
        }
        if (can_end && can_start && !decorator_line) break;
      }
    }
    h.idx.insert(h.idx.begin(), j);
  }
  return h;
}

// Indices (into the header) of tokens at paren/bracket depth 0.
inline std::vector<std::size_t> top_level(const Header& h) {
  std::vector<std::size_t> out;
  int depth = 0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const Token& t = h[k];
    if (t.kind == Token::Kind::punct && (t.text == "(" || t.text == "[" || t.text == "{")) {
      if (depth == 0) out.push_back(k);
      ++depth;
      continue;
    }
    if (t.kind == Token::Kind::punct && (t.text == ")" || t.text == "]" || t.text == "}")) {
      --depth;
      continue;
    }
    if (depth == 0) out.push_back(k);
  }
  return out;
}

inline std::size_t matching_close(const Header& h, std::size_t open) {
  int depth = 0;
  for (std::size_t k = open; k < h.size(); ++k) {
    const Token& t = h[k];
    if (t.kind != Token::Kind::punct) continue;
    if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
    if (t.text == ")" || t.text == "]" || t.text == "}") {
      if (--depth == 0) return k;
    }
  }
  return h.size();
}

inline bool has_top(const Header& h, const std::vector<std::size_t>& top, std::string_view word) {
  for (auto k : top)
    if (h[k].is(word)) return true;
  return false;
}

inline const std::unordered_set<std::string>& non_function_callees() {
  static const std::unordered_set<std::string> s{
      "if",       "for",        "while",     "switch",        "catch",    "return",
      "sizeof",   "alignof",    "decltype",  "typeid",        "alignas",  "__attribute__",
      "__declspec", "throw",    "noexcept",  "new",           "delete",   "synchronized",
      "static_assert", "defined", "assert",  "foreach",       "using",    "requires"};
  return s;
}

// Finds the parameter list of a function-shaped header: the first top-level
// "(" group whose callee is a plain name (or an operator). Returns the index
// of the closing ")" or header size when there is none.
inline std::size_t function_params_end(const Header& h, const std::vector<std::size_t>& top,
                                       std::string& name) {
  for (std::size_t t = 0; t < top.size(); ++t) {
    std::size_t k = top[t];
    if (!h[k].is("(") || k == 0) continue;
    const Token& prev = h[k - 1];
    bool operator_name = false;
    for (std::size_t back = 1; back <= 3 && back <= k; ++back)
      if (h[k - back].is("operator")) operator_name = true;
    if (operator_name) {
      std::size_t close = matching_close(h, k);
      // operator()(...) : the first group is part of the name
      if (prev.is("operator") && close == k + 1 && close + 1 < h.size() && h[close + 1].is("(")) {
        name = "operator()";
        return matching_close(h, close + 1);
      }
      name = "operator";
      return close;
    }
    if (!prev.ident() || non_function_callees().count(prev.text)) continue;
    name = prev.text;
    return matching_close(h, k);
  }
  return h.size();
}

inline bool control_header(const Header& h, const std::vector<std::size_t>& top, Family fam) {
  static const std::unordered_set<std::string> c_kw{"if",   "for",  "while", "switch",
                                                    "else", "do",   "try",   "catch",
                                                    "case", "default", "return", "goto"};
  static const std::unordered_set<std::string> java_kw{"if",      "for",     "while", "switch",
                                                       "else",    "do",      "try",   "catch",
                                                       "finally", "synchronized", "case",
                                                       "default", "return",  "static"};
  static const std::unordered_set<std::string> js_kw{"if",   "for",   "while",  "switch", "else",
                                                     "do",   "try",   "catch",  "finally",
                                                     "with", "case",  "default", "return"};
  static const std::unordered_set<std::string> go_kw{"if",     "for",    "switch", "select",
                                                     "else",   "case",   "default", "go",
                                                     "defer",  "return"};
  const auto& kw = fam == Family::java ? java_kw
                   : fam == Family::js ? js_kw
                   : fam == Family::go ? go_kw
                                       : c_kw;
  for (auto k : top) {
    if (!h[k].ident() || !kw.count(h[k].text)) continue;
    // Java "static" only marks a static initializer block when it stands alone.
    if (fam == Family::java && h[k].text == "static" && top.size() > 1) continue;
    return true;
  }
  return false;
}

struct Classified {
  bool unit = false;
  UnitKind kind = UnitKind::function;
  std::string name;
};

inline Classified classify_c_family(const Header& h, Family fam) {
  Classified none;
  if (h.empty()) return none;
  auto top = top_level(h);
  if (control_header(h, top, fam)) return none;

  auto class_keyword = [&]() -> bool {
    for (auto k : top) {
      const Token& t = h[k];
      if (!t.ident()) continue;
      if (fam == Family::java) {
        if (t.text == "class" || t.text == "interface" || t.text == "enum" || t.text == "record")
          return true;
      } else {
        if (t.text == "struct" || t.text == "union" || t.text == "enum") return true;
        if (fam == Family::cpp && (t.text == "class" || t.text == "namespace")) return true;
      }
    }
    return false;
  };

  // Java anonymous class: new Foo(...) {
  if (fam == Family::java) {
    for (std::size_t t = 0; t + 1 < top.size(); ++t) {
      if (h[top[t]].is("new") && h.back().is(")")) return {true, UnitKind::class_like, "<anonymous>"};
    }
    if (class_keyword()) return {true, UnitKind::class_like, ""};
    // Compact record constructor: [modifiers] Name {
    static const std::unordered_set<std::string> mods{"public", "protected", "private"};
    std::size_t k = 0;
    while (k + 1 < h.size() && h[k].ident() && mods.count(h[k].text)) ++k;
    if (k + 1 == h.size() && h[k].ident() && std::isupper(static_cast<unsigned char>(h[k].text[0])))
      return {true, UnitKind::function, h[k].text};
  }

  // A top-level '=' before the parameter list means an initializer, not a
  // definition (operator= excepted).
  std::string name;
  std::size_t close = function_params_end(h, top, name);
  if (close < h.size()) {
    bool assignment = false;
    for (auto k : top) {
      if (k >= close) break;
      if (h[k].is("=") && !(k > 0 && h[k - 1].is("operator")) &&
          !(k > 0 && (h[k - 1].is("<") || h[k - 1].is(">") || h[k - 1].is("!") ||
                      h[k - 1].is("=")))) {
        assignment = true;
      }
    }
    // '=' inside a template parameter list does not count
    if (assignment && fam == Family::cpp && h.size() > 0 && h[0].is("template")) assignment = false;
    std::size_t tail = close + 1;
    bool tail_ok = tail >= h.size();
    if (!tail_ok) {
      const Token& t = h[tail];
      if (fam == Family::java) {
        tail_ok = t.is("throws");
      } else {
        static const std::unordered_set<std::string> quals{
            "const", "volatile", "noexcept", "override", "final", "mutable", "&", "&&",
            "->",    ":",        "try",      "throw",    "requires", "[", "__attribute__"};
        tail_ok = quals.count(t.text) > 0;
      }
    }
    if (!assignment && tail_ok) return {true, UnitKind::function, name};
  }
  if (fam != Family::java && class_keyword()) {
    bool assignment = has_top(h, top, "=");
    if (!assignment) return {true, UnitKind::class_like, ""};
  }
  return none;
}

inline Classified classify_js(const Header& h, bool typescript) {
  Classified none;
  if (h.empty()) return none;
  auto top = top_level(h);

  // Named binding in front of a function expression or arrow function:
  // const f = ..., f = ..., f: ...
  auto bound = [&]() {
    for (std::size_t t = 1; t < top.size(); ++t) {
      const Token& tk = h[top[t]];
      if ((tk.is("=") || tk.is(":")) && h[top[t - 1]].ident()) return true;
      if (tk.is("=") && h[top[t - 1]].is(">")) return true;  // typed binding: x: Foo<T> = ...
    }
    return false;
  };

  for (std::size_t t = 0; t < top.size(); ++t) {
    if (!h[top[t]].is("function")) continue;
    std::size_t k = top[t] + 1;
    if (k < h.size() && h[k].is("*")) ++k;
    if (k < h.size() && h[k].ident()) return {true, UnitKind::function, h[k].text};
    if (bound()) return {true, UnitKind::function, ""};
    return none;
  }
  if (h.back().is("=>")) {
    if (bound()) return {true, UnitKind::function, ""};
    return none;
  }
  if (control_header(h, top, Family::js)) return none;

  static const std::unordered_set<std::string> modifiers{
      "export",   "default", "declare", "abstract", "static",   "async",    "public",
      "private",  "protected", "readonly", "override", "get",     "set",      "accessor"};
  std::size_t first = 0;
  while (first < top.size() && h[top[first]].ident() && modifiers.count(h[top[first]].text) &&
         first + 1 < top.size() && !h[top[first + 1]].is("("))
    ++first;
  if (first < top.size() && h[top[first]].is("@")) {
    // decorators: @name or @name(...) ahead of the declaration
    while (first < top.size() && h[top[first]].is("@")) {
      first += 2;
      if (first < top.size() && h[top[first]].is("(")) ++first;
      while (first < top.size() && h[top[first]].ident() && modifiers.count(h[top[first]].text) &&
             first + 1 < top.size() && !h[top[first + 1]].is("("))
        ++first;
    }
  }
  if (first >= top.size()) return none;
  const Token& lead = h[top[first]];
  if (lead.is("class")) return {true, UnitKind::class_like, ""};
  if (typescript && (lead.is("interface") || lead.is("enum") || lead.is("namespace") ||
                     lead.is("module")))
    return {true, UnitKind::class_like, ""};
  if (lead.is("const") && first + 1 < top.size() && h[top[first + 1]].is("enum") && typescript)
    return {true, UnitKind::class_like, ""};
  if (has_top(h, top, "class") && bound()) return {true, UnitKind::class_like, ""};

  // Method shape: [*] name [?|!] [<...>] ( ... ) [: type]
  std::size_t k = top[first];
  if (h[k].is("*")) ++k;
  std::string name;
  if (k < h.size() && (h[k].ident() || h[k].kind == Token::Kind::string ||
                       h[k].kind == Token::Kind::number)) {
    name = h[k].text;
    ++k;
  } else if (k < h.size() && h[k].is("[")) {
    k = matching_close(h, k) + 1;
    name = "[computed]";
  } else {
    return none;
  }
  static const std::unordered_set<std::string> reserved{
      "if", "for", "while", "switch", "catch", "function", "return", "new", "typeof", "with"};
  if (reserved.count(name)) return none;
  if (k < h.size() && (h[k].is("?") || h[k].is("!"))) ++k;
  if (k < h.size() && h[k].is("<")) {
    int depth = 0;
    for (; k < h.size(); ++k) {
      if (h[k].is("<")) ++depth;
      if (h[k].is(">") && --depth == 0) {
        ++k;
        break;
      }
    }
  }
  if (k >= h.size() || !h[k].is("(")) return none;
  std::size_t close = matching_close(h, k);
  if (close >= h.size()) return none;
  if (close + 1 == h.size() || h[close + 1].is(":")) return {true, UnitKind::function, name};
  return none;
}

inline Classified classify_go(const Header& h) {
  Classified none;
  if (h.empty()) return none;
  auto top = top_level(h);
  if (h[0].is("func")) {
    // func Name(...)  or  func (recv) Name(...)
    if (h.size() > 1 && h[1].ident()) return {true, UnitKind::function, h[1].text};
    if (h.size() > 1 && h[1].is("(")) {
      std::size_t close = matching_close(h, 1);
      if (close + 2 < h.size() && h[close + 1].ident() && h[close + 2].is("("))
        return {true, UnitKind::function, h[close + 1].text};
    }
    return none;
  }
  if (control_header(h, top, Family::go)) return none;
  bool type_kw = h[0].is("type");
  const Token& last = h.back();
  if (last.is("struct") || last.is("interface")) {
    if (type_kw) return {true, UnitKind::class_like, h.size() > 1 ? h[1].text : ""};
    // member of a grouped type (...) declaration
    if (h.size() == 2 && h[0].ident()) return {true, UnitKind::class_like, h[0].text};
  }
  return none;
}

class BraceAdapter : public SyntaxAdapter {
 public:
  BraceAdapter(Family fam, LexOptions opt, bool typescript = false)
      : fam_(fam), opt_(opt), typescript_(typescript) {}

  std::vector<SyntaxUnit> units(std::string_view source) const override {
    auto toks = Lexer(source, opt_).run();
    struct Open {
      Classified what;
      int start_line;
    };
    std::vector<Open> stack;
    std::vector<SyntaxUnit> out;
    int paren_depth = 0;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      const Token& t = toks[i];
      if (t.kind != Token::Kind::punct) continue;
      if (t.text == "(" || t.text == "[") ++paren_depth;
      if (t.text == ")" || t.text == "]") {
        if (--paren_depth < 0) fail(t.line, "unbalanced '" + t.text + "'");
      }
      if (t.text == "{") {
        Header h = scan_header(toks, i, fam_);
        Classified c = fam_ == Family::js   ? classify_js(h, typescript_)
                       : fam_ == Family::go ? classify_go(h)
                                            : classify_c_family(h, fam_);
        int start = h.empty() ? t.line : h[0].line;
        stack.push_back({c, start});
      } else if (t.text == "}") {
        if (stack.empty()) fail(t.line, "unbalanced '}'");
        Open o = stack.back();
        stack.pop_back();
        if (o.what.unit) {
          int depth = 0;
          for (const auto& s : stack)
            if (s.what.unit) ++depth;
          out.push_back({o.what.kind, o.start_line, t.line, depth, o.what.name});
        }
      }
    }
    if (!stack.empty()) fail(toks.empty() ? 1 : toks.back().line, "unclosed '{'");
    if (paren_depth != 0) fail(toks.empty() ? 1 : toks.back().line, "unbalanced parentheses");
    return out;
  }

 private:
  Family fam_;
  LexOptions opt_;
  bool typescript_;
};

// Python: indentation-defined suites. Logical lines are tracked through
// brackets, backslash continuations and triple-quoted strings.
class PythonAdapter : public SyntaxAdapter {
 public:
  std::vector<SyntaxUnit> units(std::string_view source) const override {
    struct Logical {
      int first = 0, last = 0, indent = 0;
      std::string head;  // leading code of the first physical line
    };
    std::vector<Logical> logical;
    auto lines = text::split_lines(source);
    int depth = 0;
    std::string triple;  // open triple-quote delimiter
    bool continuation = false;
    for (std::size_t n = 0; n < lines.size(); ++n) {
      const std::string& l = lines[n];
      int lineno = static_cast<int>(n) + 1;
      bool joining = depth > 0 || !triple.empty() || continuation;
      continuation = false;
      if (!joining) {
        int indent = 0;
        std::size_t p = 0;
        for (; p < l.size() && (l[p] == ' ' || l[p] == '\t' || l[p] == '\f'); ++p)
          indent = l[p] == '\t' ? (indent / 8 + 1) * 8 : indent + 1;
        if (p == l.size() || l[p] == '#' || l[p] == '\r') continue;
        logical.push_back({lineno, lineno, indent, l.substr(p)});
      } else if (!logical.empty()) {
        logical.back().last = lineno;
      }
      // scan the physical line
      std::size_t i = 0;
      while (i < l.size()) {
        if (!triple.empty()) {
          auto end = l.find(triple, i);
          while (end != std::string::npos && end > 0 && l[end - 1] == '\\' &&
                 !(end > 1 && l[end - 2] == '\\'))
            end = l.find(triple, end + 1);
          if (end == std::string::npos) {
            i = l.size();
            break;
          }
          i = end + 3;
          triple.clear();
          continue;
        }
        char c = l[i];
        if (c == '#') break;
        if (c == '"' || c == '\'') {
          if (l.compare(i, 3, std::string(3, c)) == 0) {
            triple = std::string(3, c);
            i += 3;
            continue;
          }
          std::size_t k = i + 1;
          while (k < l.size() && l[k] != c) k += l[k] == '\\' ? 2 : 1;
          if (k >= l.size()) {
            if (!l.empty() && l.back() == '\\') {
              fail(lineno, "string continued with backslash is not supported");
            }
            fail(lineno, "unterminated string literal");
          }
          i = k + 1;
          continue;
        }
        if (c == '(' || c == '[' || c == '{') ++depth;
        if (c == ')' || c == ']' || c == '}') {
          if (--depth < 0) fail(lineno, "unbalanced bracket");
        }
        if (c == '\\' && i + 1 == l.size()) continuation = true;
        ++i;
      }
    }
    if (!triple.empty()) fail(static_cast<int>(lines.size()), "unterminated triple-quoted string");
    if (depth != 0) fail(static_cast<int>(lines.size()), "unbalanced brackets at end of file");

    auto keyword = [](const std::string& head) -> std::pair<UnitKind, std::string> {
      auto word_after = [&](std::size_t from) {
        std::size_t b = head.find_first_not_of(" \t", from);
        std::size_t e = b;
        while (e < head.size() && ident_char(head[e])) ++e;
        return b == std::string::npos ? std::string() : head.substr(b, e - b);
      };
      auto starts = [&](std::string_view kw) {
        return head.compare(0, kw.size(), kw) == 0 && head.size() > kw.size() &&
               (head[kw.size()] == ' ' || head[kw.size()] == '\t');
      };
      if (starts("def")) return {UnitKind::function, word_after(3)};
      if (starts("async") && word_after(5) == "def") {
        auto p = head.find("def");
        return {UnitKind::function, word_after(p + 3)};
      }
      if (starts("class")) return {UnitKind::class_like, word_after(5)};
      return {UnitKind::module_scope, ""};
    };

    std::vector<SyntaxUnit> out;
    for (std::size_t k = 0; k < logical.size(); ++k) {
      auto [kind, name] = keyword(logical[k].head);
      if (kind == UnitKind::module_scope) continue;
      int indent = logical[k].indent;
      int end = logical[k].last;
      for (std::size_t j = k + 1; j < logical.size() && logical[j].indent > indent; ++j)
        end = logical[j].last;
      int start = logical[k].first;
      for (std::size_t d = k; d-- > 0;) {
        if (logical[d].indent != indent || logical[d].head.empty() || logical[d].head[0] != '@')
          break;
        start = logical[d].first;
      }
      out.push_back({kind, start, end, 0, name});
    }
    for (auto& u : out)
      for (const auto& o : out)
        if (&o != &u && o.start_line <= u.start_line && u.end_line <= o.end_line &&
            (o.end_line - o.start_line) > (u.end_line - u.start_line))
          ++u.depth;
    return out;
  }
};

}  // namespace syntax

inline std::unique_ptr<SyntaxAdapter> make_adapter(Language lang) {
  using syntax::BraceAdapter;
  using syntax::Family;
  using syntax::LexOptions;
  switch (lang) {
    case Language::python:
      return std::make_unique<syntax::PythonAdapter>();
    case Language::c: {
      LexOptions o;
      o.preprocessor = true;
      return std::make_unique<BraceAdapter>(Family::c, o);
    }
    case Language::cpp: {
      LexOptions o;
      o.preprocessor = true;
      o.cpp_raw_strings = true;
      o.digit_separators = true;
      return std::make_unique<BraceAdapter>(Family::cpp, o);
    }
    case Language::java: {
      LexOptions o;
      o.java_text_blocks = true;
      return std::make_unique<BraceAdapter>(Family::java, o);
    }
    case Language::javascript:
    case Language::typescript: {
      LexOptions o;
      o.js_templates = true;
      o.js_regex = true;
      return std::make_unique<BraceAdapter>(Family::js, o, lang == Language::typescript);
    }
    case Language::go: {
      LexOptions o;
      o.go_raw_strings = true;
      o.go_semicolons = true;
      return std::make_unique<BraceAdapter>(Family::go, o);
    }
  }
  throw Error(Errc::unsupported_language, "no adapter");
}

}  // namespace melcot::context
