#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "melcot/core/error.hpp"
#include "melcot/core/io.hpp"

namespace melcot::budget {

class TokenCounter {
 public:
  virtual ~TokenCounter() = default;
  virtual std::string name() const = 0;
  virtual std::size_t count(std::string_view text) const = 0;
};

inline std::size_t count_tokens(const TokenCounter& counter, std::string_view text) {
  return counter.count(text);
}

namespace detail {
inline bool word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}
inline bool space_byte(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}
inline bool continuation_byte(unsigned char c) { return (c & 0xC0) == 0x80; }
}  // namespace detail

// Bundled segmenter: each maximal run of [A-Za-z0-9_] is one token, every
// other non-whitespace character (a UTF-8 code point) is one token.
class FallbackCounter : public TokenCounter {
 public:
  std::string name() const override { return "fallback"; }

  std::size_t count(std::string_view text) const override {
    std::size_t n = 0;
    bool in_word = false;
    bool prev_lead = false;  // previous byte started a multi-byte code point
    for (unsigned char c : text) {
      if (detail::word_byte(c)) {
        if (!in_word) ++n;
        in_word = true;
        prev_lead = false;
        continue;
      }
      in_word = false;
      if (detail::space_byte(c)) {
        prev_lead = false;
        continue;
      }
      if (detail::continuation_byte(c) && prev_lead) continue;
      ++n;
      prev_lead = c >= 0xC0;
    }
    return n;
  }
};

// Byte-level BPE counter for tokenizer.json files (vocab + merges). The
// pre-tokenizer splits on the usual GPT-style classes (contractions, letter
// runs, single digits, punctuation runs, whitespace) with ASCII character
// classes; non-ASCII bytes are treated as letters.
class BpeCounter : public TokenCounter {
 public:
  static std::unique_ptr<BpeCounter> load(const std::filesystem::path& path) {
    std::string raw;
    try {
      raw = io::read_file(path);
    } catch (const Error&) {
      throw Error(Errc::config, "tokenizer file unreadable: " + path.string());
    }
    auto j = nlohmann::json::parse(raw, nullptr, false);
    if (j.is_discarded()) throw Error(Errc::config, "tokenizer file is not JSON: " + path.string());
    const nlohmann::json* model = j.contains("model") ? &j["model"] : &j;
    if (!model->contains("merges"))
      throw Error(Errc::config, "tokenizer file lacks merges: " + path.string());
    auto out = std::unique_ptr<BpeCounter>(new BpeCounter());
    out->name_ = "bpe:" + path.filename().string();
    int rank = 0;
    for (const auto& m : (*model)["merges"]) {
      std::string a, b;
      if (m.is_string()) {
        auto s = m.get<std::string>();
        auto sp = s.find(' ');
        if (sp == std::string::npos) continue;
        a = s.substr(0, sp);
        b = s.substr(sp + 1);
      } else if (m.is_array() && m.size() == 2) {
        a = m[0].get<std::string>();
        b = m[1].get<std::string>();
      } else {
        throw Error(Errc::config, "bad merge entry in " + path.string());
      }
      out->ranks_.emplace(a + '\x01' + b, rank++);
    }
    return out;
  }

  std::string name() const override { return name_; }

  std::size_t count(std::string_view text) const override {
    std::size_t n = 0;
    for (auto piece : pretokenize(text)) n += word_tokens(piece);
    return n;
  }

 private:
  BpeCounter() {
    // GPT-2 byte -> printable code point table.
    int extra = 0;
    for (int b = 0; b < 256; ++b) {
      bool printable = (b >= '!' && b <= '~') || (b >= 0xA1 && b <= 0xAC) || (b >= 0xAE && b <= 0xFF);
      int cp = printable ? b : 256 + extra++;
      byte_symbol_[static_cast<std::size_t>(b)] = utf8(cp);
    }
  }

  static std::string utf8(int cp) {
    std::string s;
    if (cp < 0x80) {
      s += static_cast<char>(cp);
    } else {
      s += static_cast<char>(0xC0 | (cp >> 6));
      s += static_cast<char>(0x80 | (cp & 0x3F));
    }
    return s;
  }

  static std::vector<std::string_view> pretokenize(std::string_view s) {
    auto letter = [](unsigned char c) {
      return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
    };
    auto digit = [](unsigned char c) { return c >= '0' && c <= '9'; };
    auto space = [](unsigned char c) { return detail::space_byte(c); };
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
      std::size_t b = i;
      unsigned char c = static_cast<unsigned char>(s[i]);
      if (c == '\'' && i + 1 < s.size()) {
        static constexpr std::string_view suffixes[] = {"'ll", "'re", "'ve", "'s", "'t", "'m", "'d"};
        bool hit = false;
        for (auto suf : suffixes) {
          if (s.size() - i >= suf.size()) {
            bool eq = true;
            for (std::size_t k = 0; k < suf.size(); ++k)
              if (std::tolower(static_cast<unsigned char>(s[i + k])) != suf[k]) eq = false;
            if (eq) {
              out.push_back(s.substr(i, suf.size()));
              i += suf.size();
              hit = true;
              break;
            }
          }
        }
        if (hit) continue;
      }
      // optional single non-letter/non-digit/non-newline lead, then letters
      if (!letter(c) && !digit(c) && c != '\n' && c != '\r' && i + 1 < s.size() &&
          letter(static_cast<unsigned char>(s[i + 1]))) {
        i += 1;
        while (i < s.size() && letter(static_cast<unsigned char>(s[i]))) ++i;
        out.push_back(s.substr(b, i - b));
        continue;
      }
      if (letter(c)) {
        while (i < s.size() && letter(static_cast<unsigned char>(s[i]))) ++i;
        out.push_back(s.substr(b, i - b));
        continue;
      }
      if (digit(c)) {
        out.push_back(s.substr(i, 1));
        ++i;
        continue;
      }
      if (space(c)) {
        std::size_t e = i;
        while (e < s.size() && space(static_cast<unsigned char>(s[e]))) ++e;
        // newline runs stand alone; otherwise leave one space for the next word
        std::size_t last_nl = std::string_view::npos;
        for (std::size_t k = i; k < e; ++k)
          if (s[k] == '\n' || s[k] == '\r') last_nl = k;
        if (last_nl != std::string_view::npos) {
          out.push_back(s.substr(i, last_nl + 1 - i));
          i = last_nl + 1;
          continue;
        }
        if (e < s.size() && e - i > 1) {
          out.push_back(s.substr(i, e - i - 1));
          i = e - 1;
          continue;
        }
        if (e < s.size() && e - i == 1) {
          // single space joins the following token
          std::size_t k = e;
          unsigned char n = static_cast<unsigned char>(s[k]);
          if (letter(n)) {
            while (k < s.size() && letter(static_cast<unsigned char>(s[k]))) ++k;
          } else if (digit(n)) {
            out.push_back(s.substr(i, 1));
            i = e;
            continue;
          } else {
            while (k < s.size() && !letter(static_cast<unsigned char>(s[k])) &&
                   !digit(static_cast<unsigned char>(s[k])) && !space(static_cast<unsigned char>(s[k])))
              ++k;
          }
          out.push_back(s.substr(i, k - i));
          i = k;
          continue;
        }
        out.push_back(s.substr(i, e - i));
        i = e;
        continue;
      }
      // punctuation run with trailing newlines
      while (i < s.size()) {
        unsigned char p = static_cast<unsigned char>(s[i]);
        if (letter(p) || digit(p) || space(p)) break;
        ++i;
      }
      while (i < s.size() && (s[i] == '\n' || s[i] == '\r')) ++i;
      out.push_back(s.substr(b, i - b));
    }
    return out;
  }

  std::size_t word_tokens(std::string_view piece) const {
    {
      std::lock_guard lock(cache_mu_);
      auto it = cache_.find(std::string(piece));
      if (it != cache_.end()) return it->second;
    }
    std::vector<std::string> syms;
    for (unsigned char c : piece) syms.push_back(byte_symbol_[c]);
    while (syms.size() > 1) {
      int best = -1;
      std::size_t at = 0;
      for (std::size_t k = 0; k + 1 < syms.size(); ++k) {
        auto it = ranks_.find(syms[k] + '\x01' + syms[k + 1]);
        if (it != ranks_.end() && (best < 0 || it->second < best)) {
          best = it->second;
          at = k;
        }
      }
      if (best < 0) break;
      syms[at] += syms[at + 1];
      syms.erase(syms.begin() + static_cast<std::ptrdiff_t>(at) + 1);
    }
    std::lock_guard lock(cache_mu_);
    cache_.emplace(std::string(piece), syms.size());
    return syms.size();
  }

  std::string name_;
  std::array<std::string, 256> byte_symbol_;
  std::unordered_map<std::string, int> ranks_;
  mutable std::mutex cache_mu_;
  mutable std::unordered_map<std::string, std::size_t> cache_;
};

// "fallback" or a path to a tokenizer.json.
inline std::shared_ptr<TokenCounter> make_counter(const std::string& spec) {
  if (spec.empty() || spec == "fallback") return std::make_shared<FallbackCounter>();
  return std::shared_ptr<TokenCounter>(BpeCounter::load(spec));
}

}  // namespace melcot::budget
