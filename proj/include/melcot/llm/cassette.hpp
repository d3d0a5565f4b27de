#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "melcot/core/error.hpp"
#include "melcot/core/io.hpp"
#include "melcot/llm/client.hpp"

namespace melcot::llm {

// Recorded completions keyed on (request hash, seed). Several entries under
// one key replay in file order; the last one repeats once the others are
// used up. An entry is either a response or an error message, so transient
// failures can be replayed too.
class Cassette {
 public:
  struct Entry {
    std::string key;
    std::uint32_t seed = 0;
    std::optional<std::string> response;
    std::string error;
  };

  Cassette() = default;
  Cassette(Cassette&& o) noexcept : slots_(std::move(o.slots_)) {}
  Cassette& operator=(Cassette&& o) noexcept {
    if (this != &o) {
      std::scoped_lock lock(mu_, o.mu_);
      slots_ = std::move(o.slots_);
    }
    return *this;
  }

  static Cassette load(const std::filesystem::path& path) {
    Cassette c;
    if (!std::filesystem::exists(path)) return c;
    for (const auto& j : io::read_jsonl(path)) {
      Entry e;
      try {
        e.key = j.at("key").get<std::string>();
        e.seed = j.at("seed").get<std::uint32_t>();
        if (j.contains("response")) e.response = j.at("response").get<std::string>();
        else e.error = j.value("error", "recorded failure");
      } catch (const json::exception& ex) {
        throw Error(Errc::data_validation, path.string() + ": bad cassette entry: " + ex.what());
      }
      c.add(std::move(e));
    }
    return c;
  }

  void add(Entry e) {
    std::lock_guard lock(mu_);
    auto& slot = slots_[{e.key, e.seed}];
    slot.entries.push_back(std::move(e));
  }

  // Next recorded entry for (key, seed), or nullopt on a miss.
  std::optional<Entry> next(const std::string& key, std::uint32_t seed) {
    std::lock_guard lock(mu_);
    auto it = slots_.find({key, seed});
    if (it == slots_.end() || it->second.entries.empty()) return std::nullopt;
    auto& s = it->second;
    std::size_t i = std::min(s.cursor, s.entries.size() - 1);
    if (s.cursor < s.entries.size()) ++s.cursor;
    return s.entries[i];
  }

  void absorb(const Cassette& other) {
    std::vector<Entry> incoming;
    {
      std::lock_guard lock(other.mu_);
      for (const auto& [k, s] : other.slots_)
        incoming.insert(incoming.end(), s.entries.begin(), s.entries.end());
    }
    for (auto& e : incoming) add(std::move(e));
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    std::size_t n = 0;
    for (const auto& [k, s] : slots_) n += s.entries.size();
    return n;
  }

  // Entries sorted by (key, seed), keeping per-slot order.
  void save(const std::filesystem::path& path) const {
    std::lock_guard lock(mu_);
    std::vector<json> rows;
    for (const auto& [k, s] : slots_) {
      for (const auto& e : s.entries) {
        json j{{"key", e.key}, {"seed", e.seed}};
        if (e.response) j["response"] = *e.response;
        else j["error"] = e.error;
        rows.push_back(std::move(j));
      }
    }
    io::write_jsonl(path, rows);
  }

 private:
  struct Slot {
    std::vector<Entry> entries;
    std::size_t cursor = 0;
  };
  mutable std::mutex mu_;
  std::map<std::pair<std::string, std::uint32_t>, Slot> slots_;
};

enum class CassetteMode {
  // Cassette only; a miss is an endpoint error.
  replay,
  // Replay hits, forward misses upstream and record successful replies.
  record,
};

class CassetteGenerator : public Generator {
 public:
  CassetteGenerator(std::shared_ptr<Cassette> cassette, CassetteMode mode,
                    std::shared_ptr<Generator> upstream = nullptr)
      : cassette_(std::move(cassette)), mode_(mode), upstream_(std::move(upstream)) {
    if (mode_ == CassetteMode::record && !upstream_)
      throw Error(Errc::config, "record mode needs an upstream endpoint");
  }

  std::string generate(const ChatRequest& req) override {
    auto key = req.key();
    if (auto hit = cassette_->next(key, req.seed)) {
      if (hit->response) return *hit->response;
      throw Error(Errc::endpoint, "replayed failure: " + hit->error);
    }
    if (mode_ == CassetteMode::replay)
      throw Error(Errc::endpoint, "cassette miss for request " + key + " seed " +
                                      std::to_string(req.seed));
    auto text = upstream_->generate(req);
    Cassette::Entry e{key, req.seed, text, {}};
    fresh_.add(e);
    return text;
  }

  // Newly recorded entries, separate from the replayed ones so a saved
  // cassette lists each live reply once.
  Cassette& recorded() noexcept { return fresh_; }

 private:
  std::shared_ptr<Cassette> cassette_;
  CassetteMode mode_;
  std::shared_ptr<Generator> upstream_;
  Cassette fresh_;
};

}  // namespace melcot::llm
