#pragma once

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "melcot/core/error.hpp"
#include "melcot/core/hash.hpp"

#include <httplib.h>

namespace melcot::llm {

using json = nlohmann::json;

struct GenConfig {
  std::string model = "default";
  double temperature = 0.6;
  double top_p = 0.95;
  int top_k = 40;
  int max_tokens = 4096;
};

inline json to_json(const GenConfig& g) {
  return json{{"model", g.model},
              {"temperature", g.temperature},
              {"top_p", g.top_p},
              {"top_k", g.top_k},
              {"max_tokens", g.max_tokens}};
}

inline GenConfig gen_config_from_json(const json& j, GenConfig base = {}) {
  base.model = j.value("model", base.model);
  base.temperature = j.value("temperature", base.temperature);
  base.top_p = j.value("top_p", base.top_p);
  base.top_k = j.value("top_k", base.top_k);
  base.max_tokens = j.value("max_tokens", base.max_tokens);
  return base;
}

struct ChatRequest {
  std::string system;
  std::string prompt;
  GenConfig config;
  std::uint32_t seed = 0;

  // Request body without the seed; serialized with sorted keys so equal
  // requests hash equally.
  json body_without_seed() const {
    json messages = json::array();
    if (!system.empty()) messages.push_back({{"role", "system"}, {"content", system}});
    messages.push_back({{"role", "user"}, {"content", prompt}});
    return json{{"model", config.model},          {"messages", messages},
                {"temperature", config.temperature}, {"top_p", config.top_p},
                {"top_k", config.top_k},          {"max_tokens", config.max_tokens}};
  }

  std::string key() const { return to_hex(fnv1a64(body_without_seed().dump())); }
};

// One completion per call. Transport or protocol failures throw
// Error(Errc::endpoint).
class Generator {
 public:
  virtual ~Generator() = default;
  virtual std::string generate(const ChatRequest& req) = 0;
};

struct EndpointConfig {
  std::string base_url = "http://127.0.0.1:8000/v1";
  std::string api_key_env = "MELCOT_API_KEY";
  int timeout_s = 600;
};

// OpenAI-compatible chat completions over HTTP(S).
class HttpGenerator : public Generator {
 public:
  explicit HttpGenerator(EndpointConfig cfg) : cfg_(std::move(cfg)) {
    auto scheme_end = cfg_.base_url.find("://");
    if (scheme_end == std::string::npos)
      throw Error(Errc::config, "endpoint base_url needs a scheme: " + cfg_.base_url);
    auto path_start = cfg_.base_url.find('/', scheme_end + 3);
    host_ = cfg_.base_url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "" : cfg_.base_url.substr(path_start);
    while (!path_.empty() && path_.back() == '/') path_.pop_back();
  }

  std::string generate(const ChatRequest& req) override {
    httplib::Client cli(host_);
    cli.set_connection_timeout(10);
    cli.set_read_timeout(cfg_.timeout_s);
    cli.set_write_timeout(60);
    httplib::Headers headers;
    if (const char* key = std::getenv(cfg_.api_key_env.c_str()); key && *key)
      headers.emplace("Authorization", std::string("Bearer ") + key);
    json body = req.body_without_seed();
    body["seed"] = req.seed;
    auto res = cli.Post(path_ + "/chat/completions", headers, body.dump(), "application/json");
    if (!res) throw Error(Errc::endpoint, "endpoint unreachable: " + httplib::to_string(res.error()));
    if (res->status != 200)
      throw Error(Errc::endpoint, "endpoint status " + std::to_string(res->status));
    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded()) throw Error(Errc::endpoint, "endpoint returned invalid JSON");
    try {
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
      throw Error(Errc::endpoint, "endpoint reply lacks choices[0].message.content");
    }
  }

 private:
  EndpointConfig cfg_;
  std::string host_;
  std::string path_;
};

struct RetryPolicy {
  int max_attempts = 3;
  int base_delay_ms = 500;
};

template <class T>
struct Attempted {
  T value;
  int retries = 0;
};

// Calls fn until it returns without an endpoint error, sleeping
// base_delay * 2^k between attempts. Other errors propagate at once.
template <class Fn>
auto with_retries(const RetryPolicy& policy, Fn&& fn) -> Attempted<decltype(fn())> {
  int attempts = std::max(policy.max_attempts, 1);
  for (int k = 0;; ++k) {
    try {
      return {fn(), k};
    } catch (const Error& e) {
      if (e.code() != Errc::endpoint || k + 1 >= attempts) throw;
    }
    if (policy.base_delay_ms > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(policy.base_delay_ms << k));
  }
}

}  // namespace melcot::llm
