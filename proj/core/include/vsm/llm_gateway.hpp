// Copyright 2026 The vsm-probe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>

#include "vsm/protocol.hpp"

namespace vsm {

struct SamplingParams {
  double temperature = 1.0;
  double top_p = 1.0;
  int max_tokens = 512;

  friend bool operator==(const SamplingParams&, const SamplingParams&) = default;
};

// Retries apply to timeouts, connection failures, HTTP 429 and 5xx only.
struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
  double backoff_multiplier = 2.0;
};

struct EndpointConfig {
  std::string base_url;  // e.g. https://api.openai.com/v1
  std::string api_key;   // sent as a bearer token when non-empty
  std::chrono::milliseconds timeout{120000};
  int max_in_flight = 4;
  RetryPolicy retry;
  // When false the repetition seed is not sent and only varies the cache key
  // and the manifest.
  bool send_seed = true;
};

struct ChatRequest {
  std::string model_name;
  PromptText prompt;
  std::uint64_t seed = 0;
  SamplingParams sampling;
};

// Throws ConfigError if max_tokens < 64.
void validate_request(const ChatRequest& request);

enum class BackendKind { Http, Replay, Scripted };

std::string_view backend_name(BackendKind kind);

struct ChatResponse {
  std::string raw_text;
  BackendKind backend = BackendKind::Scripted;
  std::chrono::milliseconds latency{0};
  int attempt_count = 0;
};

// SHA-256 over a canonical JSON rendering of model, prompt bytes, seed and
// sampling parameters. Stable across platforms and runs.
std::string cache_key(const ChatRequest& request);

// Implementations must be safe to call from several threads at once.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatResponse complete(const ChatRequest& request) = 0;
  virtual BackendKind kind() const = 0;
  // Upper bound on concurrent complete() calls the caller should issue.
  virtual int max_in_flight() const { return 1; }
};

// OpenAI-compatible POST {base_url}/chat/completions with one user message.
class HttpBackend final : public ChatBackend {
 public:
  explicit HttpBackend(EndpointConfig config);
  ~HttpBackend() override;

  ChatResponse complete(const ChatRequest& request) override;
  BackendKind kind() const override { return BackendKind::Http; }
  int max_in_flight() const override { return config_.max_in_flight; }

  // Request body as sent on the wire; exposed for inspection and tests.
  std::string request_body(const ChatRequest& request) const;

 private:
  struct Slots;
  EndpointConfig config_;
  std::unique_ptr<Slots> slots_;
};

// Content-addressed store of raw response bytes: <dir>/<key[0:2]>/<key>.
// Entries are written once, atomically; concurrent readers are fine.
class ReplayCache {
 public:
  explicit ReplayCache(std::filesystem::path dir);

  std::optional<std::string> lookup(const std::string& key) const;
  // No-op when the key is already present.
  void store(const std::string& key, const std::string& raw_text);
  bool contains(const std::string& key) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path path_for(const std::string& key) const;

  std::filesystem::path dir_;
  std::mutex write_mutex_;
};

// Serves responses from a ReplayCache. Strict mode raises CacheMiss on an
// absent key; with an upstream backend, misses are forwarded and recorded.
class ReplayBackend final : public ChatBackend {
 public:
  explicit ReplayBackend(std::shared_ptr<ReplayCache> cache,
                         std::shared_ptr<ChatBackend> upstream = nullptr);

  ChatResponse complete(const ChatRequest& request) override;
  BackendKind kind() const override { return BackendKind::Replay; }
  int max_in_flight() const override;
  bool strict() const { return upstream_ == nullptr; }

 private:
  std::shared_ptr<ReplayCache> cache_;
  std::shared_ptr<ChatBackend> upstream_;
};

namespace policy {
// Always answers option `option`.
struct FixedOption {
  int option = 3;
};
// Uniform over 1..5, a deterministic function of (seed, request).
struct UniformRandom {
  std::uint64_t seed = 0;
};
// Answers from a per-nation table keyed by question id; unlisted
// (nation, question) pairs answer `fallback_option`.
struct NationProfile {
  std::map<Nation, std::map<int, int>> answers;
  int fallback_option = 3;
};
// With probability `rate` emits prose without any JSON; otherwise a uniform
// random valid answer. Deterministic per (seed, request).
struct Malformed {
  double rate = 1.0;
  std::uint64_t seed = 0;
};
}  // namespace policy

using ResponderPolicy = std::variant<policy::FixedOption, policy::UniformRandom,
                                     policy::NationProfile, policy::Malformed>;

// Parses the CLI spelling: fixed:K, random:SEED, malformed:RATE[:SEED],
// profile:PATH (JSON object nation -> {question id -> option} or
// nation -> [24 options]). Throws InvalidPolicy.
ResponderPolicy parse_responder_policy(const std::string& spec);
ResponderPolicy load_nation_profile(const std::filesystem::path& path);

// Throws InvalidPolicy for out-of-range options, rates or question ids.
std::shared_ptr<ChatBackend> scripted_responder(ResponderPolicy policy);

}  // namespace vsm
