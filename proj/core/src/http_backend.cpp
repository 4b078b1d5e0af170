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

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <condition_variable>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "vsm/errors.hpp"
#include "vsm/llm_gateway.hpp"

namespace vsm {

using nlohmann::json;

// Counting limiter for concurrent requests.
struct HttpBackend::Slots {
  explicit Slots(int capacity) : free(capacity) {}

  void acquire() {
    std::unique_lock lock(mutex);
    cv.wait(lock, [&] { return free > 0; });
    --free;
  }
  void release() {
    {
      std::lock_guard lock(mutex);
      ++free;
    }
    cv.notify_one();
  }

  std::mutex mutex;
  std::condition_variable cv;
  int free;
};

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // without trailing slash
};

ParsedUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint URL needs a scheme: '" + url + "'");
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw ConfigError("unsupported URL scheme '" + scheme + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl out;
  out.origin = url.substr(0, path_start);
  out.path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  return out;
}

enum class Outcome { Ok, Retry, Fatal, Auth };

}  // namespace

HttpBackend::HttpBackend(EndpointConfig config) : config_(std::move(config)) {
  if (config_.max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
  if (config_.retry.max_attempts < 1) throw ConfigError("retry attempts must be >= 1");
  split_url(config_.base_url);
  slots_ = std::make_unique<Slots>(config_.max_in_flight);
}

HttpBackend::~HttpBackend() = default;

std::string HttpBackend::request_body(const ChatRequest& request) const {
  json body = {
      {"model", request.model_name},
      {"messages", json::array({{{"role", "user"}, {"content", request.prompt.text}}})},
      {"temperature", request.sampling.temperature},
      {"top_p", request.sampling.top_p},
      {"max_tokens", request.sampling.max_tokens},
      {"stream", false},
  };
  if (config_.send_seed) body["seed"] = request.seed;
  return body.dump();
}

ChatResponse HttpBackend::complete(const ChatRequest& request) {
  validate_request(request);
  const ParsedUrl url = split_url(config_.base_url);
  const std::string body = request_body(request);
  const auto start = std::chrono::steady_clock::now();

  struct SlotGuard {
    explicit SlotGuard(Slots* s) : slots(s) { slots->acquire(); }
    ~SlotGuard() { slots->release(); }
    Slots* slots;
  } guard(slots_.get());
  auto backoff = config_.retry.initial_backoff;
  std::string last_error;
  for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
    httplib::Client client(url.origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(
        config_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    if (!config_.api_key.empty()) client.set_bearer_token_auth(config_.api_key);

    Outcome outcome = Outcome::Fatal;
    auto result = client.Post(url.path + "/chat/completions", body, "application/json");
    if (!result) {
      last_error = "transport failure: " + httplib::to_string(result.error());
      outcome = Outcome::Retry;
    } else if (result->status == 200) {
      json doc;
      try {
        doc = json::parse(result->body);
        const auto& message = doc.at("choices").at(0).at("message");
        ChatResponse out;
        out.backend = BackendKind::Http;
        out.attempt_count = attempt;
        const auto content = message.find("content");
        if (content != message.end() && content->is_string()) {
          out.raw_text = content->get<std::string>();
        }
        out.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - start);
        return out;
      } catch (const json::exception& e) {
        throw TransportError("malformed chat-completions body: " +
                             std::string(e.what()));
      }
    } else {
      last_error = "HTTP " + std::to_string(result->status) + ": " +
                   result->body.substr(0, 300);
      if (result->status == 401 || result->status == 403) {
        outcome = Outcome::Auth;
      } else if (result->status == 429 || result->status >= 500) {
        outcome = Outcome::Retry;
      }
    }

    if (outcome == Outcome::Auth) throw AuthError(last_error);
    if (outcome == Outcome::Fatal) throw TransportError(last_error);
    if (attempt < config_.retry.max_attempts) {
      std::this_thread::sleep_for(backoff);
      backoff = std::chrono::milliseconds(static_cast<long long>(
          static_cast<double>(backoff.count()) * config_.retry.backoff_multiplier));
    }
  }
  throw TransportError("gave up after " + std::to_string(config_.retry.max_attempts) +
                       " attempts: " + last_error);
}

}  // namespace vsm
