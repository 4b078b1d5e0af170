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

#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include <json.hpp>

#include "vsm/errors.hpp"
#include "vsm/llm_gateway.hpp"

namespace vsm {
namespace {

using nlohmann::json;

// Local stand-in for an OpenAI-compatible endpoint.
class FakeEndpoint {
 public:
  FakeEndpoint() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const int now = ++in_flight_;
      int seen = peak_.load();
      while (now > seen && !peak_.compare_exchange_weak(seen, now)) {
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms.load()));
      handle(req, res);
      --in_flight_;
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }

  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

  std::atomic<int> calls{0};
  std::atomic<int> fail_first{0};
  std::atomic<int> fail_status{503};
  std::atomic<int> delay_ms{0};
  std::atomic<bool> null_content{false};
  std::string last_body;
  std::string expected_key = "sk-test";
  int peak() const { return peak_.load(); }

 private:
  void handle(const httplib::Request& req, httplib::Response& res) {
    const int n = ++calls;
    {
      std::lock_guard lock(mutex_);
      last_body = req.body;
    }
    if (req.get_header_value("Authorization") != "Bearer " + expected_key) {
      res.status = 401;
      res.set_content(R"({"error":"bad key"})", "application/json");
      return;
    }
    if (n <= fail_first.load()) {
      res.status = fail_status.load();
      res.set_content("try later", "text/plain");
      return;
    }
    const auto body = json::parse(req.body);
    json content = "{\"option\": 2, \"reason\": \"model " + body["model"].get<std::string>() + "\"}";
    if (null_content) content = nullptr;
    const json reply = {{"id", "x"},
                        {"choices", json::array({{{"index", 0},
                                                  {"message", {{"role", "assistant"}, {"content", content}}}}})}};
    res.set_content(reply.dump(), "application/json");
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::mutex mutex_;
  std::atomic<int> in_flight_{0};
  std::atomic<int> peak_{0};
};

EndpointConfig config_for(const FakeEndpoint& endpoint) {
  EndpointConfig c;
  c.base_url = endpoint.base_url();
  c.api_key = "sk-test";
  c.timeout = std::chrono::milliseconds(5000);
  c.retry.initial_backoff = std::chrono::milliseconds(1);
  return c;
}

ChatRequest sample_request(std::uint64_t seed = 5) {
  ChatRequest r;
  r.model_name = "m1";
  r.prompt.text = "hello";
  r.seed = seed;
  return r;
}

TEST(HttpBackend, SendsOpenAiCompatibleBody) {
  FakeEndpoint endpoint;
  HttpBackend backend(config_for(endpoint));
  const auto response = backend.complete(sample_request());
  EXPECT_EQ(response.raw_text, "{\"option\": 2, \"reason\": \"model m1\"}");
  EXPECT_EQ(response.backend, BackendKind::Http);
  EXPECT_EQ(response.attempt_count, 1);

  const auto body = json::parse(endpoint.last_body);
  EXPECT_EQ(body["model"], "m1");
  EXPECT_EQ(body["messages"].size(), 1u);
  EXPECT_EQ(body["messages"][0]["role"], "user");
  EXPECT_EQ(body["messages"][0]["content"], "hello");
  EXPECT_EQ(body["seed"], 5);
  EXPECT_EQ(body["max_tokens"], 512);
  EXPECT_DOUBLE_EQ(body["temperature"].get<double>(), 1.0);
}

TEST(HttpBackend, SeedOmittedWhenDisabled) {
  FakeEndpoint endpoint;
  auto config = config_for(endpoint);
  config.send_seed = false;
  HttpBackend backend(config);
  backend.complete(sample_request());
  EXPECT_FALSE(json::parse(endpoint.last_body).contains("seed"));
}

TEST(HttpBackend, RetriesTransientFailures) {
  FakeEndpoint endpoint;
  endpoint.fail_first = 2;
  HttpBackend backend(config_for(endpoint));
  const auto response = backend.complete(sample_request());
  EXPECT_EQ(response.attempt_count, 3);
  EXPECT_EQ(endpoint.calls.load(), 3);
}

TEST(HttpBackend, RetriesRateLimits) {
  FakeEndpoint endpoint;
  endpoint.fail_first = 1;
  endpoint.fail_status = 429;
  HttpBackend backend(config_for(endpoint));
  EXPECT_EQ(backend.complete(sample_request()).attempt_count, 2);
}

TEST(HttpBackend, GivesUpAfterRetryBudget) {
  FakeEndpoint endpoint;
  endpoint.fail_first = 100;
  HttpBackend backend(config_for(endpoint));
  EXPECT_THROW(backend.complete(sample_request()), TransportError);
  EXPECT_EQ(endpoint.calls.load(), 3);
}

TEST(HttpBackend, ClientErrorsAreNotRetried) {
  FakeEndpoint endpoint;
  endpoint.fail_first = 100;
  endpoint.fail_status = 400;
  HttpBackend backend(config_for(endpoint));
  EXPECT_THROW(backend.complete(sample_request()), TransportError);
  EXPECT_EQ(endpoint.calls.load(), 1);
}

TEST(HttpBackend, BadKeyIsAuthError) {
  FakeEndpoint endpoint;
  auto config = config_for(endpoint);
  config.api_key = "wrong";
  HttpBackend backend(config);
  EXPECT_THROW(backend.complete(sample_request()), AuthError);
  EXPECT_EQ(endpoint.calls.load(), 1);
}

TEST(HttpBackend, NullContentIsEmptyText) {
  FakeEndpoint endpoint;
  endpoint.null_content = true;
  HttpBackend backend(config_for(endpoint));
  EXPECT_EQ(backend.complete(sample_request()).raw_text, "");
}

TEST(HttpBackend, UnreachableEndpointIsTransportError) {
  EndpointConfig c;
  c.base_url = "http://127.0.0.1:1/v1";
  c.timeout = std::chrono::milliseconds(500);
  c.retry.max_attempts = 2;
  c.retry.initial_backoff = std::chrono::milliseconds(1);
  HttpBackend backend(c);
  EXPECT_THROW(backend.complete(sample_request()), TransportError);
}

TEST(HttpBackend, RespectsMaxInFlight) {
  FakeEndpoint endpoint;
  endpoint.delay_ms = 30;
  auto config = config_for(endpoint);
  config.max_in_flight = 2;
  HttpBackend backend(config);
  {
    std::vector<std::jthread> callers;
    for (int i = 0; i < 8; ++i) {
      callers.emplace_back([&, i] { backend.complete(sample_request(static_cast<std::uint64_t>(i))); });
    }
  }
  EXPECT_EQ(endpoint.calls.load(), 8);
  EXPECT_LE(endpoint.peak(), 2);
}

TEST(HttpBackend, RejectsBadConfig) {
  EndpointConfig c;
  c.base_url = "ftp://example.com";
  EXPECT_THROW(HttpBackend{c}, ConfigError);
  c.base_url = "http://example.com";
  c.max_in_flight = 0;
  EXPECT_THROW(HttpBackend{c}, ConfigError);
}

}  // namespace
}  // namespace vsm
