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

#include "vsm/llm_gateway.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <json.hpp>

#include "vsm/errors.hpp"
#include "vsm/util.hpp"

namespace vsm {

using nlohmann::json;

void validate_request(const ChatRequest& request) {
  if (request.sampling.max_tokens < 64) {
    throw ConfigError("max_tokens must be at least 64, got " +
                      std::to_string(request.sampling.max_tokens));
  }
}

std::string_view backend_name(BackendKind kind) {
  switch (kind) {
    case BackendKind::Http:
      return "http";
    case BackendKind::Replay:
      return "replay";
    case BackendKind::Scripted:
      return "scripted";
  }
  return "unknown";
}

std::string cache_key(const ChatRequest& request) {
  const json canonical = {
      {"model", request.model_name},
      {"prompt", request.prompt.text},
      {"seed", request.seed},
      {"temperature", request.sampling.temperature},
      {"top_p", request.sampling.top_p},
      {"max_tokens", request.sampling.max_tokens},
  };
  return sha256_hex("vsm-probe/cache-key/v1\n" + canonical.dump());
}

// ---------------------------------------------------------------------------
// Replay cache

ReplayCache::ReplayCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create cache dir " + dir_.string() + ": " + ec.message());
}

std::filesystem::path ReplayCache::path_for(const std::string& key) const {
  if (key.size() < 3 ||
      key.find_first_not_of("0123456789abcdef") != std::string::npos) {
    throw CacheMiss("malformed cache key '" + key + "'");
  }
  return dir_ / key.substr(0, 2) / key;
}

std::optional<std::string> ReplayCache::lookup(const std::string& key) const {
  const auto path = path_for(key);
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) return std::nullopt;
  return read_file(path);
}

bool ReplayCache::contains(const std::string& key) const {
  std::error_code ec;
  return std::filesystem::is_regular_file(path_for(key), ec);
}

void ReplayCache::store(const std::string& key, const std::string& raw_text) {
  const auto path = path_for(key);
  std::lock_guard lock(write_mutex_);
  std::error_code ec;
  if (std::filesystem::exists(path, ec)) return;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create " + path.parent_path().string());
  write_file_atomic(path, raw_text);
}

ReplayBackend::ReplayBackend(std::shared_ptr<ReplayCache> cache,
                             std::shared_ptr<ChatBackend> upstream)
    : cache_(std::move(cache)), upstream_(std::move(upstream)) {
  if (!cache_) throw ConfigError("replay backend needs a cache");
}

int ReplayBackend::max_in_flight() const {
  if (upstream_) return upstream_->max_in_flight();
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

ChatResponse ReplayBackend::complete(const ChatRequest& request) {
  const auto start = std::chrono::steady_clock::now();
  const std::string key = cache_key(request);
  if (auto hit = cache_->lookup(key)) {
    ChatResponse out;
    out.raw_text = std::move(*hit);
    out.backend = BackendKind::Replay;
    out.attempt_count = 0;
    out.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    return out;
  }
  if (!upstream_) throw CacheMiss("no cached response for key " + key);
  ChatResponse out = upstream_->complete(request);
  cache_->store(key, out.raw_text);
  return out;
}

// ---------------------------------------------------------------------------
// Scripted responders

namespace {

std::string answer_json(int option, std::string_view reason) {
  return json{{"option", option}, {"reason", reason}}.dump();
}

constexpr std::string_view kMalformedText =
    "I am not able to pick a single option for this question, because the "
    "answer really depends on circumstances that are not described here.";

void check_option(int option, const std::string& where) {
  if (option < 1 || option > kOptionCount) {
    throw InvalidPolicy(where + ": option " + std::to_string(option) +
                        " outside 1..5");
  }
}

class ScriptedBackend final : public ChatBackend {
 public:
  explicit ScriptedBackend(ResponderPolicy policy) : policy_(std::move(policy)) {}

  BackendKind kind() const override { return BackendKind::Scripted; }

  ChatResponse complete(const ChatRequest& request) override {
    ChatResponse out;
    out.backend = BackendKind::Scripted;
    out.attempt_count = 1;
    out.raw_text = std::visit([&](const auto& p) { return respond(p, request); },
                              policy_);
    return out;
  }

 private:
  static std::string respond(const policy::FixedOption& p, const ChatRequest&) {
    return answer_json(p.option, "fixed-option responder");
  }

  static std::string respond(const policy::UniformRandom& p,
                             const ChatRequest& request) {
    SplitMix64 rng(p.seed ^ sha256_prefix64(cache_key(request)));
    return answer_json(static_cast<int>(rng.below(kOptionCount)) + 1,
                       "uniform-random responder");
  }

  static std::string respond(const policy::NationProfile& p,
                             const ChatRequest& request) {
    int option = p.fallback_option;
    if (auto nation = p.answers.find(request.prompt.identity.nation);
        nation != p.answers.end()) {
      if (auto q = nation->second.find(request.prompt.question_id);
          q != nation->second.end()) {
        option = q->second;
      }
    }
    return answer_json(option, "nation-profile responder");
  }

  static std::string respond(const policy::Malformed& p,
                             const ChatRequest& request) {
    SplitMix64 rng(p.seed ^ sha256_prefix64(cache_key(request)));
    // Draw both values unconditionally so the stream layout is rate-independent.
    const double u = rng.unit();
    const int option = static_cast<int>(rng.below(kOptionCount)) + 1;
    if (u < p.rate) return std::string(kMalformedText);
    return answer_json(option, "malformed responder, well-formed draw");
  }

  ResponderPolicy policy_;
};

void validate_policy(const ResponderPolicy& policy) {
  if (const auto* p = std::get_if<policy::FixedOption>(&policy)) {
    check_option(p->option, "fixed-option");
  } else if (const auto* p = std::get_if<policy::NationProfile>(&policy)) {
    check_option(p->fallback_option, "nation-profile fallback");
    for (const auto& [nation, table] : p->answers) {
      for (const auto& [question, option] : table) {
        const std::string where =
            "nation-profile " + std::string(nation_id(nation)) + " q" +
            std::to_string(question);
        if (question < 1 || question > kQuestionCount) {
          throw InvalidPolicy(where + ": question id outside 1..24");
        }
        check_option(option, where);
      }
    }
  } else if (const auto* p = std::get_if<policy::Malformed>(&policy)) {
    if (!(p->rate >= 0.0 && p->rate <= 1.0)) {
      throw InvalidPolicy("malformed rate must lie in [0, 1]");
    }
  }
}

std::uint64_t parse_u64(const std::string& text, const std::string& spec) {
  try {
    std::size_t used = 0;
    const auto value = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw InvalidPolicy("bad integer '" + text + "' in policy '" + spec + "'");
  }
}

}  // namespace

std::shared_ptr<ChatBackend> scripted_responder(ResponderPolicy policy) {
  validate_policy(policy);
  return std::make_shared<ScriptedBackend>(std::move(policy));
}

ResponderPolicy load_nation_profile(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const MissingFile& e) {
    throw InvalidPolicy(e.what());
  } catch (const json::parse_error& e) {
    throw InvalidPolicy(path.string() + ": not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw InvalidPolicy(path.string() + ": expected an object");

  policy::NationProfile profile;
  for (const auto& [name, table] : doc.items()) {
    if (name == "fallback_option") {
      if (!table.is_number_integer()) throw InvalidPolicy("fallback_option must be an integer");
      profile.fallback_option = table.get<int>();
      continue;
    }
    Nation nation;
    try {
      nation = parse_nation(name);
    } catch (const SchemaError& e) {
      throw InvalidPolicy(e.what());
    }
    auto& answers = profile.answers[nation];
    if (table.is_array()) {
      if (table.size() != kQuestionCount) {
        throw InvalidPolicy(name + ": option array must have 24 entries");
      }
      for (std::size_t i = 0; i < table.size(); ++i) {
        if (!table[i].is_number_integer()) throw InvalidPolicy(name + ": non-integer option");
        answers[static_cast<int>(i) + 1] = table[i].get<int>();
      }
    } else if (table.is_object()) {
      for (const auto& [q, option] : table.items()) {
        if (!option.is_number_integer()) throw InvalidPolicy(name + ": non-integer option");
        answers[static_cast<int>(parse_u64(q, path.string()))] = option.get<int>();
      }
    } else {
      throw InvalidPolicy(name + ": expected an array or object");
    }
  }
  return profile;
}

ResponderPolicy parse_responder_policy(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "fixed") {
    return policy::FixedOption{static_cast<int>(parse_u64(rest, spec))};
  }
  if (head == "random") {
    return policy::UniformRandom{rest.empty() ? 0 : parse_u64(rest, spec)};
  }
  if (head == "malformed") {
    const auto second = rest.find(':');
    policy::Malformed p;
    try {
      p.rate = std::stod(rest.substr(0, second));
    } catch (const std::exception&) {
      throw InvalidPolicy("bad rate in policy '" + spec + "'");
    }
    if (second != std::string::npos) p.seed = parse_u64(rest.substr(second + 1), spec);
    return p;
  }
  if (head == "profile") {
    if (rest.empty()) throw InvalidPolicy("profile policy needs a file path");
    return load_nation_profile(rest);
  }
  throw InvalidPolicy("unknown responder policy '" + spec +
                      "' (expected fixed:K, random:SEED, malformed:RATE[:SEED], "
                      "profile:PATH)");
}

}  // namespace vsm
