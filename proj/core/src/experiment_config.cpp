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

#include "vsm/experiment_config.hpp"

#include <cctype>
#include <set>

#include "vsm/errors.hpp"

namespace vsm {

using nlohmann::json;

std::vector<std::uint64_t> default_seeds(int count) {
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < count; ++i) seeds.push_back(static_cast<std::uint64_t>(i));
  return seeds;
}

void validate_config(const ExperimentConfig& config) {
  if (config.model_name.empty()) throw ConfigError("model name is empty");
  if (config.seeds.empty()) throw ConfigError("at least one seed is required");
  std::set<std::uint64_t> unique(config.seeds.begin(), config.seeds.end());
  if (unique.size() != config.seeds.size()) throw ConfigError("seeds must be distinct");
  if (config.sampling.max_tokens < 64) {
    throw ConfigError("max_tokens must be at least 64");
  }
}

std::string set_label(const ExperimentConfig& config) {
  std::string label;
  for (char c : config.model_name) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
                      c == '.' || c == '_';
    label += keep ? c : '-';
  }
  label += '_';
  label += locale_tag(config.prompt_locale);
  if (config.shuffle) label += "_shuffled";
  if (config.reply_locale() != config.prompt_locale) {
    label += "_reply-";
    label += locale_tag(config.reply_locale());
  }
  return label;
}

namespace {

json sampling_json(const SamplingParams& s) {
  return {{"temperature", s.temperature}, {"top_p", s.top_p}, {"max_tokens", s.max_tokens}};
}

}  // namespace

json config_identity(const ExperimentConfig& config) {
  return {
      {"model", config.model_name},
      {"prompt_locale", locale_tag(config.prompt_locale)},
      {"response_language", locale_tag(config.reply_locale())},
      {"shuffle", config.shuffle},
      {"seeds", config.seeds},
      {"sampling", sampling_json(config.sampling)},
  };
}

json config_to_json(const ExperimentConfig& config) {
  json doc = config_identity(config);
  doc["endpoint"] = {
      {"base_url", config.endpoint.base_url},
      {"timeout_ms", config.endpoint.timeout.count()},
      {"max_in_flight", config.endpoint.max_in_flight},
      {"send_seed", config.endpoint.send_seed},
      {"retry",
       {{"max_attempts", config.endpoint.retry.max_attempts},
        {"initial_backoff_ms", config.endpoint.retry.initial_backoff.count()},
        {"backoff_multiplier", config.endpoint.retry.backoff_multiplier}}},
  };
  return doc;
}

ExperimentConfig config_from_json(const json& doc) {
  try {
    ExperimentConfig config;
    config.model_name = doc.at("model").get<std::string>();
    config.prompt_locale = parse_locale(doc.at("prompt_locale").get<std::string>());
    config.response_language =
        parse_locale(doc.at("response_language").get<std::string>());
    config.shuffle = doc.at("shuffle").get<bool>();
    config.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
    const auto& s = doc.at("sampling");
    config.sampling.temperature = s.at("temperature").get<double>();
    config.sampling.top_p = s.at("top_p").get<double>();
    config.sampling.max_tokens = s.at("max_tokens").get<int>();
    if (doc.contains("endpoint")) {
      const auto& e = doc["endpoint"];
      config.endpoint.base_url = e.value("base_url", "");
      config.endpoint.timeout = std::chrono::milliseconds(e.value("timeout_ms", 120000));
      config.endpoint.max_in_flight = e.value("max_in_flight", 4);
      config.endpoint.send_seed = e.value("send_seed", true);
      if (e.contains("retry")) {
        const auto& r = e["retry"];
        config.endpoint.retry.max_attempts = r.value("max_attempts", 3);
        config.endpoint.retry.initial_backoff =
            std::chrono::milliseconds(r.value("initial_backoff_ms", 1000));
        config.endpoint.retry.backoff_multiplier = r.value("backoff_multiplier", 2.0);
      }
    }
    return config;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("bad experiment config: ") + e.what());
  } catch (const MissingLocaleData& e) {
    throw SchemaError(std::string("bad experiment config: ") + e.what());
  }
}

}  // namespace vsm
