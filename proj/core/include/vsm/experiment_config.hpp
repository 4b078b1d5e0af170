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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vsm/llm_gateway.hpp"
#include "vsm/types.hpp"

namespace vsm {

// Seeds 0..count-1.
std::vector<std::uint64_t> default_seeds(int count = 10);

// One experiment set: a model queried in one prompt language, with or
// without option shuffling.
struct ExperimentConfig {
  std::string model_name;
  Locale prompt_locale = Locale::English;
  bool shuffle = false;
  // Defaults to prompt_locale.
  std::optional<Locale> response_language;
  std::vector<std::uint64_t> seeds = default_seeds();
  SamplingParams sampling;
  EndpointConfig endpoint;

  Locale reply_locale() const {
    return response_language.value_or(prompt_locale);
  }
};

// Throws ConfigError: empty model name, no seeds, duplicate seeds,
// max_tokens < 64.
void validate_config(const ExperimentConfig& config);

// "<model>_<lang>[_shuffled][_reply-<lang>]", filesystem friendly.
std::string set_label(const ExperimentConfig& config);

// Manifest form. The API key is never serialised.
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& doc);

// The fields that determine the requests and therefore the collected data.
// Two configs with equal identity JSON produce interchangeable records.
nlohmann::json config_identity(const ExperimentConfig& config);

}  // namespace vsm
