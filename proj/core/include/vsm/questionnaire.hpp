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
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "vsm/types.hpp"

namespace vsm {

// Directory holding the bundled assets (questionnaires, prompt templates).
// Resolution order: $VSM_PROBE_DATA, the source tree, the install prefix.
std::filesystem::path default_data_dir();

enum class QuestionKind { Content, Health };

// Option ids double as raw scores; the id-text binding is fixed.
struct Option {
  int id = 0;
  std::map<Locale, std::string> text;
};

struct Question {
  int id = 0;
  QuestionKind kind = QuestionKind::Content;
  std::map<Locale, std::string> text;
  std::array<Option, kOptionCount> options;

  // Text of option `option_id` in `locale`; throws MissingLocaleData.
  const std::string& option_text(int option_id, Locale locale) const;
  const std::string& prose(Locale locale) const;
};

// Questions 15 and 18 ask about the respondent's own health.
constexpr bool is_health_question(int question_id) {
  return question_id == 15 || question_id == 18;
}

struct Questionnaire {
  std::vector<Question> questions;  // ordered by id, 1..24
  // SHA-256 of each loaded asset, keyed by locale.
  std::map<Locale, std::string> asset_sha256;

  const Question& question(int id) const;
  bool has_locale(Locale locale) const { return asset_sha256.contains(locale); }
};

// Loads `questionnaire_<tag>.json` from `data_dir`. Strictly validated:
// 24 questions with ids 1..24, five options with ids 1..5, health kind on
// exactly questions 15 and 18.
Questionnaire load_questionnaire(Locale locale,
                                 const std::filesystem::path& data_dir);
Questionnaire load_questionnaire(Locale locale);

// Parses an asset already in memory; `origin` only labels error messages.
Questionnaire parse_questionnaire(Locale locale, const std::string& json_text,
                                  const std::string& origin = "<memory>");

// Folds the text of `other` into `base`. Both must describe the same ids
// and kinds; SchemaError otherwise.
void merge_questionnaire(Questionnaire& base, const Questionnaire& other);

struct OptionPresentation {
  int question_id = 0;
  std::array<int, kOptionCount> order{1, 2, 3, 4, 5};

  friend bool operator==(const OptionPresentation&,
                         const OptionPresentation&) = default;
};

// Display order of a question's options.
//
// Unshuffled: 1,2,3,4,5. Shuffled: a Fisher-Yates pass over [1..5] driven by
// SplitMix64 seeded with
//     seed XOR (question_id * 0x9E3779B97F4A7C15)      (mod 2^64)
// iterating i = 4 down to 1 and swapping slot i with slot j, where j is drawn
// uniformly from [0, i] by rejection sampling on the raw 64-bit output.
OptionPresentation present_options(int question_id, bool shuffle,
                                   std::uint64_t shuffle_seed);
OptionPresentation present_options(const Question& question, bool shuffle,
                                   std::uint64_t shuffle_seed);

}  // namespace vsm
