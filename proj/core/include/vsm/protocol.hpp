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
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "vsm/questionnaire.hpp"
#include "vsm/types.hpp"

namespace vsm {

// All 54 simulated respondents, nation-major, then gender, then age.
std::vector<Identity> identity_grid();

// Per-locale prompt wording. Placeholders are `{name}`; unknown names are
// left untouched so literal JSON braces in the wording survive.
//
//   template            {format_instruction} {identity} {question} {options}
//   identity            {nation} {gender} {age}
//   option_line         {id} {text}
//   format_instruction  (no placeholders)
struct PromptTemplate {
  Locale locale = Locale::English;
  std::string body;
  std::string identity;
  std::string option_line;
  std::string format_instruction;
  std::map<Nation, std::string> nations;
  std::map<Gender, std::string> genders;
  std::string asset_sha256;
};

PromptTemplate parse_prompt_template(Locale locale, const std::string& json_text,
                                     const std::string& origin = "<memory>");
PromptTemplate load_prompt_template(Locale locale,
                                    const std::filesystem::path& data_dir);

// Templates for every locale a run may need, keyed by locale.
class PromptTemplates {
 public:
  PromptTemplates() = default;
  static PromptTemplates load(const std::filesystem::path& data_dir);

  void add(PromptTemplate tmpl);
  const PromptTemplate& at(Locale locale) const;
  bool contains(Locale locale) const { return by_locale_.contains(locale); }

  // Digest over the assets of the given locales, in locale order.
  std::string combined_sha256(std::vector<Locale> locales) const;

 private:
  std::map<Locale, PromptTemplate> by_locale_;
};

// Single left-to-right pass; substituted values are never rescanned.
std::string render_placeholders(std::string_view tmpl,
                                const std::map<std::string, std::string>& vars);

struct PromptText {
  std::string text;
  int question_id = 0;
  Identity identity;
  std::uint64_t seed = 0;
  OptionPresentation presentation;
};

// Renders the prompt for one (question, identity, seed). Question and
// identity wording come from `prompt_locale`; the reply-format instruction
// comes from `response_language`. Pure: identical inputs give identical bytes.
PromptText build_prompt(const PromptTemplates& templates,
                        const Question& question,
                        const OptionPresentation& presentation,
                        const Identity& identity, Locale prompt_locale,
                        Locale response_language, std::uint64_t seed = 0);

}  // namespace vsm
