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

#include "vsm/protocol.hpp"

#include <algorithm>

#include <json.hpp>

#include "vsm/errors.hpp"
#include "vsm/util.hpp"

namespace vsm {

using nlohmann::json;

std::vector<Identity> identity_grid() {
  std::vector<Identity> grid;
  grid.reserve(kAllNations.size() * kAllGenders.size() * kIdentityAges.size());
  for (Nation nation : kAllNations) {
    for (Gender gender : kAllGenders) {
      for (int age : kIdentityAges) grid.push_back({nation, gender, age});
    }
  }
  return grid;
}

namespace {

std::string field(const json& doc, const char* key, const std::string& origin) {
  if (!doc.contains(key) || !doc[key].is_string() ||
      doc[key].get<std::string>().empty()) {
    throw SchemaError(origin + ": missing string field '" + key + "'");
  }
  return doc[key].get<std::string>();
}

}  // namespace

PromptTemplate parse_prompt_template(Locale locale, const std::string& json_text,
                                     const std::string& origin) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(origin + ": not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw SchemaError(origin + ": top level must be an object");

  PromptTemplate out;
  out.locale = locale;
  out.body = field(doc, "template", origin);
  out.identity = field(doc, "identity", origin);
  out.option_line = field(doc, "option_line", origin);
  out.format_instruction = field(doc, "format_instruction", origin);

  if (!doc.contains("nations") || !doc["nations"].is_object()) {
    throw SchemaError(origin + ": missing 'nations' map");
  }
  for (Nation nation : kAllNations) {
    out.nations[nation] = field(doc["nations"], std::string(nation_id(nation)).c_str(), origin);
  }
  if (!doc.contains("genders") || !doc["genders"].is_object()) {
    throw SchemaError(origin + ": missing 'genders' map");
  }
  for (Gender gender : kAllGenders) {
    out.genders[gender] = field(doc["genders"], std::string(gender_id(gender)).c_str(), origin);
  }
  out.asset_sha256 = sha256_hex(json_text);
  return out;
}

PromptTemplate load_prompt_template(Locale locale,
                                    const std::filesystem::path& data_dir) {
  const auto path =
      data_dir / ("prompt_" + std::string(locale_tag(locale)) + ".json");
  std::string bytes;
  try {
    bytes = read_file(path);
  } catch (const MissingFile&) {
    throw MissingLocaleData("no prompt template for locale '" +
                            std::string(locale_tag(locale)) + "' at " +
                            path.string());
  }
  return parse_prompt_template(locale, bytes, path.string());
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& data_dir) {
  PromptTemplates out;
  for (Locale locale : kAllLocales) out.add(load_prompt_template(locale, data_dir));
  return out;
}

void PromptTemplates::add(PromptTemplate tmpl) {
  const Locale locale = tmpl.locale;
  by_locale_.insert_or_assign(locale, std::move(tmpl));
}

const PromptTemplate& PromptTemplates::at(Locale locale) const {
  auto it = by_locale_.find(locale);
  if (it == by_locale_.end()) {
    throw MissingLocaleData("no prompt template loaded for locale '" +
                            std::string(locale_tag(locale)) + "'");
  }
  return it->second;
}

std::string PromptTemplates::combined_sha256(std::vector<Locale> locales) const {
  std::sort(locales.begin(), locales.end());
  locales.erase(std::unique(locales.begin(), locales.end()), locales.end());
  std::string joined;
  for (Locale locale : locales) {
    joined += locale_tag(locale);
    joined += ':';
    joined += at(locale).asset_sha256;
    joined += '\n';
  }
  return sha256_hex(joined);
}

std::string render_placeholders(std::string_view tmpl,
                                const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(tmpl.size() * 2);
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const std::size_t open = tmpl.find('{', pos);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      break;
    }
    out.append(tmpl.substr(pos, open - pos));
    const std::size_t close = tmpl.find('}', open + 1);
    if (close != std::string_view::npos) {
      auto it = vars.find(std::string(tmpl.substr(open + 1, close - open - 1)));
      if (it != vars.end()) {
        out += it->second;
        pos = close + 1;
        continue;
      }
    }
    out += '{';
    pos = open + 1;
  }
  return out;
}

PromptText build_prompt(const PromptTemplates& templates,
                        const Question& question,
                        const OptionPresentation& presentation,
                        const Identity& identity, Locale prompt_locale,
                        Locale response_language, std::uint64_t seed) {
  const PromptTemplate& prompt_tmpl = templates.at(prompt_locale);
  const PromptTemplate& reply_tmpl = templates.at(response_language);

  std::string options;
  for (std::size_t i = 0; i < presentation.order.size(); ++i) {
    const int id = presentation.order[i];
    if (i > 0) options += '\n';
    options += render_placeholders(
        prompt_tmpl.option_line,
        {{"id", std::to_string(id)},
         {"text", question.option_text(id, prompt_locale)}});
  }

  const std::string who = render_placeholders(
      prompt_tmpl.identity, {{"nation", prompt_tmpl.nations.at(identity.nation)},
                             {"gender", prompt_tmpl.genders.at(identity.gender)},
                             {"age", std::to_string(identity.age)}});

  PromptText out;
  out.text = render_placeholders(
      prompt_tmpl.body, {{"format_instruction", reply_tmpl.format_instruction},
                         {"identity", who},
                         {"question", question.prose(prompt_locale)},
                         {"options", options}});
  out.question_id = question.id;
  out.identity = identity;
  out.seed = seed;
  out.presentation = presentation;
  return out;
}

}  // namespace vsm
