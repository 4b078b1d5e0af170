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

#include "vsm/questionnaire.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>

#include <json.hpp>

#include "vsm/errors.hpp"
#include "vsm/util.hpp"

namespace vsm {

using nlohmann::json;

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("VSM_PROBE_DATA"); env && *env) {
    return env;
  }
  std::error_code ec;
  if (std::filesystem::is_directory(VSM_PROBE_SOURCE_DATA_DIR, ec)) {
    return VSM_PROBE_SOURCE_DATA_DIR;
  }
  return VSM_PROBE_INSTALLED_DATA_DIR;
}

const std::string& Question::prose(Locale locale) const {
  auto it = text.find(locale);
  if (it == text.end()) {
    throw MissingLocaleData("question " + std::to_string(id) + " has no '" +
                            std::string(locale_tag(locale)) + "' text");
  }
  return it->second;
}

const std::string& Question::option_text(int option_id, Locale locale) const {
  if (option_id < 1 || option_id > kOptionCount) {
    throw DomainError("option id " + std::to_string(option_id) +
                      " outside 1..5");
  }
  const auto& option = options[static_cast<std::size_t>(option_id - 1)];
  auto it = option.text.find(locale);
  if (it == option.text.end()) {
    throw MissingLocaleData("question " + std::to_string(id) + " option " +
                            std::to_string(option_id) + " has no '" +
                            std::string(locale_tag(locale)) + "' text");
  }
  return it->second;
}

const Question& Questionnaire::question(int id) const {
  if (id < 1 || id > static_cast<int>(questions.size())) {
    throw DomainError("question id " + std::to_string(id) + " outside 1..24");
  }
  return questions[static_cast<std::size_t>(id - 1)];
}

namespace {

[[noreturn]] void schema_fail(const std::string& origin, const std::string& why) {
  throw SchemaError(origin + ": " + why);
}

std::string require_text(const json& node, const char* key,
                         const std::string& origin, const std::string& where) {
  if (!node.is_object() || !node.contains(key) || !node[key].is_string()) {
    schema_fail(origin, where + ": missing string field '" + key + "'");
  }
  auto value = node[key].get<std::string>();
  if (value.empty()) schema_fail(origin, where + ": empty '" + key + "'");
  return value;
}

int require_int(const json& node, const char* key, const std::string& origin,
                const std::string& where) {
  if (!node.is_object() || !node.contains(key) ||
      !node[key].is_number_integer()) {
    schema_fail(origin, where + ": missing integer field '" + key + "'");
  }
  return node[key].get<int>();
}

}  // namespace

Questionnaire parse_questionnaire(Locale locale, const std::string& json_text,
                                  const std::string& origin) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    schema_fail(origin, std::string("not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) schema_fail(origin, "top level must be an object");
  if (doc.contains("locale") &&
      (!doc["locale"].is_string() ||
       doc["locale"].get<std::string>() != locale_tag(locale))) {
    schema_fail(origin, "locale field does not match requested locale");
  }
  if (!doc.contains("questions") || !doc["questions"].is_array()) {
    schema_fail(origin, "missing 'questions' array");
  }
  const auto& items = doc["questions"];
  if (items.size() != kQuestionCount) {
    schema_fail(origin, "expected 24 questions, found " +
                            std::to_string(items.size()));
  }

  Questionnaire out;
  out.questions.resize(kQuestionCount);
  std::set<int> seen;
  for (const auto& item : items) {
    const int id = require_int(item, "id", origin, "question");
    const std::string where = "question " + std::to_string(id);
    if (id < 1 || id > kQuestionCount) schema_fail(origin, where + ": id out of range");
    if (!seen.insert(id).second) schema_fail(origin, where + ": duplicate id");

    Question& q = out.questions[static_cast<std::size_t>(id - 1)];
    q.id = id;
    const std::string kind = require_text(item, "kind", origin, where);
    if (kind == "health") {
      q.kind = QuestionKind::Health;
    } else if (kind == "content") {
      q.kind = QuestionKind::Content;
    } else {
      schema_fail(origin, where + ": kind must be 'content' or 'health'");
    }
    if ((q.kind == QuestionKind::Health) != is_health_question(id)) {
      schema_fail(origin, where + ": health kind must be set on exactly "
                                  "questions 15 and 18");
    }
    q.text[locale] = require_text(item, "text", origin, where);

    if (!item.contains("options") || !item["options"].is_array() ||
        item["options"].size() != kOptionCount) {
      schema_fail(origin, where + ": expected exactly 5 options");
    }
    std::set<int> option_ids;
    for (const auto& opt : item["options"]) {
      const int oid = require_int(opt, "id", origin, where + " option");
      if (oid < 1 || oid > kOptionCount || !option_ids.insert(oid).second) {
        schema_fail(origin, where + ": option ids must be exactly {1..5}");
      }
      Option& o = q.options[static_cast<std::size_t>(oid - 1)];
      o.id = oid;
      o.text[locale] = require_text(opt, "text", origin,
                                    where + " option " + std::to_string(oid));
    }
  }
  out.asset_sha256[locale] = sha256_hex(json_text);
  return out;
}

Questionnaire load_questionnaire(Locale locale,
                                 const std::filesystem::path& data_dir) {
  const auto path = data_dir / ("questionnaire_" +
                                std::string(locale_tag(locale)) + ".json");
  std::string bytes;
  try {
    bytes = read_file(path);
  } catch (const MissingFile&) {
    throw MissingLocaleData("no questionnaire asset for locale '" +
                            std::string(locale_tag(locale)) + "' at " +
                            path.string());
  }
  return parse_questionnaire(locale, bytes, path.string());
}

Questionnaire load_questionnaire(Locale locale) {
  return load_questionnaire(locale, default_data_dir());
}

void merge_questionnaire(Questionnaire& base, const Questionnaire& other) {
  if (base.questions.size() != other.questions.size()) {
    throw SchemaError("questionnaires differ in length");
  }
  for (std::size_t i = 0; i < base.questions.size(); ++i) {
    auto& dst = base.questions[i];
    const auto& src = other.questions[i];
    if (dst.id != src.id || dst.kind != src.kind) {
      throw SchemaError("questionnaires differ in structure at question " +
                        std::to_string(src.id));
    }
    dst.text.insert(src.text.begin(), src.text.end());
    for (std::size_t k = 0; k < dst.options.size(); ++k) {
      dst.options[k].text.insert(src.options[k].text.begin(),
                                 src.options[k].text.end());
    }
  }
  base.asset_sha256.insert(other.asset_sha256.begin(), other.asset_sha256.end());
}

OptionPresentation present_options(int question_id, bool shuffle,
                                   std::uint64_t shuffle_seed) {
  OptionPresentation out;
  out.question_id = question_id;
  if (!shuffle) return out;
  SplitMix64 rng(shuffle_seed ^
                 (static_cast<std::uint64_t>(question_id) * 0x9E3779B97F4A7C15ULL));
  for (std::size_t i = out.order.size() - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(out.order[i], out.order[j]);
  }
  return out;
}

OptionPresentation present_options(const Question& question, bool shuffle,
                                   std::uint64_t shuffle_seed) {
  return present_options(question.id, shuffle, shuffle_seed);
}

}  // namespace vsm
