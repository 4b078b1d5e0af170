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

#include "vsm/types.hpp"

#include <string>

#include "vsm/errors.hpp"

namespace vsm {

std::string_view locale_tag(Locale locale) {
  return locale == Locale::English ? "en" : "zh";
}

Locale parse_locale(std::string_view tag) {
  if (tag == "en") return Locale::English;
  if (tag == "zh") return Locale::Chinese;
  throw MissingLocaleData("unsupported locale '" + std::string(tag) +
                          "' (expected en or zh)");
}

namespace {
constexpr std::array<std::string_view, kNationCount> kNationIds = {
    "USA",   "China",     "France", "Germany",     "Brazil",
    "India", "Singapore", "Japan",  "South Africa"};
}  // namespace

std::string_view nation_id(Nation nation) {
  return kNationIds[static_cast<std::size_t>(nation)];
}

Nation parse_nation(std::string_view id) {
  for (std::size_t i = 0; i < kNationIds.size(); ++i) {
    if (kNationIds[i] == id) return kAllNations[i];
  }
  throw SchemaError("unknown nation '" + std::string(id) + "'");
}

std::string_view gender_id(Gender gender) {
  return gender == Gender::Male ? "male" : "female";
}

Gender parse_gender(std::string_view id) {
  if (id == "male") return Gender::Male;
  if (id == "female") return Gender::Female;
  throw SchemaError("unknown gender '" + std::string(id) + "'");
}

std::string identity_label(const Identity& identity) {
  std::string out(nation_id(identity.nation));
  out += '/';
  out += gender_id(identity.gender);
  out += '/';
  out += std::to_string(identity.age);
  return out;
}

std::string_view dimension_name(Dimension dimension) {
  static constexpr std::array<std::string_view, kDimensionCount> kNames = {
      "PDI", "IDV", "MAS", "UAI", "LTO", "IVR"};
  return kNames[static_cast<std::size_t>(dimension)];
}

}  // namespace vsm
