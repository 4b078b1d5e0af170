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
#include <cstddef>
#include <string>
#include <string_view>

namespace vsm {

inline constexpr int kQuestionCount = 24;
inline constexpr int kOptionCount = 5;

enum class Locale { English, Chinese };

inline constexpr std::array<Locale, 2> kAllLocales = {Locale::English,
                                                      Locale::Chinese};

// "en" / "zh".
std::string_view locale_tag(Locale locale);
Locale parse_locale(std::string_view tag);

// Study nations, in the fixed order used for identity grids and tables.
enum class Nation {
  USA,
  China,
  France,
  Germany,
  Brazil,
  India,
  Singapore,
  Japan,
  SouthAfrica,
};

inline constexpr std::size_t kNationCount = 9;
inline constexpr std::array<Nation, kNationCount> kAllNations = {
    Nation::USA,    Nation::China,     Nation::France,
    Nation::Germany, Nation::Brazil,   Nation::India,
    Nation::Singapore, Nation::Japan,  Nation::SouthAfrica};

// Stable machine identifier ("USA", "South Africa", ...). Used in records,
// CSV exports and the human reference asset.
std::string_view nation_id(Nation nation);
Nation parse_nation(std::string_view id);

enum class Gender { Male, Female };

inline constexpr std::array<Gender, 2> kAllGenders = {Gender::Male,
                                                      Gender::Female};

std::string_view gender_id(Gender gender);
Gender parse_gender(std::string_view id);

inline constexpr std::array<int, 3> kIdentityAges = {25, 35, 45};

struct Identity {
  Nation nation = Nation::USA;
  Gender gender = Gender::Male;
  int age = 25;

  friend bool operator==(const Identity&, const Identity&) = default;
  friend auto operator<=>(const Identity&, const Identity&) = default;
};

// "USA/male/25".
std::string identity_label(const Identity& identity);

// VSM dimensions in canonical column order.
enum class Dimension { PDI, IDV, MAS, UAI, LTO, IVR };

inline constexpr std::size_t kDimensionCount = 6;
inline constexpr std::array<Dimension, kDimensionCount> kAllDimensions = {
    Dimension::PDI, Dimension::IDV, Dimension::MAS,
    Dimension::UAI, Dimension::LTO, Dimension::IVR};

std::string_view dimension_name(Dimension dimension);

}  // namespace vsm
