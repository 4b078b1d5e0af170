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

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "vsm/scoring.hpp"

namespace vsm {

// Hofstede's published national scores for the nine study nations.
struct HumanReference {
  NationalScores nationals;
  std::string provenance;
  std::string asset_sha256;
};

// The table compiled into the library.
HumanReference load_human_reference();

// CSV with header `nation,PDI,IDV,MAS,UAI,LTO,IVR` and one row per study
// nation. Throws SchemaError.
HumanReference parse_human_reference(std::string_view csv_text);

std::string_view human_reference_csv();

// Externally sourced MMLU accuracy per model, in [0, 100].
using MmluTable = std::map<std::string, double>;

// Two-column CSV `model,score`; an optional header row is skipped.
// Throws MissingFile, SchemaError (empty, malformed, duplicate model,
// score out of range).
MmluTable load_mmlu(const std::filesystem::path& path);
MmluTable parse_mmlu(std::string_view csv_text, const std::string& origin = "<memory>");

}  // namespace vsm
