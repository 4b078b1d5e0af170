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

#include "vsm/reference_data.hpp"

#include <charconv>
#include <cmath>
#include <vector>

#include "vsm/errors.hpp"
#include "vsm/util.hpp"

namespace vsm {

namespace detail {
std::string_view embedded_human_reference_csv();
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(sep, pos);
    out.push_back(trim(line.substr(pos, next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line = trim(text.substr(pos, nl - pos));
    if (!line.empty()) out.push_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

std::string_view human_reference_csv() { return detail::embedded_human_reference_csv(); }

HumanReference parse_human_reference(std::string_view csv_text) {
  const auto lines = lines_of(csv_text);
  if (lines.empty()) throw SchemaError("human reference: empty table");
  const auto header = split(lines.front(), ',');
  if (header.size() != 1 + kDimensionCount || header[0] != "nation") {
    throw SchemaError("human reference: header must be nation,PDI,IDV,MAS,UAI,LTO,IVR");
  }
  for (std::size_t d = 0; d < kDimensionCount; ++d) {
    if (header[d + 1] != dimension_name(kAllDimensions[d])) {
      throw SchemaError("human reference: unexpected column '" + std::string(header[d + 1]) + "'");
    }
  }

  HumanReference out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i], ',');
    if (cells.size() != header.size()) {
      throw SchemaError("human reference: row " + std::to_string(i) + " has " +
                        std::to_string(cells.size()) + " cells");
    }
    const Nation nation = parse_nation(cells[0]);
    VsmScore score;
    for (std::size_t d = 0; d < kDimensionCount; ++d) {
      if (!parse_double(cells[d + 1], score.values[d])) {
        throw SchemaError("human reference: bad number '" + std::string(cells[d + 1]) + "'");
      }
    }
    if (!out.nationals.emplace(nation, score).second) {
      throw SchemaError("human reference: duplicate nation " + std::string(cells[0]));
    }
  }
  if (out.nationals.size() != kNationCount) {
    throw SchemaError("human reference: expected the 9 study nations, found " +
                      std::to_string(out.nationals.size()));
  }
  out.provenance =
      "Hofstede VSM national scores (geert-hofstede.com country comparison), "
      "as tabulated for the nine study nations";
  out.asset_sha256 = sha256_hex(csv_text);
  return out;
}

HumanReference load_human_reference() { return parse_human_reference(human_reference_csv()); }

MmluTable parse_mmlu(std::string_view csv_text, const std::string& origin) {
  const auto lines = lines_of(csv_text);
  if (lines.empty()) throw SchemaError(origin + ": MMLU table is empty");
  MmluTable out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto cells = split(lines[i], ',');
    if (cells.size() != 2 || cells[0].empty()) {
      throw SchemaError(origin + ": line " + std::to_string(i + 1) +
                        " must have exactly two columns: model,score");
    }
    double score = 0.0;
    if (!parse_double(cells[1], score)) {
      if (i == 0) continue;  // header
      throw SchemaError(origin + ": bad score '" + std::string(cells[1]) + "'");
    }
    if (score < 0.0 || score > 100.0) {
      throw SchemaError(origin + ": score " + std::string(cells[1]) + " outside [0, 100]");
    }
    if (!out.emplace(std::string(cells[0]), score).second) {
      throw SchemaError(origin + ": duplicate model '" + std::string(cells[0]) + "'");
    }
  }
  if (out.empty()) throw SchemaError(origin + ": MMLU table has no rows");
  return out;
}

MmluTable load_mmlu(const std::filesystem::path& path) {
  return parse_mmlu(read_file(path), path.string());
}

}  // namespace vsm
