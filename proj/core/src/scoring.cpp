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

#include "vsm/scoring.hpp"

#include <set>
#include <string>
#include <vector>

#include "vsm/errors.hpp"
#include "vsm/protocol.hpp"

namespace vsm {

VsmScore vsm_score(const MeanRawScores& m, const ScoringConstants& c) {
  for (int q = 1; q <= kQuestionCount; ++q) {
    if (!(m(q) >= 1.0 && m(q) <= 5.0)) {
      throw DomainError("mean raw score m_" + std::to_string(q) + " = " +
                        std::to_string(m(q)) + " outside [1, 5]");
    }
  }
  VsmScore s;
  s[Dimension::PDI] = 35.0 * (m(7) - m(2)) + 25.0 * (m(20) - m(23)) + c[Dimension::PDI];
  s[Dimension::IDV] = 35.0 * (m(4) - m(1)) + 35.0 * (m(9) - m(6)) + c[Dimension::IDV];
  s[Dimension::MAS] = 35.0 * (m(5) - m(3)) + 35.0 * (m(8) - m(10)) + c[Dimension::MAS];
  s[Dimension::UAI] = 40.0 * (m(18) - m(15)) + 25.0 * (m(21) - m(24)) + c[Dimension::UAI];
  s[Dimension::LTO] = 40.0 * (m(13) - m(14)) + 25.0 * (m(19) - m(22)) + c[Dimension::LTO];
  s[Dimension::IVR] = 35.0 * (m(12) - m(11)) + 40.0 * (m(17) - m(16)) + c[Dimension::IVR];
  return s;
}

MeanRawScores mean_raw_scores(std::span<const ResponseVector> vectors) {
  if (vectors.empty()) throw EmptyInput("no response vectors to average");
  MeanRawScores out;
  for (std::size_t q = 0; q < kQuestionCount; ++q) {
    double sum = 0.0;
    for (const auto& v : vectors) sum += v.scores[q];
    out.m[q] = sum / static_cast<double>(vectors.size());
  }
  return out;
}

namespace {

void require_complete(const ExperimentSet& set) {
  const auto grid = identity_grid();
  if (set.vectors.size() != grid.size()) {
    throw IncompleteSet("set '" + set.label() + "' has " +
                        std::to_string(set.vectors.size()) + " vectors, expected " +
                        std::to_string(grid.size()));
  }
  std::set<Identity> present;
  for (const auto& v : set.vectors) present.insert(v.identity);
  if (present.size() != grid.size()) {
    throw IncompleteSet("set '" + set.label() + "' does not cover every identity once");
  }
}

MeanRawScores to_mean(const ResponseVector& v) {
  MeanRawScores m;
  m.m = v.scores;
  return m;
}

}  // namespace

std::vector<VsmScore> identity_scores(const ExperimentSet& set, const ScoringConstants& c) {
  std::vector<VsmScore> out;
  out.reserve(set.vectors.size());
  for (const auto& v : set.vectors) out.push_back(vsm_score(to_mean(v), c));
  return out;
}

NationalScores national_aggregate(const ExperimentSet& set, const ScoringConstants& c) {
  require_complete(set);
  NationalScores out;
  for (Nation nation : kAllNations) {
    std::vector<ResponseVector> group;
    for (const auto& v : set.vectors) {
      if (v.identity.nation == nation) group.push_back(v);
    }
    out.emplace(nation, vsm_score(mean_raw_scores(group), c));
  }
  return out;
}

MeanRawScores set_centroid(const ExperimentSet& set) {
  require_complete(set);
  return mean_raw_scores(set.vectors);
}

}  // namespace vsm
