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
#include <map>
#include <span>

#include "vsm/collection.hpp"
#include "vsm/types.hpp"

namespace vsm {

// Per-question mean raw scores m_1..m_24 for some group of respondents.
struct MeanRawScores {
  std::array<double, kQuestionCount> m{};

  // 1-based, matching question ids.
  double operator()(int question_id) const {
    return m[static_cast<std::size_t>(question_id - 1)];
  }
  double& operator()(int question_id) {
    return m[static_cast<std::size_t>(question_id - 1)];
  }
};

// Additive constant per dimension, in Dimension order.
struct ScoringConstants {
  std::array<double, kDimensionCount> c{};

  double operator[](Dimension d) const { return c[static_cast<std::size_t>(d)]; }
};

// Index scores on the six dimensions. Unclamped.
struct VsmScore {
  std::array<double, kDimensionCount> values{};

  double operator[](Dimension d) const { return values[static_cast<std::size_t>(d)]; }
  double& operator[](Dimension d) { return values[static_cast<std::size_t>(d)]; }

  friend bool operator==(const VsmScore&, const VsmScore&) = default;
};

using NationalScores = std::map<Nation, VsmScore>;

//   PDI = 35(m7  - m2)  + 25(m20 - m23) + C_PDI
//   IDV = 35(m4  - m1)  + 35(m9  - m6)  + C_IDV
//   MAS = 35(m5  - m3)  + 35(m8  - m10) + C_MAS
//   UAI = 40(m18 - m15) + 25(m21 - m24) + C_UAI
//   LTO = 40(m13 - m14) + 25(m19 - m22) + C_LTO
//   IVR = 35(m12 - m11) + 40(m17 - m16) + C_IVR
// Throws DomainError if any m_i lies outside [1, 5].
VsmScore vsm_score(const MeanRawScores& m, const ScoringConstants& c = {});

MeanRawScores mean_raw_scores(std::span<const ResponseVector> vectors);

// Identity-level scores, one per vector (the 54-point cloud of a set).
std::vector<VsmScore> identity_scores(const ExperimentSet& set,
                                      const ScoringConstants& c = {});

// Per nation: average that nation's response vectors, then score.
// Throws IncompleteSet unless the set holds one vector per grid identity.
NationalScores national_aggregate(const ExperimentSet& set,
                                  const ScoringConstants& c = {});

// Entrywise mean of all response vectors of a complete set.
MeanRawScores set_centroid(const ExperimentSet& set);

}  // namespace vsm
