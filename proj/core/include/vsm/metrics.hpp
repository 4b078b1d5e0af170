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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vsm/scoring.hpp"

namespace vsm {

struct CorrelationResult {
  double rho = 0.0;
  double p_value = 1.0;
  int n = 0;
};

// Sample Pearson coefficient with a two-sided p-value from the t statistic
// t = rho * sqrt((n - 2) / (1 - rho^2)) on n - 2 degrees of freedom.
// Throws LengthMismatch (different lengths or n < 3) and DegenerateInput
// (a constant vector).
CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

// Two-sided p-value for a sample correlation `rho` over `n` pairs.
double pearson_p_value(double rho, int n);

struct DisparityReport {
  // Sample standard deviation (divisor n - 1) across nations, per dimension.
  std::array<double, kDimensionCount> sigma{};
  // Mean of the six sigma values.
  double distance = 0.0;
  // Ratio of this distance to the human one, when computed against humans.
  std::optional<double> mcd;

  double operator[](Dimension d) const { return sigma[static_cast<std::size_t>(d)]; }
};

// Throws InsufficientNations for fewer than two nations.
DisparityReport dimension_dispersion(const NationalScores& national_scores);

// Model cultural disparity: model distance over human distance.
// Throws NationMismatch and ZeroHumanDispersion.
double mcd(const NationalScores& model_nationals, const NationalScores& human_nationals);

struct PointSet {
  std::string label;
  std::vector<VsmScore> points;
};

double euclidean(const VsmScore& a, const VsmScore& b);
VsmScore centroid(std::span<const VsmScore> points);

// Pairwise Davies-Bouldin index (S(a) + S(b)) / M, where S is the mean
// distance of a set's points to its centroid and M the distance between
// centroids. Throws TooFewPoints for an empty set, CoincidentCentroids if M == 0.
double dbi(const PointSet& a, const PointSet& b);

// Two-set silhouette: mean over all points of both sets of
// (b - a) / max(a, b), with a the mean distance to the other members of the
// point's own set and b the mean distance to every point of the other set.
// A point with a == b == 0 contributes 0. Throws TooFewPoints (< 2 per set).
double silhouette(const PointSet& a, const PointSet& b);

// Silhouette with human reference over national scores:
//   (1 / 2N) * sum over both sets and every nation of (b - a) / a_h
// where a_h is the nation's mean distance to the other human nations.
// Throws NationMismatch, InsufficientNations, ZeroHumanReference.
double ss_h(const NationalScores& a_nat, const NationalScores& b_nat,
            const NationalScores& human_nat);

}  // namespace vsm
