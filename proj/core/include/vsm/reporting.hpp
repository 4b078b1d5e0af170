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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vsm/collection.hpp"
#include "vsm/metrics.hpp"
#include "vsm/reference_data.hpp"
#include "vsm/scoring.hpp"

namespace vsm {

enum class MatrixMetric { Dbi, Ss, SsH, PearsonRho, MmluDelta };

std::string_view metric_name(MatrixMetric metric);
// Accepts dbi, ss, ss_h, pearson, pearson_rho, mmlu_delta.
MatrixMetric parse_metric(std::string_view name);

// Blank: undefined self-comparison (dbi, ss, ss_h). Zero: mmlu_delta.
// Self: the metric evaluated on the set against itself (pearson_rho, 1.0).
enum class DiagonalPolicy { Blank, Zero, Self };

std::string_view diagonal_policy_name(DiagonalPolicy policy);

struct ComparisonMatrix {
  std::vector<std::string> labels;
  // values[i][j]; nullopt only on a blank diagonal.
  std::vector<std::vector<std::optional<double>>> values;
  MatrixMetric metric = MatrixMetric::SsH;
  DiagonalPolicy diagonal = DiagonalPolicy::Blank;

  std::size_t size() const { return labels.size(); }
  std::optional<double> at(std::size_t i, std::size_t j) const { return values[i][j]; }
};

struct SetReport {
  std::string label;
  std::string records_sha256;
  double recognizability_rate = 0.0;
  ScoringConstants constants;
  NationalScores nationals;
  DisparityReport dispersion;  // mcd filled against the human reference
  MeanRawScores centroid;
};

// National scores, their dispersion, MCD against humans and the centroid.
SetReport intra_set_report(const ExperimentSet& set, const HumanReference& human,
                           const ScoringConstants& c = {});

// Pairwise metric over every unordered pair of sets, mirrored to fill the
// matrix. dbi and ss use the 54 identity points, ss_h the national
// aggregates, pearson_rho the 24-d centroids. Metric failures are rethrown
// as PairError naming the pair.
ComparisonMatrix comparison_matrix(std::span<const ExperimentSet> sets, MatrixMetric metric,
                                   const HumanReference& human,
                                   const ScoringConstants& c = {});

// |score_i - score_j|. Throws UnknownModel.
ComparisonMatrix mmlu_delta_matrix(const MmluTable& mmlu, const std::vector<std::string>& models);

enum class ExportFormat { Csv, Json };

ExportFormat parse_export_format(std::string_view name);

// CSV: fixed header order, reals as 3-decimal fixed point, blank cells empty.
// JSON: stable key order, reals at full round-trip precision.
std::string to_csv(const ComparisonMatrix& matrix);
std::string to_json(const ComparisonMatrix& matrix);
ComparisonMatrix matrix_from_json(std::string_view json_text);

std::string to_csv(const SetReport& report);
std::string to_json(const SetReport& report);

// nation,PDI,IDV,MAS,UAI,LTO,IVR
std::string national_scores_csv(const NationalScores& scores);
// nation,gender,age,PDI,...,IVR: one row per identity, for external plotting.
std::string identity_scores_csv(const ExperimentSet& set, const ScoringConstants& c = {});

// Atomic write; throws IoError.
void export_file(const ComparisonMatrix& matrix, ExportFormat format,
                 const std::filesystem::path& path);
void export_file(const SetReport& report, ExportFormat format,
                 const std::filesystem::path& path);

}  // namespace vsm
