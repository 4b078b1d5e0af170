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

#include "vsm/reporting.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "vsm/errors.hpp"
#include "vsm/util.hpp"

namespace vsm {

using ordered_json = nlohmann::ordered_json;

std::string_view metric_name(MatrixMetric metric) {
  switch (metric) {
    case MatrixMetric::Dbi:
      return "dbi";
    case MatrixMetric::Ss:
      return "ss";
    case MatrixMetric::SsH:
      return "ss_h";
    case MatrixMetric::PearsonRho:
      return "pearson_rho";
    case MatrixMetric::MmluDelta:
      return "mmlu_delta";
  }
  return "unknown";
}

MatrixMetric parse_metric(std::string_view name) {
  if (name == "dbi") return MatrixMetric::Dbi;
  if (name == "ss") return MatrixMetric::Ss;
  if (name == "ss_h") return MatrixMetric::SsH;
  if (name == "pearson" || name == "pearson_rho") return MatrixMetric::PearsonRho;
  if (name == "mmlu_delta") return MatrixMetric::MmluDelta;
  throw ConfigError("unknown metric '" + std::string(name) +
                    "' (expected dbi, ss, ss_h, pearson, mmlu_delta)");
}

std::string_view diagonal_policy_name(DiagonalPolicy policy) {
  switch (policy) {
    case DiagonalPolicy::Blank:
      return "blank";
    case DiagonalPolicy::Zero:
      return "zero";
    case DiagonalPolicy::Self:
      return "self";
  }
  return "blank";
}

namespace {

DiagonalPolicy parse_diagonal_policy(std::string_view name) {
  if (name == "blank") return DiagonalPolicy::Blank;
  if (name == "zero") return DiagonalPolicy::Zero;
  if (name == "self") return DiagonalPolicy::Self;
  throw SchemaError("unknown diagonal policy '" + std::string(name) + "'");
}

ComparisonMatrix empty_matrix(std::vector<std::string> labels, MatrixMetric metric,
                              DiagonalPolicy diagonal) {
  ComparisonMatrix m;
  const std::size_t n = labels.size();
  m.labels = std::move(labels);
  m.metric = metric;
  m.diagonal = diagonal;
  m.values.assign(n, std::vector<std::optional<double>>(n));
  if (diagonal == DiagonalPolicy::Zero) {
    for (std::size_t i = 0; i < n; ++i) m.values[i][i] = 0.0;
  }
  return m;
}

}  // namespace

SetReport intra_set_report(const ExperimentSet& set, const HumanReference& human,
                           const ScoringConstants& c) {
  SetReport r;
  r.label = set.label();
  r.records_sha256 = set.records_sha256;
  r.recognizability_rate = set.recognizability_rate;
  r.constants = c;
  r.nationals = national_aggregate(set, c);
  r.dispersion = dimension_dispersion(r.nationals);
  r.dispersion.mcd = mcd(r.nationals, human.nationals);
  r.centroid = set_centroid(set);
  return r;
}

ComparisonMatrix comparison_matrix(std::span<const ExperimentSet> sets, MatrixMetric metric,
                                   const HumanReference& human, const ScoringConstants& c) {
  if (metric == MatrixMetric::MmluDelta) {
    throw ConfigError("mmlu_delta matrices are built from an MMLU table, not from sets");
  }
  if (sets.size() < 2) throw ConfigError("a comparison matrix needs at least two sets");

  std::vector<std::string> labels;
  for (const auto& s : sets) labels.push_back(s.label());
  const DiagonalPolicy diagonal =
      metric == MatrixMetric::PearsonRho ? DiagonalPolicy::Self : DiagonalPolicy::Blank;
  ComparisonMatrix m = empty_matrix(labels, metric, diagonal);

  // Per-set inputs, computed once.
  std::vector<PointSet> clouds;
  std::vector<NationalScores> nationals;
  std::vector<MeanRawScores> centroids;
  for (const auto& s : sets) {
    try {
      switch (metric) {
        case MatrixMetric::Dbi:
        case MatrixMetric::Ss:
          clouds.push_back({s.label(), identity_scores(s, c)});
          break;
        case MatrixMetric::SsH:
          nationals.push_back(national_aggregate(s, c));
          break;
        case MatrixMetric::PearsonRho:
          centroids.push_back(set_centroid(s));
          break;
        case MatrixMetric::MmluDelta:
          break;
      }
    } catch (const Error& e) {
      throw PairError(s.label(), s.label(), e.what());
    }
  }

  auto evaluate = [&](std::size_t i, std::size_t j) -> double {
    switch (metric) {
      case MatrixMetric::Dbi:
        return dbi(clouds[i], clouds[j]);
      case MatrixMetric::Ss:
        return silhouette(clouds[i], clouds[j]);
      case MatrixMetric::SsH:
        return ss_h(nationals[i], nationals[j], human.nationals);
      case MatrixMetric::PearsonRho:
        return pearson(centroids[i].m, centroids[j].m).rho;
      case MatrixMetric::MmluDelta:
        break;
    }
    return 0.0;
  };

  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i; j < sets.size(); ++j) {
      if (i == j && diagonal != DiagonalPolicy::Self) continue;
      try {
        const double v = evaluate(i, j);
        m.values[i][j] = v;
        m.values[j][i] = v;
      } catch (const Error& e) {
        throw PairError(labels[i], labels[j], e.what());
      }
    }
  }
  return m;
}

ComparisonMatrix mmlu_delta_matrix(const MmluTable& mmlu, const std::vector<std::string>& models) {
  std::vector<double> scores;
  for (const auto& model : models) {
    auto it = mmlu.find(model);
    if (it == mmlu.end()) throw UnknownModel("model '" + model + "' has no MMLU score");
    scores.push_back(it->second);
  }
  ComparisonMatrix m = empty_matrix(models, MatrixMetric::MmluDelta, DiagonalPolicy::Zero);
  for (std::size_t i = 0; i < models.size(); ++i) {
    for (std::size_t j = i + 1; j < models.size(); ++j) {
      const double delta = std::fabs(scores[i] - scores[j]);
      m.values[i][j] = delta;
      m.values[j][i] = delta;
    }
  }
  return m;
}

ExportFormat parse_export_format(std::string_view name) {
  if (name == "csv") return ExportFormat::Csv;
  if (name == "json") return ExportFormat::Json;
  throw ConfigError("unknown export format '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Serialisation

namespace {

std::string csv_cell(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

ordered_json score_json(const VsmScore& s) {
  ordered_json out = ordered_json::object();
  for (Dimension d : kAllDimensions) out[std::string(dimension_name(d))] = s[d];
  return out;
}

std::string dump(const ordered_json& doc) { return doc.dump(2) + "\n"; }

}  // namespace

std::string to_csv(const ComparisonMatrix& matrix) {
  std::ostringstream out;
  out << "label";
  for (const auto& l : matrix.labels) out << ',' << csv_cell(l);
  out << '\n';
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    out << csv_cell(matrix.labels[i]);
    for (std::size_t j = 0; j < matrix.size(); ++j) {
      out << ',';
      if (const auto v = matrix.values[i][j]) out << format_fixed(*v, 3);
    }
    out << '\n';
  }
  return out.str();
}

std::string to_json(const ComparisonMatrix& matrix) {
  ordered_json doc;
  doc["metric"] = metric_name(matrix.metric);
  doc["diagonal_policy"] = diagonal_policy_name(matrix.diagonal);
  doc["labels"] = matrix.labels;
  ordered_json rows = ordered_json::array();
  for (const auto& row : matrix.values) {
    ordered_json r = ordered_json::array();
    for (const auto& v : row) r.push_back(v ? ordered_json(*v) : ordered_json(nullptr));
    rows.push_back(std::move(r));
  }
  doc["values"] = std::move(rows);
  return dump(doc);
}

ComparisonMatrix matrix_from_json(std::string_view json_text) {
  try {
    const auto doc = ordered_json::parse(json_text);
    ComparisonMatrix m;
    m.metric = parse_metric(doc.at("metric").get<std::string>());
    m.diagonal = parse_diagonal_policy(doc.at("diagonal_policy").get<std::string>());
    m.labels = doc.at("labels").get<std::vector<std::string>>();
    for (const auto& row : doc.at("values")) {
      std::vector<std::optional<double>> r;
      for (const auto& v : row) {
        r.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
      }
      if (r.size() != m.labels.size()) throw SchemaError("matrix row length mismatch");
      m.values.push_back(std::move(r));
    }
    if (m.values.size() != m.labels.size()) throw SchemaError("matrix is not square");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("bad matrix JSON: ") + e.what());
  }
}

std::string national_scores_csv(const NationalScores& scores) {
  std::ostringstream out;
  out << "nation";
  for (Dimension d : kAllDimensions) out << ',' << dimension_name(d);
  out << '\n';
  for (const auto& [nation, score] : scores) {
    out << csv_cell(nation_id(nation));
    for (Dimension d : kAllDimensions) out << ',' << format_fixed(score[d], 3);
    out << '\n';
  }
  return out.str();
}

std::string identity_scores_csv(const ExperimentSet& set, const ScoringConstants& c) {
  const auto scores = identity_scores(set, c);
  std::ostringstream out;
  out << "nation,gender,age";
  for (Dimension d : kAllDimensions) out << ',' << dimension_name(d);
  out << '\n';
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto& id = set.vectors[i].identity;
    out << csv_cell(nation_id(id.nation)) << ',' << gender_id(id.gender) << ',' << id.age;
    for (Dimension d : kAllDimensions) out << ',' << format_fixed(scores[i][d], 3);
    out << '\n';
  }
  return out.str();
}

std::string to_csv(const SetReport& report) {
  std::string out = national_scores_csv(report.nationals);
  out += "sigma";
  for (double s : report.dispersion.sigma) out += "," + format_fixed(s, 3);
  out += '\n';
  return out;
}

std::string to_json(const SetReport& report) {
  ordered_json doc;
  doc["label"] = report.label;
  doc["records_sha256"] = report.records_sha256;
  doc["recognizability_rate"] = report.recognizability_rate;
  VsmScore constants;
  constants.values = report.constants.c;
  doc["constants"] = score_json(constants);
  ordered_json nationals = ordered_json::object();
  for (const auto& [nation, score] : report.nationals) {
    nationals[std::string(nation_id(nation))] = score_json(score);
  }
  doc["nationals"] = std::move(nationals);
  VsmScore sigma;
  sigma.values = report.dispersion.sigma;
  doc["sigma"] = score_json(sigma);
  doc["distance"] = report.dispersion.distance;
  doc["mcd"] = report.dispersion.mcd ? ordered_json(*report.dispersion.mcd)
                                     : ordered_json(nullptr);
  doc["centroid"] = report.centroid.m;
  return dump(doc);
}

void export_file(const ComparisonMatrix& matrix, ExportFormat format,
                 const std::filesystem::path& path) {
  write_file_atomic(path, format == ExportFormat::Csv ? to_csv(matrix) : to_json(matrix));
}

void export_file(const SetReport& report, ExportFormat format,
                 const std::filesystem::path& path) {
  write_file_atomic(path, format == ExportFormat::Csv ? to_csv(report) : to_json(report));
}

}  // namespace vsm
