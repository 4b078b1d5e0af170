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

#include "vsm/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "vsm/errors.hpp"

namespace vsm {

double pearson_p_value(double rho, int n) {
  if (n < 3) throw LengthMismatch("correlation needs at least 3 pairs");
  const double r = std::clamp(rho, -1.0, 1.0);
  const double one_minus = 1.0 - r * r;
  if (one_minus <= 0.0) return 0.0;
  const double df = static_cast<double>(n - 2);
  const double t = std::fabs(r) * std::sqrt(df / one_minus);
  const boost::math::students_t dist(df);
  const double p = 2.0 * boost::math::cdf(boost::math::complement(dist, t));
  return std::clamp(p, 0.0, 1.0);
}

CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw LengthMismatch("pearson: lengths " + std::to_string(x.size()) + " and " +
                         std::to_string(y.size()) + " differ");
  }
  if (x.size() < 3) throw LengthMismatch("pearson: need at least 3 pairs");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw DegenerateInput("pearson: correlation undefined for a constant vector");
  }
  CorrelationResult out;
  out.n = static_cast<int>(x.size());
  out.rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  out.p_value = pearson_p_value(out.rho, out.n);
  return out;
}

DisparityReport dimension_dispersion(const NationalScores& national_scores) {
  if (national_scores.size() < 2) {
    throw InsufficientNations("dispersion needs at least two nations, got " +
                              std::to_string(national_scores.size()));
  }
  const auto n = static_cast<double>(national_scores.size());
  DisparityReport out;
  double total = 0.0;
  for (std::size_t d = 0; d < kDimensionCount; ++d) {
    double mean = 0.0;
    for (const auto& [nation, score] : national_scores) mean += score.values[d];
    mean /= n;
    double ss = 0.0;
    for (const auto& [nation, score] : national_scores) {
      const double dev = score.values[d] - mean;
      ss += dev * dev;
    }
    out.sigma[d] = std::sqrt(ss / (n - 1.0));
    total += out.sigma[d];
  }
  out.distance = total / static_cast<double>(kDimensionCount);
  return out;
}

namespace {

bool same_nations(const NationalScores& a, const NationalScores& b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(),
                    [](const auto& x, const auto& y) { return x.first == y.first; });
}

}  // namespace

double mcd(const NationalScores& model_nationals, const NationalScores& human_nationals) {
  if (!same_nations(model_nationals, human_nationals)) {
    throw NationMismatch("model and human scores cover different nations");
  }
  const double human = dimension_dispersion(human_nationals).distance;
  if (human == 0.0) throw ZeroHumanDispersion("human national scores have zero dispersion");
  return dimension_dispersion(model_nationals).distance / human;
}

double euclidean(const VsmScore& a, const VsmScore& b) {
  double ss = 0.0;
  for (std::size_t d = 0; d < kDimensionCount; ++d) {
    const double diff = a.values[d] - b.values[d];
    ss += diff * diff;
  }
  return std::sqrt(ss);
}

VsmScore centroid(std::span<const VsmScore> points) {
  if (points.empty()) throw TooFewPoints("centroid of an empty set");
  VsmScore c;
  for (std::size_t d = 0; d < kDimensionCount; ++d) {
    double sum = 0.0;
    for (const auto& p : points) sum += p.values[d];
    c.values[d] = sum / static_cast<double>(points.size());
  }
  return c;
}

namespace {

double spread(const std::vector<VsmScore>& points, const VsmScore& center) {
  double sum = 0.0;
  for (const auto& p : points) sum += euclidean(p, center);
  return sum / static_cast<double>(points.size());
}

double mean_distance(const VsmScore& p, const std::vector<VsmScore>& others,
                     std::size_t skip_index, bool skip) {
  double sum = 0.0;
  for (std::size_t j = 0; j < others.size(); ++j) {
    if (skip && j == skip_index) continue;
    sum += euclidean(p, others[j]);
  }
  return sum / static_cast<double>(skip ? others.size() - 1 : others.size());
}

// Sum of silhouette values over the points of `own`.
double silhouette_sum(const std::vector<VsmScore>& own,
                      const std::vector<VsmScore>& other) {
  double sum = 0.0;
  for (std::size_t i = 0; i < own.size(); ++i) {
    const double a = mean_distance(own[i], own, i, true);
    const double b = mean_distance(own[i], other, 0, false);
    const double denom = std::max(a, b);
    if (denom > 0.0) sum += (b - a) / denom;
  }
  return sum;
}

}  // namespace

double dbi(const PointSet& a, const PointSet& b) {
  if (a.points.empty() || b.points.empty()) {
    throw TooFewPoints("dbi needs at least one point per set");
  }
  const VsmScore ca = centroid(a.points);
  const VsmScore cb = centroid(b.points);
  const double separation = euclidean(ca, cb);
  if (separation == 0.0) {
    throw CoincidentCentroids("dbi undefined: sets '" + a.label + "' and '" + b.label +
                              "' share a centroid");
  }
  return (spread(a.points, ca) + spread(b.points, cb)) / separation;
}

double silhouette(const PointSet& a, const PointSet& b) {
  if (a.points.size() < 2 || b.points.size() < 2) {
    throw TooFewPoints("silhouette needs at least two points per set");
  }
  const double total = silhouette_sum(a.points, b.points) + silhouette_sum(b.points, a.points);
  return total / static_cast<double>(a.points.size() + b.points.size());
}

namespace {

std::vector<VsmScore> values_of(const NationalScores& scores) {
  std::vector<VsmScore> out;
  out.reserve(scores.size());
  for (const auto& [nation, score] : scores) out.push_back(score);
  return out;
}

double ss_h_sum(const std::vector<VsmScore>& own, const std::vector<VsmScore>& other,
                const std::vector<double>& human_spread) {
  double sum = 0.0;
  for (std::size_t i = 0; i < own.size(); ++i) {
    const double a = mean_distance(own[i], own, i, true);
    const double b = mean_distance(own[i], other, 0, false);
    sum += (b - a) / human_spread[i];
  }
  return sum;
}

}  // namespace

double ss_h(const NationalScores& a_nat, const NationalScores& b_nat,
            const NationalScores& human_nat) {
  if (!same_nations(a_nat, b_nat) || !same_nations(a_nat, human_nat)) {
    throw NationMismatch("ss_h: sets and human reference cover different nations");
  }
  if (a_nat.size() < 2) throw InsufficientNations("ss_h needs at least two nations");

  const auto human = values_of(human_nat);
  std::vector<double> human_spread(human.size());
  for (std::size_t i = 0; i < human.size(); ++i) {
    human_spread[i] = mean_distance(human[i], human, i, true);
    if (!(human_spread[i] > 0.0)) {
      throw ZeroHumanReference("ss_h: human nations coincide, reference distance is zero");
    }
  }
  const auto a = values_of(a_nat);
  const auto b = values_of(b_nat);
  const double total = ss_h_sum(a, b, human_spread) + ss_h_sum(b, a, human_spread);
  return total / (2.0 * static_cast<double>(a.size()));
}

}  // namespace vsm
