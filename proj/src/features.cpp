/*
 * Copyright 2026 The CBDC Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <cmath>

#include "cbdc/classifier.hpp"
#include "cbdc/errors.hpp"

namespace cbdc {

std::vector<double> FeatureRecord::concatenated() const {
  std::vector<double> out = topo.values;
  out.insert(out.end(), intensity_stats.begin(), intensity_stats.end());
  return out;
}

std::array<double, kIntensityStatCount> intensity_stats(
    const GrayscaleImage& img) {
  const auto v = img.values();
  const double n = static_cast<double>(v.size());
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / n;
  double sq = 0.0;
  for (double x : v) sq += (x - mean) * (x - mean);
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return {mean, std::sqrt(sq / n), *lo, *hi};
}

FeatureRecord featurize(const GrayscaleImage& img, int thresholds,
                        std::optional<int> label) {
  FeatureRecord record;
  record.topo = vectorize(compute_persistence(img), thresholds);
  record.intensity_stats = intensity_stats(img);
  record.label = label;
  return record;
}

std::vector<std::string> feature_names(int thresholds) {
  std::vector<std::string> names = topo_feature_names(thresholds);
  names.insert(names.end(), {"mean", "std", "min", "max"});
  return names;
}

FeatureNormalizer FeatureNormalizer::fit(
    std::span<const std::vector<double>> rows) {
  if (rows.empty()) throw InvalidInput("normalizer: no training rows");
  FeatureNormalizer norm;
  norm.input_dim = rows.front().size();
  const double n = static_cast<double>(rows.size());
  for (const auto& r : rows) {
    if (r.size() != norm.input_dim) {
      throw InvalidInput("normalizer: inconsistent feature lengths");
    }
    for (double v : r) {
      if (!std::isfinite(v)) throw InvalidInput("normalizer: non-finite feature");
    }
  }
  for (std::size_t j = 0; j < norm.input_dim; ++j) {
    double sum = 0.0;
    for (const auto& r : rows) sum += r[j];
    const double mean = sum / n;
    double sq = 0.0;
    for (const auto& r : rows) sq += (r[j] - mean) * (r[j] - mean);
    const double sd = std::sqrt(sq / n);
    if (sd <= 1e-12 * (1.0 + std::abs(mean))) {
      norm.dropped.push_back(j);
      continue;
    }
    norm.kept.push_back(j);
    norm.mean.push_back(mean);
    norm.stddev.push_back(sd);
  }
  return norm;
}

Eigen::VectorXd FeatureNormalizer::transform(std::span<const double> raw) const {
  if (raw.size() != input_dim) {
    throw InvalidInput("feature dimension mismatch: model expects " +
                       std::to_string(input_dim) + ", got " +
                       std::to_string(raw.size()));
  }
  Eigen::VectorXd x(kept.size() + 1);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    x[i] = (raw[kept[i]] - mean[i]) / stddev[i];
  }
  x[kept.size()] = 1.0;
  return x;
}

}  // namespace cbdc
