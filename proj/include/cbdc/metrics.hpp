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

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cbdc/classifier.hpp"
#include "cbdc/conformal.hpp"

namespace cbdc {

// Equal-width bins on [0, 1], right-inclusive; confidence 0 falls in the first
// bin. Confidence is the max probability.
double ece(std::span<const PosteriorPredictive> predictions,
           std::span<const int> labels, int n_bins = 10);

// Multiclass form, range [0, 2].
double brier(std::span<const PosteriorPredictive> predictions,
             std::span<const int> labels);

// Mann-Whitney AUC with 0.5 credit for ties. Both sides must be non-empty.
double binary_auc(std::span<const double> positive_scores,
                  std::span<const double> negative_scores);

struct AucDetail {
  double macro = 0.0;
  std::vector<std::optional<double>> per_class;
  std::vector<int> skipped;  // classes without both positives and negatives
};

// Macro one-vs-rest AUC. Throws UndefinedMetric if no class is scorable.
AucDetail auc_ovr_detail(std::span<const PosteriorPredictive> predictions,
                         std::span<const int> labels);
double auc_ovr(std::span<const PosteriorPredictive> predictions,
               std::span<const int> labels);

double accuracy(std::span<const PosteriorPredictive> predictions,
                std::span<const int> labels);

double coverage(std::span<const PredictionSet> sets,
                std::span<const int> labels);

struct ClassBreakdown {
  int label = 0;
  std::size_t support = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::optional<double> auc;
  double coverage = 0.0;  // class-conditional; 0 when support is 0
  double mean_set_size = 0.0;
};

struct EvaluationReport {
  std::size_t n = 0;
  int n_classes = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double macro_auc_ovr = 0.0;
  double ece = 0.0;
  int ece_bins = 10;
  double brier = 0.0;
  double conformal_coverage = 0.0;
  double mean_set_size = 0.0;
  std::vector<ClassBreakdown> per_class;
  std::vector<int> auc_skipped;
};

// macro_f1 averages over classes present in labels or predictions.
EvaluationReport evaluate(std::span<const PosteriorPredictive> predictions,
                          std::span<const PredictionSet> sets,
                          std::span<const int> labels, int n_bins = 10);

}  // namespace cbdc
