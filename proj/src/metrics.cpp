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
#include <numeric>

#include "cbdc/errors.hpp"
#include "cbdc/metrics.hpp"

namespace cbdc {

namespace {

void check_aligned(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw InvalidInput(std::string(what) + ": predictions and labels differ in "
                       "length (" + std::to_string(a) + " vs " +
                       std::to_string(b) + ")");
  }
  if (a == 0) throw InvalidInput(std::string(what) + ": no samples");
}

void check_label(const PosteriorPredictive& p, int y) {
  if (y < 0 || static_cast<std::size_t>(y) >= p.probs.size()) {
    throw InvalidInput("metrics: label " + std::to_string(y) + " out of range");
  }
}

}  // namespace

double ece(std::span<const PosteriorPredictive> predictions,
           std::span<const int> labels, int n_bins) {
  check_aligned(predictions.size(), labels.size(), "ece");
  if (n_bins < 1) throw InvalidInput("ece: n_bins must be >= 1");
  std::vector<double> count(n_bins, 0.0);
  std::vector<double> correct(n_bins, 0.0);
  std::vector<double> confidence(n_bins, 0.0);
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    check_label(predictions[i], labels[i]);
    const double c = predictions[i].max_prob();
    // Bin b covers (b / n, (b + 1) / n]; 0 goes to the first bin.
    const int bin = std::clamp(static_cast<int>(std::ceil(c * n_bins)) - 1, 0,
                               n_bins - 1);
    count[bin] += 1.0;
    confidence[bin] += c;
    if (predictions[i].argmax() == labels[i]) correct[bin] += 1.0;
  }
  const double n = static_cast<double>(predictions.size());
  double total = 0.0;
  for (int b = 0; b < n_bins; ++b) {
    if (count[b] == 0.0) continue;
    total += (count[b] / n) * std::abs(correct[b] / count[b] -
                                       confidence[b] / count[b]);
  }
  return total;
}

double brier(std::span<const PosteriorPredictive> predictions,
             std::span<const int> labels) {
  check_aligned(predictions.size(), labels.size(), "brier");
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    check_label(predictions[i], labels[i]);
    const auto& p = predictions[i].probs;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double target = static_cast<int>(k) == labels[i] ? 1.0 : 0.0;
      total += (p[k] - target) * (p[k] - target);
    }
  }
  return total / static_cast<double>(predictions.size());
}

double binary_auc(std::span<const double> positive_scores,
                  std::span<const double> negative_scores) {
  if (positive_scores.empty() || negative_scores.empty()) {
    throw UndefinedMetric("auc: needs at least one positive and one negative");
  }
  // Rank-based Mann-Whitney U with midranks for ties.
  struct Entry {
    double score;
    bool positive;
  };
  std::vector<Entry> all;
  all.reserve(positive_scores.size() + negative_scores.size());
  for (double s : positive_scores) all.push_back({s, true});
  for (double s : negative_scores) all.push_back({s, false});
  std::sort(all.begin(), all.end(),
            [](const Entry& a, const Entry& b) { return a.score < b.score; });
  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j + 1 < all.size() && all[j + 1].score == all[i].score) ++j;
    const double midrank = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (all[k].positive) positive_rank_sum += midrank;
    }
    i = j + 1;
  }
  const double np = static_cast<double>(positive_scores.size());
  const double nn = static_cast<double>(negative_scores.size());
  return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

AucDetail auc_ovr_detail(std::span<const PosteriorPredictive> predictions,
                         std::span<const int> labels) {
  check_aligned(predictions.size(), labels.size(), "auc");
  const std::size_t k = predictions.front().probs.size();
  AucDetail detail;
  detail.per_class.assign(k, std::nullopt);
  double sum = 0.0;
  int scored = 0;
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> pos;
    std::vector<double> neg;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      check_label(predictions[i], labels[i]);
      (labels[i] == static_cast<int>(c) ? pos : neg)
          .push_back(predictions[i].probs[c]);
    }
    if (pos.empty() || neg.empty()) {
      detail.skipped.push_back(static_cast<int>(c));
      continue;
    }
    const double auc = binary_auc(pos, neg);
    detail.per_class[c] = auc;
    sum += auc;
    ++scored;
  }
  if (scored == 0) {
    throw UndefinedMetric("auc: no class has both positives and negatives");
  }
  detail.macro = sum / scored;
  return detail;
}

double auc_ovr(std::span<const PosteriorPredictive> predictions,
               std::span<const int> labels) {
  return auc_ovr_detail(predictions, labels).macro;
}

double accuracy(std::span<const PosteriorPredictive> predictions,
                std::span<const int> labels) {
  check_aligned(predictions.size(), labels.size(), "accuracy");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i].argmax() == labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

double coverage(std::span<const PredictionSet> sets,
                std::span<const int> labels) {
  check_aligned(sets.size(), labels.size(), "coverage");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (sets[i].contains(labels[i])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(sets.size());
}

EvaluationReport evaluate(std::span<const PosteriorPredictive> predictions,
                          std::span<const PredictionSet> sets,
                          std::span<const int> labels, int n_bins) {
  check_aligned(predictions.size(), labels.size(), "evaluate");
  check_aligned(sets.size(), labels.size(), "evaluate");
  EvaluationReport rep;
  rep.n = predictions.size();
  rep.n_classes = static_cast<int>(predictions.front().probs.size());
  rep.accuracy = accuracy(predictions, labels);
  rep.ece = ece(predictions, labels, n_bins);
  rep.ece_bins = n_bins;
  rep.brier = brier(predictions, labels);
  rep.conformal_coverage = coverage(sets, labels);

  const AucDetail auc = auc_ovr_detail(predictions, labels);
  rep.macro_auc_ovr = auc.macro;
  rep.auc_skipped = auc.skipped;

  double set_size_total = 0.0;
  for (const PredictionSet& s : sets) set_size_total += s.size();
  rep.mean_set_size = set_size_total / static_cast<double>(rep.n);

  double f1_sum = 0.0;
  int f1_classes = 0;
  for (int c = 0; c < rep.n_classes; ++c) {
    ClassBreakdown cls;
    cls.label = c;
    std::size_t tp = 0, fp = 0, fn = 0, covered = 0;
    double class_set_size = 0.0;
    for (std::size_t i = 0; i < rep.n; ++i) {
      const bool actual = labels[i] == c;
      const bool predicted = predictions[i].argmax() == c;
      if (actual && predicted) ++tp;
      if (!actual && predicted) ++fp;
      if (actual && !predicted) ++fn;
      if (actual) {
        ++cls.support;
        if (sets[i].contains(c)) ++covered;
        class_set_size += sets[i].size();
      }
    }
    cls.precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    cls.recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    const std::size_t denom = 2 * tp + fp + fn;
    cls.f1 = denom > 0 ? 2.0 * tp / static_cast<double>(denom) : 0.0;
    if (denom > 0) {
      f1_sum += cls.f1;
      ++f1_classes;
    }
    cls.auc = auc.per_class[c];
    if (cls.support > 0) {
      cls.coverage = static_cast<double>(covered) / cls.support;
      cls.mean_set_size = class_set_size / cls.support;
    }
    rep.per_class.push_back(cls);
  }
  rep.macro_f1 = f1_classes > 0 ? f1_sum / f1_classes : 0.0;
  return rep;
}

}  // namespace cbdc
