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
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cbdc/classifier.hpp"

namespace cbdc {

// 1 - p(y | x).
double conformity_score(const PosteriorPredictive& p, int label);

// Split-conformal threshold. With k = ceil((N + 1)(1 - alpha)), q is the k-th
// smallest calibration score, or 1 (accept everything) when k > N.
class ConformalCalibrator {
 public:
  static ConformalCalibrator calibrate(std::vector<double> scores,
                                       double alpha);
  // Rebuilds a calibrator from a stored threshold; scores are not kept.
  static ConformalCalibrator from_threshold(double alpha, double threshold,
                                            std::size_t n, std::string digest);

  const std::vector<double>& scores() const { return scores_; }
  double alpha() const { return alpha_; }
  double threshold() const { return threshold_; }
  std::size_t n() const { return n_; }
  std::size_t rank() const { return rank_; }
  bool accepts_all() const { return rank_ > n_; }
  // Hex SHA-256 over the sorted scores as little-endian IEEE-754 doubles.
  const std::string& scores_digest() const { return digest_; }

 private:
  std::vector<double> scores_;
  double alpha_ = 0.1;
  double threshold_ = 1.0;
  std::size_t n_ = 0;
  std::size_t rank_ = 0;
  std::string digest_;
};

ConformalCalibrator calibrate(std::vector<double> scores, double alpha);

std::size_t conformal_rank(std::size_t n, double alpha);

std::string sha256_hex(const std::vector<double>& values);

struct PredictionSet {
  std::vector<int> labels;    // ascending
  std::vector<double> scores;  // per label, 1 - p[y]
  double alpha = 0.0;

  bool contains(int label) const;
  std::size_t size() const { return labels.size(); }
};

// Labels y with 1 - p[y] <= threshold (inclusive).
PredictionSet prediction_set(const PosteriorPredictive& p, double threshold,
                             double alpha);
PredictionSet prediction_set(const PosteriorPredictive& p,
                             const ConformalCalibrator& cal);
// The argmax-only set used for the calibration ablation.
PredictionSet argmax_set(const PosteriorPredictive& p);

// One exchangeable draw: nonconformity score of every label plus the true
// label.
struct ScoredExample {
  std::vector<double> label_scores;
  int label = 0;
};

using ScoreGenerator = std::function<ScoredExample(std::mt19937_64&)>;

// Scores i.i.d. uniform on [0, 1] for every label, true label uniform.
ScoreGenerator uniform_score_generator(int n_classes);

struct CoverageStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double standard_error = 0.0;  // of the mean over trials
  double mean_set_size = 0.0;
  std::vector<double> per_trial;
};

// Each trial draws n_cal + n_test examples, calibrates on the first n_cal
// true-label scores and measures coverage on the rest.
CoverageStats simulate_coverage(std::size_t n_cal, std::size_t n_test,
                                double alpha, std::size_t n_trials,
                                std::uint64_t seed,
                                const ScoreGenerator& generator);

}  // namespace cbdc
