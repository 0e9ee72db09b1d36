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
#include <bit>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "cbdc/conformal.hpp"
#include "cbdc/errors.hpp"

namespace cbdc {

double conformity_score(const PosteriorPredictive& p, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= p.probs.size()) {
    throw InvalidInput("conformity_score: label " + std::to_string(label) +
                       " out of range");
  }
  return 1.0 - p.probs[label];
}

std::size_t conformal_rank(std::size_t n, double alpha) {
  const double level = static_cast<double>(n + 1) * (1.0 - alpha);
  return static_cast<std::size_t>(std::ceil(level - 1e-12 * (n + 1)));
}

std::string sha256_hex(const std::vector<double>& values) {
  std::vector<unsigned char> bytes(values.size() * sizeof(double));
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto bits = std::bit_cast<std::uint64_t>(values[i]);
    for (std::size_t b = 0; b < sizeof(double); ++b) {
      bytes[i * sizeof(double) + b] = static_cast<unsigned char>(bits & 0xff);
      bits >>= 8;
    }
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(),
             nullptr);
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0')
        << static_cast<int>(digest[i]);
  }
  return hex.str();
}

ConformalCalibrator ConformalCalibrator::calibrate(std::vector<double> scores,
                                                   double alpha) {
  if (scores.empty()) throw InvalidInput("calibrate: no calibration scores");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("calibrate: alpha must be in (0, 1)");
  }
  for (double s : scores) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw InvalidInput("calibrate: scores must lie in [0, 1]");
    }
  }
  std::sort(scores.begin(), scores.end());
  ConformalCalibrator cal;
  cal.alpha_ = alpha;
  cal.n_ = scores.size();
  cal.rank_ = conformal_rank(cal.n_, alpha);
  cal.threshold_ = cal.rank_ > cal.n_ ? 1.0 : scores[cal.rank_ - 1];
  cal.digest_ = sha256_hex(scores);
  cal.scores_ = std::move(scores);
  return cal;
}

ConformalCalibrator ConformalCalibrator::from_threshold(double alpha,
                                                        double threshold,
                                                        std::size_t n,
                                                        std::string digest) {
  if (!(alpha > 0.0 && alpha < 1.0) || !(threshold >= 0.0 && threshold <= 1.0) ||
      n == 0) {
    throw InvalidInput("calibration record: invalid alpha, q or n");
  }
  ConformalCalibrator cal;
  cal.alpha_ = alpha;
  cal.threshold_ = threshold;
  cal.n_ = n;
  cal.rank_ = conformal_rank(n, alpha);
  cal.digest_ = std::move(digest);
  return cal;
}

ConformalCalibrator calibrate(std::vector<double> scores, double alpha) {
  return ConformalCalibrator::calibrate(std::move(scores), alpha);
}

bool PredictionSet::contains(int label) const {
  return std::binary_search(labels.begin(), labels.end(), label);
}

PredictionSet prediction_set(const PosteriorPredictive& p, double threshold,
                             double alpha) {
  PredictionSet set;
  set.alpha = alpha;
  for (std::size_t y = 0; y < p.probs.size(); ++y) {
    const double s = 1.0 - p.probs[y];
    set.scores.push_back(s);
    if (s <= threshold) set.labels.push_back(static_cast<int>(y));
  }
  return set;
}

PredictionSet prediction_set(const PosteriorPredictive& p,
                             const ConformalCalibrator& cal) {
  return prediction_set(p, cal.threshold(), cal.alpha());
}

PredictionSet argmax_set(const PosteriorPredictive& p) {
  PredictionSet set;
  for (double prob : p.probs) set.scores.push_back(1.0 - prob);
  set.labels.push_back(p.argmax());
  return set;
}

ScoreGenerator uniform_score_generator(int n_classes) {
  if (n_classes < 1) throw InvalidInput("uniform generator: n_classes < 1");
  return [n_classes](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> label(0, n_classes - 1);
    ScoredExample ex;
    ex.label_scores.resize(n_classes);
    for (double& s : ex.label_scores) s = unit(rng);
    ex.label = label(rng);
    return ex;
  };
}

CoverageStats simulate_coverage(std::size_t n_cal, std::size_t n_test,
                                double alpha, std::size_t n_trials,
                                std::uint64_t seed,
                                const ScoreGenerator& generator) {
  if (n_cal == 0 || n_test == 0 || n_trials == 0) {
    throw InvalidInput("simulate_coverage: counts must be >= 1");
  }
  CoverageStats stats;
  stats.per_trial.reserve(n_trials);
  double set_size_total = 0.0;
  for (std::size_t trial = 0; trial < n_trials; ++trial) {
    std::seed_seq seq{static_cast<std::uint64_t>(seed >> 32),
                      static_cast<std::uint64_t>(seed & 0xffffffffu),
                      static_cast<std::uint64_t>(trial)};
    std::mt19937_64 rng(seq);
    std::vector<double> cal_scores;
    cal_scores.reserve(n_cal);
    for (std::size_t i = 0; i < n_cal; ++i) {
      const ScoredExample ex = generator(rng);
      cal_scores.push_back(ex.label_scores.at(ex.label));
    }
    const ConformalCalibrator cal = calibrate(std::move(cal_scores), alpha);
    std::size_t covered = 0;
    for (std::size_t i = 0; i < n_test; ++i) {
      const ScoredExample ex = generator(rng);
      if (ex.label_scores.at(ex.label) <= cal.threshold()) ++covered;
      for (double s : ex.label_scores) {
        if (s <= cal.threshold()) set_size_total += 1.0;
      }
    }
    stats.per_trial.push_back(static_cast<double>(covered) /
                              static_cast<double>(n_test));
  }
  const double trials = static_cast<double>(n_trials);
  double sum = 0.0;
  for (double c : stats.per_trial) sum += c;
  stats.mean = sum / trials;
  stats.min = *std::min_element(stats.per_trial.begin(), stats.per_trial.end());
  stats.max = *std::max_element(stats.per_trial.begin(), stats.per_trial.end());
  if (n_trials > 1) {
    double sq = 0.0;
    for (double c : stats.per_trial) sq += (c - stats.mean) * (c - stats.mean);
    stats.standard_error = std::sqrt(sq / (trials - 1.0) / trials);
  }
  stats.mean_set_size = set_size_total / (trials * static_cast<double>(n_test));
  return stats;
}

}  // namespace cbdc
