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

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cbdc/imaging.hpp"
#include "cbdc/topology.hpp"

namespace cbdc {

inline constexpr int kIntensityStatCount = 4;

struct FeatureRecord {
  TopoFeatureVector topo;
  std::array<double, kIntensityStatCount> intensity_stats{};  // mean, std, min, max
  std::optional<int> label;

  // topo values followed by intensity_stats.
  std::vector<double> concatenated() const;
};

std::array<double, kIntensityStatCount> intensity_stats(
    const GrayscaleImage& img);

FeatureRecord featurize(const GrayscaleImage& img, int thresholds,
                        std::optional<int> label = std::nullopt);

std::vector<std::string> feature_names(int thresholds);

// Raw (unnormalized) concatenated features of an image and of its augmented
// copy. Drives the consistency term of the objective.
struct ConsistencyPair {
  std::vector<double> original;
  std::vector<double> augmented;
};

struct TrainingConfig {
  double lambda1 = 0.1;
  double lambda2 = 0.05;
  double learning_rate = 1.0;
  int epochs = 200;
  int ensemble_size = 5;
  std::uint64_t seed = 0;
  AugmentSpec augment_spec{1, true, false, 0.02};
  double lipschitz_L = 1.0;

  void validate() const;
};

// K x (d + 1); the last column is the bias.
using WeightMatrix = Eigen::MatrixXd;

// Composite objective
//   L(W) = CE(W) + lambda1 * TDA(W) + lambda2 * UQ(W)
// with CE the mean softmax negative log-likelihood, TDA the mean squared
// logit difference over consistency pairs and UQ = 0.5 * ||W||_F^2.
// Inputs are already normalized and bias-augmented.
class CompositeLoss {
 public:
  struct Terms {
    double cross_entropy = 0.0;
    double consistency = 0.0;
    double prior = 0.0;
    double total = 0.0;
  };

  // design: n x (d + 1); pair_differences: P x (d + 1), rows x - x'.
  CompositeLoss(Eigen::MatrixXd design, std::vector<int> labels,
                Eigen::MatrixXd pair_differences, int n_classes,
                double lambda1, double lambda2);

  int n_classes() const { return n_classes_; }
  Eigen::Index input_dim() const { return design_.cols(); }

  Terms terms(const WeightMatrix& w) const;
  double value(const WeightMatrix& w) const { return terms(w).total; }
  WeightMatrix gradient(const WeightMatrix& w) const;

 private:
  Eigen::MatrixXd design_;
  std::vector<int> labels_;
  Eigen::MatrixXd pair_differences_;
  int n_classes_;
  double lambda1_;
  double lambda2_;
};

// Objective over a flat parameter vector. Returns the value and writes the
// gradient when `grad` is non-null.
using Objective =
    std::function<double(const Eigen::VectorXd& theta, Eigen::VectorXd* grad)>;

struct DescentOptions {
  double learning_rate = 1.0;
  int epochs = 100;
  // Halve the step until the Armijo condition holds. When false the step is
  // fixed.
  bool backtracking = true;
  int max_halvings = 30;
};

struct DescentTrace {
  std::vector<Eigen::VectorXd> iterates;  // theta_0 .. theta_epochs
  std::vector<double> loss;               // per epoch, after the update
  std::vector<double> distance_to_final;  // per epoch, ||theta_t - theta_T||
  double final_step = 0.0;
};

// theta_{t+1} = theta_t - eta * grad L(theta_t). Throws OptimizationError if
// no step among max_halvings halvings decreases the loss.
DescentTrace gradient_descent(const Objective& objective,
                              Eigen::VectorXd theta0,
                              const DescentOptions& options);

// L(theta) = 0.5 * mu * ||theta||^2. Test hook for the contraction rate.
Objective quadratic_objective(double mu);

struct FeatureNormalizer {
  std::size_t input_dim = 0;
  std::vector<std::size_t> kept;
  std::vector<std::size_t> dropped;  // zero variance on the training split
  std::vector<double> mean;          // per kept feature
  std::vector<double> stddev;        // per kept feature

  static FeatureNormalizer fit(std::span<const std::vector<double>> rows);
  // Standardized kept features followed by a constant 1.
  Eigen::VectorXd transform(std::span<const double> raw) const;
};

struct EnsembleModel {
  int n_classes = 0;
  FeatureNormalizer normalizer;
  std::vector<WeightMatrix> members;
  TrainingConfig config;
  // Logits are divided by this before the softmax. 1 for trained models.
  double temperature = 1.0;
};

struct PosteriorPredictive {
  std::vector<double> probs;

  int argmax() const;
  double max_prob() const;
};

struct TrainingResult {
  EnsembleModel model;
  std::vector<DescentTrace> traces;  // one per member
};

// Every record must be labeled. n_classes = 0 infers max label + 1. With more
// than one member each is fit on a bootstrap resample; a single member uses
// the full set.
TrainingResult train(std::span<const FeatureRecord> records,
                     std::span<const ConsistencyPair> pairs,
                     const TrainingConfig& cfg, int n_classes = 0);

// Softmax of one member's logits for a normalized, bias-augmented input.
Eigen::VectorXd member_softmax(const WeightMatrix& w, const Eigen::VectorXd& x,
                               double temperature = 1.0);

PosteriorPredictive predict_posterior(const EnsembleModel& model,
                                      std::span<const double> raw_features);
PosteriorPredictive predict_posterior(const EnsembleModel& model,
                                      const FeatureRecord& record);

// B * sqrt(sum_i ||x_i||^2) / N.
double rademacher_bound_linear(std::span<const Eigen::VectorXd> features,
                               double weight_bound);

// L^2 * rademacher + sqrt(ln(1/delta) / (2N)).
double generalization_bound(double rademacher, double lipschitz, double delta,
                            std::size_t n);

struct GeneralizationReport {
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double train_error = 0.0;  // 0-1 risk
  double test_error = 0.0;
  double train_cross_entropy = 0.0;
  double test_cross_entropy = 0.0;
  double gap = 0.0;  // test_error - train_error
  double cross_entropy_gap = 0.0;
  double weight_bound = 0.0;  // max member Frobenius norm
  double rademacher = 0.0;
  double lipschitz = 0.0;
  double delta = 0.0;
  double bound = 0.0;
  bool violated = false;
};

// Diagnostic only: the bound holds with probability 1 - delta.
GeneralizationReport generalization_gap_report(
    const EnsembleModel& model, std::span<const FeatureRecord> train_set,
    std::span<const FeatureRecord> test_set, const TrainingConfig& cfg,
    double delta);

}  // namespace cbdc
