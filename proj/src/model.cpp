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

int PosteriorPredictive::argmax() const {
  return static_cast<int>(std::max_element(probs.begin(), probs.end()) -
                          probs.begin());
}

double PosteriorPredictive::max_prob() const {
  return *std::max_element(probs.begin(), probs.end());
}

Eigen::VectorXd member_softmax(const WeightMatrix& w, const Eigen::VectorXd& x,
                               double temperature) {
  if (w.cols() != x.size()) {
    throw InvalidInput("member_softmax: weight and input dimensions differ");
  }
  Eigen::VectorXd logits = (w * x) / temperature;
  logits.array() -= logits.maxCoeff();
  Eigen::VectorXd p = logits.array().exp();
  return p / p.sum();
}

PosteriorPredictive predict_posterior(const EnsembleModel& model,
                                      std::span<const double> raw_features) {
  if (model.members.empty()) throw InvalidInput("predict: model has no members");
  const Eigen::VectorXd x = model.normalizer.transform(raw_features);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(model.n_classes);
  for (const WeightMatrix& w : model.members) {
    mean += member_softmax(w, x, model.temperature);
  }
  mean /= static_cast<double>(model.members.size());
  return {std::vector<double>(mean.data(), mean.data() + mean.size())};
}

PosteriorPredictive predict_posterior(const EnsembleModel& model,
                                      const FeatureRecord& record) {
  return predict_posterior(model, record.concatenated());
}

double rademacher_bound_linear(std::span<const Eigen::VectorXd> features,
                               double weight_bound) {
  if (!(weight_bound > 0.0)) {
    throw InvalidInput("rademacher bound: B must be > 0");
  }
  if (features.empty()) throw InvalidInput("rademacher bound: no samples");
  double sum_sq = 0.0;
  for (const auto& x : features) sum_sq += x.squaredNorm();
  return weight_bound * std::sqrt(sum_sq) /
         static_cast<double>(features.size());
}

double generalization_bound(double rademacher, double lipschitz, double delta,
                            std::size_t n) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidInput("generalization bound: delta must be in (0, 1)");
  }
  if (n == 0) throw InvalidInput("generalization bound: N must be >= 1");
  return lipschitz * lipschitz * rademacher +
         std::sqrt(std::log(1.0 / delta) / (2.0 * static_cast<double>(n)));
}

namespace {

struct Risk {
  double zero_one = 0.0;
  double cross_entropy = 0.0;
};

Risk empirical_risk(const EnsembleModel& model,
                    std::span<const FeatureRecord> set) {
  Risk r;
  for (const FeatureRecord& rec : set) {
    if (!rec.label) throw InvalidInput("generalization report: unlabeled record");
    const PosteriorPredictive p = predict_posterior(model, rec);
    if (p.argmax() != *rec.label) r.zero_one += 1.0;
    r.cross_entropy -= std::log(std::max(p.probs.at(*rec.label), 1e-300));
  }
  r.zero_one /= static_cast<double>(set.size());
  r.cross_entropy /= static_cast<double>(set.size());
  return r;
}

}  // namespace

GeneralizationReport generalization_gap_report(
    const EnsembleModel& model, std::span<const FeatureRecord> train_set,
    std::span<const FeatureRecord> test_set, const TrainingConfig& cfg,
    double delta) {
  if (train_set.empty() || test_set.empty()) {
    throw InvalidInput("generalization report: empty train or test set");
  }
  GeneralizationReport rep;
  rep.n_train = train_set.size();
  rep.n_test = test_set.size();
  const Risk train_risk = empirical_risk(model, train_set);
  const Risk test_risk = empirical_risk(model, test_set);
  rep.train_error = train_risk.zero_one;
  rep.test_error = test_risk.zero_one;
  rep.train_cross_entropy = train_risk.cross_entropy;
  rep.test_cross_entropy = test_risk.cross_entropy;
  rep.gap = rep.test_error - rep.train_error;
  rep.cross_entropy_gap = rep.test_cross_entropy - rep.train_cross_entropy;

  for (const WeightMatrix& w : model.members) {
    rep.weight_bound = std::max(rep.weight_bound, w.norm());
  }
  std::vector<Eigen::VectorXd> inputs;
  inputs.reserve(train_set.size());
  for (const FeatureRecord& rec : train_set) {
    inputs.push_back(model.normalizer.transform(rec.concatenated()));
  }
  rep.rademacher = rep.weight_bound > 0.0
                       ? rademacher_bound_linear(inputs, rep.weight_bound)
                       : 0.0;
  rep.lipschitz = cfg.lipschitz_L;
  rep.delta = delta;
  rep.bound =
      generalization_bound(rep.rademacher, rep.lipschitz, delta, rep.n_train);
  rep.violated = rep.gap > rep.bound;
  return rep;
}

}  // namespace cbdc
