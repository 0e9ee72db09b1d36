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
#include <random>
#include <set>

#include "cbdc/classifier.hpp"
#include "cbdc/errors.hpp"

namespace cbdc {

void TrainingConfig::validate() const {
  if (!(lambda1 >= 0.0)) throw InvalidInput("training: lambda1 must be >= 0");
  if (!(lambda2 > 0.0)) throw InvalidInput("training: lambda2 must be > 0");
  if (!(learning_rate > 0.0)) {
    throw InvalidInput("training: learning_rate must be > 0");
  }
  if (epochs < 1) throw InvalidInput("training: epochs must be >= 1");
  if (ensemble_size < 1) {
    throw InvalidInput("training: ensemble_size must be >= 1");
  }
  if (!(lipschitz_L > 0.0)) {
    throw InvalidInput("training: lipschitz_L must be > 0");
  }
  augment_spec.validate();
}

TrainingResult train(std::span<const FeatureRecord> records,
                     std::span<const ConsistencyPair> pairs,
                     const TrainingConfig& cfg, int n_classes) {
  cfg.validate();
  if (records.empty()) throw InvalidInput("train: no training records");

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::set<int> present;
  rows.reserve(records.size());
  for (const FeatureRecord& r : records) {
    if (!r.label) throw InvalidInput("train: unlabeled record");
    if (*r.label < 0) throw InvalidInput("train: negative label");
    rows.push_back(r.concatenated());
    labels.push_back(*r.label);
    present.insert(*r.label);
  }
  if (present.size() < 2) {
    throw InvalidInput("train: at least two classes must be present");
  }
  const int inferred = *present.rbegin() + 1;
  if (n_classes == 0) n_classes = inferred;
  if (n_classes < inferred) {
    throw InvalidInput("train: label exceeds n_classes");
  }

  TrainingResult result;
  EnsembleModel& model = result.model;
  model.n_classes = n_classes;
  model.config = cfg;
  model.normalizer = FeatureNormalizer::fit(rows);

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto dim = static_cast<Eigen::Index>(model.normalizer.kept.size() + 1);
  Eigen::MatrixXd design(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    design.row(i) = model.normalizer.transform(rows[i]).transpose();
  }
  Eigen::MatrixXd pair_diff(static_cast<Eigen::Index>(pairs.size()), dim);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    pair_diff.row(static_cast<Eigen::Index>(p)) =
        (model.normalizer.transform(pairs[p].original) -
         model.normalizer.transform(pairs[p].augmented))
            .transpose();
  }

  const DescentOptions options{cfg.learning_rate, cfg.epochs, true, 30};
  for (int m = 0; m < cfg.ensemble_size; ++m) {
    std::seed_seq seq{static_cast<std::uint64_t>(cfg.seed >> 32),
                      static_cast<std::uint64_t>(cfg.seed & 0xffffffffu),
                      static_cast<std::uint64_t>(m)};
    std::mt19937_64 rng(seq);

    Eigen::MatrixXd member_design = design;
    std::vector<int> member_labels = labels;
    if (cfg.ensemble_size > 1) {
      std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
      for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index src = pick(rng);
        member_design.row(i) = design.row(src);
        member_labels[i] = labels[src];
      }
    }
    const CompositeLoss loss(std::move(member_design), std::move(member_labels),
                             pair_diff, n_classes, cfg.lambda1, cfg.lambda2);

    std::normal_distribution<double> init(0.0, 0.01);
    Eigen::VectorXd theta0(n_classes * dim);
    for (Eigen::Index i = 0; i < theta0.size(); ++i) theta0[i] = init(rng);

    const Objective objective = [&loss, n_classes, dim](
                                    const Eigen::VectorXd& theta,
                                    Eigen::VectorXd* grad) {
      const Eigen::Map<const WeightMatrix> w(theta.data(), n_classes, dim);
      if (grad != nullptr) {
        const WeightMatrix g = loss.gradient(w);
        *grad = Eigen::Map<const Eigen::VectorXd>(g.data(), g.size());
      }
      return loss.value(w);
    };
    DescentTrace trace = gradient_descent(objective, std::move(theta0), options);
    model.members.push_back(
        Eigen::Map<const WeightMatrix>(trace.iterates.back().data(), n_classes,
                                       dim));
    result.traces.push_back(std::move(trace));
  }
  return result;
}

}  // namespace cbdc
