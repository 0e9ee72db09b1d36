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

#include <cmath>
#include <limits>

#include "cbdc/classifier.hpp"
#include "cbdc/errors.hpp"

namespace cbdc {

namespace {

// Row-wise log-sum-exp.
Eigen::VectorXd log_partition(const Eigen::MatrixXd& logits) {
  const Eigen::VectorXd row_max = logits.rowwise().maxCoeff();
  const Eigen::MatrixXd shifted = logits.colwise() - row_max;
  return row_max.array() + shifted.array().exp().rowwise().sum().log();
}

}  // namespace

CompositeLoss::CompositeLoss(Eigen::MatrixXd design, std::vector<int> labels,
                             Eigen::MatrixXd pair_differences, int n_classes,
                             double lambda1, double lambda2)
    : design_(std::move(design)),
      labels_(std::move(labels)),
      pair_differences_(std::move(pair_differences)),
      n_classes_(n_classes),
      lambda1_(lambda1),
      lambda2_(lambda2) {
  if (design_.rows() == 0) throw InvalidInput("composite loss: empty batch");
  if (static_cast<std::size_t>(design_.rows()) != labels_.size()) {
    throw InvalidInput("composite loss: design rows and labels differ");
  }
  if (n_classes_ < 1) throw InvalidInput("composite loss: no classes");
  for (int y : labels_) {
    if (y < 0 || y >= n_classes_) {
      throw InvalidInput("composite loss: label " + std::to_string(y) +
                         " out of range");
    }
  }
  if (pair_differences_.rows() > 0 &&
      pair_differences_.cols() != design_.cols()) {
    throw InvalidInput("composite loss: pair dimension mismatch");
  }
  if (lambda1_ < 0.0 || lambda2_ < 0.0) {
    throw InvalidInput("composite loss: negative regularization weight");
  }
}

CompositeLoss::Terms CompositeLoss::terms(const WeightMatrix& w) const {
  Terms t;
  const Eigen::MatrixXd logits = design_ * w.transpose();
  const Eigen::VectorXd lse = log_partition(logits);
  double nll = 0.0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    nll += lse[i] - logits(i, labels_[i]);
  }
  t.cross_entropy = nll / static_cast<double>(logits.rows());
  if (pair_differences_.rows() > 0) {
    t.consistency = (pair_differences_ * w.transpose()).squaredNorm() /
                    static_cast<double>(pair_differences_.rows());
  }
  t.prior = 0.5 * w.squaredNorm();
  t.total = t.cross_entropy + lambda1_ * t.consistency + lambda2_ * t.prior;
  return t;
}

WeightMatrix CompositeLoss::gradient(const WeightMatrix& w) const {
  const Eigen::MatrixXd logits = design_ * w.transpose();
  const Eigen::VectorXd lse = log_partition(logits);
  Eigen::MatrixXd residual = (logits.colwise() - lse).array().exp().matrix();
  for (Eigen::Index i = 0; i < residual.rows(); ++i) {
    residual(i, labels_[i]) -= 1.0;
  }
  WeightMatrix g = residual.transpose() * design_ /
                   static_cast<double>(design_.rows());
  if (pair_differences_.rows() > 0 && lambda1_ > 0.0) {
    g += lambda1_ * 2.0 * (pair_differences_ * w.transpose()).transpose() *
         pair_differences_ / static_cast<double>(pair_differences_.rows());
  }
  g += lambda2_ * w;
  return g;
}

DescentTrace gradient_descent(const Objective& objective,
                              Eigen::VectorXd theta0,
                              const DescentOptions& options) {
  if (!(options.learning_rate > 0.0) || options.epochs < 1) {
    throw InvalidInput("gradient descent: need learning_rate > 0, epochs >= 1");
  }
  DescentTrace trace;
  trace.iterates.reserve(options.epochs + 1);
  trace.iterates.push_back(theta0);

  Eigen::VectorXd theta = std::move(theta0);
  Eigen::VectorXd grad(theta.size());
  double loss = objective(theta, &grad);
  double step = options.learning_rate;

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    const double grad_sq = grad.squaredNorm();
    if (options.backtracking) {
      if (grad_sq <= 1e-30 * (1.0 + theta.squaredNorm())) {
        // Stationary to working precision; hold position.
        trace.iterates.push_back(theta);
        trace.loss.push_back(loss);
        continue;
      }
      // Armijo with c = 1/2: along the step direction this caps the step at
      // the inverse local curvature.
      const double slack = 8.0 * std::numeric_limits<double>::epsilon() *
                           std::abs(loss);
      int halvings = 0;
      while (true) {
        const Eigen::VectorXd candidate = theta - step * grad;
        const double value = objective(candidate, nullptr);
        if (std::isfinite(value) &&
            value <= loss - 0.5 * step * grad_sq + slack) {
          break;
        }
        if (++halvings > options.max_halvings) {
          throw OptimizationError(
              "gradient descent: loss did not decrease after " +
              std::to_string(options.max_halvings) + " step halvings at epoch " +
              std::to_string(epoch));
        }
        step *= 0.5;
      }
    }
    theta -= step * grad;
    loss = objective(theta, &grad);
    if (!std::isfinite(loss)) {
      throw OptimizationError("gradient descent: loss is not finite");
    }
    trace.iterates.push_back(theta);
    trace.loss.push_back(loss);
  }

  const Eigen::VectorXd& final_theta = trace.iterates.back();
  trace.distance_to_final.reserve(options.epochs);
  for (std::size_t t = 1; t < trace.iterates.size(); ++t) {
    trace.distance_to_final.push_back((trace.iterates[t] - final_theta).norm());
  }
  trace.final_step = step;
  return trace;
}

Objective quadratic_objective(double mu) {
  return [mu](const Eigen::VectorXd& theta, Eigen::VectorXd* grad) {
    if (grad != nullptr) *grad = mu * theta;
    return 0.5 * mu * theta.squaredNorm();
  };
}

}  // namespace cbdc
