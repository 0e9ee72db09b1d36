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
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cbdc {

struct GaussianSummary {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  // 1/n normalization, symmetrized
  std::size_t n = 0;
};

GaussianSummary gaussian_summary(std::span<const std::vector<double>> points);

// Symmetric PSD square root via eigendecomposition; negative eigenvalues are
// clamped to 0. Throws InvalidInput if asymmetry exceeds 1e-6.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& sigma);

struct DivergenceTerms {
  double mean_term = 0.0;   // ||mu_a - mu_b||^2
  double trace_term = 0.0;  // Tr(S_a + S_b - 2 (S_a^1/2 S_b S_a^1/2)^1/2)
  double total = 0.0;
};

// Squared 2-Wasserstein distance between Gaussians (Bures-Wasserstein).
DivergenceTerms joint_divergence_terms(const GaussianSummary& a,
                                       const GaussianSummary& b);
double joint_divergence(const GaussianSummary& a, const GaussianSummary& b);

}  // namespace cbdc
