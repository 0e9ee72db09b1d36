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

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "cbdc/errors.hpp"
#include "cbdc/manifold.hpp"

namespace cbdc {

namespace {
constexpr double kAsymmetryTolerance = 1e-6;
}  // namespace

GaussianSummary gaussian_summary(std::span<const std::vector<double>> points) {
  if (points.empty()) throw InvalidInput("gaussian_summary: no points");
  const std::size_t d = points.front().size();
  if (d == 0) throw InvalidInput("gaussian_summary: zero-dimensional points");
  for (const auto& p : points) {
    if (p.size() != d) {
      throw InvalidInput("gaussian_summary: inconsistent dimensions");
    }
  }
  const auto dim = static_cast<Eigen::Index>(d);
  const double n = static_cast<double>(points.size());
  GaussianSummary g;
  g.n = points.size();
  g.mean = Eigen::VectorXd::Zero(dim);
  for (const auto& p : points) {
    g.mean += Eigen::Map<const Eigen::VectorXd>(p.data(), dim);
  }
  g.mean /= n;
  g.covariance = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& p : points) {
    const Eigen::VectorXd c =
        Eigen::Map<const Eigen::VectorXd>(p.data(), dim) - g.mean;
    g.covariance.noalias() += c * c.transpose();
  }
  g.covariance /= n;
  g.covariance = 0.5 * (g.covariance + g.covariance.transpose());
  return g;
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols()) {
    throw InvalidInput("psd_sqrt: matrix is not square");
  }
  const double asym = (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
  if (asym > kAsymmetryTolerance) {
    throw InvalidInput("psd_sqrt: matrix is not symmetric");
  }
  const Eigen::MatrixXd sym = 0.5 * (sigma + sigma.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw InvalidInput("psd_sqrt: eigendecomposition failed");
  }
  const Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd& v = eig.eigenvectors();
  Eigen::MatrixXd out = v * roots.asDiagonal() * v.transpose();
  return 0.5 * (out + out.transpose());
}

DivergenceTerms joint_divergence_terms(const GaussianSummary& a,
                                       const GaussianSummary& b) {
  if (a.mean.size() != b.mean.size() ||
      a.covariance.rows() != b.covariance.rows()) {
    throw InvalidInput("joint_divergence: dimension mismatch");
  }
  DivergenceTerms t;
  t.mean_term = (a.mean - b.mean).squaredNorm();
  // Tr((A^1/2 B A^1/2)^1/2) is the nuclear norm of A^1/2 B^1/2.
  const Eigen::MatrixXd root_product =
      psd_sqrt(a.covariance) * psd_sqrt(b.covariance);
  const double fidelity =
      Eigen::JacobiSVD<Eigen::MatrixXd>(root_product).singularValues().sum();
  const double trace =
      a.covariance.trace() + b.covariance.trace() - 2.0 * fidelity;
  t.trace_term = std::max(trace, 0.0);
  t.total = t.mean_term + t.trace_term;
  return t;
}

double joint_divergence(const GaussianSummary& a, const GaussianSummary& b) {
  return joint_divergence_terms(a, b).total;
}

}  // namespace cbdc
