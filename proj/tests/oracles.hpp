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

// Independent reference implementations used by the tests. None of these
// call into the algorithms they check.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "cbdc/imaging.hpp"
#include "cbdc/topology.hpp"

namespace cbdc::oracle {

// Random image with intensities on a (levels)-step grid in [lo, hi].
inline GrayscaleImage random_image(std::mt19937_64& rng, std::size_t w,
                                   std::size_t h, int levels = 0,
                                   double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::uniform_int_distribution<int> step(0, std::max(levels - 1, 0));
  std::vector<double> v(w * h);
  for (auto& x : v) {
    x = levels > 1 ? lo + (hi - lo) * step(rng) / (levels - 1) : u(rng);
  }
  return GrayscaleImage(w, h, std::move(v));
}

// Bottleneck distance by enumerating every perfect matching of the
// diagonal-augmented bipartite graph. Essential bars are matched in sorted
// birth order, which is optimal on the line. Only for a handful of bars.
inline double brute_bottleneck(const PersistenceDiagram& a,
                               const PersistenceDiagram& b, int dim) {
  std::vector<Bar> fa, fb;
  std::vector<double> ea, eb;
  for (const Bar& bar : a.of_dim(dim)) {
    bar.essential() ? ea.push_back(bar.birth) : fa.push_back(bar);
  }
  for (const Bar& bar : b.of_dim(dim)) {
    bar.essential() ? eb.push_back(bar.birth) : fb.push_back(bar);
  }
  if (ea.size() != eb.size()) return std::numeric_limits<double>::infinity();
  std::sort(ea.begin(), ea.end());
  std::sort(eb.begin(), eb.end());
  double essential = 0.0;
  for (std::size_t i = 0; i < ea.size(); ++i) {
    essential = std::max(essential, std::abs(ea[i] - eb[i]));
  }

  const std::size_t na = fa.size(), nb = fb.size(), n = na + nb;
  // Rows: bars of a, then diagonal slots. Columns: bars of b, then diagonal
  // slots.
  auto cost = [&](std::size_t r, std::size_t c) {
    const bool row_bar = r < na, col_bar = c < nb;
    if (row_bar && col_bar) {
      return std::max(std::abs(fa[r].birth - fb[c].birth),
                      std::abs(fa[r].death - fb[c].death));
    }
    if (row_bar) return fa[r].persistence() / 2.0;
    if (col_bar) return fb[c].persistence() / 2.0;
    return 0.0;
  };
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = n == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  if (n > 0) {
    do {
      double worst = 0.0;
      for (std::size_t r = 0; r < n && worst < best; ++r) {
        worst = std::max(worst, cost(r, perm[r]));
      }
      best = std::min(best, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return std::max(best, essential);
}

// Number of 4-connected components of {pixel : value <= t} by flood fill.
inline int flood_fill_components(const GrayscaleImage& img, double t) {
  const std::size_t w = img.width(), h = img.height();
  std::vector<char> seen(w * h, 0);
  int components = 0;
  for (std::size_t start = 0; start < w * h; ++start) {
    if (seen[start] || img.values()[start] > t) continue;
    ++components;
    std::queue<std::size_t> q;
    q.push(start);
    seen[start] = 1;
    while (!q.empty()) {
      const std::size_t p = q.front();
      q.pop();
      const std::size_t x = p % w, y = p / w;
      const std::size_t nbr[4] = {x > 0 ? p - 1 : p, x + 1 < w ? p + 1 : p,
                                  y > 0 ? p - w : p, y + 1 < h ? p + w : p};
      for (std::size_t r : nbr) {
        if (!seen[r] && img.values()[r] <= t) {
          seen[r] = 1;
          q.push(r);
        }
      }
    }
  }
  return components;
}

// V - E + F of the lower-star sublevel complex at t, counted directly on the
// pixel grid.
inline long euler_characteristic(const GrayscaleImage& img, double t) {
  const std::size_t w = img.width(), h = img.height();
  auto in = [&](std::size_t x, std::size_t y) { return img.at(x, y) <= t; };
  long v = 0, e = 0, f = 0;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      if (!in(x, y)) continue;
      ++v;
      if (x + 1 < w && in(x + 1, y)) ++e;
      if (y + 1 < h && in(x, y + 1)) ++e;
      if (x + 1 < w && y + 1 < h && in(x + 1, y) && in(x, y + 1) &&
          in(x + 1, y + 1)) {
        ++f;
      }
    }
  }
  return v - e + f;
}

// Kruskal over all pairs; returns the sorted MST edge weights.
inline std::vector<double> kruskal_weights(
    const std::vector<std::vector<double>>& pts) {
  struct Edge {
    double w;
    std::size_t i, j;
  };
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < pts[i].size(); ++k) {
        s += (pts[i][k] - pts[j][k]) * (pts[i][k] - pts[j][k]);
      }
      edges.push_back({std::sqrt(s), i, j});
    }
  }
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return a.w < b.w; });
  std::vector<std::size_t> parent(pts.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  std::vector<double> out;
  for (const Edge& e : edges) {
    const std::size_t a = find(e.i), b = find(e.j);
    if (a != b) {
      parent[a] = b;
      out.push_back(e.w);
    }
  }
  return out;
}

// Central differences of f at x with step h per coordinate.
inline Eigen::MatrixXd central_difference(
    const std::function<double(const Eigen::MatrixXd&)>& f,
    const Eigen::MatrixXd& x, double h = 1e-6) {
  Eigen::MatrixXd g(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::MatrixXd plus = x, minus = x;
    plus.data()[i] += h;
    minus.data()[i] -= h;
    g.data()[i] = (f(plus) - f(minus)) / (2.0 * h);
  }
  return g;
}

// Coverage of split conformal with continuous i.i.d. scores. Given the
// calibration sample, the conditional coverage is Beta(k, n + 1 - k); the
// per-trial empirical coverage over n_test points is beta-binomial.
struct CoverageMoments {
  double mean = 0.0;
  double per_trial_variance = 0.0;

  double standard_error(std::size_t trials) const {
    return std::sqrt(per_trial_variance / static_cast<double>(trials));
  }
};

inline CoverageMoments beta_binomial_coverage(std::size_t n_cal,
                                              std::size_t n_test,
                                              double alpha) {
  const double n = static_cast<double>(n_cal);
  const double k = std::ceil((n + 1.0) * (1.0 - alpha) - 1e-9);
  if (k > n) return {1.0, 0.0};
  const double m = k / (n + 1.0);
  const double var_c = k * (n + 1.0 - k) / ((n + 1.0) * (n + 1.0) * (n + 2.0));
  const double e_c1c = m - (var_c + m * m);
  return {m, e_c1c / static_cast<double>(n_test) + var_c};
}

// Best single-feature threshold rule on binary labels: the training accuracy
// of predicting class (feature > cut) or its complement, over all cuts.
inline double best_threshold_accuracy(const std::vector<double>& feature,
                                      const std::vector<int>& labels) {
  std::vector<double> cuts = feature;
  cuts.push_back(-std::numeric_limits<double>::infinity());
  double best = 0.0;
  for (double cut : cuts) {
    std::size_t agree = 0;
    for (std::size_t i = 0; i < feature.size(); ++i) {
      agree += (feature[i] > cut) == (labels[i] == 1);
    }
    const double acc = static_cast<double>(agree) / feature.size();
    best = std::max({best, acc, 1.0 - acc});
  }
  return best;
}

}  // namespace cbdc::oracle
