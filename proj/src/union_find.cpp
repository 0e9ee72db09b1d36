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
#include "cbdc/topology.hpp"

namespace cbdc {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  // `child` becomes a subtree of `root`.
  void attach(std::size_t child, std::size_t root) { parent_[child] = root; }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

PersistenceDiagram persistence_h0_unionfind(const GrayscaleImage& img) {
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  const std::size_t n = img.size();
  const auto values = img.values();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] != values[b] ? values[a] < values[b] : a < b;
  });
  // rank[p] orders pixels by entry time; a component's age is its root's rank.
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[order[i]] = i;

  DisjointSets sets(n);
  std::vector<bool> entered(n, false);
  PersistenceDiagram diagram;

  for (const std::size_t p : order) {
    entered[p] = true;
    const std::size_t x = p % w;
    const std::size_t y = p / w;
    const double now = values[p];
    std::size_t neighbors[4];
    int count = 0;
    if (x > 0) neighbors[count++] = p - 1;
    if (x + 1 < w) neighbors[count++] = p + 1;
    if (y > 0) neighbors[count++] = p - w;
    if (y + 1 < h) neighbors[count++] = p + w;
    for (int i = 0; i < count; ++i) {
      const std::size_t q = neighbors[i];
      if (!entered[q]) continue;
      const std::size_t rp = sets.find(p);
      const std::size_t rq = sets.find(q);
      if (rp == rq) continue;
      const std::size_t elder = rank[rp] < rank[rq] ? rp : rq;
      const std::size_t younger = elder == rp ? rq : rp;
      const double birth = values[younger];
      if (now > birth) diagram.bars.push_back({birth, now, 0});
      sets.attach(younger, elder);
    }
  }
  diagram.bars.push_back({values[order.front()], kInfinity, 0});
  return diagram;
}

void PointCloud::validate() const {
  if (points.empty()) throw InvalidInput("point cloud: no points");
  const std::size_t d = points.front().size();
  if (d == 0) throw InvalidInput("point cloud: dimension must be >= 1");
  for (const auto& p : points) {
    if (p.size() != d) {
      throw InvalidInput("point cloud: inconsistent point dimensions");
    }
    for (double c : p) {
      if (!std::isfinite(c)) {
        throw InvalidInput("point cloud: non-finite coordinate");
      }
    }
  }
}

PersistenceDiagram vr_h0(const PointCloud& cloud) {
  cloud.validate();
  const std::size_t n = cloud.points.size();
  auto distance = [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t k = 0; k < cloud.dimension(); ++k) {
      const double d = cloud.points[i][k] - cloud.points[j][k];
      s += d * d;
    }
    return std::sqrt(s);
  };

  // Prim's algorithm on the complete graph.
  std::vector<bool> in_tree(n, false);
  std::vector<double> best(n, kInfinity);
  PersistenceDiagram diagram;
  best[0] = 0.0;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t next = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_tree[i] && (next == n || best[i] < best[next])) next = i;
    }
    in_tree[next] = true;
    if (step > 0 && best[next] > 0.0) {
      diagram.bars.push_back({0.0, best[next], 0});
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_tree[i]) best[i] = std::min(best[i], distance(next, i));
    }
  }
  diagram.bars.push_back({0.0, kInfinity, 0});
  return diagram;
}

}  // namespace cbdc
