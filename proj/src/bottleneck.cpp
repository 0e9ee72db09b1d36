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
#include <limits>
#include <queue>

#include "cbdc/errors.hpp"
#include "cbdc/topology.hpp"

namespace cbdc {

namespace {

// Hopcroft-Karp maximum matching on a bipartite graph with equal sides.
class HopcroftKarp {
 public:
  explicit HopcroftKarp(std::size_t n) : adj_(n), n_(n) {}

  void add_edge(std::size_t left, std::size_t right) {
    adj_[left].push_back(right);
  }

  std::size_t max_matching() {
    match_left_.assign(n_, kFree);
    match_right_.assign(n_, kFree);
    dist_.assign(n_, 0);
    std::size_t matched = 0;
    while (bfs()) {
      for (std::size_t u = 0; u < n_; ++u) {
        if (match_left_[u] == kFree && dfs(u)) ++matched;
      }
    }
    return matched;
  }

 private:
  static constexpr std::size_t kFree = std::numeric_limits<std::size_t>::max();
  static constexpr std::size_t kUnreached =
      std::numeric_limits<std::size_t>::max();

  bool bfs() {
    std::queue<std::size_t> queue;
    for (std::size_t u = 0; u < n_; ++u) {
      if (match_left_[u] == kFree) {
        dist_[u] = 0;
        queue.push(u);
      } else {
        dist_[u] = kUnreached;
      }
    }
    bool found = false;
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop();
      for (std::size_t v : adj_[u]) {
        const std::size_t w = match_right_[v];
        if (w == kFree) {
          found = true;
        } else if (dist_[w] == kUnreached) {
          dist_[w] = dist_[u] + 1;
          queue.push(w);
        }
      }
    }
    return found;
  }

  bool dfs(std::size_t u) {
    for (std::size_t v : adj_[u]) {
      const std::size_t w = match_right_[v];
      if (w == kFree || (dist_[w] == dist_[u] + 1 && dfs(w))) {
        match_left_[u] = v;
        match_right_[v] = u;
        return true;
      }
    }
    dist_[u] = kUnreached;
    return false;
  }

  std::vector<std::vector<std::size_t>> adj_;
  std::size_t n_;
  std::vector<std::size_t> match_left_;
  std::vector<std::size_t> match_right_;
  std::vector<std::size_t> dist_;
};

double linf(const Bar& a, const Bar& b) {
  return std::max(std::abs(a.birth - b.birth), std::abs(a.death - b.death));
}

double diagonal_cost(const Bar& a) { return (a.death - a.birth) / 2.0; }

struct Split {
  std::vector<Bar> finite;
  std::vector<double> essential_births;
};

Split split_bars(const PersistenceDiagram& d, int dim) {
  Split s;
  for (const Bar& b : d.bars) {
    if (b.dim != dim) continue;
    if (b.essential()) {
      s.essential_births.push_back(b.birth);
    } else {
      s.finite.push_back(b);
    }
  }
  return s;
}

// Left nodes: A bars, A essentials, diagonal copies of B bars.
// Right nodes: B bars, B essentials, diagonal copies of A bars.
bool perfect_matching_within(const Split& a, const Split& b, double radius) {
  const std::size_t n = a.finite.size();
  const std::size_t m = b.finite.size();
  const std::size_t e = a.essential_births.size();
  HopcroftKarp graph(n + m + e);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (linf(a.finite[i], b.finite[j]) <= radius) graph.add_edge(i, j);
    }
    if (diagonal_cost(a.finite[i]) <= radius) graph.add_edge(i, m + e + i);
  }
  for (std::size_t i = 0; i < e; ++i) {
    for (std::size_t j = 0; j < e; ++j) {
      if (std::abs(a.essential_births[i] - b.essential_births[j]) <= radius) {
        graph.add_edge(n + i, m + j);
      }
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t left = n + e + j;
    if (diagonal_cost(b.finite[j]) <= radius) graph.add_edge(left, j);
    for (std::size_t i = 0; i < n; ++i) graph.add_edge(left, m + e + i);
  }
  return graph.max_matching() == n + m + e;
}

}  // namespace

double bottleneck_distance(const PersistenceDiagram& a,
                           const PersistenceDiagram& b, int dim) {
  const Split sa = split_bars(a, dim);
  const Split sb = split_bars(b, dim);
  if (sa.essential_births.size() != sb.essential_births.size()) {
    return kInfinity;
  }
  if (sa.finite.empty() && sb.finite.empty() && sa.essential_births.empty()) {
    return 0.0;
  }

  std::vector<double> candidates = {0.0};
  for (const Bar& x : sa.finite) {
    candidates.push_back(diagonal_cost(x));
    for (const Bar& y : sb.finite) candidates.push_back(linf(x, y));
  }
  for (const Bar& y : sb.finite) candidates.push_back(diagonal_cost(y));
  for (double x : sa.essential_births) {
    for (double y : sb.essential_births) candidates.push_back(std::abs(x - y));
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  // The largest candidate is always feasible.
  std::size_t lo = 0;
  std::size_t hi = candidates.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (perfect_matching_within(sa, sb, candidates[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return candidates[lo];
}

}  // namespace cbdc
