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

#include "cbdc/errors.hpp"
#include "cbdc/topology.hpp"

namespace cbdc {

int betti_at(const PersistenceDiagram& diagram, int dim, double t) {
  int count = 0;
  for (const Bar& b : diagram.bars) {
    if (b.dim == dim && b.birth <= t && t < b.death) ++count;
  }
  return count;
}

TopoFeatureVector vectorize(const PersistenceDiagram& diagram, int thresholds) {
  if (thresholds < 2) throw InvalidInput("vectorize: T must be >= 2");
  TopoFeatureVector out;
  out.thresholds = thresholds;
  out.values.reserve(8 + 2 * thresholds);

  for (int dim = 0; dim <= 1; ++dim) {
    double count = 0.0;
    double total = 0.0;
    double longest = 0.0;
    for (const Bar& b : diagram.bars) {
      if (b.dim != dim) continue;
      count += 1.0;
      if (b.essential()) continue;
      total += b.persistence();
      longest = std::max(longest, b.persistence());
    }
    double entropy = 0.0;
    if (total > 0.0) {
      for (const Bar& b : diagram.bars) {
        if (b.dim != dim || b.essential()) continue;
        const double p = b.persistence() / total;
        if (p > 0.0) entropy -= p * std::log(p);
      }
    }
    out.values.insert(out.values.end(), {count, total, longest, entropy});
  }
  for (int dim = 0; dim <= 1; ++dim) {
    for (int j = 0; j < thresholds; ++j) {
      const double t = static_cast<double>(j) / (thresholds - 1);
      out.values.push_back(betti_at(diagram, dim, t));
    }
  }
  return out;
}

std::vector<std::string> topo_feature_names(int thresholds) {
  std::vector<std::string> names;
  for (int dim = 0; dim <= 1; ++dim) {
    const std::string p = "h" + std::to_string(dim) + "_";
    for (const char* stat : {"count", "total_pers", "max_pers", "entropy"}) {
      names.push_back(p + stat);
    }
  }
  for (int dim = 0; dim <= 1; ++dim) {
    for (int j = 0; j < thresholds; ++j) {
      names.push_back("b" + std::to_string(dim) + "_t" + std::to_string(j));
    }
  }
  return names;
}

}  // namespace cbdc
