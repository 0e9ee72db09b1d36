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
#include <map>
#include <string>

#include "cbdc/errors.hpp"
#include "cbdc/topology.hpp"

namespace cbdc {

namespace {

using CellKey = std::array<std::uint32_t, 5>;

CellKey key_of(int dim, std::span<const std::uint32_t> vertices) {
  CellKey key{static_cast<std::uint32_t>(dim), 0, 0, 0, 0};
  std::copy(vertices.begin(), vertices.end(), key.begin() + 1);
  return key;
}

bool filtration_less(const Cell& a, const Cell& b) {
  if (a.value != b.value) return a.value < b.value;
  if (a.dim != b.dim) return a.dim < b.dim;
  return std::lexicographical_compare(
      a.vertex_span().begin(), a.vertex_span().end(),
      b.vertex_span().begin(), b.vertex_span().end());
}

// Faces as vertex lists; squares are {a, b, c, d} sorted, with a-b and c-d
// horizontal, a-c and b-d vertical.
std::vector<CellKey> face_keys(const Cell& cell) {
  const auto& v = cell.vertices;
  switch (cell.dim) {
    case 1:
      return {key_of(0, std::span(v.data(), 1)),
              key_of(0, std::span(v.data() + 1, 1))};
    case 2: {
      auto edge = [](std::uint32_t p, std::uint32_t q) {
        const std::array<std::uint32_t, 2> e = {std::min(p, q), std::max(p, q)};
        return key_of(1, e);
      };
      return {edge(v[0], v[1]), edge(v[0], v[2]), edge(v[1], v[3]),
              edge(v[2], v[3])};
    }
    default:
      return {};
  }
}

// In-place symmetric difference of sorted index columns over Z/2.
void add_column(std::vector<std::size_t>& target,
                const std::vector<std::size_t>& source,
                std::vector<std::size_t>& scratch) {
  scratch.clear();
  std::set_symmetric_difference(target.begin(), target.end(), source.begin(),
                                source.end(), std::back_inserter(scratch));
  target.swap(scratch);
}

}  // namespace

CubicalComplex build_filtration(const GrayscaleImage& img) {
  CubicalComplex cx;
  cx.width = img.width();
  cx.height = img.height();
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  const auto values = img.values();
  auto idx = [w](std::size_t x, std::size_t y) {
    return static_cast<std::uint32_t>(y * w + x);
  };

  cx.cells.reserve(w * h + (w - 1) * h + w * (h - 1) + (w - 1) * (h - 1));
  for (std::size_t i = 0; i < w * h; ++i) {
    cx.cells.push_back({0, {static_cast<std::uint32_t>(i), 0, 0, 0}, values[i]});
  }
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const std::uint32_t p = idx(x, y);
      if (x + 1 < w) {
        const std::uint32_t q = idx(x + 1, y);
        cx.cells.push_back({1, {p, q, 0, 0}, std::max(values[p], values[q])});
      }
      if (y + 1 < h) {
        const std::uint32_t q = idx(x, y + 1);
        cx.cells.push_back({1, {p, q, 0, 0}, std::max(values[p], values[q])});
      }
      if (x + 1 < w && y + 1 < h) {
        const std::uint32_t b = idx(x + 1, y);
        const std::uint32_t c = idx(x, y + 1);
        const std::uint32_t d = idx(x + 1, y + 1);
        const double v = std::max({values[p], values[b], values[c], values[d]});
        cx.cells.push_back({2, {p, b, c, d}, v});
      }
    }
  }
  std::sort(cx.cells.begin(), cx.cells.end(), filtration_less);
  return cx;
}

PersistenceDiagram reduce_boundary_matrix(const CubicalComplex& complex) {
  const auto& cells = complex.cells;
  const std::size_t n = cells.size();

  std::map<CellKey, std::size_t> position;
  std::vector<std::vector<std::size_t>> columns(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Cell& cell = cells[j];
    if (cell.dim < 0 || cell.dim > 2) {
      throw ContractViolation("reduce_boundary_matrix: cell " +
                              std::to_string(j) + " has invalid dimension");
    }
    if (j > 0 && cell.value < cells[j - 1].value) {
      throw ContractViolation(
          "reduce_boundary_matrix: cells are not sorted by filtration value "
          "(cell " + std::to_string(j) + ")");
    }
    for (const CellKey& face : face_keys(cell)) {
      const auto it = position.find(face);
      if (it == position.end()) {
        throw ContractViolation("reduce_boundary_matrix: cell " +
                                std::to_string(j) +
                                " appears before one of its faces");
      }
      if (cells[it->second].value > cell.value) {
        throw ContractViolation("reduce_boundary_matrix: face value exceeds "
                                "cell value at cell " + std::to_string(j));
      }
      columns[j].push_back(it->second);
    }
    std::sort(columns[j].begin(), columns[j].end());
    if (!position.emplace(key_of(cell.dim, cell.vertex_span()), j).second) {
      throw ContractViolation("reduce_boundary_matrix: duplicate cell " +
                              std::to_string(j));
    }
  }

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> pivot_owner(n, kNone);
  std::vector<bool> is_pivot(n, false);
  std::vector<std::size_t> scratch;
  PersistenceDiagram diagram;

  for (std::size_t j = 0; j < n; ++j) {
    auto& col = columns[j];
    while (!col.empty() && pivot_owner[col.back()] != kNone) {
      add_column(col, columns[pivot_owner[col.back()]], scratch);
    }
    if (col.empty()) continue;
    const std::size_t low = col.back();
    pivot_owner[low] = j;
    is_pivot[low] = true;
    const double birth = cells[low].value;
    const double death = cells[j].value;
    if (death > birth) diagram.bars.push_back({birth, death, cells[low].dim});
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (columns[j].empty() && !is_pivot[j]) {
      diagram.bars.push_back({cells[j].value, kInfinity, cells[j].dim});
    }
  }
  return diagram;
}

PersistenceDiagram compute_persistence(const GrayscaleImage& img) {
  return reduce_boundary_matrix(build_filtration(img));
}

std::vector<Bar> PersistenceDiagram::of_dim(int dim) const {
  std::vector<Bar> out;
  for (const Bar& b : bars) {
    if (b.dim == dim) out.push_back(b);
  }
  return out;
}

PersistenceDiagram PersistenceDiagram::sorted() const {
  PersistenceDiagram out = *this;
  std::sort(out.bars.begin(), out.bars.end(), [](const Bar& a, const Bar& b) {
    if (a.dim != b.dim) return a.dim < b.dim;
    if (a.birth != b.birth) return a.birth < b.birth;
    return a.death < b.death;
  });
  return out;
}

bool PersistenceDiagram::operator==(const PersistenceDiagram& other) const {
  return sorted().bars == other.sorted().bars;
}

}  // namespace cbdc
