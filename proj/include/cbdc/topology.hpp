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

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cbdc/imaging.hpp"

namespace cbdc {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// A vertex, edge or square of the cubical grid. Vertices are pixel indices
// (row-major), stored sorted; only the first dim+1 (vertex/edge) or 4
// (square) entries are meaningful.
struct Cell {
  int dim = 0;
  std::array<std::uint32_t, 4> vertices{};
  double value = 0.0;

  std::size_t vertex_count() const { return dim == 2 ? 4 : dim + 1; }
  std::span<const std::uint32_t> vertex_span() const {
    return {vertices.data(), vertex_count()};
  }
};

// Lower-star cubical complex of an image. Cells are expected in filtration
// order: (value, dim, vertices) ascending.
struct CubicalComplex {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<Cell> cells;
};

CubicalComplex build_filtration(const GrayscaleImage& img);

struct Bar {
  double birth = 0.0;
  double death = kInfinity;
  int dim = 0;

  bool essential() const { return death == kInfinity; }
  double persistence() const { return death - birth; }
  bool operator==(const Bar&) const = default;
  auto operator<=>(const Bar&) const = default;
};

struct PersistenceDiagram {
  std::vector<Bar> bars;

  std::vector<Bar> of_dim(int dim) const;
  // Bars sorted by (dim, birth, death); the canonical form for multiset
  // comparison.
  PersistenceDiagram sorted() const;
  bool operator==(const PersistenceDiagram& other) const;
};

// Standard column reduction over Z/2. Throws ContractViolation if the cells
// are not in filtration order or a face is missing.
PersistenceDiagram reduce_boundary_matrix(const CubicalComplex& complex);

// Convenience: build_filtration + reduce_boundary_matrix.
PersistenceDiagram compute_persistence(const GrayscaleImage& img);

// Elder-rule union-find over pixels with 4-connectivity. Dimension 0 only.
PersistenceDiagram persistence_h0_unionfind(const GrayscaleImage& img);

struct PointCloud {
  std::vector<std::vector<double>> points;

  std::size_t dimension() const {
    return points.empty() ? 0 : points.front().size();
  }
  void validate() const;
};

// Dimension-0 Vietoris-Rips persistence: one (0, w) bar per nonzero
// minimum-spanning-tree edge plus one essential bar.
PersistenceDiagram vr_h0(const PointCloud& cloud);

// Exact bottleneck distance restricted to one dimension. Returns +infinity
// when the essential-bar counts differ.
double bottleneck_distance(const PersistenceDiagram& a,
                           const PersistenceDiagram& b, int dim);

// Layout: [h0_count, h0_total_pers, h0_max_pers, h0_entropy,
//          h1_count, h1_total_pers, h1_max_pers, h1_entropy,
//          b0_t0 .. b0_t{T-1}, b1_t0 .. b1_t{T-1}]
// with thresholds t_j = j / (T - 1).
struct TopoFeatureVector {
  int thresholds = 0;
  std::vector<double> values;
};

TopoFeatureVector vectorize(const PersistenceDiagram& diagram, int thresholds);

// Number of dim-k bars alive at t (birth <= t < death).
int betti_at(const PersistenceDiagram& diagram, int dim, double t);

std::vector<std::string> topo_feature_names(int thresholds);

// {"dim0": [[b, d], ...], "dim1": [...]} with "inf" for essential deaths.
std::string diagram_to_json(const PersistenceDiagram& diagram);
PersistenceDiagram diagram_from_json(const std::string& text);

}  // namespace cbdc
