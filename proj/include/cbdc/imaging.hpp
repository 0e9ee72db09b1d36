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
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cbdc {

// Rectangular intensity grid, row-major, every value in [0, 1].
class GrayscaleImage {
 public:
  GrayscaleImage() = default;
  // Throws InvalidInput on empty dimensions, size mismatch or values outside
  // [0, 1] (including NaN).
  GrayscaleImage(std::size_t width, std::size_t height,
                 std::vector<double> intensities);

  static GrayscaleImage constant(std::size_t width, std::size_t height,
                                 double value);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double at(std::size_t x, std::size_t y) const {
    return values_[y * width_ + x];
  }
  std::span<const double> values() const { return values_; }

  bool operator==(const GrayscaleImage&) const = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> values_;
};

// Max absolute pixel difference. Images must have equal dimensions.
double linf_distance(const GrayscaleImage& a, const GrayscaleImage& b);

struct AugmentSpec {
  int rotation_quarter_turns = 0;  // clockwise, in {0,1,2,3}
  bool flip_horizontal = false;
  bool flip_vertical = false;
  double photometric_jitter_amplitude = 0.0;  // in [0, 0.5]

  void validate() const;
};

// Quantile mapping of src's intensities onto reference's empirical
// distribution. Tied source values map to the same output value.
GrayscaleImage histogram_match(const GrayscaleImage& src,
                               const GrayscaleImage& reference);

// Rotation, then horizontal flip, then vertical flip. Exact pixel
// permutation.
GrayscaleImage apply_geometry(const GrayscaleImage& img,
                              const AugmentSpec& spec);

// apply_geometry followed by i.i.d. uniform jitter in [-a, a] and clamping to
// [0, 1]. Deterministic given seed.
GrayscaleImage augment(const GrayscaleImage& img, const AugmentSpec& spec,
                       std::uint64_t seed);

struct SyntheticConfig {
  int image_side = 16;
  int n_samples = 100;
  std::vector<double> class_fractions = {0.5, 0.5};
  double noise_sigma = 0.05;
  std::uint64_t seed = 0;

  std::size_t n_classes() const { return class_fractions.size(); }
  // Throws InvalidInput naming the violated constraint.
  void validate() const;
};

struct LabeledImage {
  GrayscaleImage image;
  int label = 0;
};

// Class 0 images hold one filled dark blob on a bright background. Class
// k >= 1 images hold k dark rings, each enclosing a bright hole, which gives
// one long-lived loop per ring. Class counts follow class_fractions by
// largest remainder and the order is shuffled. Requires
// image_side >= 8 * max(1, K - 1).
std::vector<LabeledImage> generate_synthetic(const SyntheticConfig& cfg);

struct SplitFractions {
  double train = 0.6;
  double cal = 0.2;
  double test = 0.2;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> cal;
  std::vector<std::size_t> test;
};

// Per-class largest-remainder allocation. Each class is shuffled with the
// seed before allocation; returned index lists are sorted ascending.
// Throws StratificationError for classes with fewer than 3 samples and
// InvalidInput for non-positive fractions.
SplitIndices stratified_split(std::span<const int> labels,
                              const SplitFractions& fractions,
                              std::uint64_t seed);

// Per-class counts of each split. Ties on the fractional remainder go to the
// earlier split (train, cal, test).
std::vector<std::size_t> largest_remainder(std::size_t total,
                                           std::span<const double> fractions);

// Plain PGM (P2, maxval 255): stored as round(v * 255), loaded as v / 255.
std::string to_pgm(const GrayscaleImage& img);
GrayscaleImage parse_pgm(const std::string& text);
// Rows of comma separated reals.
GrayscaleImage parse_csv_grid(const std::string& text);
// Dispatches on extension: .pgm or .csv.
GrayscaleImage load_image(const std::filesystem::path& path);

std::string to_key_value(const SyntheticConfig& cfg);
std::string to_json(const SyntheticConfig& cfg);
SyntheticConfig synthetic_config_from_text(const std::string& text);

}  // namespace cbdc
