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
#include <string>

#include "cbdc/errors.hpp"
#include "cbdc/imaging.hpp"

namespace cbdc {

GrayscaleImage::GrayscaleImage(std::size_t width, std::size_t height,
                               std::vector<double> intensities)
    : width_(width), height_(height), values_(std::move(intensities)) {
  if (width_ == 0 || height_ == 0) {
    throw InvalidInput("image: width and height must be >= 1");
  }
  if (values_.size() != width_ * height_) {
    throw InvalidInput("image: expected " + std::to_string(width_ * height_) +
                       " intensities, got " + std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidInput("image: intensity at index " + std::to_string(i) +
                         " is outside [0, 1]");
    }
  }
}

GrayscaleImage GrayscaleImage::constant(std::size_t width, std::size_t height,
                                        double value) {
  return GrayscaleImage(width, height,
                        std::vector<double>(width * height, value));
}

double linf_distance(const GrayscaleImage& a, const GrayscaleImage& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw InvalidInput("linf_distance: image dimensions differ");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::abs(a.values()[i] - b.values()[i]));
  }
  return d;
}

void AugmentSpec::validate() const {
  if (rotation_quarter_turns < 0 || rotation_quarter_turns > 3) {
    throw InvalidInput("augment: rotation_quarter_turns must be in {0,1,2,3}");
  }
  if (!(photometric_jitter_amplitude >= 0.0 &&
        photometric_jitter_amplitude <= 0.5)) {
    throw InvalidInput("augment: jitter amplitude must be in [0, 0.5]");
  }
}

}  // namespace cbdc
