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
#include <random>

#include "cbdc/errors.hpp"
#include "cbdc/imaging.hpp"

namespace cbdc {

namespace {

// Linear interpolation into a sorted sample at fractional position pos in
// [0, n-1].
double interpolate_sorted(const std::vector<double>& sorted, double pos) {
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0 || lo == hi) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

// Clockwise quarter turn.
GrayscaleImage rotate_once(const GrayscaleImage& img) {
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  std::vector<double> out(w * h);
  // New image is h wide and w tall: new(r, c) = old(h - 1 - c, r).
  for (std::size_t r = 0; r < w; ++r) {
    for (std::size_t c = 0; c < h; ++c) {
      out[r * h + c] = img.at(r, h - 1 - c);
    }
  }
  return GrayscaleImage(h, w, std::move(out));
}

}  // namespace

GrayscaleImage histogram_match(const GrayscaleImage& src,
                               const GrayscaleImage& reference) {
  if (src.empty() || reference.empty()) {
    throw InvalidInput("histogram_match: empty image");
  }
  const std::size_t n = src.size();
  std::vector<double> ref_sorted(reference.values().begin(),
                                 reference.values().end());
  std::sort(ref_sorted.begin(), ref_sorted.end());
  const double ref_span = static_cast<double>(ref_sorted.size() - 1);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto values = src.values();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });

  std::vector<double> out(n);
  std::size_t first = 0;
  while (first < n) {
    std::size_t last = first;
    while (last + 1 < n && values[order[last + 1]] == values[order[first]]) {
      ++last;
    }
    // Mid-rank of the tie block, as a quantile level in [0, 1].
    const double level =
        n == 1 ? 0.5
               : (static_cast<double>(first + last) / 2.0) /
                     static_cast<double>(n - 1);
    const double mapped =
        std::clamp(interpolate_sorted(ref_sorted, level * ref_span), 0.0, 1.0);
    for (std::size_t i = first; i <= last; ++i) out[order[i]] = mapped;
    first = last + 1;
  }
  return GrayscaleImage(src.width(), src.height(), std::move(out));
}

GrayscaleImage apply_geometry(const GrayscaleImage& img,
                              const AugmentSpec& spec) {
  spec.validate();
  GrayscaleImage out = img;
  for (int i = 0; i < spec.rotation_quarter_turns; ++i) out = rotate_once(out);
  if (spec.flip_horizontal || spec.flip_vertical) {
    const std::size_t w = out.width();
    const std::size_t h = out.height();
    std::vector<double> flipped(w * h);
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        const std::size_t sx = spec.flip_horizontal ? w - 1 - x : x;
        const std::size_t sy = spec.flip_vertical ? h - 1 - y : y;
        flipped[y * w + x] = out.at(sx, sy);
      }
    }
    out = GrayscaleImage(w, h, std::move(flipped));
  }
  return out;
}

GrayscaleImage augment(const GrayscaleImage& img, const AugmentSpec& spec,
                       std::uint64_t seed) {
  GrayscaleImage geometric = apply_geometry(img, spec);
  const double a = spec.photometric_jitter_amplitude;
  if (a == 0.0) return geometric;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-a, a);
  std::vector<double> values(geometric.values().begin(),
                             geometric.values().end());
  for (double& v : values) v = std::clamp(v + jitter(rng), 0.0, 1.0);
  return GrayscaleImage(geometric.width(), geometric.height(),
                        std::move(values));
}

}  // namespace cbdc
