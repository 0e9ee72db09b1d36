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
#include <array>
#include <cmath>
#include <numeric>
#include <random>

#include "cbdc/errors.hpp"
#include "cbdc/imaging.hpp"

namespace cbdc {

namespace {

constexpr double kFractionTolerance = 1e-9;

struct Disc {
  double cx;
  double cy;
  double inner;  // 0 for a filled disc
  double outer;
};

GrayscaleImage render(int side, const std::vector<Disc>& shapes,
                      double lesion, double background, double noise_sigma,
                      std::mt19937_64& rng) {
  const auto n = static_cast<std::size_t>(side);
  std::vector<double> values(n * n, background);
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < n; ++x) {
      for (const Disc& d : shapes) {
        const double r = std::hypot(static_cast<double>(x) - d.cx,
                                    static_cast<double>(y) - d.cy);
        if (r >= d.inner && r <= d.outer) values[y * n + x] = lesion;
      }
    }
  }
  if (noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_sigma);
    for (double& v : values) v = std::clamp(v + noise(rng), 0.0, 1.0);
  }
  return GrayscaleImage(n, n, std::move(values));
}

GrayscaleImage make_sample(int label, const SyntheticConfig& cfg,
                           std::uint64_t sample_seed) {
  std::mt19937_64 rng(sample_seed);
  std::uniform_real_distribution<double> lesion_level(0.05, 0.2);
  std::uniform_real_distribution<double> background_level(0.75, 0.95);
  std::uniform_real_distribution<double> scale(0.95, 1.05);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  const double side = cfg.image_side;
  const double lesion = lesion_level(rng);
  const double background = background_level(rng);
  const int rings = label;
  const int cells = std::max(1, rings);
  const double cell = side / cells;
  const double shift = 0.03 * cell;

  std::vector<Disc> shapes;
  for (int i = 0; i < cells; ++i) {
    const double s = scale(rng);
    const double cx = (i + 0.5) * cell - 0.5 + shift * unit(rng);
    const double cy = side / 2.0 - 0.5 + shift * unit(rng);
    const double outer = 0.375 * cell * s;
    if (rings == 0) {
      shapes.push_back({cx, cy, 0.0, 0.8 * outer});
    } else {
      shapes.push_back({cx, cy, 0.15 * cell * s, outer});
    }
  }
  return render(cfg.image_side, shapes, lesion, background, cfg.noise_sigma,
                rng);
}

}  // namespace

void SyntheticConfig::validate() const {
  if (class_fractions.empty()) {
    throw InvalidInput("synthetic config: class_fractions must be non-empty");
  }
  double sum = 0.0;
  for (double f : class_fractions) {
    if (!(f >= 0.0 && f <= 1.0)) {
      throw InvalidInput("synthetic config: class fractions must be in [0, 1]");
    }
    sum += f;
  }
  if (std::abs(sum - 1.0) > kFractionTolerance) {
    throw InvalidInput("synthetic config: class fractions must sum to 1");
  }
  const int rings = std::max<int>(1, static_cast<int>(n_classes()) - 1);
  if (image_side < 8 * rings) {
    throw InvalidInput("synthetic config: image_side must be >= " +
                       std::to_string(8 * rings) +
                       " to host the ring structures (got " +
                       std::to_string(image_side) + ")");
  }
  if (n_samples < 2) {
    throw InvalidInput("synthetic config: n_samples must be >= 2");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw InvalidInput("synthetic config: noise_sigma must be >= 0");
  }
}

std::vector<LabeledImage> generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(cfg.n_samples);
  const std::vector<std::size_t> counts =
      largest_remainder(n, cfg.class_fractions);

  std::vector<int> labels;
  labels.reserve(n);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    labels.insert(labels.end(), counts[k], static_cast<int>(k));
  }
  std::mt19937_64 rng(cfg.seed);
  std::shuffle(labels.begin(), labels.end(), rng);

  std::vector<LabeledImage> out;
  out.reserve(n);
  for (int label : labels) {
    const std::uint64_t sample_seed = rng();
    out.push_back({make_sample(label, cfg, sample_seed), label});
  }
  return out;
}

std::vector<std::size_t> largest_remainder(std::size_t total,
                                           std::span<const double> fractions) {
  std::vector<std::size_t> counts(fractions.size());
  std::vector<double> remainders(fractions.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    const double exact = static_cast<double>(total) * fractions[i];
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    remainders[i] = exact - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(fractions.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainders[a] > remainders[b];
  });
  for (std::size_t i = 0; assigned < total && i < order.size(); ++i, ++assigned) {
    ++counts[order[i]];
  }
  return counts;
}

SplitIndices stratified_split(std::span<const int> labels,
                              const SplitFractions& fractions,
                              std::uint64_t seed) {
  const std::array<double, 3> f = {fractions.train, fractions.cal,
                                   fractions.test};
  for (double v : f) {
    if (!(v > 0.0)) {
      throw InvalidInput(
          "stratified_split: train, cal and test fractions must be positive");
    }
  }
  if (std::abs(f[0] + f[1] + f[2] - 1.0) > kFractionTolerance) {
    throw InvalidInput("stratified_split: fractions must sum to 1");
  }

  int max_label = -1;
  for (int y : labels) {
    if (y < 0) throw InvalidInput("stratified_split: negative label");
    max_label = std::max(max_label, y);
  }
  std::vector<std::vector<std::size_t>> by_class(max_label + 1);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[labels[i]].push_back(i);
  }

  std::mt19937_64 rng(seed);
  SplitIndices out;
  for (int k = 0; k <= max_label; ++k) {
    auto& members = by_class[k];
    if (members.empty()) continue;
    if (members.size() < 3) throw StratificationError(k, members.size());
    std::shuffle(members.begin(), members.end(), rng);
    const auto counts = largest_remainder(members.size(), f);
    auto it = members.begin();
    out.train.insert(out.train.end(), it, it + counts[0]);
    it += counts[0];
    out.cal.insert(out.cal.end(), it, it + counts[1]);
    it += counts[1];
    out.test.insert(out.test.end(), it, members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.cal.begin(), out.cal.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace cbdc
