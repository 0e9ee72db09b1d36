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
#include <set>
#include <vector>

#include "gtest/gtest.h"

#include "cbdc/errors.hpp"
#include "cbdc/imaging.hpp"
#include "cbdc/topology.hpp"
#include "oracles.hpp"

namespace cbdc {
namespace {

std::vector<double> sorted_values(const GrayscaleImage& img) {
  std::vector<double> v(img.values().begin(), img.values().end());
  std::sort(v.begin(), v.end());
  return v;
}

TEST(GrayscaleImage, RejectsBadInput) {
  EXPECT_THROW(GrayscaleImage(0, 1, {}), InvalidInput);
  EXPECT_THROW(GrayscaleImage(2, 2, {0.1, 0.2, 0.3}), InvalidInput);
  EXPECT_THROW(GrayscaleImage(1, 1, {1.5}), InvalidInput);
  EXPECT_THROW(GrayscaleImage(1, 1, {-0.01}), InvalidInput);
  EXPECT_THROW(GrayscaleImage(1, 1, {std::nan("")}), InvalidInput);
  EXPECT_NO_THROW(GrayscaleImage(2, 1, {0.0, 1.0}));
}

TEST(HistogramMatch, IdentityWithinOnePixelQuantum) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const GrayscaleImage img = oracle::random_image(rng, 7, 5);
    const GrayscaleImage out = histogram_match(img, img);
    EXPECT_LE(linf_distance(out, img), 1.0 / 35.0);
  }
}

TEST(HistogramMatch, ConstantMapsToReferenceValue) {
  const GrayscaleImage out = histogram_match(GrayscaleImage::constant(4, 3, 0.3),
                                             GrayscaleImage::constant(5, 5, 0.7));
  EXPECT_EQ(out.width(), 4u);
  EXPECT_EQ(out.height(), 3u);
  for (double v : out.values()) EXPECT_DOUBLE_EQ(v, 0.7);
}

TEST(HistogramMatch, TwoPointQuantileMap) {
  const GrayscaleImage out = histogram_match(GrayscaleImage(2, 1, {0.0, 1.0}),
                                             GrayscaleImage(2, 1, {0.2, 0.8}));
  EXPECT_DOUBLE_EQ(out.at(0, 0), 0.2);
  EXPECT_DOUBLE_EQ(out.at(1, 0), 0.8);
}

TEST(HistogramMatch, EmptyImageRejected) {
  EXPECT_THROW(histogram_match(GrayscaleImage{}, GrayscaleImage::constant(1, 1, 0.5)),
               InvalidInput);
  EXPECT_THROW(histogram_match(GrayscaleImage::constant(1, 1, 0.5), GrayscaleImage{}),
               InvalidInput);
}

TEST(HistogramMatch, MonotoneAndTakesReferenceMultiset) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const GrayscaleImage src = oracle::random_image(rng, 6, 6);
    const GrayscaleImage ref = oracle::random_image(rng, 6, 6, 0, 0.2, 0.6);
    const GrayscaleImage out = histogram_match(src, ref);
    // Distinct continuous values, equal sizes: output is a permutation of the
    // reference ordered like the source.
    const auto got = sorted_values(out), want = sorted_values(ref);
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_NEAR(got[i], want[i], 1e-12);
    }
    for (std::size_t i = 0; i < src.size(); ++i) {
      for (std::size_t j = 0; j < src.size(); ++j) {
        if (src.values()[i] < src.values()[j]) {
          EXPECT_LE(out.values()[i], out.values()[j]);
        }
      }
    }
  }
}

TEST(Augment, IdentitySpecIsExact) {
  std::mt19937_64 rng(13);
  const GrayscaleImage img = oracle::random_image(rng, 5, 4);
  EXPECT_EQ(augment(img, AugmentSpec{}, 99), img);
}

TEST(Augment, QuarterTurnOfTwoByTwo) {
  const double a = 0.1, b = 0.2, c = 0.3, d = 0.4;
  const GrayscaleImage img(2, 2, {a, b, c, d});
  AugmentSpec spec;
  spec.rotation_quarter_turns = 1;
  EXPECT_EQ(augment(img, spec, 0), GrayscaleImage(2, 2, {c, a, d, b}));
}

TEST(Augment, FlipsAndFullTurn) {
  const GrayscaleImage img(3, 2, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
  AugmentSpec h;
  h.flip_horizontal = true;
  EXPECT_EQ(apply_geometry(img, h), GrayscaleImage(3, 2, {0.3, 0.2, 0.1, 0.6, 0.5, 0.4}));
  AugmentSpec v;
  v.flip_vertical = true;
  EXPECT_EQ(apply_geometry(img, v), GrayscaleImage(3, 2, {0.4, 0.5, 0.6, 0.1, 0.2, 0.3}));
  AugmentSpec r;
  r.rotation_quarter_turns = 1;
  GrayscaleImage turned = img;
  for (int i = 0; i < 4; ++i) turned = apply_geometry(turned, r);
  EXPECT_EQ(turned, img);
  EXPECT_EQ(apply_geometry(img, r).width(), 2u);
}

TEST(Augment, JitterBoundedAndDeterministic) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 50; ++trial) {
    const GrayscaleImage img = oracle::random_image(rng, 6, 9);
    AugmentSpec spec;
    spec.rotation_quarter_turns = trial % 4;
    spec.flip_horizontal = trial % 2 == 0;
    spec.flip_vertical = trial % 3 == 0;
    spec.photometric_jitter_amplitude = 0.1;
    const GrayscaleImage out = augment(img, spec, trial);
    EXPECT_LE(linf_distance(out, apply_geometry(img, spec)), 0.1);
    EXPECT_EQ(out, augment(img, spec, trial));
  }
}

TEST(Augment, ZeroJitterPreservesHistogram) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 30; ++trial) {
    const GrayscaleImage img = oracle::random_image(rng, 4 + trial % 3, 5, 16);
    AugmentSpec spec;
    spec.rotation_quarter_turns = trial % 4;
    spec.flip_horizontal = trial % 2 == 1;
    spec.flip_vertical = trial % 5 == 0;
    EXPECT_EQ(sorted_values(augment(img, spec, trial)), sorted_values(img));
  }
}

TEST(Augment, InvalidSpecRejected) {
  AugmentSpec spec;
  spec.rotation_quarter_turns = 4;
  EXPECT_THROW(spec.validate(), InvalidInput);
  spec.rotation_quarter_turns = 0;
  spec.photometric_jitter_amplitude = 0.6;
  EXPECT_THROW(spec.validate(), InvalidInput);
  spec.photometric_jitter_amplitude = -0.1;
  EXPECT_THROW(spec.validate(), InvalidInput);
}

TEST(Synthetic, RingClassHasPersistentLoop) {
  for (int side : {8, 12, 16, 24}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      SyntheticConfig cfg;
      cfg.image_side = side;
      cfg.n_samples = 4;
      cfg.noise_sigma = 0.0;
      cfg.seed = seed;
      for (const LabeledImage& s : generate_synthetic(cfg)) {
        const auto h1 = compute_persistence(s.image).of_dim(1);
        const double longest = std::accumulate(
            h1.begin(), h1.end(), 0.0,
            [](double m, const Bar& b) { return std::max(m, b.persistence()); });
        if (s.label == 1) {
          EXPECT_GE(longest, 0.3) << "side " << side << " seed " << seed;
        } else {
          EXPECT_LE(longest, 0.05) << "side " << side << " seed " << seed;
        }
      }
    }
  }
}

TEST(Synthetic, ThreeClassesCountRings) {
  SyntheticConfig cfg;
  cfg.image_side = 16;
  cfg.n_samples = 9;
  cfg.class_fractions = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  cfg.noise_sigma = 0.0;
  for (const LabeledImage& s : generate_synthetic(cfg)) {
    int loops = 0;
    for (const Bar& b : compute_persistence(s.image).of_dim(1)) {
      loops += b.persistence() >= 0.3;
    }
    EXPECT_EQ(loops, s.label);
  }
}

TEST(Synthetic, DeterministicAndProportional) {
  SyntheticConfig cfg;
  cfg.n_samples = 100;
  cfg.seed = 42;
  const auto a = generate_synthetic(cfg);
  const auto b = generate_synthetic(cfg);
  ASSERT_EQ(a.size(), 100u);
  int ones = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].image, b[i].image);
    EXPECT_EQ(a[i].label, b[i].label);
    ones += a[i].label;
  }
  EXPECT_EQ(ones, 50);
  cfg.seed = 43;
  EXPECT_FALSE(generate_synthetic(cfg)[0].image == a[0].image);
}

TEST(Synthetic, RejectsSmallSide) {
  SyntheticConfig cfg;
  cfg.image_side = 4;
  try {
    generate_synthetic(cfg);
    FAIL() << "expected InvalidInput";
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find(">= 8"), std::string::npos) << e.what();
  }
  cfg.image_side = 16;
  cfg.class_fractions = {0.5, 0.6};
  EXPECT_THROW(cfg.validate(), InvalidInput);
  cfg.class_fractions = {0.5, 0.5};
  cfg.n_samples = 1;
  EXPECT_THROW(cfg.validate(), InvalidInput);
  cfg.n_samples = 10;
  cfg.noise_sigma = -1;
  EXPECT_THROW(cfg.validate(), InvalidInput);
}

std::vector<int> labels_of(const std::vector<int>& labels,
                           const std::vector<std::size_t>& idx, int cls) {
  std::vector<int> out;
  for (std::size_t i : idx) {
    if (labels[i] == cls) out.push_back(labels[i]);
  }
  return out;
}

TEST(StratifiedSplit, BalancedHundred) {
  std::vector<int> labels(100);
  for (int i = 0; i < 100; ++i) labels[i] = i % 2;
  const SplitIndices s = stratified_split(labels, {0.6, 0.2, 0.2}, 3);
  for (int c : {0, 1}) {
    EXPECT_EQ(labels_of(labels, s.train, c).size(), 30u);
    EXPECT_EQ(labels_of(labels, s.cal, c).size(), 10u);
    EXPECT_EQ(labels_of(labels, s.test, c).size(), 10u);
  }
}

TEST(StratifiedSplit, SingleClassTen) {
  const std::vector<int> labels(10, 0);
  const SplitIndices s = stratified_split(labels, {0.5, 0.25, 0.25}, 1);
  EXPECT_EQ(s.train.size(), 5u);
  EXPECT_TRUE(s.cal.size() == 2 || s.cal.size() == 3);
  EXPECT_EQ(s.cal.size() + s.test.size(), 5u);
  std::set<std::size_t> all(s.train.begin(), s.train.end());
  all.insert(s.cal.begin(), s.cal.end());
  all.insert(s.test.begin(), s.test.end());
  EXPECT_EQ(all.size(), 10u);
}

TEST(StratifiedSplit, RejectsBadFractionsAndSmallClasses) {
  const std::vector<int> labels(10, 0);
  EXPECT_THROW(stratified_split(labels, {1.0, 0.0, 0.0}, 0), InvalidInput);
  EXPECT_THROW(stratified_split(labels, {0.5, 0.3, 0.3}, 0), InvalidInput);
  const std::vector<int> small = {0, 0, 0, 0, 1, 1};
  try {
    stratified_split(small, {0.6, 0.2, 0.2}, 0);
    FAIL() << "expected StratificationError";
  } catch (const StratificationError& e) {
    EXPECT_EQ(e.label(), 1);
    EXPECT_NE(std::string(e.what()).find("class 1"), std::string::npos);
  }
}

TEST(StratifiedSplit, DisjointExhaustiveProportional) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + trial % 3;
    std::vector<int> labels;
    for (int c = 0; c < k; ++c) {
      const int n = 3 + static_cast<int>(rng() % 40);
      labels.insert(labels.end(), n, c);
    }
    std::shuffle(labels.begin(), labels.end(), rng);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    double a = u(rng), b = u(rng), c = u(rng);
    const double sum = a + b + c;
    const SplitFractions f{a / sum, b / sum, 1.0 - a / sum - b / sum};
    const SplitIndices s = stratified_split(labels, f, trial);
    std::vector<int> seen(labels.size(), 0);
    for (const auto* part : {&s.train, &s.cal, &s.test}) {
      EXPECT_TRUE(std::is_sorted(part->begin(), part->end()));
      for (std::size_t i : *part) ++seen[i];
    }
    EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](int x) { return x == 1; }));
    for (int cls = 0; cls < k; ++cls) {
      const double n = std::count(labels.begin(), labels.end(), cls);
      EXPECT_LT(std::abs(labels_of(labels, s.train, cls).size() - n * f.train), 1.0);
      EXPECT_LT(std::abs(labels_of(labels, s.cal, cls).size() - n * f.cal), 1.0);
      EXPECT_LT(std::abs(labels_of(labels, s.test, cls).size() - n * f.test), 1.0);
    }
  }
}

TEST(LargestRemainder, TiesGoToEarlierSplit) {
  const std::vector<double> f = {0.5, 0.25, 0.25};
  EXPECT_EQ(largest_remainder(10, f), (std::vector<std::size_t>{5, 3, 2}));
  const std::vector<double> g = {0.6, 0.2, 0.2};
  EXPECT_EQ(largest_remainder(50, g), (std::vector<std::size_t>{30, 10, 10}));
}

TEST(ImageIo, PgmRoundTrip) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const GrayscaleImage img = oracle::random_image(rng, 3 + trial % 5, 2 + trial % 4, 256);
    EXPECT_EQ(parse_pgm(to_pgm(img)), img);
  }
  const GrayscaleImage img = parse_pgm("P2\n# comment\n2 1\n255\n0 255\n");
  EXPECT_EQ(img, GrayscaleImage(2, 1, {0.0, 1.0}));
}

TEST(ImageIo, CorruptInputRejected) {
  EXPECT_THROW(parse_pgm("P5\n2 1\n255\n0 255\n"), InvalidInput);
  EXPECT_THROW(parse_pgm("P2\n2 2\n255\n0 255\n"), InvalidInput);
  EXPECT_THROW(parse_pgm("P2\n2 1\n255\n0 300\n"), InvalidInput);
  EXPECT_THROW(parse_pgm(""), InvalidInput);
  EXPECT_THROW(parse_csv_grid("0.1,0.2\n0.3\n"), InvalidInput);
  EXPECT_THROW(parse_csv_grid("0.1,abc\n"), InvalidInput);
}

TEST(ImageIo, CsvGrid) {
  EXPECT_EQ(parse_csv_grid("0.1,0.2,0.3\n0.4,0.5,0.6\n"),
            GrayscaleImage(3, 2, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6}));
}

TEST(SyntheticConfigText, KeyValueAndJsonRoundTrip) {
  SyntheticConfig cfg;
  cfg.image_side = 20;
  cfg.n_samples = 33;
  cfg.class_fractions = {0.25, 0.75};
  cfg.noise_sigma = 0.125;
  cfg.seed = 123456789012345ULL;
  for (const std::string& text : {to_key_value(cfg), to_json(cfg)}) {
    const SyntheticConfig back = synthetic_config_from_text(text);
    EXPECT_EQ(back.image_side, 20);
    EXPECT_EQ(back.n_samples, 33);
    EXPECT_EQ(back.class_fractions, cfg.class_fractions);
    EXPECT_EQ(back.noise_sigma, 0.125);
    EXPECT_EQ(back.seed, cfg.seed);
  }
}

}  // namespace
}  // namespace cbdc
