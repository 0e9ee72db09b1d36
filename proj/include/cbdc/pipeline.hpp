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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cbdc/classifier.hpp"
#include "cbdc/imaging.hpp"
#include "cbdc/serialization.hpp"

namespace cbdc {

// Every tunable of a batch run. One seed drives generation, splitting,
// augmentation and training.
struct RunConfig {
  SyntheticConfig synthetic{16, 400, {0.5, 0.5}, 0.05, 0};
  SplitFractions split{0.5, 0.25, 0.25};
  TrainingConfig training;
  int thresholds = 10;
  double alpha = 0.1;
  int bins = 10;
  double delta = 0.05;
  std::uint64_t seed = 0;

  // Pushes `seed` into the synthetic and training sections and validates.
  void resolve();
};

// Accepts flat key=value lines ('#' comments) or a flat JSON object. Unknown
// keys are rejected.
RunConfig run_config_from_text(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);
Json run_config_json(const RunConfig& cfg);

// Writes to a temporary sibling, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);
std::string read_file(const std::filesystem::path& path);

// "%.17g": round-trips doubles exactly.
std::string format_double(double v);

// Worker count from CBDC_THREADS, else hardware concurrency; at least 1.
unsigned worker_count();

namespace stage {

inline constexpr const char* kLabelsFile = "labels.csv";
inline constexpr const char* kSplitsFile = "splits.csv";
inline constexpr const char* kImagesDir = "images";
inline constexpr const char* kFeaturesFile = "features.csv";
inline constexpr const char* kPairsFile = "features_aug.csv";
inline constexpr const char* kModelFile = "model.json";
inline constexpr const char* kTraceFile = "trace.csv";
inline constexpr const char* kDivergenceFile = "divergence.json";
inline constexpr const char* kCalibrationFile = "calibration.json";
inline constexpr const char* kPredictionsFile = "predictions.csv";
inline constexpr const char* kPredictManifest = "predict.manifest.json";
inline constexpr const char* kGeneralizationFile = "generalization.json";
inline constexpr const char* kReportFile = "report.json";

enum class SetMode { kConformal, kArgmax };

// Stage functions throw InvalidInput for bad input data (exit 2) and
// PipelineStateError for missing or version-mismatched artifacts (exit 3).

// out_dir/images/*.pgm, labels.csv, splits.csv, manifest.json.
void generate(const RunConfig& cfg, const std::filesystem::path& out_dir);

// features.csv (and features_aug.csv when with_pairs) for every .pgm/.csv
// image in images_dir, ids = file stems in sorted order.
void featurize(const std::filesystem::path& images_dir, const RunConfig& cfg,
               const std::filesystem::path& out_dir, bool with_pairs = true);

// Fits on the train split; writes model.json, trace.csv, divergence.json.
void train(const std::filesystem::path& features,
           const std::optional<std::filesystem::path>& pairs,
           const std::filesystem::path& data_dir, const RunConfig& cfg,
           const std::filesystem::path& out_dir);

// Scores the cal split; writes calibration.json.
void calibrate(const std::filesystem::path& model,
               const std::filesystem::path& features,
               const std::filesystem::path& data_dir, const RunConfig& cfg,
               const std::filesystem::path& out_dir);

// Predicts the test split; writes predictions.csv, generalization.json.
void predict(const std::filesystem::path& model,
             const std::filesystem::path& calibration,
             const std::filesystem::path& features,
             const std::filesystem::path& data_dir, const RunConfig& cfg,
             const std::filesystem::path& out_dir);

// Writes report.json (or report.csv) and returns the report JSON.
Json evaluate(const std::filesystem::path& predictions,
              const std::filesystem::path& calibration,
              const std::filesystem::path& data_dir, const RunConfig& cfg,
              SetMode mode, const std::filesystem::path& out_dir,
              bool csv = false);

// generate -> featurize -> train -> calibrate -> predict -> evaluate, all
// under out_dir (dataset in out_dir/data). Returns the report JSON.
Json run_all(const RunConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace stage

}  // namespace cbdc
