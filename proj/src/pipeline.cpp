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
#include <atomic>
#include <cmath>
#include <exception>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "cbdc/conformal.hpp"
#include "cbdc/errors.hpp"
#include "cbdc/manifold.hpp"
#include "cbdc/metrics.hpp"
#include "cbdc/pipeline.hpp"

namespace cbdc::stage {

namespace fs = std::filesystem;

namespace {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> split_line(const std::string& line, char sep) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) cells.push_back(cell);
  if (!line.empty() && line.back() == sep) cells.emplace_back();
  return cells;
}

// Upstream artifacts that do not exist are a pipeline-state problem.
void require_artifact(const fs::path& path, const char* what) {
  if (!fs::exists(path)) {
    throw PipelineStateError(std::string("missing ") + what + " " +
                             path.string());
  }
}

CsvTable read_csv(const fs::path& path, const char* what) {
  require_artifact(path, what);
  std::istringstream in(read_file(path));
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) {
    throw InvalidInput(path.string() + ": empty CSV");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  table.header = split_line(line, ',');
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_line(line, ',');
    if (cells.size() != table.header.size()) {
      throw InvalidInput(path.string() + ": row has " +
                         std::to_string(cells.size()) + " cells, header has " +
                         std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

double parse_double(const std::string& s, const fs::path& file) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) {
    throw InvalidInput(file.string() + ": malformed number '" + s + "'");
  }
  return v;
}

int parse_int(const std::string& s, const fs::path& file) {
  const double v = parse_double(s, file);
  if (v != std::floor(v)) {
    throw InvalidInput(file.string() + ": expected an integer, got '" + s + "'");
  }
  return static_cast<int>(v);
}

Json read_json(const fs::path& path, const char* what) {
  require_artifact(path, what);
  try {
    return Json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(path.string() + ": malformed JSON: " + e.what());
  }
}

void write_json(const fs::path& path, const Json& j) {
  write_file_atomic(path, j.dump(2) + "\n");
}

void write_manifest(const fs::path& path, const std::string& command,
                    const RunConfig& cfg,
                    const std::vector<std::pair<std::string, fs::path>>& inputs,
                    const std::vector<std::string>& outputs) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["command"] = command;
  j["seed"] = cfg.seed;
  j["config"] = run_config_json(cfg);
  Json in = Json::object();
  for (const auto& [name, p] : inputs) in[name] = p.filename().string();
  j["inputs"] = std::move(in);
  j["outputs"] = outputs;
  write_json(path, j);
}

struct Dataset {
  std::map<std::string, int> labels;
  std::map<std::string, std::string> splits;
  int n_classes = 0;
};

Dataset load_dataset(const fs::path& data_dir, bool need_splits) {
  Dataset ds;
  const fs::path labels_path = data_dir / kLabelsFile;
  const CsvTable labels = read_csv(labels_path, "labels");
  if (labels.header != std::vector<std::string>{"id", "label"}) {
    throw InvalidInput(labels_path.string() + ": header must be id,label");
  }
  for (const auto& row : labels.rows) {
    const int y = parse_int(row[1], labels_path);
    if (y < 0) throw InvalidInput(labels_path.string() + ": negative label");
    ds.labels[row[0]] = y;
    ds.n_classes = std::max(ds.n_classes, y + 1);
  }
  if (need_splits) {
    const fs::path splits_path = data_dir / kSplitsFile;
    const CsvTable splits = read_csv(splits_path, "splits");
    if (splits.header != std::vector<std::string>{"id", "split"}) {
      throw InvalidInput(splits_path.string() + ": header must be id,split");
    }
    for (const auto& row : splits.rows) ds.splits[row[0]] = row[1];
  }
  return ds;
}

struct FeatureTable {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  std::map<std::string, std::size_t> index;
};

FeatureTable load_features(const fs::path& path, const char* what) {
  const CsvTable csv = read_csv(path, what);
  if (csv.header.size() < 2 || csv.header.front() != "id") {
    throw InvalidInput(path.string() + ": first column must be id");
  }
  FeatureTable table;
  for (const auto& row : csv.rows) {
    std::vector<double> values;
    values.reserve(row.size() - 1);
    for (std::size_t c = 1; c < row.size(); ++c) {
      const double v = parse_double(row[c], path);
      if (!std::isfinite(v)) {
        throw InvalidInput(path.string() + ": non-finite feature");
      }
      values.push_back(v);
    }
    table.index[row[0]] = table.ids.size();
    table.ids.push_back(row[0]);
    table.rows.push_back(std::move(values));
  }
  if (table.ids.empty()) throw InvalidInput(path.string() + ": no rows");
  return table;
}

// Raw feature row as a record; concatenated() returns the row unchanged.
FeatureRecord record_of(const std::vector<double>& row,
                        std::optional<int> label) {
  FeatureRecord r;
  r.topo.values = row;
  r.topo.values.resize(row.size() - kIntensityStatCount);
  for (int k = 0; k < kIntensityStatCount; ++k) {
    r.intensity_stats[k] = row[row.size() - kIntensityStatCount + k];
  }
  r.label = label;
  return r;
}

std::vector<FeatureRecord> records_for_split(const FeatureTable& features,
                                             const Dataset& ds,
                                             const std::string& split,
                                             std::vector<std::string>* ids) {
  std::vector<FeatureRecord> out;
  for (std::size_t i = 0; i < features.ids.size(); ++i) {
    const std::string& id = features.ids[i];
    const auto s = ds.splits.find(id);
    if (s == ds.splits.end()) {
      throw InvalidInput("features: id '" + id + "' has no split assignment");
    }
    if (s->second != split) continue;
    const auto y = ds.labels.find(id);
    if (y == ds.labels.end()) {
      throw InvalidInput("features: id '" + id + "' has no label");
    }
    if (features.rows[i].size() <= kIntensityStatCount) {
      throw InvalidInput("features: too few columns");
    }
    out.push_back(record_of(features.rows[i], y->second));
    if (ids != nullptr) ids->push_back(id);
  }
  if (out.empty()) {
    throw InvalidInput("no samples in the '" + split + "' split");
  }
  return out;
}

// Runs body(i) for i in [0, n) on worker_count() threads. The first failure
// by index is rethrown.
template <typename F>
void parallel_for(std::size_t n, F&& body) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(worker_count(), n));
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            body(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string features_csv(const std::vector<std::string>& ids,
                         const std::vector<std::vector<double>>& rows,
                         int thresholds) {
  std::string out = "id";
  for (const auto& name : feature_names(thresholds)) out += "," + name;
  out += "\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out += ids[i];
    for (double v : rows[i]) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

std::string sample_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "img_%05zu", i);
  return buf;
}

Json divergence_report(const EnsembleModel& model,
                       const std::vector<FeatureRecord>& records) {
  std::vector<std::vector<std::vector<double>>> by_class(model.n_classes);
  for (const FeatureRecord& r : records) {
    const Eigen::VectorXd x = model.normalizer.transform(r.concatenated());
    by_class[*r.label].emplace_back(x.data(), x.data() + x.size() - 1);
  }
  Json j;
  j["format_version"] = kFormatVersion;
  j["seed"] = model.config.seed;
  j["embedding"] = "standardized training features";
  j["covariance_normalization"] = "1/n";
  j["note"] =
      "Gaussian summaries only; manifold regularity of the classes is assumed, "
      "not tested";
  Json pairs = Json::array();
  for (int a = 0; a < model.n_classes; ++a) {
    for (int b = a + 1; b < model.n_classes; ++b) {
      if (by_class[a].empty() || by_class[b].empty() ||
          by_class[a].front().empty()) {
        continue;
      }
      Json p = divergence_json(joint_divergence_terms(
          gaussian_summary(by_class[a]), gaussian_summary(by_class[b])));
      p["class_a"] = a;
      p["class_b"] = b;
      // Diagnostic curve over nested prefixes of each class.
      Json curve = Json::array();
      const std::size_t limit = std::min(by_class[a].size(), by_class[b].size());
      for (std::size_t n = 4; n <= limit; n *= 2) {
        const std::span<const std::vector<double>> sa(by_class[a].data(), n);
        const std::span<const std::vector<double>> sb(by_class[b].data(), n);
        curve.push_back({{"n", n},
                         {"d_joint", joint_divergence(gaussian_summary(sa),
                                                      gaussian_summary(sb))}});
      }
      p["d_joint_vs_n"] = std::move(curve);
      pairs.push_back(std::move(p));
    }
  }
  j["pairs"] = std::move(pairs);
  return j;
}

}  // namespace

void generate(const RunConfig& cfg, const fs::path& out_dir) {
  const std::vector<LabeledImage> samples = generate_synthetic(cfg.synthetic);
  std::vector<int> labels;
  for (const auto& s : samples) labels.push_back(s.label);
  const SplitIndices split = stratified_split(labels, cfg.split, cfg.seed);

  std::error_code ec;
  fs::create_directories(out_dir / kImagesDir, ec);
  if (ec) {
    throw InvalidInput("cannot create output directory " + out_dir.string());
  }
  std::string labels_csv = "id,label\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    write_file_atomic(out_dir / kImagesDir / (sample_id(i) + ".pgm"),
                      to_pgm(samples[i].image));
    labels_csv += sample_id(i) + "," + std::to_string(samples[i].label) + "\n";
  }
  std::vector<std::string> split_of(samples.size());
  for (std::size_t i : split.train) split_of[i] = "train";
  for (std::size_t i : split.cal) split_of[i] = "cal";
  for (std::size_t i : split.test) split_of[i] = "test";
  std::string splits_csv = "id,split\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    splits_csv += sample_id(i) + "," + split_of[i] + "\n";
  }
  write_file_atomic(out_dir / kLabelsFile, labels_csv);
  write_file_atomic(out_dir / kSplitsFile, splits_csv);
  write_manifest(out_dir / "manifest.json", "generate", cfg, {},
                 {kImagesDir, kLabelsFile, kSplitsFile});
}

void featurize(const fs::path& images_dir, const RunConfig& cfg,
               const fs::path& out_dir, bool with_pairs) {
  if (!fs::is_directory(images_dir)) {
    throw InvalidInput("featurize: " + images_dir.string() +
                       " is not a directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(images_dir)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".pgm" || ext == ".csv")) {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) {
    throw InvalidInput("featurize: no .pgm or .csv images in " +
                       images_dir.string());
  }
  std::sort(files.begin(), files.end());

  std::vector<std::string> ids(files.size());
  std::vector<std::vector<double>> rows(files.size());
  std::vector<std::vector<double>> augmented(files.size());
  parallel_for(files.size(), [&](std::size_t i) {
    ids[i] = files[i].stem().string();
    const GrayscaleImage img = load_image(files[i]);
    rows[i] = featurize(img, cfg.thresholds).concatenated();
    if (with_pairs) {
      const GrayscaleImage aug =
          augment(img, cfg.training.augment_spec, mix_seed(cfg.seed, i));
      augmented[i] = cbdc::featurize(aug, cfg.thresholds).concatenated();
    }
  });

  fs::create_directories(out_dir);
  write_file_atomic(out_dir / kFeaturesFile,
                    features_csv(ids, rows, cfg.thresholds));
  std::vector<std::string> outputs = {kFeaturesFile};
  if (with_pairs) {
    write_file_atomic(out_dir / kPairsFile,
                      features_csv(ids, augmented, cfg.thresholds));
    outputs.emplace_back(kPairsFile);
  }
  write_manifest(out_dir / "featurize.manifest.json", "featurize", cfg,
                 {{"images", images_dir}}, outputs);
}

void train(const fs::path& features, const std::optional<fs::path>& pairs,
           const fs::path& data_dir, const RunConfig& cfg,
           const fs::path& out_dir) {
  const Dataset ds = load_dataset(data_dir, true);
  const FeatureTable table = load_features(features, "features");
  const std::vector<FeatureRecord> records =
      records_for_split(table, ds, "train", nullptr);

  std::vector<ConsistencyPair> consistency;
  if (pairs) {
    const FeatureTable aug = load_features(*pairs, "augmented features");
    for (std::size_t i = 0; i < table.ids.size(); ++i) {
      const auto s = ds.splits.find(table.ids[i]);
      if (s == ds.splits.end() || s->second != "train") continue;
      const auto it = aug.index.find(table.ids[i]);
      if (it == aug.index.end()) continue;
      consistency.push_back({table.rows[i], aug.rows[it->second]});
    }
  }

  const TrainingResult result =
      cbdc::train(records, consistency, cfg.training, ds.n_classes);
  if (!result.model.normalizer.dropped.empty()) {
    std::cerr << "warning: dropped " << result.model.normalizer.dropped.size()
              << " zero-variance feature(s)\n";
  }

  fs::create_directories(out_dir);
  write_json(out_dir / kModelFile, model_json(result.model));
  std::string trace = "member,epoch,loss,distance_to_final\n";
  for (std::size_t m = 0; m < result.traces.size(); ++m) {
    const DescentTrace& t = result.traces[m];
    for (std::size_t e = 0; e < t.loss.size(); ++e) {
      trace += std::to_string(m) + "," + std::to_string(e + 1) + "," +
               format_double(t.loss[e]) + "," +
               format_double(t.distance_to_final[e]) + "\n";
    }
  }
  write_file_atomic(out_dir / kTraceFile, trace);
  write_json(out_dir / kDivergenceFile, divergence_report(result.model, records));

  std::vector<std::pair<std::string, fs::path>> inputs = {
      {"features", features}, {"labels", data_dir / kLabelsFile},
      {"splits", data_dir / kSplitsFile}};
  if (pairs) inputs.emplace_back("pairs", *pairs);
  write_manifest(out_dir / "train.manifest.json", "train", cfg, inputs,
                 {kModelFile, kTraceFile, kDivergenceFile});
}

void calibrate(const fs::path& model_path, const fs::path& features,
               const fs::path& data_dir, const RunConfig& cfg,
               const fs::path& out_dir) {
  const EnsembleModel model = model_from_json(read_json(model_path, "model"));
  const Dataset ds = load_dataset(data_dir, true);
  const FeatureTable table = load_features(features, "features");
  const std::vector<FeatureRecord> cal_set =
      records_for_split(table, ds, "cal", nullptr);

  std::vector<double> scores;
  scores.reserve(cal_set.size());
  for (const FeatureRecord& r : cal_set) {
    scores.push_back(conformity_score(predict_posterior(model, r), *r.label));
  }
  const ConformalCalibrator cal = cbdc::calibrate(std::move(scores), cfg.alpha);
  Json j = calibration_json(cal);
  j["seed"] = cfg.seed;
  fs::create_directories(out_dir);
  write_json(out_dir / kCalibrationFile, j);
  write_manifest(out_dir / "calibrate.manifest.json", "calibrate", cfg,
                 {{"model", model_path}, {"features", features}},
                 {kCalibrationFile});
}

void predict(const fs::path& model_path, const fs::path& calibration,
             const fs::path& features, const fs::path& data_dir,
             const RunConfig& cfg, const fs::path& out_dir) {
  const EnsembleModel model = model_from_json(read_json(model_path, "model"));
  const ConformalCalibrator cal =
      calibration_from_json(read_json(calibration, "calibration"));
  const Dataset ds = load_dataset(data_dir, true);
  const FeatureTable table = load_features(features, "features");
  std::vector<std::string> ids;
  const std::vector<FeatureRecord> test_set =
      records_for_split(table, ds, "test", &ids);
  const std::vector<FeatureRecord> train_set =
      records_for_split(table, ds, "train", nullptr);

  std::string csv = "sample_id,argmax_label,set_members,set_size,max_prob";
  for (int k = 0; k < model.n_classes; ++k) csv += ",prob_" + std::to_string(k);
  csv += "\n";
  for (std::size_t i = 0; i < test_set.size(); ++i) {
    const PosteriorPredictive p = predict_posterior(model, test_set[i]);
    const PredictionSet set = prediction_set(p, cal);
    std::string members;
    for (std::size_t s = 0; s < set.labels.size(); ++s) {
      if (s > 0) members += ";";
      members += std::to_string(set.labels[s]);
    }
    csv += ids[i] + "," + std::to_string(p.argmax()) + "," + members + "," +
           std::to_string(set.size()) + "," + format_double(p.max_prob());
    for (double prob : p.probs) csv += "," + format_double(prob);
    csv += "\n";
  }

  const GeneralizationReport gen = generalization_gap_report(
      model, train_set, test_set, model.config, cfg.delta);
  Json gj = generalization_json(gen);
  gj["format_version"] = kFormatVersion;
  gj["seed"] = cfg.seed;

  fs::create_directories(out_dir);
  write_file_atomic(out_dir / kPredictionsFile, csv);
  write_json(out_dir / kGeneralizationFile, gj);
  Json manifest;
  manifest["format_version"] = kFormatVersion;
  manifest["command"] = "predict";
  manifest["seed"] = cfg.seed;
  manifest["config"] = run_config_json(cfg);
  manifest["alpha"] = cal.alpha();
  manifest["q"] = cal.threshold();
  manifest["scores_digest"] = cal.scores_digest();
  manifest["n_classes"] = model.n_classes;
  manifest["outputs"] = {kPredictionsFile, kGeneralizationFile};
  write_json(out_dir / kPredictManifest, manifest);
}

Json evaluate(const fs::path& predictions, const fs::path& calibration,
              const fs::path& data_dir, const RunConfig& cfg, SetMode mode,
              const fs::path& out_dir, bool csv) {
  const Json cal_json = read_json(calibration, "calibration");
  const ConformalCalibrator cal = calibration_from_json(cal_json);
  const Json manifest =
      read_json(predictions.parent_path() / kPredictManifest, "predict manifest");
  check_format_version(manifest, "predict manifest");
  if (!manifest.contains("scores_digest") ||
      manifest.at("scores_digest") != cal.scores_digest()) {
    throw PipelineStateError(
        "evaluate: predictions were produced with a different calibration");
  }
  const Dataset ds = load_dataset(data_dir, false);
  const CsvTable table = read_csv(predictions, "predictions");
  const std::vector<std::string> fixed = {"sample_id", "argmax_label",
                                          "set_members", "set_size", "max_prob"};
  if (table.header.size() < fixed.size() + 2 ||
      !std::equal(fixed.begin(), fixed.end(), table.header.begin())) {
    throw InvalidInput(predictions.string() + ": unexpected header");
  }
  const std::size_t k = table.header.size() - fixed.size();

  std::vector<PosteriorPredictive> posts;
  std::vector<PredictionSet> conformal_sets;
  std::vector<PredictionSet> argmax_sets;
  std::vector<int> labels;
  for (const auto& row : table.rows) {
    const auto y = ds.labels.find(row[0]);
    if (y == ds.labels.end()) {
      throw InvalidInput("evaluate: sample '" + row[0] + "' has no label");
    }
    if (y->second >= static_cast<int>(k)) {
      throw InvalidInput("evaluate: label out of range for " + row[0]);
    }
    PosteriorPredictive p;
    for (std::size_t c = 0; c < k; ++c) {
      p.probs.push_back(parse_double(row[fixed.size() + c], predictions));
    }
    PredictionSet set;
    set.alpha = cal.alpha();
    for (double prob : p.probs) set.scores.push_back(1.0 - prob);
    if (!row[2].empty()) {
      for (const auto& m : split_line(row[2], ';')) {
        const int label = parse_int(m, predictions);
        if (label < 0 || label >= static_cast<int>(k)) {
          throw InvalidInput(predictions.string() + ": set member out of range");
        }
        set.labels.push_back(label);
      }
    }
    std::sort(set.labels.begin(), set.labels.end());
    argmax_sets.push_back(argmax_set(p));
    conformal_sets.push_back(std::move(set));
    posts.push_back(std::move(p));
    labels.push_back(y->second);
  }
  if (posts.empty()) throw InvalidInput("evaluate: no predictions");

  const auto& sets = mode == SetMode::kConformal ? conformal_sets : argmax_sets;
  const EvaluationReport report = cbdc::evaluate(posts, sets, labels, cfg.bins);

  Json j;
  j["format_version"] = kFormatVersion;
  j["seed"] = cfg.seed;
  j["alpha"] = cal.alpha();
  j["q"] = cal.threshold();
  j["set_mode"] = mode == SetMode::kConformal ? "conformal" : "argmax";
  const Json metrics = report_json(report);
  for (const auto& [key, value] : metrics.items()) j[key] = value;
  j["coverage_conformal_sets"] = coverage(conformal_sets, labels);
  j["coverage_argmax_sets"] = coverage(argmax_sets, labels);

  fs::create_directories(out_dir);
  if (csv) {
    std::string out = "metric,value\n";
    for (const auto& [key, value] : j.items()) {
      if (value.is_number()) out += key + "," + format_double(value.get<double>()) + "\n";
    }
    write_file_atomic(out_dir / "report.csv", out);
  } else {
    write_json(out_dir / kReportFile, j);
  }
  write_manifest(out_dir / "evaluate.manifest.json", "evaluate", cfg,
                 {{"predictions", predictions}, {"calibration", calibration},
                  {"labels", data_dir / kLabelsFile}},
                 {csv ? "report.csv" : kReportFile});
  return j;
}

Json run_all(const RunConfig& cfg, const fs::path& out_dir) {
  const fs::path data = out_dir / "data";
  generate(cfg, data);
  featurize(data / kImagesDir, cfg, out_dir, true);
  train(out_dir / kFeaturesFile, out_dir / kPairsFile, data, cfg, out_dir);
  calibrate(out_dir / kModelFile, out_dir / kFeaturesFile, data, cfg, out_dir);
  predict(out_dir / kModelFile, out_dir / kCalibrationFile,
          out_dir / kFeaturesFile, data, cfg, out_dir);
  return evaluate(out_dir / kPredictionsFile, out_dir / kCalibrationFile, data,
                  cfg, SetMode::kConformal, out_dir);
}

}  // namespace cbdc::stage
