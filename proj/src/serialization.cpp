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

#include <cmath>

#include "cbdc/errors.hpp"
#include "cbdc/serialization.hpp"

namespace cbdc {

namespace {

Json bars_json(const PersistenceDiagram& d, int dim) {
  Json out = Json::array();
  for (const Bar& b : d.sorted().bars) {
    if (b.dim != dim) continue;
    out.push_back(b.essential() ? Json::array({b.birth, "inf"})
                                : Json::array({b.birth, b.death}));
  }
  return out;
}

double death_value(const Json& v) {
  if (v.is_string()) {
    if (v.get<std::string>() != "inf") {
      throw InvalidInput("diagram json: death must be a number or \"inf\"");
    }
    return kInfinity;
  }
  return v.get<double>();
}

Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j, Eigen::Index rows,
                                 Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw InvalidInput("model json: weight matrix has wrong row count");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw InvalidInput("model json: weight matrix has wrong column count");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

// nlohmann type/key errors become schema violations.
template <typename F>
auto with_schema_errors(const char* what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string(what) + ": " + e.what());
  }
}

}  // namespace

void check_format_version(const Json& j, const std::string& what) {
  if (!j.is_object() || !j.contains("format_version")) {
    throw InvalidInput(what + ": missing format_version");
  }
  const Json& v = j.at("format_version");
  if (!v.is_number_integer() || v.get<int>() != kFormatVersion) {
    throw PipelineStateError(what + ": format_version " + v.dump() +
                             " does not match expected " +
                             std::to_string(kFormatVersion));
  }
}

Json diagram_json(const PersistenceDiagram& diagram) {
  Json j;
  j["dim0"] = bars_json(diagram, 0);
  j["dim1"] = bars_json(diagram, 1);
  return j;
}

std::string diagram_to_json(const PersistenceDiagram& diagram) {
  return diagram_json(diagram).dump();
}

PersistenceDiagram diagram_from_json(const std::string& text) {
  return with_schema_errors("diagram json", [&] {
    const Json j = Json::parse(text);
    PersistenceDiagram d;
    for (int dim = 0; dim <= 1; ++dim) {
      const std::string key = "dim" + std::to_string(dim);
      if (!j.contains(key)) continue;
      for (const Json& pair : j.at(key)) {
        if (!pair.is_array() || pair.size() != 2) {
          throw InvalidInput("diagram json: bars must be [birth, death]");
        }
        const Bar bar{pair[0].get<double>(), death_value(pair[1]), dim};
        if (!bar.essential() && !(bar.death > bar.birth)) {
          throw InvalidInput("diagram json: finite bars need death > birth");
        }
        d.bars.push_back(bar);
      }
    }
    return d;
  });
}

Json training_config_json(const TrainingConfig& cfg) {
  Json j;
  j["lambda1"] = cfg.lambda1;
  j["lambda2"] = cfg.lambda2;
  j["learning_rate"] = cfg.learning_rate;
  j["epochs"] = cfg.epochs;
  j["ensemble_size"] = cfg.ensemble_size;
  j["seed"] = cfg.seed;
  j["augment_rotation"] = cfg.augment_spec.rotation_quarter_turns;
  j["augment_flip_h"] = cfg.augment_spec.flip_horizontal;
  j["augment_flip_v"] = cfg.augment_spec.flip_vertical;
  j["augment_jitter"] = cfg.augment_spec.photometric_jitter_amplitude;
  j["lipschitz_L"] = cfg.lipschitz_L;
  return j;
}

TrainingConfig training_config_from_json(const Json& j) {
  return with_schema_errors("training config", [&] {
    TrainingConfig cfg;
    cfg.lambda1 = j.at("lambda1").get<double>();
    cfg.lambda2 = j.at("lambda2").get<double>();
    cfg.learning_rate = j.at("learning_rate").get<double>();
    cfg.epochs = j.at("epochs").get<int>();
    cfg.ensemble_size = j.at("ensemble_size").get<int>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.augment_spec.rotation_quarter_turns = j.at("augment_rotation").get<int>();
    cfg.augment_spec.flip_horizontal = j.at("augment_flip_h").get<bool>();
    cfg.augment_spec.flip_vertical = j.at("augment_flip_v").get<bool>();
    cfg.augment_spec.photometric_jitter_amplitude =
        j.at("augment_jitter").get<double>();
    cfg.lipschitz_L = j.at("lipschitz_L").get<double>();
    return cfg;
  });
}

Json model_json(const EnsembleModel& model) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["seed"] = model.config.seed;
  j["n_classes"] = model.n_classes;
  j["temperature"] = model.temperature;
  j["config"] = training_config_json(model.config);
  const FeatureNormalizer& norm = model.normalizer;
  j["normalization"] = {{"input_dim", norm.input_dim},
                        {"kept_features", norm.kept},
                        {"dropped_features", norm.dropped},
                        {"mean", norm.mean},
                        {"std", norm.stddev}};
  Json members = Json::array();
  for (const WeightMatrix& w : model.members) members.push_back(matrix_json(w));
  j["members"] = std::move(members);
  return j;
}

EnsembleModel model_from_json(const Json& j) {
  check_format_version(j, "model");
  return with_schema_errors("model json", [&] {
    EnsembleModel model;
    model.n_classes = j.at("n_classes").get<int>();
    model.temperature = j.at("temperature").get<double>();
    model.config = training_config_from_json(j.at("config"));
    const Json& norm = j.at("normalization");
    model.normalizer.input_dim = norm.at("input_dim").get<std::size_t>();
    model.normalizer.kept = norm.at("kept_features").get<std::vector<std::size_t>>();
    model.normalizer.dropped =
        norm.at("dropped_features").get<std::vector<std::size_t>>();
    model.normalizer.mean = norm.at("mean").get<std::vector<double>>();
    model.normalizer.stddev = norm.at("std").get<std::vector<double>>();
    const std::size_t kept = model.normalizer.kept.size();
    if (model.normalizer.mean.size() != kept ||
        model.normalizer.stddev.size() != kept) {
      throw InvalidInput("model json: normalization arrays disagree in length");
    }
    for (std::size_t k : model.normalizer.kept) {
      if (k >= model.normalizer.input_dim) {
        throw InvalidInput("model json: kept feature index out of range");
      }
    }
    for (double s : model.normalizer.stddev) {
      if (!(s > 0.0)) throw InvalidInput("model json: non-positive std");
    }
    if (model.n_classes < 2) throw InvalidInput("model json: n_classes < 2");
    if (!(model.temperature > 0.0)) {
      throw InvalidInput("model json: temperature must be > 0");
    }
    for (const Json& m : j.at("members")) {
      WeightMatrix w = matrix_from_json(m, model.n_classes,
                                        static_cast<Eigen::Index>(kept + 1));
      if (!w.allFinite()) throw InvalidInput("model json: non-finite weight");
      model.members.push_back(std::move(w));
    }
    if (model.members.empty()) throw InvalidInput("model json: no members");
    return model;
  });
}

Json calibration_json(const ConformalCalibrator& cal) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["alpha"] = cal.alpha();
  j["q"] = cal.threshold();
  j["n"] = cal.n();
  j["k"] = cal.rank();
  j["scores_digest"] = cal.scores_digest();
  return j;
}

ConformalCalibrator calibration_from_json(const Json& j) {
  check_format_version(j, "calibration");
  return with_schema_errors("calibration json", [&] {
    return ConformalCalibrator::from_threshold(
        j.at("alpha").get<double>(), j.at("q").get<double>(),
        j.at("n").get<std::size_t>(), j.at("scores_digest").get<std::string>());
  });
}

Json report_json(const EvaluationReport& r) {
  Json j;
  j["n"] = r.n;
  j["n_classes"] = r.n_classes;
  j["accuracy"] = r.accuracy;
  j["macro_f1"] = r.macro_f1;
  j["macro_auc_ovr"] = r.macro_auc_ovr;
  j["ece"] = r.ece;
  j["ece_bins"] = r.ece_bins;
  j["brier"] = r.brier;
  j["conformal_coverage"] = r.conformal_coverage;
  j["mean_set_size"] = r.mean_set_size;
  Json per_class = Json::array();
  for (const ClassBreakdown& c : r.per_class) {
    Json cj;
    cj["label"] = c.label;
    cj["support"] = c.support;
    cj["precision"] = c.precision;
    cj["recall"] = c.recall;
    cj["f1"] = c.f1;
    cj["auc"] = c.auc ? Json(*c.auc) : Json(nullptr);
    cj["coverage"] = c.coverage;
    cj["mean_set_size"] = c.mean_set_size;
    per_class.push_back(std::move(cj));
  }
  j["per_class"] = std::move(per_class);
  j["auc_skipped_classes"] = r.auc_skipped;
  Json table;
  table["ACC"] = r.accuracy;
  table["AUC"] = r.macro_auc_ovr;
  table["ECE"] = r.ece;
  table["BS"] = r.brier;
  table["CC"] = r.conformal_coverage;
  table["F1"] = r.macro_f1;
  j["table1_schema"] = std::move(table);
  return j;
}

Json generalization_json(const GeneralizationReport& r) {
  Json j;
  j["n_train"] = r.n_train;
  j["n_test"] = r.n_test;
  j["train_error"] = r.train_error;
  j["test_error"] = r.test_error;
  j["train_cross_entropy"] = r.train_cross_entropy;
  j["test_cross_entropy"] = r.test_cross_entropy;
  j["gap"] = r.gap;
  j["cross_entropy_gap"] = r.cross_entropy_gap;
  j["weight_bound"] = r.weight_bound;
  j["rademacher"] = r.rademacher;
  j["lipschitz"] = r.lipschitz;
  j["delta"] = r.delta;
  j["bound"] = r.bound;
  j["status"] = r.violated ? "VIOLATED" : "ok";
  return j;
}

Json divergence_json(const DivergenceTerms& t) {
  Json j;
  j["d_joint"] = t.total;
  j["mean_term"] = t.mean_term;
  j["trace_term"] = t.trace_term;
  return j;
}

Json coverage_json(const CoverageStats& s) {
  Json j;
  j["mean"] = s.mean;
  j["min"] = s.min;
  j["max"] = s.max;
  j["standard_error"] = s.standard_error;
  j["mean_set_size"] = s.mean_set_size;
  j["per_trial"] = s.per_trial;
  return j;
}

}  // namespace cbdc
