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

// cbdc: batch driver for the synthetic dermatology pipeline.
//
//   cbdc generate --config run.cfg --out data/
//   cbdc featurize --images data/images --out work/
//   cbdc train --features work/features.csv --pairs work/features_aug.csv \
//              --data data/ --out work/
//   cbdc calibrate --model work/model.json --features work/features.csv \
//                  --data data/ --out work/
//   cbdc predict --model work/model.json --calibration work/calibration.json \
//                --features work/features.csv --data data/ --out work/
//   cbdc evaluate --predictions work/predictions.csv \
//                 --calibration work/calibration.json --data data/ --out work/
//   cbdc pipeline --config run.cfg --out run/
//
// Exit codes: 0 success, 2 input/validation error, 3 pipeline-state error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "cbdc/conformal.hpp"
#include "cbdc/errors.hpp"
#include "cbdc/pipeline.hpp"
#include "cbdc/topology.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitState = 3;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha;
  std::optional<int> bins;
  std::optional<int> thresholds;
  std::string out = ".";
  std::string format = "json";
};

void add_common(CLI::App* cmd, CommonFlags& f, bool needs_out = true) {
  cmd->add_option("--config", f.config, "key=value or JSON run config");
  cmd->add_option("--seed", f.seed, "master seed (u64)");
  cmd->add_option("--alpha", f.alpha, "miscoverage level in (0, 1)");
  cmd->add_option("--bins", f.bins, "ECE bin count");
  cmd->add_option("--thresholds", f.thresholds, "Betti curve samples T");
  if (needs_out) cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--format", f.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
}

cbdc::RunConfig resolve(const CommonFlags& f) {
  cbdc::RunConfig cfg =
      f.config.empty() ? cbdc::RunConfig{} : cbdc::load_run_config(f.config);
  if (f.seed) cfg.seed = *f.seed;
  if (f.alpha) cfg.alpha = *f.alpha;
  if (f.bins) cfg.bins = *f.bins;
  if (f.thresholds) cfg.thresholds = *f.thresholds;
  cfg.resolve();
  return cfg;
}

cbdc::PersistenceDiagram load_diagram(const fs::path& path) {
  const auto ext = path.extension();
  if (ext == ".pgm" || ext == ".csv") {
    return cbdc::compute_persistence(cbdc::load_image(path));
  }
  return cbdc::diagram_from_json(cbdc::read_file(path));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topological features, conformal prediction and calibration "
               "metrics for synthetic lesion images"};
  app.require_subcommand(1);
  CommonFlags flags;

  auto* gen = app.add_subcommand("generate", "write a synthetic dataset");
  add_common(gen, flags);

  std::string images;
  bool no_pairs = false;
  auto* feat = app.add_subcommand("featurize", "persistence features per image");
  add_common(feat, flags);
  feat->add_option("--images", images, "directory of .pgm/.csv images")
      ->required();
  feat->add_flag("--no-pairs", no_pairs, "skip augmented consistency features");

  std::string features, pairs, data, model, calibration, predictions;
  auto* trn = app.add_subcommand("train", "fit the ensemble classifier");
  add_common(trn, flags);
  trn->add_option("--features", features)->required();
  trn->add_option("--pairs", pairs, "augmented features for the consistency term");
  trn->add_option("--data", data, "dataset directory (labels.csv, splits.csv)")
      ->required();

  auto* cal = app.add_subcommand("calibrate", "split-conformal threshold");
  add_common(cal, flags);
  cal->add_option("--model", model)->required();
  cal->add_option("--features", features)->required();
  cal->add_option("--data", data)->required();

  auto* pred = app.add_subcommand("predict", "posteriors and prediction sets");
  add_common(pred, flags);
  pred->add_option("--model", model)->required();
  pred->add_option("--calibration", calibration)->required();
  pred->add_option("--features", features)->required();
  pred->add_option("--data", data)->required();

  std::string sets = "conformal";
  auto* eval = app.add_subcommand("evaluate", "metrics report");
  add_common(eval, flags);
  eval->add_option("--predictions", predictions)->required();
  eval->add_option("--calibration", calibration)->required();
  eval->add_option("--data", data)->required();
  eval->add_option("--sets", sets, "conformal or argmax")
      ->check(CLI::IsMember({"conformal", "argmax"}));

  auto* pipe = app.add_subcommand("pipeline", "generate through evaluate");
  add_common(pipe, flags);

  std::string diagram_a, diagram_b;
  int dim = 0;
  auto* bn = app.add_subcommand("bottleneck",
                                "bottleneck distance between two diagrams");
  add_common(bn, flags, false);
  bn->add_option("--a", diagram_a, "diagram JSON or image")->required();
  bn->add_option("--b", diagram_b, "diagram JSON or image")->required();
  bn->add_option("--dim", dim)->check(CLI::IsMember({0, 1}));

  std::size_t n_cal = 99, n_test = 100, trials = 1000;
  int classes = 2;
  auto* sim = app.add_subcommand("simulate-coverage",
                                 "coverage of split conformal on uniform scores");
  add_common(sim, flags, false);
  sim->add_option("--n-cal", n_cal)->check(CLI::PositiveNumber);
  sim->add_option("--n-test", n_test)->check(CLI::PositiveNumber);
  sim->add_option("--trials", trials)->check(CLI::PositiveNumber);
  sim->add_option("--classes", classes)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    const cbdc::RunConfig cfg = resolve(flags);
    const fs::path out = flags.out;
    const bool csv = flags.format == "csv";

    if (gen->parsed()) {
      cbdc::stage::generate(cfg, out);
    } else if (feat->parsed()) {
      cbdc::stage::featurize(images, cfg, out, !no_pairs);
    } else if (trn->parsed()) {
      std::optional<fs::path> pair_path;
      if (!pairs.empty()) pair_path = pairs;
      cbdc::stage::train(features, pair_path, data, cfg, out);
    } else if (cal->parsed()) {
      cbdc::stage::calibrate(model, features, data, cfg, out);
    } else if (pred->parsed()) {
      cbdc::stage::predict(model, calibration, features, data, cfg, out);
    } else if (eval->parsed()) {
      const auto mode = sets == "argmax" ? cbdc::stage::SetMode::kArgmax
                                         : cbdc::stage::SetMode::kConformal;
      const cbdc::Json report = cbdc::stage::evaluate(predictions, calibration,
                                                      data, cfg, mode, out, csv);
      std::cout << "accuracy=" << report["accuracy"]
                << " coverage=" << report["conformal_coverage"]
                << " mean_set_size=" << report["mean_set_size"] << '\n';
    } else if (pipe->parsed()) {
      const cbdc::Json report = cbdc::stage::run_all(cfg, out);
      std::cout << report["table1_schema"].dump() << '\n';
    } else if (bn->parsed()) {
      const double d = cbdc::bottleneck_distance(load_diagram(diagram_a),
                                                 load_diagram(diagram_b), dim);
      if (csv) {
        std::cout << "dim,distance\n" << dim << ',' << cbdc::format_double(d) << '\n';
      } else {
        cbdc::Json j;
        j["dim"] = dim;
        j["distance"] = std::isinf(d) ? cbdc::Json("inf") : cbdc::Json(d);
        std::cout << j.dump() << '\n';
      }
    } else if (sim->parsed()) {
      const cbdc::CoverageStats stats = cbdc::simulate_coverage(
          n_cal, n_test, cfg.alpha, trials, cfg.seed,
          cbdc::uniform_score_generator(classes));
      if (csv) {
        std::cout << "trial,coverage\n";
        for (std::size_t t = 0; t < stats.per_trial.size(); ++t) {
          std::cout << t << ',' << cbdc::format_double(stats.per_trial[t]) << '\n';
        }
      } else {
        cbdc::Json j = cbdc::coverage_json(stats);
        j["format_version"] = cbdc::kFormatVersion;
        j["seed"] = cfg.seed;
        j["alpha"] = cfg.alpha;
        j["n_cal"] = n_cal;
        j["n_test"] = n_test;
        std::cout << j.dump() << '\n';
      }
    }
  } catch (const cbdc::PipelineStateError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitState;
  } catch (const cbdc::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
