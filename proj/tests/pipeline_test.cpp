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

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"

#include "cbdc/imaging.hpp"
#include "cbdc/pipeline.hpp"
#include "cbdc/serialization.hpp"

namespace cbdc {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           ("cbdc_cli_" + std::to_string(::getpid()) + "_" + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Runs the CLI; returns its exit status and keeps stderr in last_error_.
  int run(const std::string& args) {
    const fs::path err = dir_ / "stderr.txt";
    const std::string cmd = std::string(CBDC_CLI_PATH) + " " + args + " >" +
                            (dir_ / "stdout.txt").string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    last_error_ = read_file(err);
    last_output_ = read_file(dir_ / "stdout.txt");
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  fs::path config(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
  std::string last_error_;
  std::string last_output_;
};

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  return out;
}

// Column value by header name in a one-row-per-id CSV.
std::string cell(const std::string& csv, std::size_t row, const std::string& column) {
  const auto ls = lines(csv);
  const auto header = split_csv(ls.at(0));
  const auto values = split_csv(ls.at(row + 1));
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == column) return values.at(i);
  }
  return "";
}

TEST_F(CliTest, GenerateCountContract) {
  const fs::path cfg = config("c.cfg", "n_samples=10\n");
  ASSERT_EQ(run("generate --config " + cfg.string() + " --out " + (dir_ / "d").string()), 0)
      << last_error_;
  std::size_t pgm = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "d" / "images")) {
    pgm += e.path().extension() == ".pgm";
  }
  EXPECT_EQ(pgm, 10u);
  const auto rows = lines(read_file(dir_ / "d" / "labels.csv"));
  EXPECT_EQ(rows.size(), 11u);
  EXPECT_EQ(rows[0], "id,label");
  EXPECT_TRUE(fs::exists(dir_ / "d" / "manifest.json"));
}

TEST_F(CliTest, GenerateIsByteIdentical) {
  const fs::path cfg = config("c.cfg", "n_samples=20\nseed=5\n");
  ASSERT_EQ(run("generate --config " + cfg.string() + " --out " + (dir_ / "a").string()), 0);
  ASSERT_EQ(run("generate --config " + cfg.string() + " --out " + (dir_ / "b").string()), 0);
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir_ / "a")) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), dir_ / "a");
    EXPECT_EQ(read_file(e.path()), read_file(dir_ / "b" / rel)) << rel;
    ++files;
  }
  EXPECT_EQ(files, 23u);
}

TEST_F(CliTest, GenerateRejectsSmallSide) {
  const fs::path cfg = config("c.cfg", "image_side=4\n");
  EXPECT_EQ(run("generate --config " + cfg.string() + " --out " + (dir_ / "d").string()), 2);
  EXPECT_NE(last_error_.find(">= 8"), std::string::npos) << last_error_;
}

TEST_F(CliTest, GenerateIntoUnwritablePath) {
  std::ofstream(dir_ / "file") << "x";
  EXPECT_EQ(run("generate --out " + (dir_ / "file" / "sub").string()), 2);
  EXPECT_FALSE(last_error_.empty());
}

TEST_F(CliTest, UnknownConfigKeyIsInputError) {
  const fs::path cfg = config("c.cfg", "n_sample=10\n");
  EXPECT_EQ(run("generate --config " + cfg.string() + " --out " + (dir_ / "d").string()), 2);
  EXPECT_NE(last_error_.find("n_sample"), std::string::npos) << last_error_;
}

TEST_F(CliTest, FeaturizeConstantAndRingImages) {
  fs::create_directories(dir_ / "img");
  std::ofstream(dir_ / "img" / "a_constant.pgm") << to_pgm(GrayscaleImage::constant(12, 12, 0.6));
  SyntheticConfig sc;
  sc.n_samples = 2;
  sc.noise_sigma = 0.0;
  for (const LabeledImage& s : generate_synthetic(sc)) {
    if (s.label == 1) std::ofstream(dir_ / "img" / "b_ring.pgm") << to_pgm(s.image);
  }
  ASSERT_EQ(run("featurize --images " + (dir_ / "img").string() + " --out " + (dir_ / "f").string()),
            0)
      << last_error_;
  const std::string csv = read_file(dir_ / "f" / "features.csv");
  EXPECT_EQ(cell(csv, 0, "id"), "a_constant");
  EXPECT_EQ(std::stod(cell(csv, 0, "h0_count")), 1.0);
  EXPECT_EQ(std::stod(cell(csv, 0, "h1_count")), 0.0);
  EXPECT_EQ(cell(csv, 1, "id"), "b_ring");
  EXPECT_GE(std::stod(cell(csv, 1, "h1_count")), 1.0);
  EXPECT_GE(std::stod(cell(csv, 1, "h1_max_pers")), 0.3);
  const auto header = split_csv(lines(csv)[0]);
  EXPECT_EQ(header.size(), 1u + 8u + 2u * 10u + 4u);
  EXPECT_EQ(header[1], "h0_count");
  EXPECT_EQ(header.back(), "max");
}

TEST_F(CliTest, FeaturizeEmptyOrCorruptInput) {
  fs::create_directories(dir_ / "empty");
  EXPECT_EQ(run("featurize --images " + (dir_ / "empty").string() + " --out " + (dir_ / "f").string()),
            2);
  fs::create_directories(dir_ / "bad");
  std::ofstream(dir_ / "bad" / "ok.pgm") << to_pgm(GrayscaleImage::constant(3, 3, 0.2));
  std::ofstream(dir_ / "bad" / "broken.pgm") << "P2\n3 3\n255\n1 2 3\n";
  EXPECT_EQ(run("featurize --images " + (dir_ / "bad").string() + " --out " + (dir_ / "f").string()),
            2);
  EXPECT_NE(last_error_.find("broken.pgm"), std::string::npos) << last_error_;
  EXPECT_EQ(run("featurize --images " + (dir_ / "missing").string() + " --out " + (dir_ / "f").string()),
            2);
}

TEST_F(CliTest, BottleneckUtility) {
  std::ofstream(dir_ / "a.json") << "{\"dim0\": [[0, \"inf\"]], \"dim1\": [[0.2, 0.8]]}";
  std::ofstream(dir_ / "b.json") << "{\"dim0\": [[0, \"inf\"]], \"dim1\": [[0.25, 0.75]]}";
  ASSERT_EQ(run("bottleneck --a " + (dir_ / "a.json").string() + " --b " + (dir_ / "b.json").string() +
                " --dim 1"),
            0)
      << last_error_;
  const Json j = Json::parse(last_output_);
  EXPECT_NEAR(j["distance"].get<double>(), 0.05, 1e-15);
}

TEST_F(CliTest, SimulateCoverage) {
  ASSERT_EQ(run("simulate-coverage --n-cal 99 --n-test 100 --trials 200 --alpha 0.1 --seed 3"), 0);
  const Json j = Json::parse(last_output_);
  EXPECT_NEAR(j["mean"].get<double>(), 0.9, 0.02);
  EXPECT_EQ(j["format_version"], kFormatVersion);
  EXPECT_EQ(j["seed"], 3);
}

class ChainTest : public CliTest {
 protected:
  std::string common() const { return "--config " + (dir_ / "run.cfg").string(); }
  fs::path data() const { return dir_ / "data"; }
  fs::path work() const { return dir_ / "work"; }

  void chain(const std::string& cfg_text) {
    config("run.cfg", cfg_text);
    ASSERT_EQ(run("generate " + common() + " --out " + data().string()), 0) << last_error_;
    ASSERT_EQ(run("featurize " + common() + " --images " + (data() / "images").string() +
                  " --out " + work().string()),
              0)
        << last_error_;
    ASSERT_EQ(run("train " + common() + " --features " + (work() / "features.csv").string() +
                  " --pairs " + (work() / "features_aug.csv").string() + " --data " +
                  data().string() + " --out " + work().string()),
              0)
        << last_error_;
    ASSERT_EQ(run("calibrate " + common() + " --model " + (work() / "model.json").string() +
                  " --features " + (work() / "features.csv").string() + " --data " +
                  data().string() + " --out " + work().string()),
              0)
        << last_error_;
    ASSERT_EQ(run(predict_args()), 0) << last_error_;
  }

  std::string predict_args() const {
    return "predict " + common() + " --model " + (work() / "model.json").string() +
           " --calibration " + (work() / "calibration.json").string() + " --features " +
           (work() / "features.csv").string() + " --data " + data().string() + " --out " +
           work().string();
  }

  std::string evaluate_args(const std::string& sets, const std::string& out) const {
    return "evaluate " + common() + " --predictions " + (work() / "predictions.csv").string() +
           " --calibration " + (work() / "calibration.json").string() + " --data " +
           data().string() + " --sets " + sets + " --out " + (dir_ / out).string();
  }
};

TEST_F(ChainTest, FullChainCoverage) {
  chain("n_samples=400\nalpha=0.1\n");
  ASSERT_EQ(run(evaluate_args("conformal", "eval")), 0) << last_error_;
  const Json report = Json::parse(read_file(dir_ / "eval" / "report.json"));
  const double cov = report["conformal_coverage"].get<double>();
  EXPECT_GE(cov, 0.85);
  EXPECT_LE(cov, 0.97);
  EXPECT_GE(report["accuracy"].get<double>(), 0.9);
  const Json t1 = report["table1_schema"];
  std::vector<std::string> keys;
  for (const auto& [k, v] : t1.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"ACC", "AUC", "ECE", "BS", "CC", "F1"}));

  const std::string preds = read_file(work() / "predictions.csv");
  EXPECT_EQ(lines(preds)[0].rfind("sample_id,argmax_label,set_members,set_size,max_prob", 0), 0u);
  EXPECT_EQ(lines(preds).size(), 101u);

  // Every JSON artifact carries the format version and the seed.
  for (const fs::path& root : {data(), work(), dir_ / "eval"}) {
    for (const auto& e : fs::directory_iterator(root)) {
      if (e.path().extension() != ".json") continue;
      const Json j = Json::parse(read_file(e.path()));
      EXPECT_EQ(j.value("format_version", -1), kFormatVersion) << e.path();
      EXPECT_TRUE(j.contains("seed")) << e.path();
    }
  }
}

TEST_F(ChainTest, ConformalCoversAtLeastArgmaxOnHardCorpus) {
  chain("image_side=8\nnoise_sigma=0.5\nalpha=0.05\n");
  ASSERT_EQ(run(evaluate_args("conformal", "conf")), 0) << last_error_;
  ASSERT_EQ(run(evaluate_args("argmax", "top")), 0) << last_error_;
  const Json conf = Json::parse(read_file(dir_ / "conf" / "report.json"));
  const Json top = Json::parse(read_file(dir_ / "top" / "report.json"));
  EXPECT_GE(conf["conformal_coverage"].get<double>(), top["conformal_coverage"].get<double>());
  EXPECT_EQ(top["mean_set_size"].get<double>(), 1.0);
}

TEST_F(ChainTest, IdenticalRunsAreByteIdentical) {
  chain("n_samples=60\nepochs=50\n");
  const fs::path first = dir_ / "first";
  fs::rename(work(), first);
  fs::remove_all(data());
  chain("n_samples=60\nepochs=50\n");
  for (const auto& e : fs::directory_iterator(first)) {
    EXPECT_EQ(read_file(e.path()), read_file(work() / e.path().filename())) << e.path();
  }
}

TEST_F(ChainTest, MissingOrMismatchedArtifacts) {
  chain("n_samples=60\nepochs=20\n");
  // Missing model before predict.
  fs::rename(work() / "model.json", work() / "model.bak");
  EXPECT_EQ(run(predict_args()), 3) << last_error_;
  fs::rename(work() / "model.bak", work() / "model.json");

  // Version mismatch.
  Json model = Json::parse(read_file(work() / "model.json"));
  model["format_version"] = kFormatVersion + 1;
  write_file_atomic(work() / "model.json", model.dump());
  EXPECT_EQ(run(predict_args()), 3) << last_error_;

  // Schema violation.
  model["format_version"] = kFormatVersion;
  model.erase("members");
  write_file_atomic(work() / "model.json", model.dump());
  EXPECT_EQ(run(predict_args()), 2) << last_error_;

  // Predictions from a different calibration are refused.
  Json cal = Json::parse(read_file(work() / "calibration.json"));
  cal["scores_digest"] = std::string(64, '0');
  write_file_atomic(work() / "calibration.json", cal.dump());
  EXPECT_EQ(run(evaluate_args("conformal", "eval")), 3) << last_error_;
}

TEST_F(CliTest, PipelineSubcommandWritesReport) {
  const fs::path cfg = config("c.cfg", "n_samples=80\nepochs=40\n");
  ASSERT_EQ(run("pipeline --config " + cfg.string() + " --out " + (dir_ / "run").string()), 0)
      << last_error_;
  const Json report = Json::parse(read_file(dir_ / "run" / "report.json"));
  EXPECT_TRUE(report.contains("table1_schema"));
  EXPECT_TRUE(fs::exists(dir_ / "run" / "trace.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "run" / "divergence.json"));
  EXPECT_TRUE(fs::exists(dir_ / "run" / "generalization.json"));
}

}  // namespace
}  // namespace cbdc
