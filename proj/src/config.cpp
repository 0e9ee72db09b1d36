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
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "cbdc/errors.hpp"
#include "cbdc/pipeline.hpp"

namespace cbdc {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

Json parse_scalar_or_list(const std::string& raw) {
  const std::string value = trim(raw);
  try {
    return Json::parse(value);
  } catch (const nlohmann::json::exception&) {
  }
  if (value.find(',') != std::string::npos) {
    Json list = Json::array();
    std::istringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) list.push_back(parse_scalar_or_list(item));
    return list;
  }
  return value;
}

// Flat object from either syntax.
Json parse_flat(const std::string& text) {
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    try {
      Json j = Json::parse(body);
      if (!j.is_object()) throw InvalidInput("config: JSON must be an object");
      return j;
    } catch (const nlohmann::json::exception& e) {
      throw InvalidInput(std::string("config: malformed JSON: ") + e.what());
    }
  }
  Json j = Json::object();
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidInput("config: line " + std::to_string(line_no) +
                         " is not key=value");
    }
    j[trim(line.substr(0, eq))] = parse_scalar_or_list(line.substr(eq + 1));
  }
  return j;
}

template <typename T>
T get_value(const Json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidInput("config: key '" + key + "' has the wrong type");
  }
}

std::vector<double> get_list(const Json& j, const std::string& key) {
  const Json& v = j.at(key);
  if (v.is_number()) return {v.get<double>()};
  return get_value<std::vector<double>>(j, key);
}

bool apply_synthetic_key(SyntheticConfig& s, const Json& j,
                         const std::string& key) {
  if (key == "image_side") {
    s.image_side = get_value<int>(j, key);
  } else if (key == "n_samples") {
    s.n_samples = get_value<int>(j, key);
  } else if (key == "class_fractions") {
    s.class_fractions = get_list(j, key);
  } else if (key == "noise_sigma") {
    s.noise_sigma = get_value<double>(j, key);
  } else if (key == "seed") {
    s.seed = get_value<std::uint64_t>(j, key);
  } else {
    return false;
  }
  return true;
}

Json synthetic_json(const SyntheticConfig& s) {
  Json j;
  j["image_side"] = s.image_side;
  j["n_samples"] = s.n_samples;
  j["class_fractions"] = s.class_fractions;
  j["noise_sigma"] = s.noise_sigma;
  j["seed"] = s.seed;
  return j;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string to_key_value(const SyntheticConfig& cfg) {
  std::ostringstream out;
  out << "image_side=" << cfg.image_side << '\n'
      << "n_samples=" << cfg.n_samples << '\n'
      << "class_fractions=";
  for (std::size_t i = 0; i < cfg.class_fractions.size(); ++i) {
    if (i > 0) out << ',';
    out << format_double(cfg.class_fractions[i]);
  }
  out << '\n'
      << "noise_sigma=" << format_double(cfg.noise_sigma) << '\n'
      << "seed=" << cfg.seed << '\n';
  return out.str();
}

std::string to_json(const SyntheticConfig& cfg) {
  return synthetic_json(cfg).dump(2) + "\n";
}

SyntheticConfig synthetic_config_from_text(const std::string& text) {
  const Json j = parse_flat(text);
  SyntheticConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (!apply_synthetic_key(cfg, j, key)) {
      throw InvalidInput("synthetic config: unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

void RunConfig::resolve() {
  synthetic.seed = seed;
  training.seed = seed;
  synthetic.validate();
  training.validate();
  if (thresholds < 2) throw InvalidInput("config: thresholds must be >= 2");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("config: alpha must be in (0, 1)");
  }
  if (bins < 1) throw InvalidInput("config: bins must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidInput("config: delta must be in (0, 1)");
  }
  const double f[3] = {split.train, split.cal, split.test};
  for (double v : f) {
    if (!(v > 0.0)) {
      throw InvalidInput("config: split fractions must all be positive");
    }
  }
}

RunConfig run_config_from_text(const std::string& text) {
  const Json j = parse_flat(text);
  RunConfig cfg;
  TrainingConfig& t = cfg.training;
  for (const auto& [key, value] : j.items()) {
    if (key == "seed") {
      cfg.seed = get_value<std::uint64_t>(j, key);
    } else if (apply_synthetic_key(cfg.synthetic, j, key)) {
    } else if (key == "split_fractions") {
      const auto f = get_list(j, key);
      if (f.size() != 3) {
        throw InvalidInput("config: split_fractions needs train,cal,test");
      }
      cfg.split = {f[0], f[1], f[2]};
    } else if (key == "lambda1") {
      t.lambda1 = get_value<double>(j, key);
    } else if (key == "lambda2") {
      t.lambda2 = get_value<double>(j, key);
    } else if (key == "learning_rate") {
      t.learning_rate = get_value<double>(j, key);
    } else if (key == "epochs") {
      t.epochs = get_value<int>(j, key);
    } else if (key == "ensemble_size") {
      t.ensemble_size = get_value<int>(j, key);
    } else if (key == "lipschitz_L") {
      t.lipschitz_L = get_value<double>(j, key);
    } else if (key == "augment_rotation") {
      t.augment_spec.rotation_quarter_turns = get_value<int>(j, key);
    } else if (key == "augment_flip_h") {
      t.augment_spec.flip_horizontal = get_value<bool>(j, key);
    } else if (key == "augment_flip_v") {
      t.augment_spec.flip_vertical = get_value<bool>(j, key);
    } else if (key == "augment_jitter") {
      t.augment_spec.photometric_jitter_amplitude = get_value<double>(j, key);
    } else if (key == "thresholds") {
      cfg.thresholds = get_value<int>(j, key);
    } else if (key == "alpha") {
      cfg.alpha = get_value<double>(j, key);
    } else if (key == "bins") {
      cfg.bins = get_value<int>(j, key);
    } else if (key == "delta") {
      cfg.delta = get_value<double>(j, key);
    } else if (key == "format_version") {
      check_format_version(j, "config");
    } else {
      throw InvalidInput("config: unknown key '" + key + "'");
    }
  }
  cfg.resolve();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("config: cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return run_config_from_text(buffer.str());
}

Json run_config_json(const RunConfig& cfg) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["seed"] = cfg.seed;
  Json s = synthetic_json(cfg.synthetic);
  s.erase("seed");
  for (auto& [k, v] : s.items()) j[k] = v;
  j["split_fractions"] = {cfg.split.train, cfg.split.cal, cfg.split.test};
  Json t = training_config_json(cfg.training);
  t.erase("seed");
  for (auto& [k, v] : t.items()) j[k] = v;
  j["thresholds"] = cfg.thresholds;
  j["alpha"] = cfg.alpha;
  j["bins"] = cfg.bins;
  j["delta"] = cfg.delta;
  return j;
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out << content;
    out.flush();
    if (!out) throw InvalidInput("write failed for " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw InvalidInput("cannot write " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

unsigned worker_count() {
  if (const char* env = std::getenv("CBDC_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace cbdc
