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

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "cbdc/errors.hpp"
#include "cbdc/imaging.hpp"

namespace cbdc {

namespace {

constexpr int kMaxVal = 255;

// Next whitespace-delimited token, skipping '#' comments to end of line.
bool next_token(std::istream& in, std::string& token) {
  token.clear();
  char c;
  while (in.get(c)) {
    if (c == '#') {
      std::string ignored;
      std::getline(in, ignored);
      if (!token.empty()) return true;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!token.empty()) return true;
      continue;
    }
    token.push_back(c);
  }
  return !token.empty();
}

long parse_integer(const std::string& token, const char* what) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size()) {
    throw InvalidInput(std::string("pgm: malformed ") + what + " '" + token +
                       "'");
  }
  return v;
}

}  // namespace

std::string to_pgm(const GrayscaleImage& img) {
  std::ostringstream out;
  out << "P2\n" << img.width() << ' ' << img.height() << '\n' << kMaxVal << '\n';
  for (std::size_t y = 0; y < img.height(); ++y) {
    for (std::size_t x = 0; x < img.width(); ++x) {
      if (x > 0) out << ' ';
      out << static_cast<int>(std::lround(img.at(x, y) * kMaxVal));
    }
    out << '\n';
  }
  return out.str();
}

GrayscaleImage parse_pgm(const std::string& text) {
  std::istringstream in(text);
  std::string token;
  if (!next_token(in, token) || token != "P2") {
    throw InvalidInput("pgm: missing P2 magic number");
  }
  long header[3];
  const char* names[3] = {"width", "height", "maxval"};
  for (int i = 0; i < 3; ++i) {
    if (!next_token(in, token)) {
      throw InvalidInput(std::string("pgm: missing ") + names[i]);
    }
    header[i] = parse_integer(token, names[i]);
  }
  if (header[0] <= 0 || header[1] <= 0) {
    throw InvalidInput("pgm: width and height must be positive");
  }
  if (header[2] != kMaxVal) {
    throw InvalidInput("pgm: maxval must be 255");
  }
  const auto w = static_cast<std::size_t>(header[0]);
  const auto h = static_cast<std::size_t>(header[1]);
  std::vector<double> values;
  values.reserve(w * h);
  while (next_token(in, token)) {
    const long v = parse_integer(token, "pixel");
    if (v < 0 || v > kMaxVal) {
      throw InvalidInput("pgm: pixel value out of range");
    }
    values.push_back(static_cast<double>(v) / kMaxVal);
  }
  if (values.size() != w * h) {
    throw InvalidInput("pgm: expected " + std::to_string(w * h) +
                       " pixels, found " + std::to_string(values.size()));
  }
  return GrayscaleImage(w, h, std::move(values));
}

GrayscaleImage parse_csv_grid(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> values;
  std::size_t width = 0;
  std::size_t height = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream row(line);
    std::string cell;
    std::size_t count = 0;
    while (std::getline(row, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw InvalidInput("csv grid: malformed value '" + cell + "'");
      }
      if (cell.find_first_not_of(" \t", used) != std::string::npos) {
        throw InvalidInput("csv grid: malformed value '" + cell + "'");
      }
      values.push_back(v);
      ++count;
    }
    if (height == 0) {
      width = count;
    } else if (count != width) {
      throw InvalidInput("csv grid: ragged rows");
    }
    ++height;
  }
  if (height == 0) throw InvalidInput("csv grid: empty");
  return GrayscaleImage(width, height, std::move(values));
}

GrayscaleImage load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read image " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    if (path.extension() == ".csv") return parse_csv_grid(buffer.str());
    return parse_pgm(buffer.str());
  } catch (const InvalidInput& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

}  // namespace cbdc
