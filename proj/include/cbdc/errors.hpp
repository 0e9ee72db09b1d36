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

#include <stdexcept>
#include <string>

namespace cbdc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments or malformed input data.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A class has too few samples to be split into train/cal/test.
class StratificationError : public InvalidInput {
 public:
  StratificationError(int label, std::size_t count)
      : InvalidInput("stratification: class " + std::to_string(label) +
                     " has " + std::to_string(count) +
                     " samples, at least 3 are required"),
        label_(label) {}
  int label() const { return label_; }

 private:
  int label_;
};

// A documented precondition on the shape of an argument was violated, e.g.
// a complex whose cells are not in filtration order.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class OptimizationError : public Error {
 public:
  using Error::Error;
};

class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

// Pipeline artifacts are missing or come from an incompatible format version.
class PipelineStateError : public Error {
 public:
  using Error::Error;
};

}  // namespace cbdc
