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

#include <string>

#include "json.hpp"

#include "cbdc/classifier.hpp"
#include "cbdc/conformal.hpp"
#include "cbdc/manifold.hpp"
#include "cbdc/metrics.hpp"
#include "cbdc/topology.hpp"

namespace cbdc {

// Insertion-ordered so that written files keep a fixed field order.
using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

Json diagram_json(const PersistenceDiagram& diagram);

Json training_config_json(const TrainingConfig& cfg);
TrainingConfig training_config_from_json(const Json& j);

// Model JSON carries format_version; loading a different version throws
// PipelineStateError, a missing or mistyped field throws InvalidInput.
Json model_json(const EnsembleModel& model);
EnsembleModel model_from_json(const Json& j);

Json calibration_json(const ConformalCalibrator& cal);
ConformalCalibrator calibration_from_json(const Json& j);

Json report_json(const EvaluationReport& report);
Json generalization_json(const GeneralizationReport& report);
Json divergence_json(const DivergenceTerms& terms);
Json coverage_json(const CoverageStats& stats);

// Throws PipelineStateError when j["format_version"] differs from
// kFormatVersion, InvalidInput when it is missing.
void check_format_version(const Json& j, const std::string& what);

}  // namespace cbdc
