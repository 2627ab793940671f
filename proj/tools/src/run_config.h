/* Copyright 2026 The critnav Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef CRITNAV_TOOLS_RUN_CONFIG_H_
#define CRITNAV_TOOLS_RUN_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "critnav/criticality.h"
#include "critnav/filtering.h"
#include "critnav/planner.h"
#include "critnav/sweep.h"
#include "critnav/synthesis.h"
#include "json.hpp"

namespace critnav::cli {

inline constexpr int kRunConfigVersion = 1;

struct GenerateOptions {
  std::string preset = "urban";
  int count = 10;
  std::uint64_t seed = 1;
  ScenarioLayout layout;
  NoiseModel noise;
};

struct SweepOptions {
  std::vector<PolicyFamily> families = {PolicyFamily::kConfidenceOnly,
                                        PolicyFamily::kCascade};
  std::vector<double> confidence_grid;
  std::vector<double> criticality_grid;
  std::vector<double> secondary_confidence_grid;
  Objective objective = Objective::kMedianPkl;
  bool staged = false;
  int workers = 1;
};

struct RenderOptions {
  double extent = 40.0;  // meters shown on each side of the ego
  double scale = 10.0;   // pixels per meter
  // Layer name -> enabled. Names: ego, trajectory, ground_truth, kept,
  // dropped, labels.
  std::map<std::string, bool> layers;
  // Layer name -> stroke color.
  std::map<std::string, std::string> colors;
};

struct OutputOptions {
  bool filter_audit = false;
  bool grid_dumps = false;
};

// Fully resolved configuration of one command invocation.
struct RunConfig {
  std::string scenarios_path;
  std::string output_dir;
  double match_radius = kDefaultMatchRadius;
  OcmParams ocm;
  PlannerConfig planner;
  FilterPolicy policy;
  GenerateOptions generate;
  SweepOptions sweep;
  RenderOptions render;
  OutputOptions outputs;
  // The effective configuration as JSON, paths excluded.
  nlohmann::json effective;
  // SHA-256 (hex) of the canonical dump of `effective`.
  std::string hash;
};

// The complete default configuration; every accepted key appears here.
nlohmann::json DefaultConfigJson();

// Applies a `dotted.path=value` override. `value` is parsed as JSON when
// possible, otherwise taken as a string.
absl::Status ApplyOverride(nlohmann::json& config, const std::string& assignment);

// Merges `file_text` (may be empty) and `overrides` over the defaults, then
// validates every section. The generate section's layout and noise start
// from the named preset. Unknown keys are errors.
absl::StatusOr<RunConfig> ResolveRunConfig(
    const std::string& file_text, const std::string& source,
    const std::vector<std::string>& overrides);

std::string Sha256Hex(const std::string& data);

}  // namespace critnav::cli

#endif  // CRITNAV_TOOLS_RUN_CONFIG_H_
