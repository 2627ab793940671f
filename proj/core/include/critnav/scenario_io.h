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

#ifndef CRITNAV_SCENARIO_IO_H_
#define CRITNAV_SCENARIO_IO_H_

#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "critnav/geometry.h"

namespace critnav {

inline constexpr int kScenarioFormatVersion = 1;
inline constexpr std::string_view kScenarioExtension = ".scene.json";

// Scenario files (`*.scene.json`, format_version 1):
//
// {
//   "format_version": 1,
//   "id": "fig2-0001",
//   "frame_period": 0.5,
//   "ego_footprint": {"length": 4.5, "width": 1.9},
//   "frames": [{
//     "timestamp": 0.0,
//     "ego": {"x": 0, "y": 0, "yaw": 0, "vx": 8, "vy": 0},
//     "ground_truth": [{"x": .., "y": .., "yaw": .., "length": .., "width": ..,
//                       "vx": .., "vy": .., "class": "bus", "track_id": 0}],
//     "detections": [{ same fields without track_id, plus "confidence" }]
//   }]
// }
//
// `track_id` is optional and defaults to the box's list index. Unknown keys
// are rejected.

// Parses and validates scenario JSON. `source` names the input in errors.
// Malformed JSON yields an error with line and column; schema violations
// name the offending field path.
absl::StatusOr<Scenario> ParseScenario(std::string_view text,
                                       std::string_view source = "<memory>");

absl::StatusOr<Scenario> LoadScenario(const std::string& path);

// Checks every invariant of the in-memory model (the same rules the loader
// applies to files).
absl::Status ValidateScenario(const Scenario& scenario);

// Deterministic serialization; ParseScenario accepts everything it emits.
std::string SerializeScenario(const Scenario& scenario);

absl::Status SaveScenario(const Scenario& scenario, const std::string& path);

}  // namespace critnav

#endif  // CRITNAV_SCENARIO_IO_H_
