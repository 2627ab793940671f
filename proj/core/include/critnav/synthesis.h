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

#ifndef CRITNAV_SYNTHESIS_H_
#define CRITNAV_SYNTHESIS_H_

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "critnav/geometry.h"

namespace critnav {

// Beta-distributed detection confidence, or a fixed value when `fixed` is
// set (used for noiseless runs).
struct ConfidenceModel {
  double alpha = 2.0;
  double beta = 2.0;
  std::optional<double> fixed;
};

// Detector error model used to synthesize detections from ground truth.
struct NoiseModel {
  double miss_base = 0.05;
  double miss_per_meter = 0.004;  // miss probability grows with distance
  double center_jitter_sigma = 0.3;    // meters
  double size_jitter_sigma = 0.05;     // relative
  double yaw_jitter_sigma = 0.05;      // radians
  double velocity_jitter_sigma = 0.3;  // m/s
  ConfidenceModel tp_confidence{5.0, 2.0, std::nullopt};
  double fp_rate = 1.0;  // expected false positives per frame
  ConfidenceModel fp_confidence{2.0, 5.0, std::nullopt};
  double fp_spawn_radius = 30.0;  // meters around the ego
  // Ghosts closer than this to the ego's heading line are pushed sideways
  // out of that band; 0 leaves the disk uniform.
  double fp_min_lateral = 0.0;
  std::uint64_t seed = 0;

  // Perfect detector: every object reported exactly with confidence 1.
  static NoiseModel Noiseless();
};

absl::Status ValidateNoiseModel(const NoiseModel& noise);

// clamp(miss_base + miss_per_meter * distance, 0, cap) with
// cap = clamp(miss_base, 0.98, 1), so miss_base = 1 misses everything.
double MissProbability(const NoiseModel& noise, double distance);

// Lane of the synthetic road, parallel to the ego's initial heading.
struct LaneSpec {
  double offset = 0.0;  // meters to the left of the ego lane
  int direction = 1;    // +1 with the ego, -1 oncoming, 0 parked
};

enum class ActorKind { kBusOnPath, kLeadVehicle };

// Object placed deterministically relative to the ego's path.
struct ScriptedActor {
  ActorKind kind = ActorKind::kBusOnPath;
  double min_distance = 10.0;  // meters ahead along the ego heading
  double max_distance = 12.0;
  double min_speed = 0.0;  // along the ego heading
  double max_speed = 0.0;
  double lateral_offset = 0.0;
};

struct ScenarioLayout {
  std::string id = "scenario";
  int num_frames = 8;
  double frame_period = 0.5;
  double ego_speed = 8.0;     // m/s
  double ego_yaw_rate = 0.0;  // rad/s, small values give a gentle curve
  Footprint ego_footprint;

  int background_objects = 6;
  double min_longitudinal = -20.0;  // spawn window along the road, meters
  double max_longitudinal = 40.0;
  std::vector<LaneSpec> lanes = {{3.5, -1}, {-3.5, 1}, {7.0, 0}};
  double min_speed = 4.0;  // vehicles in moving lanes
  double max_speed = 10.0;
  double spawn_clearance = 1.0;  // meters kept free around spawned objects

  std::vector<ScriptedActor> actors;
  int max_retries = 200;
};

absl::Status ValidateLayout(const ScenarioLayout& layout);

// Deterministic ground-truth scenario (no detections) from `layout` and
// `seed`. Fails when objects cannot be placed without overlap.
absl::StatusOr<Scenario> GenerateScenario(const ScenarioLayout& layout,
                                          std::uint64_t seed);

// Per-frame random stream derived from (seed, frame index).
std::mt19937_64 FrameRng(std::uint64_t seed, std::uint64_t frame_index);

// Fills every frame's detections from its ground truth. Frame k draws only
// from FrameRng(noise.seed, k).
Scenario SynthesizeDetections(const Scenario& scenario, const NoiseModel& noise);

std::vector<Detection> SynthesizeFrameDetections(const Frame& frame,
                                                 const NoiseModel& noise,
                                                 std::mt19937_64& rng);

struct Preset {
  ScenarioLayout layout;
  NoiseModel noise;
};

// Named layouts: "empty", "urban", "clutter", "fig2".
absl::StatusOr<Preset> GetPreset(const std::string& name);
std::vector<std::string> PresetNames();

// Nominal footprint of an object class.
Footprint ClassFootprint(ObjectClass label);

}  // namespace critnav

#endif  // CRITNAV_SYNTHESIS_H_
