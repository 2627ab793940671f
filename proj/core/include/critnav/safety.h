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

#ifndef CRITNAV_SAFETY_H_
#define CRITNAV_SAFETY_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "critnav/criticality.h"
#include "critnav/filtering.h"
#include "critnav/geometry.h"
#include "critnav/planner.h"

namespace critnav {

struct Hazard {
  int step_index = 0;        // 1-based
  double time_offset = 0.0;  // seconds after the frame timestamp
  std::int64_t gt_track_id = 0;
  Pose2D ego_pose;
};

struct HazardReport {
  std::vector<Hazard> hazards;
  bool is_hazardous() const { return !hazards.empty(); }
};

// Ground truth of `scenario` at absolute time `time`, using the frames that
// bracket it: objects present in both are interpolated linearly, objects
// present in one are extrapolated at constant velocity from it. Beyond the
// last frame every object is extrapolated from the last frame. Returned
// boxes always carry a track id (the list index when the file has none).
std::vector<OrientedBox> GroundTruthAt(const Scenario& scenario, double time);

// Places the ego footprint at each trajectory pose and tests it against the
// ground truth at the matching future time.
absl::StatusOr<HazardReport> CheckTrajectory(const Scenario& scenario,
                                             int frame_index,
                                             std::span<const Pose2D> trajectory,
                                             const Footprint& ego_footprint,
                                             const PlannerConfig& cfg);

// Per-frame outcome of planning with filtered detections versus ground
// truth.
struct FrameSafety {
  bool gt_hazardous = false;
  bool pred_hazardous = false;
  bool perception_induced() const { return pred_hazardous && !gt_hazardous; }
};

// Fraction of frames whose plan from the policy-filtered detections is
// hazardous while the plan from ground truth is not.
absl::StatusOr<double> HazardRate(std::span<const Scenario> scenarios,
                                  const FilterPolicy& policy,
                                  const OcmParams& params,
                                  const PlannerConfig& cfg);

}  // namespace critnav

#endif  // CRITNAV_SAFETY_H_
