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

#ifndef CRITNAV_TOOLS_BIRDVIEW_H_
#define CRITNAV_TOOLS_BIRDVIEW_H_

#include <span>
#include <string>

#include "critnav/filtering.h"
#include "critnav/geometry.h"
#include "run_config.h"

namespace critnav::cli {

// What one birdview shows. `filter` partitions frame.detections into the
// kept and dropped layers; `trajectory` is drawn as a polyline.
struct BirdviewScene {
  std::string scenario_id;
  int frame_index = 0;
  const Frame* frame = nullptr;
  const FilterOutcome* filter = nullptr;
  std::span<const Pose2D> trajectory;
};

// Deterministic SVG. The view is centered on the ego with +y up. Groups
// appear in a fixed order (ground_truth, kept, dropped, trajectory, ego,
// labels); disabled or empty groups are left out. Coordinates are written
// with three decimals, and non-finite geometry is skipped.
std::string RenderBirdview(const BirdviewScene& scene,
                           const RenderOptions& options,
                           const std::string& config_hash);

}  // namespace critnav::cli

#endif  // CRITNAV_TOOLS_BIRDVIEW_H_
