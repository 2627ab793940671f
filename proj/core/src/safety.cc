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

#include "critnav/safety.h"

#include <algorithm>
#include <unordered_map>

#include "absl/strings/str_format.h"

namespace critnav {
namespace {

std::int64_t TrackKey(const OrientedBox& box, std::size_t index) {
  return box.track_id >= 0 ? box.track_id : static_cast<std::int64_t>(index);
}

OrientedBox Interpolate(const OrientedBox& a, const OrientedBox& b,
                        double alpha) {
  auto lerp = [alpha](double x, double y) { return x + alpha * (y - x); };
  OrientedBox out = a;
  out.center.x = lerp(a.center.x, b.center.x);
  out.center.y = lerp(a.center.y, b.center.y);
  out.center.yaw = NormalizeAngle(
      a.center.yaw + alpha * NormalizeAngle(b.center.yaw - a.center.yaw));
  out.length = lerp(a.length, b.length);
  out.width = lerp(a.width, b.width);
  out.velocity = {lerp(a.velocity.x, b.velocity.x),
                  lerp(a.velocity.y, b.velocity.y)};
  return out;
}

}  // namespace

std::vector<OrientedBox> GroundTruthAt(const Scenario& scenario, double time) {
  std::vector<OrientedBox> out;
  const auto& frames = scenario.frames;
  if (frames.empty()) return out;

  // First frame strictly after `time`.
  const auto upper = std::upper_bound(
      frames.begin(), frames.end(), time,
      [](double t, const Frame& f) { return t < f.timestamp; });
  const Frame& prev = upper == frames.begin() ? frames.front() : *(upper - 1);
  const bool exact_or_after_last =
      upper == frames.end() || prev.timestamp == time;
  if (exact_or_after_last || upper == frames.begin()) {
    for (std::size_t i = 0; i < prev.ground_truth.size(); ++i) {
      OrientedBox box = Extrapolate(prev.ground_truth[i], time - prev.timestamp);
      box.track_id = TrackKey(prev.ground_truth[i], i);
      out.push_back(box);
    }
    return out;
  }

  const Frame& next = *upper;
  const double alpha =
      (time - prev.timestamp) / (next.timestamp - prev.timestamp);
  std::unordered_map<std::int64_t, std::size_t> next_index;
  for (std::size_t i = 0; i < next.ground_truth.size(); ++i) {
    next_index.emplace(TrackKey(next.ground_truth[i], i), i);
  }
  std::vector<bool> next_used(next.ground_truth.size(), false);
  for (std::size_t i = 0; i < prev.ground_truth.size(); ++i) {
    const std::int64_t key = TrackKey(prev.ground_truth[i], i);
    OrientedBox box;
    if (auto it = next_index.find(key); it != next_index.end()) {
      next_used[it->second] = true;
      box = Interpolate(prev.ground_truth[i], next.ground_truth[it->second],
                        alpha);
    } else {
      box = Extrapolate(prev.ground_truth[i], time - prev.timestamp);
    }
    box.track_id = key;
    out.push_back(box);
  }
  for (std::size_t i = 0; i < next.ground_truth.size(); ++i) {
    if (next_used[i]) continue;
    OrientedBox box = Extrapolate(next.ground_truth[i], time - next.timestamp);
    box.track_id = TrackKey(next.ground_truth[i], i);
    out.push_back(box);
  }
  return out;
}

absl::StatusOr<HazardReport> CheckTrajectory(const Scenario& scenario,
                                             int frame_index,
                                             std::span<const Pose2D> trajectory,
                                             const Footprint& ego_footprint,
                                             const PlannerConfig& cfg) {
  if (frame_index < 0 ||
      frame_index >= static_cast<int>(scenario.frames.size())) {
    return absl::OutOfRangeError(
        absl::StrFormat("frame index %d out of range [0, %d)", frame_index,
                        scenario.frames.size()));
  }
  if (static_cast<int>(trajectory.size()) != cfg.steps) {
    return absl::InvalidArgumentError(
        absl::StrFormat("trajectory has %d poses, expected %d",
                        trajectory.size(), cfg.steps));
  }
  const double t0 = scenario.frames[frame_index].timestamp;
  HazardReport report;
  for (int t = 0; t < cfg.steps; ++t) {
    const double offset = (t + 1) * cfg.step_duration();
    const OrientedBox ego_box = FootprintBox(ego_footprint, trajectory[t]);
    for (const OrientedBox& gt : GroundTruthAt(scenario, t0 + offset)) {
      if (BoxesOverlap(ego_box, gt)) {
        report.hazards.push_back({t + 1, offset, gt.track_id, trajectory[t]});
      }
    }
  }
  return report;
}

absl::StatusOr<double> HazardRate(std::span<const Scenario> scenarios,
                                  const FilterPolicy& policy,
                                  const OcmParams& params,
                                  const PlannerConfig& cfg) {
  if (scenarios.empty()) {
    return absl::InvalidArgumentError("hazard rate needs at least one scenario");
  }
  if (auto s = ValidatePlannerConfig(cfg); !s.ok()) return s;
  std::int64_t frames = 0;
  std::int64_t induced = 0;
  for (const Scenario& scenario : scenarios) {
    for (int f = 0; f < static_cast<int>(scenario.frames.size()); ++f) {
      const Frame& frame = scenario.frames[f];
      absl::StatusOr<FilterOutcome> filtered =
          ApplyPolicy(frame.detections, frame.ego, params, policy);
      if (!filtered.ok()) return filtered.status();
      std::vector<OrientedBox> kept;
      for (const Detection& d : filtered->kept) kept.push_back(d.box);

      FrameSafety safety;
      const auto gt_traj =
          MostProbableTrajectory(Plan(frame.ground_truth, frame.ego, cfg));
      auto gt_report = CheckTrajectory(scenario, f, gt_traj,
                                       frame.ego.footprint, cfg);
      if (!gt_report.ok()) return gt_report.status();
      safety.gt_hazardous = gt_report->is_hazardous();

      const auto pred_traj = MostProbableTrajectory(Plan(kept, frame.ego, cfg));
      auto pred_report = CheckTrajectory(scenario, f, pred_traj,
                                         frame.ego.footprint, cfg);
      if (!pred_report.ok()) return pred_report.status();
      safety.pred_hazardous = pred_report->is_hazardous();

      ++frames;
      if (safety.perception_induced()) ++induced;
    }
  }
  return frames == 0 ? 0.0
                     : static_cast<double>(induced) / static_cast<double>(frames);
}

}  // namespace critnav
