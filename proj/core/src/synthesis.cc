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

#include "critnav/synthesis.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace critnav {
namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double Uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double StandardNormal(std::mt19937_64& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

double SampleConfidence(const ConfidenceModel& model, std::mt19937_64& rng) {
  const double a = std::gamma_distribution<double>(model.alpha, 1.0)(rng);
  const double b = std::gamma_distribution<double>(model.beta, 1.0)(rng);
  if (model.fixed.has_value()) return *model.fixed;
  const double sum = a + b;
  return sum > 0.0 ? std::clamp(a / sum, 0.0, 1.0) : 0.5;
}

absl::Status ValidateConfidenceModel(const ConfidenceModel& m,
                                     absl::string_view name) {
  if (!(m.alpha > 0.0) || !(m.beta > 0.0) || !std::isfinite(m.alpha) ||
      !std::isfinite(m.beta)) {
    return absl::InvalidArgumentError(
        absl::StrCat("noise.", name, " Beta parameters must be > 0"));
  }
  if (m.fixed.has_value() && !(*m.fixed >= 0.0 && *m.fixed <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("noise.", name, ".fixed must be in [0, 1]"));
  }
  return absl::OkStatus();
}

Pose2D EgoPoseAt(const ScenarioLayout& layout, double t) {
  const double v = layout.ego_speed;
  const double w = layout.ego_yaw_rate;
  if (w == 0.0) return {v * t, 0.0, 0.0};
  return {v / w * std::sin(w * t), v / w * (1.0 - std::cos(w * t)),
          NormalizeAngle(w * t)};
}

}  // namespace

NoiseModel NoiseModel::Noiseless() {
  NoiseModel n;
  n.miss_base = 0.0;
  n.miss_per_meter = 0.0;
  n.center_jitter_sigma = 0.0;
  n.size_jitter_sigma = 0.0;
  n.yaw_jitter_sigma = 0.0;
  n.velocity_jitter_sigma = 0.0;
  n.tp_confidence.fixed = 1.0;
  n.fp_rate = 0.0;
  return n;
}

absl::Status ValidateNoiseModel(const NoiseModel& n) {
  auto nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!nonneg(n.miss_base) || n.miss_base > 1.0) {
    return absl::InvalidArgumentError("noise.miss_base must be in [0, 1]");
  }
  if (!nonneg(n.miss_per_meter)) {
    return absl::InvalidArgumentError("noise.miss_per_meter must be >= 0");
  }
  for (double s : {n.center_jitter_sigma, n.size_jitter_sigma,
                   n.yaw_jitter_sigma, n.velocity_jitter_sigma}) {
    if (!nonneg(s)) {
      return absl::InvalidArgumentError("noise sigmas must be >= 0");
    }
  }
  if (!nonneg(n.fp_rate)) return absl::InvalidArgumentError("noise.fp_rate must be >= 0");
  if (!nonneg(n.fp_spawn_radius)) {
    return absl::InvalidArgumentError("noise.fp_spawn_radius must be >= 0");
  }
  if (!nonneg(n.fp_min_lateral)) {
    return absl::InvalidArgumentError("noise.fp_min_lateral must be >= 0");
  }
  if (auto s = ValidateConfidenceModel(n.tp_confidence, "tp_confidence");
      !s.ok()) {
    return s;
  }
  return ValidateConfidenceModel(n.fp_confidence, "fp_confidence");
}

double MissProbability(const NoiseModel& noise, double distance) {
  // Distance alone never pushes past 0.98; a base rate above that is honored.
  const double cap = std::clamp(noise.miss_base, 0.98, 1.0);
  return std::clamp(noise.miss_base + noise.miss_per_meter * distance, 0.0,
                    cap);
}

Footprint ClassFootprint(ObjectClass label) {
  switch (label) {
    case ObjectClass::kCar:
      return {4.5, 1.9};
    case ObjectClass::kTruck:
      return {8.0, 2.5};
    case ObjectClass::kBus:
      return {12.0, 2.55};
    case ObjectClass::kPedestrian:
      return {0.8, 0.8};
    case ObjectClass::kCyclist:
      return {1.8, 0.7};
    case ObjectClass::kOther:
      return {1.0, 1.0};
  }
  return {1.0, 1.0};
}

absl::Status ValidateLayout(const ScenarioLayout& l) {
  if (l.num_frames < 1) return absl::InvalidArgumentError("layout.num_frames must be >= 1");
  if (!(l.frame_period > 0.0)) {
    return absl::InvalidArgumentError("layout.frame_period must be > 0");
  }
  if (!(l.ego_footprint.length > 0.0) || !(l.ego_footprint.width > 0.0)) {
    return absl::InvalidArgumentError("layout.ego_footprint must be positive");
  }
  if (!std::isfinite(l.ego_speed) || !std::isfinite(l.ego_yaw_rate)) {
    return absl::InvalidArgumentError("layout ego motion must be finite");
  }
  if (l.background_objects < 0) {
    return absl::InvalidArgumentError("layout.background_objects must be >= 0");
  }
  if (l.background_objects > 0 && l.lanes.empty()) {
    return absl::InvalidArgumentError("layout.lanes must be nonempty");
  }
  if (!(l.min_longitudinal <= l.max_longitudinal) ||
      !(l.min_speed <= l.max_speed) || l.min_speed < 0.0) {
    return absl::InvalidArgumentError("layout ranges must be ordered");
  }
  if (!(l.spawn_clearance >= 0.0)) {
    return absl::InvalidArgumentError("layout.spawn_clearance must be >= 0");
  }
  for (const ScriptedActor& a : l.actors) {
    if (!(a.min_distance <= a.max_distance) || !(a.min_speed <= a.max_speed)) {
      return absl::InvalidArgumentError("layout.actors ranges must be ordered");
    }
  }
  if (l.max_retries < 1) return absl::InvalidArgumentError("layout.max_retries must be >= 1");
  return absl::OkStatus();
}

absl::StatusOr<Scenario> GenerateScenario(const ScenarioLayout& layout,
                                          std::uint64_t seed) {
  if (auto s = ValidateLayout(layout); !s.ok()) return s;
  std::mt19937_64 rng(SplitMix64(seed ^ 0x5ce7a1105eedULL));

  const OrientedBox ego_box = FootprintBox(layout.ego_footprint, {});
  std::vector<OrientedBox> placed;  // at t = 0
  auto fits = [&](const OrientedBox& candidate) {
    OrientedBox grown = candidate;
    grown.length += 2.0 * layout.spawn_clearance;
    grown.width += 2.0 * layout.spawn_clearance;
    if (BoxesOverlap(grown, ego_box)) return false;
    for (const OrientedBox& other : placed) {
      if (BoxesOverlap(grown, other)) return false;
    }
    return true;
  };

  for (std::size_t i = 0; i < layout.actors.size(); ++i) {
    const ScriptedActor& actor = layout.actors[i];
    const ObjectClass label = actor.kind == ActorKind::kBusOnPath
                                  ? ObjectClass::kBus
                                  : ObjectClass::kCar;
    bool ok = false;
    for (int attempt = 0; attempt < layout.max_retries && !ok; ++attempt) {
      const double d = Uniform(rng, actor.min_distance, actor.max_distance);
      const double speed = Uniform(rng, actor.min_speed, actor.max_speed);
      OrientedBox box;
      box.center = {d, actor.lateral_offset, 0.0};
      const Footprint f = ClassFootprint(label);
      box.length = f.length;
      box.width = f.width;
      box.velocity = {speed, 0.0};
      box.label = label;
      if (fits(box)) {
        placed.push_back(box);
        ok = true;
      }
    }
    if (!ok) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "generation error: cannot place scripted actor %d after %d retries",
          i, layout.max_retries));
    }
  }

  // One speed per moving lane so lane-mates never run into each other.
  std::vector<double> lane_speed;
  for (std::size_t k = 0; k < layout.lanes.size(); ++k) {
    lane_speed.push_back(Uniform(rng, layout.min_speed, layout.max_speed));
  }
  for (int i = 0; i < layout.background_objects; ++i) {
    bool ok = false;
    for (int attempt = 0; attempt < layout.max_retries && !ok; ++attempt) {
      const std::size_t lane_index = std::uniform_int_distribution<std::size_t>(
          0, layout.lanes.size() - 1)(rng);
      const LaneSpec& lane = layout.lanes[lane_index];
      const double roll = Uniform(rng, 0.0, 1.0);
      const double x = Uniform(rng, layout.min_longitudinal,
                               layout.max_longitudinal);
      const double y = lane.offset + Uniform(rng, -0.3, 0.3);
      ObjectClass label;
      Vec2 velocity;
      double yaw = lane.direction < 0 ? std::numbers::pi : 0.0;
      if (lane.direction == 0) {
        // Parking strip: parked vehicles and pedestrians walking along it.
        if (roll < 0.75) {
          label = roll < 0.65 ? ObjectClass::kCar : ObjectClass::kTruck;
        } else {
          label = ObjectClass::kPedestrian;
          const double dir = roll < 0.875 ? 1.0 : -1.0;
          velocity = {dir * 1.2, 0.0};
          yaw = dir > 0 ? 0.0 : std::numbers::pi;
        }
      } else {
        label = roll < 0.8    ? ObjectClass::kCar
                : roll < 0.9 ? ObjectClass::kTruck
                             : ObjectClass::kCyclist;
        const double speed = label == ObjectClass::kCyclist
                                 ? std::min(lane_speed[lane_index], 5.0)
                                 : lane_speed[lane_index];
        velocity = {lane.direction * speed, 0.0};
      }
      OrientedBox box;
      box.center = {x, y, NormalizeAngle(yaw)};
      const Footprint f = ClassFootprint(label);
      box.length = f.length;
      box.width = f.width;
      box.velocity = velocity;
      box.label = label;
      if (fits(box)) {
        placed.push_back(box);
        ok = true;
      }
    }
    if (!ok) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "generation error: cannot place background object %d after %d "
          "retries",
          i, layout.max_retries));
    }
  }
  for (std::size_t i = 0; i < placed.size(); ++i) {
    placed[i].track_id = static_cast<std::int64_t>(i);
  }

  Scenario scenario;
  scenario.id = layout.id;
  scenario.frame_period = layout.frame_period;
  for (int k = 0; k < layout.num_frames; ++k) {
    const double t = k * layout.frame_period;
    Frame frame;
    frame.timestamp = t;
    frame.ego.pose = EgoPoseAt(layout, t);
    frame.ego.velocity = {layout.ego_speed * std::cos(frame.ego.pose.yaw),
                          layout.ego_speed * std::sin(frame.ego.pose.yaw)};
    frame.ego.footprint = layout.ego_footprint;
    for (const OrientedBox& box : placed) {
      frame.ground_truth.push_back(Extrapolate(box, t));
    }
    scenario.frames.push_back(std::move(frame));
  }
  return scenario;
}

std::mt19937_64 FrameRng(std::uint64_t seed, std::uint64_t frame_index) {
  return std::mt19937_64(
      SplitMix64(SplitMix64(seed) ^ SplitMix64(frame_index + 0x51ed2701ULL)));
}

std::vector<Detection> SynthesizeFrameDetections(const Frame& frame,
                                                 const NoiseModel& noise,
                                                 std::mt19937_64& rng) {
  std::vector<Detection> out;
  for (const OrientedBox& gt : frame.ground_truth) {
    // Every variate is drawn whether or not the object is missed, so one
    // object's fate never shifts the stream for the next.
    const double u = Uniform(rng, 0.0, 1.0);
    const double zx = StandardNormal(rng);
    const double zy = StandardNormal(rng);
    const double zl = StandardNormal(rng);
    const double zw = StandardNormal(rng);
    const double zyaw = StandardNormal(rng);
    const double zvx = StandardNormal(rng);
    const double zvy = StandardNormal(rng);
    const double confidence = SampleConfidence(noise.tp_confidence, rng);
    const double distance = Norm(gt.center.position() - frame.ego.pose.position());
    if (u < MissProbability(noise, distance)) continue;

    Detection det;
    det.box = gt;
    det.box.track_id = -1;
    det.box.center.x += noise.center_jitter_sigma * zx;
    det.box.center.y += noise.center_jitter_sigma * zy;
    det.box.center.yaw =
        NormalizeAngle(gt.center.yaw + noise.yaw_jitter_sigma * zyaw);
    det.box.length =
        std::max(0.1 * gt.length, gt.length * (1.0 + noise.size_jitter_sigma * zl));
    det.box.width =
        std::max(0.1 * gt.width, gt.width * (1.0 + noise.size_jitter_sigma * zw));
    det.box.velocity.x += noise.velocity_jitter_sigma * zvx;
    det.box.velocity.y += noise.velocity_jitter_sigma * zvy;
    det.confidence = confidence;
    out.push_back(det);
  }

  const int fp_count =
      noise.fp_rate > 0.0
          ? std::poisson_distribution<int>(noise.fp_rate)(rng)
          : 0;
  const Footprint car = ClassFootprint(ObjectClass::kCar);
  for (int i = 0; i < fp_count; ++i) {
    const double r = noise.fp_spawn_radius * std::sqrt(Uniform(rng, 0.0, 1.0));
    const double theta = Uniform(rng, -std::numbers::pi, std::numbers::pi);
    const double yaw = Uniform(rng, -std::numbers::pi, std::numbers::pi);
    const double zl = StandardNormal(rng);
    const double zw = StandardNormal(rng);
    // Ego-frame offset; the lateral part is shifted out of the excluded band.
    const double lon = r * std::cos(theta);
    double lat = r * std::sin(theta);
    if (std::abs(lat) < noise.fp_min_lateral) {
      lat = std::copysign(noise.fp_min_lateral + std::abs(lat), lat);
    }
    const double c = std::cos(frame.ego.pose.yaw);
    const double s = std::sin(frame.ego.pose.yaw);
    Detection det;
    det.box.center = {frame.ego.pose.x + c * lon - s * lat,
                      frame.ego.pose.y + s * lon + c * lat, NormalizeAngle(yaw)};
    det.box.length =
        std::max(0.5, car.length * (1.0 + noise.size_jitter_sigma * zl));
    det.box.width =
        std::max(0.5, car.width * (1.0 + noise.size_jitter_sigma * zw));
    det.box.label = ObjectClass::kCar;
    det.confidence = SampleConfidence(noise.fp_confidence, rng);
    out.push_back(det);
  }
  return out;
}

Scenario SynthesizeDetections(const Scenario& scenario,
                              const NoiseModel& noise) {
  Scenario out = scenario;
  for (std::size_t k = 0; k < out.frames.size(); ++k) {
    std::mt19937_64 rng = FrameRng(noise.seed, k);
    out.frames[k].detections =
        SynthesizeFrameDetections(out.frames[k], noise, rng);
  }
  return out;
}

std::vector<std::string> PresetNames() {
  return {"empty", "urban", "clutter", "fig2"};
}

absl::StatusOr<Preset> GetPreset(const std::string& name) {
  Preset p;
  p.layout.id = name;
  if (name == "empty") {
    p.layout.background_objects = 0;
    return p;
  }
  if (name == "urban") {
    return p;
  }
  if (name == "clutter") {
    // An accurate detector that also reports many ghosts off to the sides
    // of the ego's path, with confidences overlapping the real objects'.
    p.layout.ego_speed = 8.0;
    p.layout.background_objects = 3;
    p.layout.actors = {{ActorKind::kLeadVehicle, 16.0, 24.0, 4.0, 6.0, 0.0}};
    p.noise.center_jitter_sigma = 0.1;
    p.noise.velocity_jitter_sigma = 0.1;
    p.noise.yaw_jitter_sigma = 0.02;
    p.noise.size_jitter_sigma = 0.02;
    p.noise.fp_rate = 6.0;
    p.noise.fp_min_lateral = 6.0;
    p.noise.fp_confidence = {3.0, 3.0, std::nullopt};
    p.noise.tp_confidence = {5.0, 2.0, std::nullopt};
    return p;
  }
  if (name == "fig2") {
    // A slow bus just ahead in the ego lane, reported with a confidence
    // that often falls below the usual threshold.
    p.layout.ego_speed = 10.0;
    p.layout.num_frames = 1;
    p.layout.background_objects = 3;
    p.layout.actors = {{ActorKind::kBusOnPath, 9.5, 11.0, 3.0, 4.0, 0.0}};
    p.noise.miss_base = 0.0;
    p.noise.miss_per_meter = 0.002;
    p.noise.tp_confidence = {2.0, 2.0, std::nullopt};
    p.noise.fp_rate = 2.0;
    p.noise.fp_confidence = {2.0, 4.0, std::nullopt};
    return p;
  }
  return absl::NotFoundError(absl::StrCat("unknown preset '", name, "'"));
}

}  // namespace critnav
