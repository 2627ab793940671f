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

#ifndef CRITNAV_GEOMETRY_H_
#define CRITNAV_GEOMETRY_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace critnav {

// Planar vector in the birdview frame (meters or meters/second).
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

double Dot(Vec2 a, Vec2 b);
double Norm(Vec2 a);

// Wraps an angle into (-pi, pi].
double NormalizeAngle(double radians);

struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const Pose2D&, const Pose2D&) = default;
};

enum class ObjectClass : std::uint8_t {
  kCar,
  kTruck,
  kBus,
  kPedestrian,
  kCyclist,
  kOther,
};

std::string_view ObjectClassName(ObjectClass c);
std::optional<ObjectClass> ParseObjectClass(std::string_view name);

// Birdview footprint of an object with its planar velocity.
//
// `track_id` identifies the same physical object across frames of a
// scenario. It is -1 for objects without identity (e.g. detections).
struct OrientedBox {
  Pose2D center;
  double length = 1.0;
  double width = 1.0;
  Vec2 velocity;
  ObjectClass label = ObjectClass::kCar;
  std::int64_t track_id = -1;

  friend bool operator==(const OrientedBox&, const OrientedBox&) = default;
};

struct Detection {
  OrientedBox box;
  double confidence = 1.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct Footprint {
  double length = 4.5;
  double width = 1.9;

  friend bool operator==(const Footprint&, const Footprint&) = default;
};

struct EgoState {
  Pose2D pose;
  Vec2 velocity;
  Footprint footprint;

  friend bool operator==(const EgoState&, const EgoState&) = default;
};

struct Frame {
  double timestamp = 0.0;
  EgoState ego;
  std::vector<OrientedBox> ground_truth;
  std::vector<Detection> detections;

  friend bool operator==(const Frame&, const Frame&) = default;
};

struct Scenario {
  std::string id;
  std::vector<Frame> frames;
  double frame_period = 0.5;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct RelativeState {
  Vec2 position;
  Vec2 velocity;
};

// Box state minus ego state, in the global frame.
RelativeState ComputeRelativeState(const EgoState& ego, const OrientedBox& box);

// Corners of the yaw-rotated rectangle, counterclockwise starting at the
// front-right corner.
std::array<Vec2, 4> BoxCorners(const OrientedBox& box);

// Separating-axis intersection test on both boxes' edge normals. Touching
// edges count as overlap.
bool BoxesOverlap(const OrientedBox& a, const OrientedBox& b);

// True if `point` lies inside or on the boundary of `box` grown by `margin`
// on every side.
bool ContainsPoint(const OrientedBox& box, Vec2 point, double margin = 0.0);

// Box advanced along its velocity for `dt` seconds.
OrientedBox Extrapolate(const OrientedBox& box, double dt);

// Ego footprint placed at `pose`.
OrientedBox FootprintBox(const Footprint& footprint, const Pose2D& pose);

}  // namespace critnav

#endif  // CRITNAV_GEOMETRY_H_
