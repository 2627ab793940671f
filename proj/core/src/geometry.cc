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

#include "critnav/geometry.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace critnav {

double Dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

double Norm(Vec2 a) { return std::hypot(a.x, a.y); }

double NormalizeAngle(double radians) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double wrapped = std::remainder(radians, kTwoPi);
  if (wrapped <= -std::numbers::pi) wrapped += kTwoPi;
  return wrapped;
}

std::string_view ObjectClassName(ObjectClass c) {
  switch (c) {
    case ObjectClass::kCar:
      return "car";
    case ObjectClass::kTruck:
      return "truck";
    case ObjectClass::kBus:
      return "bus";
    case ObjectClass::kPedestrian:
      return "pedestrian";
    case ObjectClass::kCyclist:
      return "cyclist";
    case ObjectClass::kOther:
      return "other";
  }
  return "other";
}

std::optional<ObjectClass> ParseObjectClass(std::string_view name) {
  for (ObjectClass c :
       {ObjectClass::kCar, ObjectClass::kTruck, ObjectClass::kBus,
        ObjectClass::kPedestrian, ObjectClass::kCyclist, ObjectClass::kOther}) {
    if (ObjectClassName(c) == name) return c;
  }
  return std::nullopt;
}

RelativeState ComputeRelativeState(const EgoState& ego,
                                   const OrientedBox& box) {
  return {box.center.position() - ego.pose.position(),
          box.velocity - ego.velocity};
}

std::array<Vec2, 4> BoxCorners(const OrientedBox& box) {
  const double c = std::cos(box.center.yaw);
  const double s = std::sin(box.center.yaw);
  const double hl = 0.5 * box.length;
  const double hw = 0.5 * box.width;
  const std::array<Vec2, 4> local = {
      Vec2{hl, -hw}, Vec2{hl, hw}, Vec2{-hl, hw}, Vec2{-hl, -hw}};
  std::array<Vec2, 4> out;
  for (size_t i = 0; i < local.size(); ++i) {
    out[i] = {box.center.x + c * local[i].x - s * local[i].y,
              box.center.y + s * local[i].x + c * local[i].y};
  }
  return out;
}

namespace {

struct Interval {
  double lo;
  double hi;
};

Interval Project(const std::array<Vec2, 4>& corners, Vec2 axis) {
  Interval iv{Dot(corners[0], axis), Dot(corners[0], axis)};
  for (size_t i = 1; i < corners.size(); ++i) {
    const double p = Dot(corners[i], axis);
    iv.lo = std::min(iv.lo, p);
    iv.hi = std::max(iv.hi, p);
  }
  return iv;
}

}  // namespace

bool BoxesOverlap(const OrientedBox& a, const OrientedBox& b) {
  const auto ca = BoxCorners(a);
  const auto cb = BoxCorners(b);
  const std::array<Vec2, 4> axes = {
      Vec2{std::cos(a.center.yaw), std::sin(a.center.yaw)},
      Vec2{-std::sin(a.center.yaw), std::cos(a.center.yaw)},
      Vec2{std::cos(b.center.yaw), std::sin(b.center.yaw)},
      Vec2{-std::sin(b.center.yaw), std::cos(b.center.yaw)}};
  for (Vec2 axis : axes) {
    const Interval pa = Project(ca, axis);
    const Interval pb = Project(cb, axis);
    if (pa.hi < pb.lo || pb.hi < pa.lo) return false;
  }
  return true;
}

bool ContainsPoint(const OrientedBox& box, Vec2 point, double margin) {
  const Vec2 d = point - box.center.position();
  const double c = std::cos(box.center.yaw);
  const double s = std::sin(box.center.yaw);
  const double along = c * d.x + s * d.y;
  const double across = -s * d.x + c * d.y;
  return std::abs(along) <= 0.5 * box.length + margin &&
         std::abs(across) <= 0.5 * box.width + margin;
}

OrientedBox Extrapolate(const OrientedBox& box, double dt) {
  OrientedBox out = box;
  out.center.x += box.velocity.x * dt;
  out.center.y += box.velocity.y * dt;
  return out;
}

OrientedBox FootprintBox(const Footprint& footprint, const Pose2D& pose) {
  OrientedBox box;
  box.center = pose;
  box.length = footprint.length;
  box.width = footprint.width;
  return box;
}

}  // namespace critnav
