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

#include "critnav/criticality.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_format.h"

namespace critnav {

absl::Status ValidateOcmParams(const OcmParams& p) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(p.d_max)) return absl::InvalidArgumentError("ocm.d_max must be > 0");
  if (!positive(p.r_max)) return absl::InvalidArgumentError("ocm.r_max must be > 0");
  if (!positive(p.t_max)) return absl::InvalidArgumentError("ocm.t_max must be > 0");
  if (!positive(p.horizon)) {
    return absl::InvalidArgumentError("ocm.horizon must be > 0");
  }
  for (double w : {p.w_distance, p.w_route, p.w_ttc}) {
    if (!std::isfinite(w) || w < 0.0) {
      return absl::InvalidArgumentError("ocm.weights must be nonnegative");
    }
  }
  const double sum = p.w_distance + p.w_route + p.w_ttc;
  if (std::abs(sum - 1.0) > 1e-9) {
    return absl::InvalidArgumentError(
        absl::StrFormat("ocm.weights must sum to 1 (got %.12g)", sum));
  }
  return absl::OkStatus();
}

double Decay(double value, double threshold, DecayShape shape) {
  if (value >= threshold) return 0.0;
  const double x = std::max(0.0, value) / threshold;
  switch (shape) {
    case DecayShape::kLinear:
      return 1.0 - x;
    case DecayShape::kQuadratic:
      return (1.0 - x) * (1.0 - x);
    case DecayShape::kExponential: {
      const double floor = std::exp(-3.0);
      return (std::exp(-3.0 * x) - floor) / (1.0 - floor);
    }
  }
  return 0.0;
}

ClosestApproach ComputeClosestApproach(Vec2 rel_position, Vec2 rel_velocity,
                                       double horizon) {
  const double speed_sq = Dot(rel_velocity, rel_velocity);
  if (speed_sq == 0.0) return {0.0, Norm(rel_position)};
  const double t =
      std::clamp(-Dot(rel_position, rel_velocity) / speed_sq, 0.0, horizon);
  return {t, Norm(rel_position + t * rel_velocity)};
}

std::optional<double> TimeToCollision(Vec2 rel_position, Vec2 rel_velocity,
                                      double collision_radius) {
  const double c = Dot(rel_position, rel_position) -
                   collision_radius * collision_radius;
  if (c <= 0.0) return 0.0;
  const double a = Dot(rel_velocity, rel_velocity);
  if (a == 0.0) return std::nullopt;
  const double b = 2.0 * Dot(rel_position, rel_velocity);
  // c > 0: both roots share a sign, so b >= 0 means the object recedes.
  if (b >= 0.0) return std::nullopt;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return std::nullopt;
  // Numerically stable form of the smaller root for b < 0.
  const double q = -0.5 * (b - std::sqrt(disc));
  return c / q;
}

double CollisionRadius(const Footprint& ego, const OrientedBox& box) {
  return 0.5 * std::hypot(ego.length, ego.width) +
         0.5 * std::hypot(box.length, box.width);
}

std::optional<double> TimeToCollision(const EgoState& ego,
                                      const OrientedBox& box) {
  const RelativeState rel = ComputeRelativeState(ego, box);
  return TimeToCollision(rel.position, rel.velocity,
                         CollisionRadius(ego.footprint, box));
}

double KappaDistance(const EgoState& ego, const OrientedBox& box,
                     const OcmParams& params) {
  const double d = Norm(box.center.position() - ego.pose.position());
  return Decay(d, params.d_max, params.decay);
}

double KappaRoute(const EgoState& ego, const OrientedBox& box,
                  const OcmParams& params) {
  const RelativeState rel = ComputeRelativeState(ego, box);
  const ClosestApproach cpa =
      ComputeClosestApproach(rel.position, rel.velocity, params.horizon);
  return Decay(cpa.distance, params.r_max, params.decay);
}

double KappaTtc(const EgoState& ego, const OrientedBox& box,
                const OcmParams& params) {
  const std::optional<double> ttc = TimeToCollision(ego, box);
  if (!ttc.has_value()) return 0.0;
  return Decay(*ttc, params.t_max, params.decay);
}

CriticalityScore ComputeCriticality(const EgoState& ego,
                                    const OrientedBox& box,
                                    const OcmParams& params) {
  CriticalityScore s;
  s.kappa_d = KappaDistance(ego, box, params);
  s.kappa_r = KappaRoute(ego, box, params);
  s.kappa_t = KappaTtc(ego, box, params);
  s.kappa = std::clamp(params.w_distance * s.kappa_d +
                           params.w_route * s.kappa_r +
                           params.w_ttc * s.kappa_t,
                       0.0, 1.0);
  return s;
}

double Kappa(const EgoState& ego, const OrientedBox& box,
             const OcmParams& params) {
  return ComputeCriticality(ego, box, params).kappa;
}

}  // namespace critnav
