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

#ifndef CRITNAV_CRITICALITY_H_
#define CRITNAV_CRITICALITY_H_

#include <optional>

#include "absl/status/status.h"
#include "critnav/geometry.h"

namespace critnav {

// Shape of the per-factor decay from 1 (at zero) to 0 (at the factor's
// threshold). Every shape is non-increasing and zero at and beyond the
// threshold.
enum class DecayShape {
  kLinear,       // 1 - x/X
  kQuadratic,    // (1 - x/X)^2
  kExponential,  // rescaled exp(-3x/X)
};

// Parameters of the object criticality model.
struct OcmParams {
  double d_max = 30.0;  // meters
  double r_max = 5.0;   // meters
  double t_max = 4.0;   // seconds
  double w_distance = 1.0 / 3.0;
  double w_route = 1.0 / 3.0;
  double w_ttc = 1.0 / 3.0;
  double horizon = 4.0;  // seconds, closest-approach search window
  DecayShape decay = DecayShape::kLinear;
};

absl::Status ValidateOcmParams(const OcmParams& params);

struct CriticalityScore {
  double kappa_d = 0.0;
  double kappa_r = 0.0;
  double kappa_t = 0.0;
  double kappa = 0.0;

  friend bool operator==(const CriticalityScore&,
                         const CriticalityScore&) = default;
};

// Maps a nonnegative quantity onto [0, 1] with `shape`; returns 0 whenever
// value >= threshold.
double Decay(double value, double threshold, DecayShape shape);

struct ClosestApproach {
  double time = 0.0;      // seconds, in [0, horizon]
  double distance = 0.0;  // meters
};

// Closest approach under constant relative velocity, searched over
// [0, horizon].
ClosestApproach ComputeClosestApproach(Vec2 rel_position, Vec2 rel_velocity,
                                       double horizon);

// Smallest t >= 0 with |p + v t| <= radius, or nullopt if the relative
// trajectory never comes that close.
std::optional<double> TimeToCollision(Vec2 rel_position, Vec2 rel_velocity,
                                      double collision_radius);

// Disc approximation: half the ego footprint diagonal plus half the box
// diagonal.
double CollisionRadius(const Footprint& ego, const OrientedBox& box);

std::optional<double> TimeToCollision(const EgoState& ego,
                                      const OrientedBox& box);

double KappaDistance(const EgoState& ego, const OrientedBox& box,
                     const OcmParams& params);
double KappaRoute(const EgoState& ego, const OrientedBox& box,
                  const OcmParams& params);
double KappaTtc(const EgoState& ego, const OrientedBox& box,
                const OcmParams& params);

// Weighted combination of the three factors. `params` must be valid.
CriticalityScore ComputeCriticality(const EgoState& ego,
                                    const OrientedBox& box,
                                    const OcmParams& params);

// Convenience: the combined score only.
double Kappa(const EgoState& ego, const OrientedBox& box,
             const OcmParams& params);

}  // namespace critnav

#endif  // CRITNAV_CRITICALITY_H_
