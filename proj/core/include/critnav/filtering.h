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

#ifndef CRITNAV_FILTERING_H_
#define CRITNAV_FILTERING_H_

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "critnav/criticality.h"
#include "critnav/geometry.h"

namespace critnav {

// All thresholds are inclusive: a score equal to the threshold passes.

// Keep iff confidence >= confidence_threshold.
struct ConfidenceOnlyPolicy {
  double confidence_threshold = 0.5;
};

// Confidence filter, then drop whatever falls below the criticality
// threshold.
struct CascadePolicy {
  double confidence_threshold = 0.5;
  double criticality_threshold = 0.0;
};

// Keep anything critical enough regardless of confidence; the rest must
// pass the confidence threshold.
struct OverridePolicy {
  double confidence_threshold = 0.5;
  double keep_criticality = 1.0;
};

struct CriticalityBin {
  double kappa_lower_bound = 0.0;
  double confidence_threshold = 0.5;

  friend bool operator==(const CriticalityBin&,
                         const CriticalityBin&) = default;
};

// Step function from criticality to the confidence threshold applied. A
// detection falls in the bin with the largest lower bound <= its kappa.
struct BinnedMapPolicy {
  std::vector<CriticalityBin> bins;
};

using FilterPolicy = std::variant<ConfidenceOnlyPolicy, CascadePolicy,
                                  OverridePolicy, BinnedMapPolicy>;

absl::Status ValidatePolicy(const FilterPolicy& policy);

std::string PolicyName(const FilterPolicy& policy);

enum class DropReason { kLowConfidence, kLowCriticality };

std::string_view DropReasonName(DropReason reason);

struct DroppedDetection {
  Detection detection;
  int index = 0;
  DropReason reason = DropReason::kLowConfidence;
};

struct FilterOutcome {
  std::vector<Detection> kept;
  std::vector<int> kept_indices;  // into the input, ascending
  std::vector<DroppedDetection> dropped;
  std::vector<double> kappa;  // criticality of every input detection
};

// Filters `detections` with criticality computed from each detection's own
// predicted kinematics relative to `ego`.
absl::StatusOr<FilterOutcome> ApplyPolicy(std::span<const Detection> detections,
                                          const EgoState& ego,
                                          const OcmParams& params,
                                          const FilterPolicy& policy);

// Same as ApplyPolicy with criticalities supplied by the caller
// (kappa[i] belongs to detections[i]). The policy must already be valid.
FilterOutcome ApplyPolicyWithKappa(std::span<const Detection> detections,
                                   std::span<const double> kappa,
                                   const FilterPolicy& policy);

// Confidence threshold a detection with criticality `kappa` must reach under
// `policy`. Returns 0 when kappa alone is enough (override).
double EffectiveConfidenceThreshold(const FilterPolicy& policy, double kappa);

// For binned maps: true iff the effective confidence threshold never
// increases with criticality, checked over the bin bounds and the supplied
// kappa samples. Other policies always pass.
bool PolicyMonotoneCheck(const FilterPolicy& policy,
                         std::span<const double> kappa_samples);

}  // namespace critnav

#endif  // CRITNAV_FILTERING_H_
