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

#include "critnav/filtering.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace critnav {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

absl::Status CheckUnit(double v, std::string_view name) {
  if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("policy.%s must be in [0, 1] (got %g)", std::string(name), v));
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status ValidatePolicy(const FilterPolicy& policy) {
  return std::visit(
      Overloaded{
          [](const ConfidenceOnlyPolicy& p) {
            return CheckUnit(p.confidence_threshold, "confidence");
          },
          [](const CascadePolicy& p) -> absl::Status {
            if (auto s = CheckUnit(p.confidence_threshold, "confidence");
                !s.ok()) {
              return s;
            }
            return CheckUnit(p.criticality_threshold, "criticality");
          },
          [](const OverridePolicy& p) -> absl::Status {
            if (auto s = CheckUnit(p.confidence_threshold, "confidence");
                !s.ok()) {
              return s;
            }
            // Values above 1 are allowed here: they disable the override.
            if (!std::isfinite(p.keep_criticality) ||
                p.keep_criticality < 0.0) {
              return absl::InvalidArgumentError(
                  "policy.criticality must be >= 0");
            }
            return absl::OkStatus();
          },
          [](const BinnedMapPolicy& p) -> absl::Status {
            if (p.bins.empty()) {
              return absl::InvalidArgumentError("policy.bins must be nonempty");
            }
            if (p.bins.front().kappa_lower_bound != 0.0) {
              return absl::InvalidArgumentError(
                  "policy.bins[0] lower bound must be 0");
            }
            for (size_t i = 0; i < p.bins.size(); ++i) {
              const auto& b = p.bins[i];
              if (auto s = CheckUnit(b.kappa_lower_bound, "bins.kappa");
                  !s.ok()) {
                return s;
              }
              if (auto s = CheckUnit(b.confidence_threshold, "bins.confidence");
                  !s.ok()) {
                return s;
              }
              if (i > 0 &&
                  !(b.kappa_lower_bound > p.bins[i - 1].kappa_lower_bound)) {
                return absl::InvalidArgumentError(
                    "policy.bins must have strictly increasing lower bounds");
              }
            }
            return absl::OkStatus();
          },
      },
      policy);
}

std::string PolicyName(const FilterPolicy& policy) {
  return std::visit(
      Overloaded{
          [](const ConfidenceOnlyPolicy&) { return std::string("confidence_only"); },
          [](const CascadePolicy&) { return std::string("cascade"); },
          [](const OverridePolicy&) { return std::string("override"); },
          [](const BinnedMapPolicy&) { return std::string("binned_map"); },
      },
      policy);
}

std::string_view DropReasonName(DropReason reason) {
  return reason == DropReason::kLowConfidence ? "low_confidence"
                                              : "low_criticality";
}

double EffectiveConfidenceThreshold(const FilterPolicy& policy, double kappa) {
  return std::visit(
      Overloaded{
          [](const ConfidenceOnlyPolicy& p) { return p.confidence_threshold; },
          [](const CascadePolicy& p) { return p.confidence_threshold; },
          [kappa](const OverridePolicy& p) {
            return kappa >= p.keep_criticality ? 0.0 : p.confidence_threshold;
          },
          [kappa](const BinnedMapPolicy& p) {
            double threshold = p.bins.front().confidence_threshold;
            for (const CriticalityBin& b : p.bins) {
              if (b.kappa_lower_bound <= kappa) {
                threshold = b.confidence_threshold;
              } else {
                break;
              }
            }
            return threshold;
          },
      },
      policy);
}

FilterOutcome ApplyPolicyWithKappa(std::span<const Detection> detections,
                                   std::span<const double> kappa,
                                   const FilterPolicy& policy) {
  FilterOutcome out;
  out.kappa.assign(kappa.begin(), kappa.end());
  for (int i = 0; i < static_cast<int>(detections.size()); ++i) {
    const Detection& det = detections[i];
    const double k = kappa[i];
    std::optional<DropReason> reason;
    if (det.confidence < EffectiveConfidenceThreshold(policy, k)) {
      reason = DropReason::kLowConfidence;
    } else if (const auto* cascade = std::get_if<CascadePolicy>(&policy);
               cascade != nullptr && k < cascade->criticality_threshold) {
      reason = DropReason::kLowCriticality;
    }
    if (reason.has_value()) {
      out.dropped.push_back({det, i, *reason});
    } else {
      out.kept.push_back(det);
      out.kept_indices.push_back(i);
    }
  }
  return out;
}

absl::StatusOr<FilterOutcome> ApplyPolicy(std::span<const Detection> detections,
                                          const EgoState& ego,
                                          const OcmParams& params,
                                          const FilterPolicy& policy) {
  if (auto s = ValidatePolicy(policy); !s.ok()) return s;
  if (auto s = ValidateOcmParams(params); !s.ok()) return s;
  std::vector<double> kappa;
  kappa.reserve(detections.size());
  for (const Detection& d : detections) {
    kappa.push_back(Kappa(ego, d.box, params));
  }
  return ApplyPolicyWithKappa(detections, kappa, policy);
}

bool PolicyMonotoneCheck(const FilterPolicy& policy,
                         std::span<const double> kappa_samples) {
  const auto* binned = std::get_if<BinnedMapPolicy>(&policy);
  if (binned == nullptr) return true;
  std::vector<double> points(kappa_samples.begin(), kappa_samples.end());
  for (const CriticalityBin& b : binned->bins) {
    points.push_back(b.kappa_lower_bound);
  }
  std::sort(points.begin(), points.end());
  double previous = 2.0;
  for (double k : points) {
    const double t = EffectiveConfidenceThreshold(policy, k);
    if (t > previous) return false;
    previous = t;
  }
  return true;
}

}  // namespace critnav
