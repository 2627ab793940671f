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

#ifndef CRITNAV_SWEEP_H_
#define CRITNAV_SWEEP_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "critnav/criticality.h"
#include "critnav/filtering.h"
#include "critnav/matching.h"
#include "critnav/planner.h"
#include "critnav/safety.h"

namespace critnav {

// Everything computed for one frame under one filter policy.
struct FrameEvaluation {
  std::string scenario_id;
  int frame_index = 0;
  double timestamp = 0.0;
  FilterOutcome filter;
  MetricsReport metrics;
  PklScore pkl;
  HazardReport gt_hazards;    // plan from ground truth
  HazardReport pred_hazards;  // plan from kept detections
  std::vector<Pose2D> gt_trajectory;
  std::vector<Pose2D> pred_trajectory;

  bool perception_induced_hazard() const {
    return pred_hazards.is_hazardous() && !gt_hazards.is_hazardous();
  }
};

struct EvaluationSummary {
  PklSummary pkl;
  double hazard_rate = 0.0;
  double weighted_precision = 1.0;  // pooled criticality mass
  double weighted_recall = 1.0;
  double precision = 1.0;  // pooled counts
  double recall = 1.0;
  double avg_precision = 0.0;  // of the kept detections, pooled
  std::int64_t frames = 0;
};

struct EvaluationRun {
  std::vector<FrameEvaluation> frames;
  EvaluationSummary summary;
};

// Filters, plans, scores and hazard-checks every frame of `scenarios`.
absl::StatusOr<EvaluationRun> EvaluatePolicy(std::span<const Scenario> scenarios,
                                             const FilterPolicy& policy,
                                             const OcmParams& params,
                                             const PlannerConfig& cfg,
                                             double match_radius = kDefaultMatchRadius);

enum class PolicyFamily { kConfidenceOnly, kCascade, kOverride, kBinnedMap };
enum class Objective { kMedianPkl, kMeanPkl, kHazardRate };

std::string_view PolicyFamilyName(PolicyFamily family);
std::optional<PolicyFamily> ParsePolicyFamily(std::string_view name);
std::string_view ObjectiveName(Objective objective);
std::optional<Objective> ParseObjective(std::string_view name);

// Exhaustive grid over one policy family.
//
// confidence_grid supplies the confidence threshold (for binned maps: the
// threshold of the lowest bin). criticality_grid supplies the cascade
// criticality threshold, the override keep level, or the binned map's upper
// bin bound. secondary_confidence_grid is the binned map's upper-bin
// confidence threshold. Unused grids are ignored.
struct SweepSpec {
  PolicyFamily family = PolicyFamily::kConfidenceOnly;
  std::vector<double> confidence_grid;
  std::vector<double> criticality_grid = {0.0};
  std::vector<double> secondary_confidence_grid = {0.0};
  double match_radius = kDefaultMatchRadius;
  int workers = 1;
};

absl::Status ValidateSweepSpec(const SweepSpec& spec);

// Evenly spaced grid lo, lo + (hi - lo)/(n - 1), ..., hi.
std::vector<double> LinearGrid(double lo, double hi, int n);

struct SweepRecord {
  FilterPolicy policy;
  double confidence_threshold = 0.0;
  std::optional<double> criticality_threshold;
  std::optional<double> secondary_confidence_threshold;
  EvaluationSummary summary;
  std::vector<PklSummary> per_scenario;  // in input scenario order

  double ObjectiveValue(Objective objective) const;
};

struct SweepResult {
  PolicyFamily family = PolicyFamily::kConfidenceOnly;
  std::vector<SweepRecord> records;
  std::map<Objective, std::size_t> best;  // index into records

  const SweepRecord& Best(Objective objective) const {
    return records[best.at(objective)];
  }
};

// Index of the record minimizing `objective`; ties go to the lower
// confidence threshold, then the lower criticality threshold, then the
// lower secondary threshold.
std::size_t BestRecordIndex(std::span<const SweepRecord> records,
                            Objective objective);

absl::StatusOr<SweepResult> RunSweep(const SweepSpec& spec,
                                     std::span<const Scenario> scenarios,
                                     const OcmParams& params,
                                     const PlannerConfig& cfg);

// Optimizes the confidence threshold alone first, then sweeps the family's
// other thresholds with the confidence threshold pinned at that optimum.
absl::StatusOr<SweepResult> RunStagedSweep(const SweepSpec& spec,
                                           std::span<const Scenario> scenarios,
                                           const OcmParams& params,
                                           const PlannerConfig& cfg,
                                           Objective objective);

struct ComparisonRow {
  std::string policy;
  SweepRecord record;  // the family's optimum
};

// Sweeps each spec and keeps its optimum under `objective`.
absl::StatusOr<std::vector<ComparisonRow>> ComparePolicies(
    std::span<const SweepSpec> specs, std::span<const Scenario> scenarios,
    const OcmParams& params, const PlannerConfig& cfg, Objective objective);

std::vector<ComparisonRow> RowsFromSweeps(std::span<const SweepResult> sweeps,
                                          Objective objective);

// Fixed-width text table: policy, thresholds, median PKL, mean PKL, hazard
// rate, R_S, P_R.
std::string RenderComparisonTable(std::span<const ComparisonRow> rows);

}  // namespace critnav

#endif  // CRITNAV_SWEEP_H_
