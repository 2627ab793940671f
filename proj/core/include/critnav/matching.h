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

#ifndef CRITNAV_MATCHING_H_
#define CRITNAV_MATCHING_H_

#include <cstdint>
#include <span>
#include <vector>

#include "critnav/criticality.h"
#include "critnav/geometry.h"

namespace critnav {

inline constexpr double kDefaultMatchRadius = 2.0;  // meters

struct MatchedPair {
  int gt_index = 0;
  int det_index = 0;
  double center_distance = 0.0;

  friend bool operator==(const MatchedPair&, const MatchedPair&) = default;
};

struct MatchResult {
  std::vector<MatchedPair> pairs;
  std::vector<int> unmatched_gt;
  std::vector<int> unmatched_det;

  int tp() const { return static_cast<int>(pairs.size()); }
  int fp() const { return static_cast<int>(unmatched_det.size()); }
  int fn() const { return static_cast<int>(unmatched_gt.size()); }
};

// Greedy nearest-first center-distance matching between same-class boxes.
// Candidate pairs are visited by ascending distance; ties go to the lower
// detection index, then the lower ground-truth index.
MatchResult MatchDetections(std::span<const OrientedBox> ground_truth,
                            std::span<const Detection> detections,
                            double match_radius);

MatchResult MatchFrame(const Frame& frame, double match_radius);

struct PrecisionRecall {
  double precision = 1.0;
  double recall = 1.0;
};

// precision is 1 without detections, recall is 1 without ground truth.
PrecisionRecall ComputePrecisionRecall(const MatchResult& match);
PrecisionRecall ComputePrecisionRecall(std::int64_t tp, std::int64_t fp,
                                       std::int64_t fn);

// 101-point interpolated area under the precision/recall curve obtained by
// sweeping the confidence threshold over every distinct detection score,
// pooling all frames. Returns 0 when ground truth exists but nothing is
// detected, and 1 when the scenario has neither ground truth nor
// detections.
double AveragePrecision(const Scenario& scenario, double match_radius);
double AveragePrecision(std::span<const Frame> frames, double match_radius);

struct WeightedPrecisionRecall {
  double reliability_weighted_precision = 1.0;  // P_R
  double safety_weighted_recall = 1.0;          // R_S
};

// Criticality mass ratios. Detections are weighted by their own predicted
// criticality, ground truth by its true criticality. A ratio whose
// denominator is zero is 1.
WeightedPrecisionRecall ComputeWeightedPrecisionRecall(
    std::span<const OrientedBox> ground_truth,
    std::span<const Detection> detections, const MatchResult& match,
    const EgoState& ego, const OcmParams& params);

// Variant over precomputed criticalities; also returns the raw masses so
// callers can pool them across frames.
struct CriticalityMass {
  double matched_det = 0.0;
  double total_det = 0.0;
  double matched_gt = 0.0;
  double total_gt = 0.0;

  CriticalityMass& operator+=(const CriticalityMass& o);
  WeightedPrecisionRecall Ratios() const;
};

CriticalityMass ComputeCriticalityMass(std::span<const double> gt_kappa,
                                       std::span<const double> det_kappa,
                                       const MatchResult& match);

struct MetricsReport {
  double precision = 1.0;
  double recall = 1.0;
  double avg_precision = 0.0;
  double weighted_precision = 1.0;
  double weighted_recall = 1.0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
};

// Metrics for one frame's ground truth against `detections` (typically the
// filtered set).
MetricsReport EvaluateFrame(const Frame& frame,
                            std::span<const Detection> detections,
                            const OcmParams& params, double match_radius);

}  // namespace critnav

#endif  // CRITNAV_MATCHING_H_
