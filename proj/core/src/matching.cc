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

#include "critnav/matching.h"

#include <algorithm>
#include <map>
#include <tuple>

namespace critnav {

MatchResult MatchDetections(std::span<const OrientedBox> ground_truth,
                            std::span<const Detection> detections,
                            double match_radius) {
  struct Candidate {
    double distance;
    int det;
    int gt;
  };
  std::vector<Candidate> candidates;
  for (int d = 0; d < static_cast<int>(detections.size()); ++d) {
    const OrientedBox& db = detections[d].box;
    for (int g = 0; g < static_cast<int>(ground_truth.size()); ++g) {
      const OrientedBox& gb = ground_truth[g];
      if (gb.label != db.label) continue;
      const double dist = Norm(db.center.position() - gb.center.position());
      if (dist <= match_radius) candidates.push_back({dist, d, g});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              return std::tie(a.distance, a.det, a.gt) <
                     std::tie(b.distance, b.det, b.gt);
            });

  std::vector<bool> gt_used(ground_truth.size(), false);
  std::vector<bool> det_used(detections.size(), false);
  MatchResult result;
  for (const Candidate& c : candidates) {
    if (gt_used[c.gt] || det_used[c.det]) continue;
    gt_used[c.gt] = true;
    det_used[c.det] = true;
    result.pairs.push_back({c.gt, c.det, c.distance});
  }
  for (int g = 0; g < static_cast<int>(gt_used.size()); ++g) {
    if (!gt_used[g]) result.unmatched_gt.push_back(g);
  }
  for (int d = 0; d < static_cast<int>(det_used.size()); ++d) {
    if (!det_used[d]) result.unmatched_det.push_back(d);
  }
  return result;
}

MatchResult MatchFrame(const Frame& frame, double match_radius) {
  return MatchDetections(frame.ground_truth, frame.detections, match_radius);
}

PrecisionRecall ComputePrecisionRecall(std::int64_t tp, std::int64_t fp,
                                       std::int64_t fn) {
  PrecisionRecall pr;
  if (tp + fp > 0) pr.precision = static_cast<double>(tp) / (tp + fp);
  if (tp + fn > 0) pr.recall = static_cast<double>(tp) / (tp + fn);
  return pr;
}

PrecisionRecall ComputePrecisionRecall(const MatchResult& match) {
  return ComputePrecisionRecall(match.tp(), match.fp(), match.fn());
}

double AveragePrecision(const Scenario& scenario, double match_radius) {
  return AveragePrecision(std::span<const Frame>(scenario.frames),
                          match_radius);
}

double AveragePrecision(std::span<const Frame> frames, double match_radius) {
  std::int64_t total_gt = 0;
  // confidence -> detections (frame, index) with that exact score
  std::map<double, std::vector<std::pair<int, int>>, std::greater<>> by_score;
  for (int f = 0; f < static_cast<int>(frames.size()); ++f) {
    total_gt += static_cast<std::int64_t>(frames[f].ground_truth.size());
    for (int d = 0; d < static_cast<int>(frames[f].detections.size()); ++d) {
      by_score[frames[f].detections[d].confidence].push_back({f, d});
    }
  }
  if (by_score.empty()) return total_gt == 0 ? 1.0 : 0.0;

  // Lowering the threshold only adds detections to the frames that own the
  // new score, so only those frames are re-matched.
  std::vector<std::vector<Detection>> kept(frames.size());
  std::vector<int> frame_tp(frames.size(), 0);
  std::int64_t tp = 0;
  std::int64_t n_kept = 0;
  std::vector<PrecisionRecall> curve;
  curve.reserve(by_score.size());
  for (const auto& [score, members] : by_score) {
    std::vector<int> dirty;
    for (const auto& [f, d] : members) {
      kept[f].push_back(frames[f].detections[d]);
      ++n_kept;
      dirty.push_back(f);
    }
    std::sort(dirty.begin(), dirty.end());
    dirty.erase(std::unique(dirty.begin(), dirty.end()), dirty.end());
    for (int f : dirty) {
      const int now =
          MatchDetections(frames[f].ground_truth, kept[f], match_radius).tp();
      tp += now - frame_tp[f];
      frame_tp[f] = now;
    }
    PrecisionRecall pr;
    pr.precision = static_cast<double>(tp) / static_cast<double>(n_kept);
    pr.recall = total_gt > 0
                    ? static_cast<double>(tp) / static_cast<double>(total_gt)
                    : 1.0;
    curve.push_back(pr);
  }

  // Envelope: best precision at recall >= r, scanned from high recall down.
  std::sort(curve.begin(), curve.end(),
            [](const PrecisionRecall& a, const PrecisionRecall& b) {
              return a.recall < b.recall;
            });
  double sum = 0.0;
  int idx = static_cast<int>(curve.size()) - 1;
  double best = 0.0;
  for (int r = 100; r >= 0; --r) {
    const double level = r / 100.0;
    while (idx >= 0 && curve[idx].recall >= level) {
      best = std::max(best, curve[idx].precision);
      --idx;
    }
    sum += best;
  }
  return sum / 101.0;
}

CriticalityMass& CriticalityMass::operator+=(const CriticalityMass& o) {
  matched_det += o.matched_det;
  total_det += o.total_det;
  matched_gt += o.matched_gt;
  total_gt += o.total_gt;
  return *this;
}

WeightedPrecisionRecall CriticalityMass::Ratios() const {
  WeightedPrecisionRecall w;
  if (total_det > 0.0) {
    w.reliability_weighted_precision = matched_det / total_det;
  }
  if (total_gt > 0.0) w.safety_weighted_recall = matched_gt / total_gt;
  return w;
}

CriticalityMass ComputeCriticalityMass(std::span<const double> gt_kappa,
                                       std::span<const double> det_kappa,
                                       const MatchResult& match) {
  CriticalityMass m;
  for (double k : gt_kappa) m.total_gt += k;
  for (double k : det_kappa) m.total_det += k;
  for (const MatchedPair& p : match.pairs) {
    m.matched_gt += gt_kappa[p.gt_index];
    m.matched_det += det_kappa[p.det_index];
  }
  return m;
}

WeightedPrecisionRecall ComputeWeightedPrecisionRecall(
    std::span<const OrientedBox> ground_truth,
    std::span<const Detection> detections, const MatchResult& match,
    const EgoState& ego, const OcmParams& params) {
  std::vector<double> gt_kappa;
  gt_kappa.reserve(ground_truth.size());
  for (const OrientedBox& b : ground_truth) {
    gt_kappa.push_back(Kappa(ego, b, params));
  }
  std::vector<double> det_kappa;
  det_kappa.reserve(detections.size());
  for (const Detection& d : detections) {
    det_kappa.push_back(Kappa(ego, d.box, params));
  }
  return ComputeCriticalityMass(gt_kappa, det_kappa, match).Ratios();
}

MetricsReport EvaluateFrame(const Frame& frame,
                            std::span<const Detection> detections,
                            const OcmParams& params, double match_radius) {
  const MatchResult match =
      MatchDetections(frame.ground_truth, detections, match_radius);
  const PrecisionRecall pr = ComputePrecisionRecall(match);
  const WeightedPrecisionRecall w = ComputeWeightedPrecisionRecall(
      frame.ground_truth, detections, match, frame.ego, params);

  Frame filtered = frame;
  filtered.detections.assign(detections.begin(), detections.end());

  MetricsReport report;
  report.precision = pr.precision;
  report.recall = pr.recall;
  report.avg_precision =
      AveragePrecision(std::span<const Frame>(&filtered, 1), match_radius);
  report.weighted_precision = w.reliability_weighted_precision;
  report.weighted_recall = w.safety_weighted_recall;
  report.tp = match.tp();
  report.fp = match.fp();
  report.fn = match.fn();
  return report;
}

}  // namespace critnav
