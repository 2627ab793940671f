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
#include <random>
#include <set>
#include <vector>

#include "gtest/gtest.h"
#include "oracles.h"
#include "test_util.h"

namespace critnav {
namespace {

using ::critnav::testing::MakeBox;

Detection Det(double x, double y, double confidence,
              ObjectClass label = ObjectClass::kCar) {
  return {MakeBox(x, y, 0, 4, 2, {}, label), confidence};
}

// Small frame with up to `max_det` detections near up to six objects.
Frame RandomFrame(std::mt19937_64& rng, int max_det) {
  std::uniform_real_distribution<double> pos(-15, 15), jitter(-1.5, 1.5);
  std::uniform_int_distribution<int> n_gt(0, 6), n_det(0, max_det),
      label(0, 1);
  // A coarse confidence lattice so ties between scores occur.
  std::uniform_int_distribution<int> conf(0, 20);
  Frame f;
  for (int i = n_gt(rng); i > 0; --i) {
    f.ground_truth.push_back(MakeBox(pos(rng), pos(rng), 0, 4, 2, {},
                                     static_cast<ObjectClass>(label(rng))));
  }
  for (int i = n_det(rng); i > 0; --i) {
    Detection d;
    if (!f.ground_truth.empty() && label(rng) == 0) {
      const OrientedBox& g = f.ground_truth[std::uniform_int_distribution<size_t>(
          0, f.ground_truth.size() - 1)(rng)];
      d.box = MakeBox(g.center.x + jitter(rng), g.center.y + jitter(rng), 0, 4,
                      2, {}, g.label);
    } else {
      d.box = MakeBox(pos(rng), pos(rng), 0, 4, 2, {},
                      static_cast<ObjectClass>(label(rng)));
    }
    d.confidence = conf(rng) / 20.0;
    f.detections.push_back(d);
  }
  return f;
}

TEST(MatchFrameTest, IdenticalDetectionsAllMatch) {
  Frame f;
  f.ground_truth = {MakeBox(5, 0, 0, 4, 2), MakeBox(-3, 4, 1, 1, 1, {},
                                                    ObjectClass::kPedestrian)};
  for (const OrientedBox& b : f.ground_truth) f.detections.push_back({b, 0.7});
  MatchResult m = MatchFrame(f, kDefaultMatchRadius);
  EXPECT_EQ(m.tp(), 2);
  EXPECT_EQ(m.fp(), 0);
  EXPECT_EQ(m.fn(), 0);
}

TEST(MatchFrameTest, NoDetectionsLeavesGroundTruthUnmatched) {
  Frame f;
  f.ground_truth = {MakeBox(5, 0, 0, 4, 2), MakeBox(-3, 4, 0, 4, 2)};
  MatchResult m = MatchFrame(f, kDefaultMatchRadius);
  EXPECT_EQ(m.tp(), 0);
  EXPECT_EQ(m.unmatched_gt, (std::vector<int>{0, 1}));
}

TEST(MatchFrameTest, NearerDetectionWins) {
  Frame f;
  f.ground_truth = {MakeBox(0, 0, 0, 4, 2)};
  f.detections = {Det(1.5, 0, 0.9), Det(0, 0.5, 0.2)};
  MatchResult m = MatchFrame(f, kDefaultMatchRadius);
  ASSERT_EQ(m.pairs.size(), 1u);
  EXPECT_EQ(m.pairs[0].det_index, 1);
  EXPECT_DOUBLE_EQ(m.pairs[0].center_distance, 0.5);
  EXPECT_EQ(m.unmatched_det, (std::vector<int>{0}));
}

TEST(MatchFrameTest, TieGoesToLowerDetectionIndex) {
  Frame f;
  f.ground_truth = {MakeBox(0, 0, 0, 4, 2)};
  f.detections = {Det(1, 0, 0.1), Det(-1, 0, 0.9)};
  MatchResult m = MatchFrame(f, kDefaultMatchRadius);
  ASSERT_EQ(m.pairs.size(), 1u);
  EXPECT_EQ(m.pairs[0].det_index, 0);
}

TEST(MatchFrameTest, RespectsClassAndRadius) {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 2000; ++i) {
    Frame f = RandomFrame(rng, 12);
    MatchResult m = MatchFrame(f, kDefaultMatchRadius);
    std::set<int> gts, dets;
    for (const MatchedPair& p : m.pairs) {
      const OrientedBox& g = f.ground_truth[p.gt_index];
      const OrientedBox& d = f.detections[p.det_index].box;
      EXPECT_EQ(g.label, d.label);
      EXPECT_LE(p.center_distance, kDefaultMatchRadius);
      EXPECT_TRUE(gts.insert(p.gt_index).second);
      EXPECT_TRUE(dets.insert(p.det_index).second);
    }
    for (int g : m.unmatched_gt) EXPECT_TRUE(gts.insert(g).second);
    for (int d : m.unmatched_det) EXPECT_TRUE(dets.insert(d).second);
    EXPECT_EQ(gts.size(), f.ground_truth.size());
    EXPECT_EQ(dets.size(), f.detections.size());
    EXPECT_EQ(m.tp(), oracle::GreedyMatchCount(f.ground_truth, f.detections,
                                               kDefaultMatchRadius));
  }
}

TEST(PrecisionRecallTest, Examples) {
  PrecisionRecall pr = ComputePrecisionRecall(3, 1, 0);
  EXPECT_DOUBLE_EQ(pr.precision, 0.75);
  EXPECT_DOUBLE_EQ(pr.recall, 1.0);
  pr = ComputePrecisionRecall(MatchFrame(Frame{}, kDefaultMatchRadius));
  EXPECT_EQ(pr.precision, 1.0);
  EXPECT_EQ(pr.recall, 1.0);
  pr = ComputePrecisionRecall(2, 2, 2);
  EXPECT_DOUBLE_EQ(pr.precision, 0.5);
  EXPECT_DOUBLE_EQ(pr.recall, 0.5);
}

TEST(AveragePrecisionTest, PerfectDetectionsScoreOne) {
  Scenario s;
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> conf(0.01, 1.0);
  for (int k = 0; k < 3; ++k) {
    Frame f;
    f.ground_truth = {MakeBox(k, 0, 0, 4, 2), MakeBox(10, k + 5.0, 0, 4, 2)};
    for (const OrientedBox& b : f.ground_truth) f.detections.push_back({b, conf(rng)});
    s.frames.push_back(f);
  }
  EXPECT_DOUBLE_EQ(AveragePrecision(s, kDefaultMatchRadius), 1.0);
}

TEST(AveragePrecisionTest, NoDetections) {
  Scenario s;
  s.frames.push_back({});
  EXPECT_EQ(AveragePrecision(s, kDefaultMatchRadius), 1.0);
  s.frames[0].ground_truth = {MakeBox(0, 0, 0, 4, 2)};
  EXPECT_EQ(AveragePrecision(s, kDefaultMatchRadius), 0.0);
}

TEST(AveragePrecisionTest, HandComputedCurve) {
  // Scores 0.9 (tp), 0.8 (fp), 0.7 (tp) against 2 objects: the curve has
  // points (0.5, 1), (0.5, 0.5), (1, 2/3). Interpolated precision is 1 for
  // recall 0..0.5 (51 points) and 2/3 for 0.51..1 (50 points).
  Frame f;
  f.ground_truth = {MakeBox(0, 0, 0, 4, 2), MakeBox(20, 0, 0, 4, 2)};
  f.detections = {Det(0, 0, 0.9), Det(-20, 0, 0.8), Det(20, 0, 0.7)};
  Scenario s;
  s.frames = {f};
  EXPECT_NEAR(AveragePrecision(s, kDefaultMatchRadius),
              (51.0 + 50.0 * 2.0 / 3.0) / 101.0, 1e-12);
}

TEST(AveragePrecisionTest, MatchesExhaustiveEnumeration) {
  std::mt19937_64 rng(53);
  for (int i = 0; i < 300; ++i) {
    std::vector<Frame> frames;
    int total = 0;
    for (int k = 0; k < 3; ++k) {
      Frame f = RandomFrame(rng, 7);
      total += static_cast<int>(f.detections.size());
      frames.push_back(f);
    }
    ASSERT_LE(total, 21);
    EXPECT_NEAR(AveragePrecision(frames, kDefaultMatchRadius),
                oracle::ExhaustiveAveragePrecision(frames, kDefaultMatchRadius),
                1e-6)
        << i;
  }
}

TEST(WeightedMetricsTest, CriticalityMassRatios) {
  MatchResult m;
  m.pairs = {{0, 0, 0.1}};
  m.unmatched_gt = {1};
  const std::vector<double> gt_kappa = {0.8, 0.2};
  const std::vector<double> det_kappa = {0.7};
  WeightedPrecisionRecall w =
      ComputeCriticalityMass(gt_kappa, det_kappa, m).Ratios();
  EXPECT_DOUBLE_EQ(w.safety_weighted_recall, 0.8);
  EXPECT_DOUBLE_EQ(w.reliability_weighted_precision, 1.0);
}

TEST(WeightedMetricsTest, AllMatchedAndNoneDetected) {
  EgoState ego;
  std::vector<OrientedBox> gt = {MakeBox(5, 0, 0, 4, 2), MakeBox(12, 3, 0, 4, 2)};
  std::vector<Detection> dets;
  for (const OrientedBox& b : gt) dets.push_back({b, 0.5});
  MatchResult m = MatchDetections(gt, dets, kDefaultMatchRadius);
  EXPECT_DOUBLE_EQ(
      ComputeWeightedPrecisionRecall(gt, dets, m, ego, {}).safety_weighted_recall,
      1.0);
  std::vector<Detection> none;
  m = MatchDetections(gt, none, kDefaultMatchRadius);
  WeightedPrecisionRecall w = ComputeWeightedPrecisionRecall(gt, none, m, ego, {});
  EXPECT_EQ(w.safety_weighted_recall, 0.0);
  EXPECT_EQ(w.reliability_weighted_precision, 1.0);
}

TEST(WeightedMetricsTest, ZeroCriticalityMassConvention) {
  EgoState ego;
  std::vector<OrientedBox> gt = {MakeBox(100, 0, 0, 4, 2)};  // kappa 0
  std::vector<Detection> none;
  MatchResult m = MatchDetections(gt, none, kDefaultMatchRadius);
  EXPECT_EQ(ComputeWeightedPrecisionRecall(gt, none, m, ego, {})
                .safety_weighted_recall,
            1.0);
}

TEST(MetricsInvariantTest, AddingFalsePositive) {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> pos(-25, 25);
  for (int i = 0; i < 2000; ++i) {
    Frame f = RandomFrame(rng, 10);
    MetricsReport before = EvaluateFrame(f, f.detections, {}, kDefaultMatchRadius);
    // A class no object carries can never be matched.
    std::vector<Detection> more = f.detections;
    more.push_back(Det(pos(rng), pos(rng), 0.5, ObjectClass::kOther));
    MetricsReport after = EvaluateFrame(f, more, {}, kDefaultMatchRadius);
    EXPECT_LE(after.precision, before.precision);
    EXPECT_LE(after.weighted_precision, before.weighted_precision + 1e-15);
    EXPECT_EQ(after.recall, before.recall);
    EXPECT_EQ(after.weighted_recall, before.weighted_recall);
  }
}

TEST(MetricsInvariantTest, RemovingUnmatchedGroundTruth) {
  std::mt19937_64 rng(61);
  for (int i = 0; i < 2000; ++i) {
    Frame f = RandomFrame(rng, 10);
    MatchResult m = MatchFrame(f, kDefaultMatchRadius);
    if (m.unmatched_gt.empty()) continue;
    MetricsReport before = EvaluateFrame(f, f.detections, {}, kDefaultMatchRadius);
    Frame g = f;
    g.ground_truth.erase(g.ground_truth.begin() + m.unmatched_gt.front());
    MetricsReport after = EvaluateFrame(g, g.detections, {}, kDefaultMatchRadius);
    EXPECT_GE(after.recall, before.recall);
    EXPECT_GE(after.weighted_recall + 1e-15, before.weighted_recall);
  }
}

}  // namespace
}  // namespace critnav
