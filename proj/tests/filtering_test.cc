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
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.h"

namespace critnav {
namespace {

using ::critnav::testing::MakeBox;

std::vector<Detection> RandomDetections(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> pos(-30, 30), vel(-10, 10), conf(0, 1);
  std::vector<Detection> out;
  for (int i = 0; i < n; ++i) {
    out.push_back({MakeBox(pos(rng), pos(rng), 0, 4.5, 1.9, {vel(rng), vel(rng)}),
                   conf(rng)});
  }
  return out;
}

std::vector<double> RandomKappa(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> k(0, 1);
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(k(rng));
  return out;
}

Detection WithConfidence(double c) { return {MakeBox(0, 0, 0, 1, 1), c}; }

TEST(ApplyPolicyTest, ConfidenceOnly) {
  std::vector<Detection> dets = {WithConfidence(0.6), WithConfidence(0.4)};
  std::vector<double> kappa = {0.0, 0.0};
  FilterOutcome out = ApplyPolicyWithKappa(dets, kappa, ConfidenceOnlyPolicy{0.5});
  EXPECT_EQ(out.kept_indices, (std::vector<int>{0}));
  ASSERT_EQ(out.dropped.size(), 1u);
  EXPECT_EQ(out.dropped[0].index, 1);
  EXPECT_EQ(out.dropped[0].reason, DropReason::kLowConfidence);
}

TEST(ApplyPolicyTest, ThresholdsAreInclusive) {
  std::vector<Detection> dets = {WithConfidence(0.5)};
  std::vector<double> kappa = {0.3};
  EXPECT_EQ(ApplyPolicyWithKappa(dets, kappa, ConfidenceOnlyPolicy{0.5}).kept.size(), 1u);
  EXPECT_EQ(ApplyPolicyWithKappa(dets, kappa, CascadePolicy{0.5, 0.3}).kept.size(), 1u);
  EXPECT_EQ(ApplyPolicyWithKappa(dets, kappa, OverridePolicy{0.9, 0.3}).kept.size(), 1u);
}

TEST(ApplyPolicyTest, OverrideKeepsCriticalLowConfidence) {
  std::vector<Detection> dets = {WithConfidence(0.30)};
  std::vector<double> kappa = {0.9};
  FilterOutcome out = ApplyPolicyWithKappa(dets, kappa, OverridePolicy{0.55, 0.8});
  EXPECT_EQ(out.kept.size(), 1u);
  out = ApplyPolicyWithKappa(dets, kappa, ConfidenceOnlyPolicy{0.55});
  EXPECT_TRUE(out.kept.empty());
}

TEST(ApplyPolicyTest, CascadeDropsLowCriticality) {
  std::vector<Detection> dets = {WithConfidence(0.6)};
  std::vector<double> kappa = {0.1};
  FilterOutcome out = ApplyPolicyWithKappa(dets, kappa, CascadePolicy{0.5, 0.3});
  ASSERT_EQ(out.dropped.size(), 1u);
  EXPECT_EQ(out.dropped[0].reason, DropReason::kLowCriticality);
}

TEST(ApplyPolicyTest, BinnedMapUsesContainingBin) {
  BinnedMapPolicy policy{{{0.0, 0.6}, {0.5, 0.3}}};
  std::vector<Detection> dets = {WithConfidence(0.4), WithConfidence(0.4)};
  std::vector<double> kappa = {0.7, 0.2};
  FilterOutcome out = ApplyPolicyWithKappa(dets, kappa, policy);
  EXPECT_EQ(out.kept_indices, (std::vector<int>{0}));
  EXPECT_DOUBLE_EQ(EffectiveConfidenceThreshold(policy, 0.5), 0.3);
  EXPECT_DOUBLE_EQ(EffectiveConfidenceThreshold(policy, 0.4999), 0.6);
}

TEST(ApplyPolicyTest, ComputesPredictedCriticality) {
  EgoState ego;
  ego.velocity = {10, 0};
  std::vector<Detection> dets = {
      {MakeBox(8, 0, 0, 4.5, 1.9), 0.3},     // on the path, close
      {MakeBox(-60, 40, 0, 4.5, 1.9), 0.3},  // far away
  };
  auto out = ApplyPolicy(dets, ego, {}, OverridePolicy{0.55, 0.8});
  ASSERT_TRUE(out.ok());
  EXPECT_GE(out->kappa[0], 0.8);
  EXPECT_EQ(out->kappa[1], 0.0);
  EXPECT_EQ(out->kept_indices, (std::vector<int>{0}));
}

TEST(ApplyPolicyTest, RejectsInvalidPolicy) {
  std::vector<Detection> dets;
  EgoState ego;
  EXPECT_FALSE(ApplyPolicy(dets, ego, {}, ConfidenceOnlyPolicy{1.2}).ok());
  EXPECT_FALSE(ApplyPolicy(dets, ego, {}, CascadePolicy{0.5, -0.1}).ok());
  EXPECT_FALSE(ApplyPolicy(dets, ego, {}, BinnedMapPolicy{}).ok());
  EXPECT_FALSE(
      ApplyPolicy(dets, ego, {}, BinnedMapPolicy{{{0.1, 0.5}}}).ok());
  EXPECT_FALSE(
      ApplyPolicy(dets, ego, {}, BinnedMapPolicy{{{0, 0.5}, {0.5, 0.3}, {0.5, 0.2}}})
          .ok());
  OcmParams bad;
  bad.t_max = 0;
  EXPECT_FALSE(ApplyPolicy(dets, ego, bad, ConfidenceOnlyPolicy{0.5}).ok());
  EXPECT_TRUE(ApplyPolicy(dets, ego, {}, OverridePolicy{0.5, 1.5}).ok());
}

TEST(PolicyMonotoneCheckTest, Examples) {
  const std::vector<double> samples = {0.0, 0.25, 0.5, 0.75, 1.0};
  EXPECT_TRUE(PolicyMonotoneCheck(BinnedMapPolicy{{{0, 0.6}, {0.5, 0.3}}}, samples));
  EXPECT_FALSE(PolicyMonotoneCheck(BinnedMapPolicy{{{0, 0.3}, {0.5, 0.6}}}, samples));
  EXPECT_TRUE(PolicyMonotoneCheck(ConfidenceOnlyPolicy{0.7}, samples));
  EXPECT_TRUE(PolicyMonotoneCheck(CascadePolicy{0.7, 0.4}, samples));
}

TEST(FilterPropertyTest, PartitionPreservesOrder) {
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> t(0, 1);
  for (int i = 0; i < 2000; ++i) {
    auto dets = RandomDetections(rng, 15);
    auto kappa = RandomKappa(rng, 15);
    const FilterPolicy policies[] = {
        ConfidenceOnlyPolicy{t(rng)}, CascadePolicy{t(rng), t(rng)},
        OverridePolicy{t(rng), t(rng)},
        BinnedMapPolicy{{{0, t(rng)}, {0.5, t(rng)}}}};
    for (const FilterPolicy& p : policies) {
      FilterOutcome out = ApplyPolicyWithKappa(dets, kappa, p);
      std::vector<int> all = out.kept_indices;
      for (const DroppedDetection& d : out.dropped) {
        all.push_back(d.index);
        EXPECT_EQ(d.detection, dets[d.index]);
      }
      std::sort(all.begin(), all.end());
      ASSERT_EQ(all.size(), dets.size());
      for (int k = 0; k < static_cast<int>(all.size()); ++k) EXPECT_EQ(all[k], k);
      EXPECT_TRUE(std::is_sorted(out.kept_indices.begin(), out.kept_indices.end()));
      ASSERT_EQ(out.kept.size(), out.kept_indices.size());
      for (size_t k = 0; k < out.kept.size(); ++k) {
        EXPECT_EQ(out.kept[k], dets[out.kept_indices[k]]);
      }
    }
  }
}

TEST(FilterPropertyTest, PolicyRelations) {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> t(0, 1);
  for (int i = 0; i < 2000; ++i) {
    auto dets = RandomDetections(rng, 15);
    auto kappa = RandomKappa(rng, 15);
    const double tc = t(rng);
    const auto base = ApplyPolicyWithKappa(dets, kappa, ConfidenceOnlyPolicy{tc});
    const auto unreachable =
        ApplyPolicyWithKappa(dets, kappa, OverridePolicy{tc, 1.0 + 1e-9});
    EXPECT_EQ(unreachable.kept_indices, base.kept_indices);
    const auto override_any =
        ApplyPolicyWithKappa(dets, kappa, OverridePolicy{0.0, t(rng)});
    EXPECT_EQ(override_any.kept.size(), dets.size());
    const auto over = ApplyPolicyWithKappa(dets, kappa, OverridePolicy{tc, t(rng)});
    EXPECT_TRUE(std::includes(over.kept_indices.begin(), over.kept_indices.end(),
                              base.kept_indices.begin(), base.kept_indices.end()));
    const auto cascade = ApplyPolicyWithKappa(dets, kappa, CascadePolicy{tc, t(rng)});
    EXPECT_TRUE(std::includes(base.kept_indices.begin(), base.kept_indices.end(),
                              cascade.kept_indices.begin(),
                              cascade.kept_indices.end()));
    const auto single = ApplyPolicyWithKappa(dets, kappa, BinnedMapPolicy{{{0, tc}}});
    EXPECT_EQ(single.kept_indices, base.kept_indices);
  }
}

TEST(FilterPropertyTest, Deterministic) {
  std::mt19937_64 rng(73);
  EgoState ego;
  ego.velocity = {8, 0};
  for (int i = 0; i < 200; ++i) {
    auto dets = RandomDetections(rng, 20);
    auto a = ApplyPolicy(dets, ego, {}, CascadePolicy{0.4, 0.2});
    auto b = ApplyPolicy(dets, ego, {}, CascadePolicy{0.4, 0.2});
    ASSERT_TRUE(a.ok() && b.ok());
    EXPECT_EQ(a->kept, b->kept);
    EXPECT_EQ(a->kept_indices, b->kept_indices);
    EXPECT_EQ(a->kappa, b->kappa);
    ASSERT_EQ(a->dropped.size(), b->dropped.size());
    for (size_t k = 0; k < a->dropped.size(); ++k) {
      EXPECT_EQ(a->dropped[k].index, b->dropped[k].index);
      EXPECT_EQ(a->dropped[k].reason, b->dropped[k].reason);
    }
  }
}

TEST(PolicyNameTest, Names) {
  EXPECT_EQ(PolicyName(ConfidenceOnlyPolicy{}), "confidence_only");
  EXPECT_EQ(PolicyName(CascadePolicy{}), "cascade");
  EXPECT_EQ(PolicyName(OverridePolicy{}), "override");
  EXPECT_EQ(PolicyName(BinnedMapPolicy{}), "binned_map");
}

}  // namespace
}  // namespace critnav
