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

#include "critnav/synthesis.h"

#include <cmath>
#include <random>

#include "critnav/planner.h"
#include "critnav/scenario_io.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace critnav {
namespace {

using ::critnav::testing::MakeBox;

TEST(GenerateScenarioTest, ZeroObjectsGivesEgoOnlyFrames) {
  const Preset empty = GetPreset("empty").value();
  auto s = GenerateScenario(empty.layout, 1);
  ASSERT_TRUE(s.ok()) << s.status();
  ASSERT_EQ(s->frames.size(), 8u);
  for (const Frame& f : s->frames) EXPECT_TRUE(f.ground_truth.empty());
  EXPECT_TRUE(ValidateScenario(*s).ok());
}

TEST(GenerateScenarioTest, SameSeedSameScenario) {
  const Preset urban = GetPreset("urban").value();
  EXPECT_EQ(GenerateScenario(urban.layout, 42).value(),
            GenerateScenario(urban.layout, 42).value());
  EXPECT_NE(GenerateScenario(urban.layout, 42).value(),
            GenerateScenario(urban.layout, 43).value());
}

TEST(GenerateScenarioTest, Fig2BusAheadInEveryFrame) {
  Preset fig2 = GetPreset("fig2").value();
  fig2.layout.num_frames = 2;  // the bus is still ahead half a second later
  for (int seed = 0; seed < 20; ++seed) {
    Scenario s = GenerateScenario(fig2.layout, seed).value();
    for (const Frame& f : s.frames) {
      int buses_ahead = 0;
      for (const OrientedBox& b : f.ground_truth) {
        const Vec2 rel = b.center.position() - f.ego.pose.position();
        if (b.label == ObjectClass::kBus && rel.x > 0 && std::abs(rel.y) < 1.0) {
          ++buses_ahead;
        }
      }
      EXPECT_EQ(buses_ahead, 1) << seed;
    }
  }
}

TEST(GenerateScenarioTest, ObjectsDoNotOverlapAtSpawn) {
  const Preset urban = GetPreset("urban").value();
  for (int seed = 0; seed < 30; ++seed) {
    Scenario s = GenerateScenario(urban.layout, seed).value();
    const Frame& f = s.frames[0];
    const OrientedBox ego = FootprintBox(f.ego.footprint, f.ego.pose);
    for (size_t i = 0; i < f.ground_truth.size(); ++i) {
      EXPECT_FALSE(BoxesOverlap(ego, f.ground_truth[i]));
      for (size_t j = i + 1; j < f.ground_truth.size(); ++j) {
        EXPECT_FALSE(BoxesOverlap(f.ground_truth[i], f.ground_truth[j]));
      }
    }
  }
}

TEST(GenerateScenarioTest, InfeasibleLayoutFails) {
  ScenarioLayout layout;
  layout.background_objects = 200;
  layout.min_longitudinal = 5;
  layout.max_longitudinal = 15;
  layout.max_retries = 20;
  auto s = GenerateScenario(layout, 1);
  ASSERT_FALSE(s.ok());
  EXPECT_EQ(s.status().code(), absl::StatusCode::kFailedPrecondition);
}

TEST(SynthesizeDetectionsTest, NoiselessIsIdentity) {
  const Preset urban = GetPreset("urban").value();
  Scenario s = GenerateScenario(urban.layout, 7).value();
  Scenario d = SynthesizeDetections(s, NoiseModel::Noiseless());
  for (const Frame& f : d.frames) {
    ASSERT_EQ(f.detections.size(), f.ground_truth.size());
    for (size_t i = 0; i < f.detections.size(); ++i) {
      OrientedBox expected = f.ground_truth[i];
      expected.track_id = -1;
      EXPECT_EQ(f.detections[i].box, expected);
      EXPECT_EQ(f.detections[i].confidence, 1.0);
    }
  }
}

TEST(SynthesizeDetectionsTest, CertainMissDropsEverything) {
  Preset urban = GetPreset("urban").value();
  urban.noise.miss_base = 1.0;
  urban.noise.fp_rate = 0.0;
  Scenario s = GenerateScenario(urban.layout, 8).value();
  for (const Frame& f : SynthesizeDetections(s, urban.noise).frames) {
    EXPECT_TRUE(f.detections.empty());
  }
}

TEST(SynthesizeDetectionsTest, EmpiricalMissRateMatchesFormula) {
  NoiseModel noise;
  noise.fp_rate = 0;
  Frame f;
  f.ground_truth = {MakeBox(25, 0, 0, 4.5, 1.9)};
  const double p = MissProbability(noise, 25);
  EXPECT_DOUBLE_EQ(p, 0.05 + 0.004 * 25);
  std::mt19937_64 rng(109);
  const int n = 10000;
  int misses = 0;
  for (int i = 0; i < n; ++i) {
    if (SynthesizeFrameDetections(f, noise, rng).empty()) ++misses;
  }
  const double se = std::sqrt(p * (1 - p) / n);
  EXPECT_NEAR(static_cast<double>(misses) / n, p, 3 * se);
}

TEST(SynthesizeDetectionsTest, MissProbabilityClamps) {
  NoiseModel noise;
  noise.miss_base = 0.5;
  noise.miss_per_meter = 0.1;
  EXPECT_DOUBLE_EQ(MissProbability(noise, 100), 0.98);
  noise.miss_base = -0.5;
  noise.miss_per_meter = 0;
  EXPECT_EQ(MissProbability(noise, 10), 0.0);
}

TEST(SynthesizeDetectionsTest, AddingFramesKeepsEarlierNoise) {
  Preset urban = GetPreset("urban").value();
  urban.noise.seed = 77;
  Scenario longer = GenerateScenario(urban.layout, 9).value();
  Scenario shorter = longer;
  shorter.frames.resize(3);
  Scenario a = SynthesizeDetections(longer, urban.noise);
  Scenario b = SynthesizeDetections(shorter, urban.noise);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(a.frames[k].detections, b.frames[k].detections);
  EXPECT_EQ(SynthesizeDetections(longer, urban.noise), a);
}

TEST(SynthesizeDetectionsTest, ConfidencesInRangeAndFalsePositivesSpawnNearEgo) {
  Preset clutter = GetPreset("clutter").value();
  Scenario s = GenerateScenario(clutter.layout, 10).value();
  clutter.noise.seed = 11;
  int extra = 0;
  for (const Frame& f : SynthesizeDetections(s, clutter.noise).frames) {
    for (const Detection& d : f.detections) {
      EXPECT_GE(d.confidence, 0.0);
      EXPECT_LE(d.confidence, 1.0);
    }
    extra += static_cast<int>(f.detections.size()) -
             static_cast<int>(f.ground_truth.size());
  }
  EXPECT_GT(extra, 0);
}

TEST(SynthesizeDetectionsTest, GhostsStayOutOfTheLateralBand) {
  Frame frame;
  frame.ego.pose = {3.0, -2.0, 0.7};
  NoiseModel noise = NoiseModel::Noiseless();
  noise.fp_rate = 50.0;
  noise.fp_spawn_radius = 25.0;
  noise.fp_min_lateral = 4.0;
  std::mt19937_64 rng(5);
  const auto dets = SynthesizeFrameDetections(frame, noise, rng);
  ASSERT_GT(dets.size(), 20u);
  const double c = std::cos(frame.ego.pose.yaw), s = std::sin(frame.ego.pose.yaw);
  for (const Detection& d : dets) {
    const Vec2 rel = d.box.center.position() - frame.ego.pose.position();
    const double lateral = -s * rel.x + c * rel.y;
    EXPECT_GE(std::abs(lateral), 4.0 - 1e-9);
    EXPECT_LE(std::abs(lateral), 25.0 + 4.0 + 1e-9);
  }
}

TEST(NoiseModelTest, Validation) {
  EXPECT_TRUE(ValidateNoiseModel({}).ok());
  NoiseModel bad;
  bad.center_jitter_sigma = -1;
  EXPECT_FALSE(ValidateNoiseModel(bad).ok());
  bad = {};
  bad.tp_confidence.alpha = 0;
  EXPECT_FALSE(ValidateNoiseModel(bad).ok());
  bad = {};
  bad.fp_rate = -1;
  EXPECT_FALSE(ValidateNoiseModel(bad).ok());
  bad = {};
  bad.fp_min_lateral = -0.5;
  EXPECT_FALSE(ValidateNoiseModel(bad).ok());
}

TEST(PresetTest, AllPresetsGenerate) {
  for (const std::string& name : PresetNames()) {
    auto preset = GetPreset(name);
    ASSERT_TRUE(preset.ok()) << name;
    EXPECT_TRUE(ValidateNoiseModel(preset->noise).ok()) << name;
    for (int seed = 0; seed < 20; ++seed) {
      EXPECT_TRUE(GenerateScenario(preset->layout, seed).ok()) << name << seed;
    }
  }
  EXPECT_EQ(GetPreset("nope").status().code(), absl::StatusCode::kNotFound);
}

TEST(EndToEndTest, NoiselessDetectionsGiveZeroPkl) {
  const Preset urban = GetPreset("urban").value();
  Scenario s = SynthesizeDetections(GenerateScenario(urban.layout, 12).value(),
                                    NoiseModel::Noiseless());
  PlannerConfig cfg;
  for (const Frame& f : s.frames) {
    std::vector<OrientedBox> pred;
    for (const Detection& d : f.detections) pred.push_back(d.box);
    EXPECT_EQ(Pkl(Plan(f.ground_truth, f.ego, cfg), Plan(pred, f.ego, cfg))->total,
              0.0);
  }
}

}  // namespace
}  // namespace critnav
