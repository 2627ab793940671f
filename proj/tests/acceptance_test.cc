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

// Acceptance suite: runs criteria 1-9 and prints one PASS/FAIL line each.
// Exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "commands.h"
#include "critnav/criticality.h"
#include "critnav/filtering.h"
#include "critnav/matching.h"
#include "critnav/planner.h"
#include "critnav/safety.h"
#include "critnav/sweep.h"
#include "critnav/synthesis.h"
#include "oracles.h"
#include "test_util.h"

namespace critnav {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

// Seeded corpus from a preset; scenario i uses layout seed base + i.
std::vector<Scenario> Corpus(const std::string& preset, int count, std::uint64_t base,
                             bool noiseless = false) {
  const Preset p = GetPreset(preset).value();
  std::vector<Scenario> out;
  for (int i = 0; i < count; ++i) {
    ScenarioLayout layout = p.layout;
    layout.id = absl::StrFormat("%s-%03d", preset, i);
    Scenario s = GenerateScenario(layout, base + i).value();
    NoiseModel noise = noiseless ? NoiseModel::Noiseless() : p.noise;
    noise.seed = (base + i) * 1000003ull + 17;
    out.push_back(SynthesizeDetections(s, noise));
  }
  return out;
}

// 1. Perfect detector gives zero PKL and no perception-induced hazards.
Verdict PerfectDetectorZero() {
  const auto start = Clock::now();
  const std::vector<Scenario> corpus = Corpus("urban", 20, 100, /*noiseless=*/true);
  const PlannerConfig cfg;
  const OcmParams ocm;
  auto run = EvaluatePolicy(corpus, ConfidenceOnlyPolicy{0.5}, ocm, cfg);
  if (!run.ok()) return {false, run.status().ToString()};
  int nonzero = 0;
  for (const FrameEvaluation& f : run->frames) nonzero += f.pkl.total != 0.0;
  auto rate = HazardRate(corpus, ConfidenceOnlyPolicy{0.5}, ocm, cfg);
  if (!rate.ok()) return {false, rate.status().ToString()};
  const double secs = Seconds(start);
  return {nonzero == 0 && *rate == 0.0 && run->summary.hazard_rate == 0.0 && secs <= 60,
          absl::StrFormat("%d frames, %d with nonzero PKL, hazard rate %g, %.1fs",
                          run->frames.size(), nonzero, *rate, secs)};
}

// 2. OCM bounds, thresholds and monotonicity over 1e5 random pairs.
Verdict OcmProperties() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  const OcmParams p;
  struct Sample {
    double d, dcpa, kd, kr, kt;
    std::optional<double> ttc;
  };
  int violations = 0;
  std::string first;
  auto fail = [&](const std::string& what) {
    if (violations++ == 0) first = what;
  };
  Sample prev{};
  const int kPairs = 100000;
  for (int i = 0; i < kPairs; ++i) {
    const EgoState ego = testing::RandomEgo(rng);
    const OrientedBox box = testing::RandomBoxNear(rng, ego.pose.position(), 45.0);
    const CriticalityScore s = ComputeCriticality(ego, box, p);
    for (double c : {s.kappa_d, s.kappa_r, s.kappa_t, s.kappa}) {
      if (!(c >= 0.0 && c <= 1.0)) fail(absl::StrFormat("pair %d: component %g", i, c));
    }
    if (std::abs(s.kappa - (p.w_distance * s.kappa_d + p.w_route * s.kappa_r +
                            p.w_ttc * s.kappa_t)) > 1e-12) {
      fail(absl::StrFormat("pair %d: kappa is not the weighted sum", i));
    }
    const RelativeState rel = ComputeRelativeState(ego, box);
    const double d = Norm(rel.position);
    const double dcpa = ComputeClosestApproach(rel.position, rel.velocity, p.horizon).distance;
    const std::optional<double> ttc = TimeToCollision(ego, box);
    if (d >= p.d_max && s.kappa_d != 0.0) fail(absl::StrFormat("pair %d: kappa_d beyond d_max", i));
    if (dcpa >= p.r_max && s.kappa_r != 0.0) fail(absl::StrFormat("pair %d: kappa_r beyond r_max", i));
    if (!ttc.has_value() && s.kappa_t != 0.0) fail(absl::StrFormat("pair %d: kappa_t without collision", i));
    if (ttc.has_value() && *ttc >= p.t_max && s.kappa_t != 0.0) {
      fail(absl::StrFormat("pair %d: kappa_t beyond t_max", i));
    }
    const Sample cur{d, dcpa, s.kappa_d, s.kappa_r, s.kappa_t, ttc};
    if (i > 0) {
      // Ordered pairs: the closer/sooner sample must not score lower.
      const auto& [lo_d, hi_d] = cur.d <= prev.d ? std::pair(cur, prev) : std::pair(prev, cur);
      if (lo_d.kd < hi_d.kd) fail(absl::StrFormat("pair %d: kappa_d not monotone", i));
      const auto& [lo_r, hi_r] =
          cur.dcpa <= prev.dcpa ? std::pair(cur, prev) : std::pair(prev, cur);
      if (lo_r.kr < hi_r.kr) fail(absl::StrFormat("pair %d: kappa_r not monotone", i));
      if (cur.ttc && prev.ttc) {
        const auto& [lo_t, hi_t] =
            *cur.ttc <= *prev.ttc ? std::pair(cur, prev) : std::pair(prev, cur);
        if (lo_t.kt < hi_t.kt) fail(absl::StrFormat("pair %d: kappa_t not monotone", i));
      }
    }
    prev = cur;
  }
  const double secs = Seconds(start);
  return {violations == 0 && secs <= 60,
          absl::StrFormat("%d pairs, %d violations%s, %.1fs", kPairs, violations,
                          violations ? " (first: " + first + ")" : "", secs)};
}

// 3. PKL against direct summation on 100 random plan pairs.
Verdict KlOracle() {
  std::mt19937_64 rng(33);
  PlannerConfig cfg;
  cfg.half_extent = 20.0;
  cfg.steps = 8;
  std::uniform_int_distribution<int> count(0, 6);
  double worst = 0.0;
  int negative = 0, self_nonzero = 0;
  for (int i = 0; i < 100; ++i) {
    const EgoState ego = testing::RandomEgo(rng);
    std::vector<OrientedBox> a, b;
    for (int k = count(rng); k > 0; --k) a.push_back(testing::RandomBoxNear(rng, ego.pose.position(), 20));
    for (int k = count(rng); k > 0; --k) b.push_back(testing::RandomBoxNear(rng, ego.pose.position(), 20));
    const PlanDistribution p = Plan(a, ego, cfg), q = Plan(b, ego, cfg);
    const PklScore score = Pkl(p, q).value();
    double direct_total = 0.0;
    for (int t = 0; t < cfg.steps; ++t) {
      const auto ps = p.step(t), qs = q.step(t);
      const double direct = oracle::DirectKl({ps.begin(), ps.end()}, {qs.begin(), qs.end()});
      worst = std::max(worst, std::abs(score.per_step[t] - direct));
      direct_total += direct;
      negative += score.per_step[t] < 0.0;
    }
    worst = std::max(worst, std::abs(score.total - direct_total));
    self_nonzero += Pkl(p, p)->total != 0.0;
  }
  return {worst <= 1e-9 && negative == 0 && self_nonzero == 0,
          absl::StrFormat("max |pkl - oracle| %.3g, %d negative steps, %d nonzero self-KL",
                          worst, negative, self_nonzero)};
}

struct FamilySweeps {
  SweepResult confidence_only;
  SweepResult cascade;
};

SweepSpec DefaultSpec(PolicyFamily family) {
  SweepSpec spec;
  spec.family = family;
  spec.confidence_grid = LinearGrid(0.0, 1.0, 11);
  if (family != PolicyFamily::kConfidenceOnly) spec.criticality_grid = LinearGrid(0.0, 1.0, 11);
  return spec;
}

// 4. Hypothesis 1 on the clutter corpus.
Verdict CascadeBeatsConfidence(const std::vector<Scenario>& clutter, FamilySweeps& out) {
  const auto start = Clock::now();
  const OcmParams ocm;
  const PlannerConfig cfg;
  auto conf = RunSweep(DefaultSpec(PolicyFamily::kConfidenceOnly), clutter, ocm, cfg);
  auto casc = RunSweep(DefaultSpec(PolicyFamily::kCascade), clutter, ocm, cfg);
  if (!conf.ok() || !casc.ok()) return {false, "sweep failed"};
  const SweepRecord& bc = conf->Best(Objective::kMedianPkl);
  const SweepRecord& bk = casc->Best(Objective::kMedianPkl);
  int strictly_better = 0;
  for (std::size_t s = 0; s < clutter.size(); ++s) {
    strictly_better += bk.per_scenario[s].median < bc.per_scenario[s].median;
  }
  const double share = static_cast<double>(strictly_better) / clutter.size();
  const double secs = Seconds(start);
  out = {*conf, *casc};
  return {bk.summary.pkl.median <= bc.summary.pkl.median && share >= 0.6 && secs <= 600,
          absl::StrFormat("median PKL cascade %.3f [%.2f; %.2f] vs confidence_only %.3f "
                          "[%.2f]; cascade strictly better on %d/%d seeds (%.0f%%), %.1fs",
                          bk.summary.pkl.median, bk.confidence_threshold,
                          *bk.criticality_threshold, bc.summary.pkl.median,
                          bc.confidence_threshold, strictly_better, clutter.size(),
                          100 * share, secs)};
}

// 5. Hypothesis 2 on the fig2 corpus, plus the PKL caveat on clutter.
Verdict OverrideRecoversCriticalObject(const std::vector<Scenario>& clutter,
                                       const FamilySweeps& clutter_sweeps) {
  const OcmParams ocm;
  const PlannerConfig cfg;
  const std::vector<Scenario> fig2 = Corpus("fig2", 50, 500);
  auto conf = RunSweep(DefaultSpec(PolicyFamily::kConfidenceOnly), fig2, ocm, cfg);
  if (!conf.ok()) return {false, conf.status().ToString()};
  const SweepRecord& best = conf->Best(Objective::kMedianPkl);
  const double tau = best.confidence_threshold;

  // Precondition: the bus is detected below the optimal threshold often.
  int frames = 0, below = 0;
  for (const Scenario& s : fig2) {
    for (const Frame& f : s.frames) {
      ++frames;
      const MatchResult m = MatchFrame(f, kDefaultMatchRadius);
      for (const MatchedPair& pair : m.pairs) {
        if (f.ground_truth[pair.gt_index].label == ObjectClass::kBus &&
            f.detections[pair.det_index].confidence < tau) {
          ++below;
        }
      }
    }
  }
  const double below_share = static_cast<double>(below) / frames;

  auto over = EvaluatePolicy(fig2, OverridePolicy{tau, 0.8}, ocm, cfg);
  if (!over.ok()) return {false, over.status().ToString()};
  const bool a = over->summary.weighted_recall > best.summary.weighted_recall;
  const bool b = over->summary.hazard_rate < best.summary.hazard_rate;

  // (c) override at 0.8, tuned over confidence, against the cascade optimum.
  SweepSpec ospec = DefaultSpec(PolicyFamily::kOverride);
  ospec.criticality_grid = {0.8};
  auto over_clutter = RunSweep(ospec, clutter, ocm, cfg);
  if (!over_clutter.ok()) return {false, over_clutter.status().ToString()};
  const double over_mean = over_clutter->Best(Objective::kMedianPkl).summary.pkl.mean;
  const double casc_mean = clutter_sweeps.cascade.Best(Objective::kMedianPkl).summary.pkl.mean;
  const bool c = over_mean >= casc_mean;

  return {below_share >= 0.3 && a && b && c,
          absl::StrFormat(
              "tau_c* %.2f, bus below tau_c* in %.0f%% of frames; R_S %.3f vs %.3f (%s), "
              "hazard rate %.3f vs %.3f (%s); clutter mean PKL override %.3f vs cascade "
              "%.3f (%s)",
              tau, 100 * below_share, over->summary.weighted_recall,
              best.summary.weighted_recall, a ? "higher" : "NOT higher",
              over->summary.hazard_rate, best.summary.hazard_rate, b ? "lower" : "NOT lower",
              over_mean, casc_mean, c ? ">=" : "NOT >=")};
}

// 6. Average precision against exhaustive threshold enumeration.
Verdict ApOracle() {
  std::mt19937_64 rng(66);
  std::uniform_int_distribution<int> n_gt(0, 10), n_fp(0, 6);
  std::uniform_real_distribution<double> pos(-30, 30), jitter(-1.5, 1.5), u(0, 1);
  // Coarse scores so thresholds tie.
  std::uniform_int_distribution<int> score(0, 20);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    Frame f;
    const int g = n_gt(rng);
    for (int k = 0; k < g; ++k) {
      const ObjectClass label = u(rng) < 0.7 ? ObjectClass::kCar : ObjectClass::kPedestrian;
      f.ground_truth.push_back(
          testing::MakeBox(pos(rng), pos(rng), 0, 4, 2, {}, label));
      if (u(rng) < 0.8 && f.detections.size() < 20) {
        OrientedBox d = f.ground_truth.back();
        d.center.x += jitter(rng);
        d.center.y += jitter(rng);
        f.detections.push_back({d, score(rng) / 20.0});
      }
    }
    for (int k = n_fp(rng); k > 0 && f.detections.size() < 20; --k) {
      const ObjectClass label = u(rng) < 0.7 ? ObjectClass::kCar : ObjectClass::kPedestrian;
      f.detections.push_back(
          {testing::MakeBox(pos(rng), pos(rng), 0, 4, 2, {}, label), score(rng) / 20.0});
    }
    const std::vector<Frame> frames = {f};
    worst = std::max(worst, std::abs(AveragePrecision(frames, kDefaultMatchRadius) -
                                     oracle::ExhaustiveAveragePrecision(
                                         frames, kDefaultMatchRadius)));
  }
  return {worst <= 1e-6, absl::StrFormat("50 frames, max |AP - oracle| %.3g", worst)};
}

// 7. Separating-axis overlap against Monte Carlo sampling.
Verdict OverlapOracle() {
  std::mt19937_64 rng(77), sampler(78);
  std::uniform_real_distribution<double> pos(-4, 4), yaw(-3.2, 3.2), size(0.3, 6);
  int checked = 0, disagree = 0, excluded = 0;
  while (checked < 1000) {
    const OrientedBox a = testing::MakeBox(pos(rng), pos(rng), yaw(rng), size(rng), size(rng));
    const OrientedBox b = testing::MakeBox(pos(rng), pos(rng), yaw(rng), size(rng), size(rng));
    const auto pa = oracle::Polygon(a), pb = oracle::Polygon(b);
    if (oracle::PolygonDistance(pa, pb) <= 1e-6 &&
        oracle::Area(oracle::Intersect(pa, pb)) <
            0.01 * std::min(oracle::Area(pa), oracle::Area(pb))) {
      ++excluded;
      continue;
    }
    ++checked;
    const bool mc = oracle::MonteCarloOverlap(a, b, 10000, sampler) ||
                    oracle::MonteCarloOverlap(b, a, 10000, sampler);
    disagree += BoxesOverlap(a, b) != mc;
  }
  return {disagree == 0,
          absl::StrFormat("%d pairs, %d disagreements, %d near-tangent pairs excluded",
                          checked, disagree, excluded)};
}

// 8. The CLI pipeline reproduces byte-identical outputs.
std::map<std::string, std::string> Snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    files[fs::relative(e.path(), root).string()] = s.str();
  }
  return files;
}

int Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "critnav");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (code != 0) std::fprintf(stderr, "%s", err.str().c_str());
  return code;
}

Verdict CliReproducible() {
  const fs::path base = fs::temp_directory_path() / "critnav_acceptance_repro";
  std::vector<std::map<std::string, std::string>> runs;
  for (const char* tag : {"a", "b"}) {
    const fs::path root = base / tag;
    fs::remove_all(root);
    const std::string sc = (root / "scenarios").string();
    const std::vector<std::string> common = {"--set", "generate.layout.num_frames=3",
                                             "--set", "outputs.filter_audit=true"};
    auto with = [&](std::vector<std::string> args) {
      args.insert(args.end(), common.begin(), common.end());
      return Cli(args);
    };
    if (with({"gen", "--preset", "clutter", "--count", "3", "--seed", "9", "-o", sc}) != 0 ||
        with({"eval", "-s", sc, "-o", (root / "eval").string()}) != 0 ||
        with({"sweep", "-s", sc, "-o", (root / "sweep").string()}) != 0 ||
        with({"render", "-s", sc, "-f", "1", "-o", (root / "render").string(), "--set",
              "render.layers.trajectory=true"}) != 0) {
      return {false, "a CLI step failed"};
    }
    runs.push_back(Snapshot(root));
  }
  fs::remove_all(base);
  int differing = 0;
  for (const auto& [name, bytes] : runs[0]) {
    auto it = runs[1].find(name);
    differing += it == runs[1].end() || it->second != bytes;
  }
  const bool same_set = runs[0].size() == runs[1].size();
  int svgs = 0, jsonl = 0;
  for (const auto& [name, _] : runs[0]) {
    svgs += name.ends_with(".svg");
    jsonl += name.ends_with(".jsonl");
  }
  return {same_set && differing == 0 && svgs > 0 && jsonl > 0,
          absl::StrFormat("%d files (%d SVG, %d JSON-lines), %d differ", runs[0].size(),
                          svgs, jsonl, differing)};
}

// 9. Empirical miss rate against the configured formula.
Verdict MissCalibration() {
  NoiseModel noise = GetPreset("urban")->noise;
  noise.fp_rate = 0.0;
  std::vector<std::string> parts;
  bool pass = true;
  for (double distance : {10.0, 25.0, 60.0}) {
    Frame frame;
    frame.ground_truth.push_back(testing::MakeBox(distance, 0.0, 0.0, 4.5, 1.9));
    const double p = MissProbability(noise, distance);
    const int n = 10000;
    int missed = 0;
    std::mt19937_64 rng(static_cast<std::uint64_t>(distance) * 7 + 1);
    for (int i = 0; i < n; ++i) {
      missed += SynthesizeFrameDetections(frame, noise, rng).empty();
    }
    const double rate = static_cast<double>(missed) / n;
    const double se = std::sqrt(p * (1 - p) / n);
    const double z = se > 0 ? (rate - p) / se : 0.0;
    pass = pass && std::abs(rate - p) <= 3 * se;
    parts.push_back(absl::StrFormat("d=%gm p=%.4f observed %.4f (z=%+.2f)", distance, p,
                                    rate, z));
  }
  std::string detail;
  for (const auto& s : parts) detail += (detail.empty() ? "" : "; ") + s;
  return {pass, detail};
}

}  // namespace
}  // namespace critnav

int main() {
  using namespace critnav;
  int failures = 0;
  auto report = [&](int id, const char* name, const Verdict& v) {
    std::printf("[%s] criterion %d: %s: %s\n", v.pass ? "PASS" : "FAIL", id, name,
                v.detail.c_str());
    std::fflush(stdout);
    failures += !v.pass;
  };
  report(1, "perfect detector gives zero PKL and zero hazards", PerfectDetectorZero());
  report(2, "criticality bounds, thresholds and monotonicity", OcmProperties());
  report(3, "PKL matches direct KL summation", KlOracle());
  const std::vector<Scenario> clutter = Corpus("clutter", 50, 1);
  FamilySweeps clutter_sweeps;
  report(4, "cascade improves median PKL on clutter",
         CascadeBeatsConfidence(clutter, clutter_sweeps));
  report(5, "override keeps the critical bus (fig2)",
         OverrideRecoversCriticalObject(clutter, clutter_sweeps));
  report(6, "average precision matches exhaustive enumeration", ApOracle());
  report(7, "box overlap matches Monte Carlo sampling", OverlapOracle());
  report(8, "CLI outputs are byte-identical on rerun", CliReproducible());
  report(9, "miss rate matches the noise model", MissCalibration());
  std::printf("%d of 9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}
