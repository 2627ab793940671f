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

#include "critnav/sweep.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>
#include <tuple>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "critnav/scenario_io.h"
#include "status_macros.h"

namespace critnav {
namespace {

struct FrameRef {
  const Scenario* scenario;
  int scenario_index;
  int frame_index;
};

std::vector<FrameRef> CollectFrames(std::span<const Scenario> scenarios) {
  std::vector<FrameRef> refs;
  for (int s = 0; s < static_cast<int>(scenarios.size()); ++s) {
    for (int f = 0; f < static_cast<int>(scenarios[s].frames.size()); ++f) {
      refs.push_back({&scenarios[s], s, f});
    }
  }
  return refs;
}

std::vector<OrientedBox> BoxesOf(std::span<const Detection> detections) {
  std::vector<OrientedBox> boxes;
  boxes.reserve(detections.size());
  for (const Detection& d : detections) boxes.push_back(d.box);
  return boxes;
}

// Outcome of planning with one particular kept subset of a frame's
// detections.
struct KeptOutcome {
  double pkl_total = 0.0;
  bool pred_hazardous = false;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  CriticalityMass mass;
};

// Ground-truth side of one frame, computed once and reused for every kept
// subset evaluated against it.
class FrameContext {
 public:
  FrameContext(const FrameRef& ref, const OcmParams& params,
               const PlannerConfig& cfg, double match_radius)
      : ref_(ref),
        frame_(ref.scenario->frames[ref.frame_index]),
        cfg_(cfg),
        match_radius_(match_radius),
        gt_plan_(Plan(frame_.ground_truth, frame_.ego, cfg)) {
    gt_trajectory_ = MostProbableTrajectory(gt_plan_);
    gt_hazards_ = *CheckTrajectory(*ref.scenario, ref.frame_index,
                                   gt_trajectory_, frame_.ego.footprint, cfg);
    for (const OrientedBox& b : frame_.ground_truth) {
      gt_kappa_.push_back(Kappa(frame_.ego, b, params));
    }
    for (const Detection& d : frame_.detections) {
      det_kappa_.push_back(Kappa(frame_.ego, d.box, params));
    }
  }

  const Frame& frame() const { return frame_; }
  const std::vector<double>& det_kappa() const { return det_kappa_; }
  const HazardReport& gt_hazards() const { return gt_hazards_; }
  const std::vector<Pose2D>& gt_trajectory() const { return gt_trajectory_; }

  struct Detail {
    PklScore pkl;
    HazardReport hazards;
    std::vector<Pose2D> trajectory;
    MatchResult match;
  };

  Detail EvaluateDetailed(std::span<const Detection> kept) const {
    Detail d;
    const PlanDistribution plan = Plan(BoxesOf(kept), frame_.ego, cfg_);
    d.pkl = *Pkl(gt_plan_, plan);
    d.trajectory = MostProbableTrajectory(plan);
    d.hazards = *CheckTrajectory(*ref_.scenario, ref_.frame_index,
                                 d.trajectory, frame_.ego.footprint, cfg_);
    d.match = MatchDetections(frame_.ground_truth, kept, match_radius_);
    return d;
  }

  const KeptOutcome& Evaluate(const std::vector<int>& kept_indices) {
    auto it = cache_.find(kept_indices);
    if (it != cache_.end()) return it->second;
    std::vector<Detection> kept;
    std::vector<double> kept_kappa;
    for (int i : kept_indices) {
      kept.push_back(frame_.detections[i]);
      kept_kappa.push_back(det_kappa_[i]);
    }
    const Detail d = EvaluateDetailed(kept);
    KeptOutcome out;
    out.pkl_total = d.pkl.total;
    out.pred_hazardous = d.hazards.is_hazardous();
    out.tp = d.match.tp();
    out.fp = d.match.fp();
    out.fn = d.match.fn();
    out.mass = ComputeCriticalityMass(gt_kappa_, kept_kappa, d.match);
    return cache_.emplace(kept_indices, out).first->second;
  }

  const std::vector<double>& gt_kappa() const { return gt_kappa_; }

 private:
  FrameRef ref_;
  const Frame& frame_;
  PlannerConfig cfg_;
  double match_radius_;
  PlanDistribution gt_plan_;
  std::vector<Pose2D> gt_trajectory_;
  HazardReport gt_hazards_;
  std::vector<double> gt_kappa_;
  std::vector<double> det_kappa_;
  std::map<std::vector<int>, KeptOutcome> cache_;
};

// Runs fn(i) for i in [0, n) on `workers` threads. Each index is handled by
// exactly one thread; results must be written to per-index slots.
template <typename Fn>
void ParallelFor(int n, int workers, Fn fn) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  const int count = std::min(workers, n);
  for (int w = 0; w < count; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
}

absl::Status ValidateGrid(const std::vector<double>& grid,
                          absl::string_view name) {
  if (grid.empty()) {
    return absl::InvalidArgumentError(absl::StrCat("sweep.", name, " is empty"));
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("sweep.", name, " values must be in [0, 1]"));
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      return absl::InvalidArgumentError(
          absl::StrCat("sweep.", name, " must be strictly ascending"));
    }
  }
  return absl::OkStatus();
}

struct Config {
  FilterPolicy policy;
  double confidence;
  std::optional<double> criticality;
  std::optional<double> secondary;
};

std::vector<Config> EnumerateConfigs(const SweepSpec& spec) {
  std::vector<Config> configs;
  for (double c : spec.confidence_grid) {
    switch (spec.family) {
      case PolicyFamily::kConfidenceOnly:
        configs.push_back({ConfidenceOnlyPolicy{c}, c, std::nullopt, std::nullopt});
        break;
      case PolicyFamily::kCascade:
        for (double k : spec.criticality_grid) {
          configs.push_back({CascadePolicy{c, k}, c, k, std::nullopt});
        }
        break;
      case PolicyFamily::kOverride:
        for (double k : spec.criticality_grid) {
          configs.push_back({OverridePolicy{c, k}, c, k, std::nullopt});
        }
        break;
      case PolicyFamily::kBinnedMap:
        for (double k : spec.criticality_grid) {
          for (double s : spec.secondary_confidence_grid) {
            BinnedMapPolicy p;
            if (k > 0.0) {
              p.bins = {{0.0, c}, {k, s}};
            } else {
              p.bins = {{0.0, s}};
            }
            configs.push_back({p, c, k, s});
          }
        }
        break;
    }
  }
  return configs;
}

EvaluationSummary Summarize(std::span<const KeptOutcome* const> outcomes,
                            double avg_precision) {
  EvaluationSummary s;
  std::vector<double> totals;
  std::int64_t tp = 0, fp = 0, fn = 0;
  CriticalityMass mass;
  for (const KeptOutcome* o : outcomes) {
    totals.push_back(o->pkl_total);
    tp += o->tp;
    fp += o->fp;
    fn += o->fn;
    mass += o->mass;
  }
  if (!totals.empty()) s.pkl = *AggregateTotals(totals);
  const PrecisionRecall pr = ComputePrecisionRecall(tp, fp, fn);
  s.precision = pr.precision;
  s.recall = pr.recall;
  const WeightedPrecisionRecall w = mass.Ratios();
  s.weighted_precision = w.reliability_weighted_precision;
  s.weighted_recall = w.safety_weighted_recall;
  s.avg_precision = avg_precision;
  s.frames = static_cast<std::int64_t>(outcomes.size());
  return s;
}

}  // namespace

absl::StatusOr<EvaluationRun> EvaluatePolicy(std::span<const Scenario> scenarios,
                                             const FilterPolicy& policy,
                                             const OcmParams& params,
                                             const PlannerConfig& cfg,
                                             double match_radius) {
  if (scenarios.empty()) {
    return absl::InvalidArgumentError("evaluation needs at least one scenario");
  }
  CRITNAV_RETURN_IF_ERROR(ValidatePolicy(policy));
  CRITNAV_RETURN_IF_ERROR(ValidateOcmParams(params));
  CRITNAV_RETURN_IF_ERROR(ValidatePlannerConfig(cfg));

  EvaluationRun run;
  std::vector<KeptOutcome> outcomes;
  std::vector<Frame> filtered_frames;
  for (const FrameRef& ref : CollectFrames(scenarios)) {
    FrameContext ctx(ref, params, cfg, match_radius);
    const Frame& frame = ctx.frame();
    FrameEvaluation eval;
    eval.scenario_id = ref.scenario->id;
    eval.frame_index = ref.frame_index;
    eval.timestamp = frame.timestamp;
    eval.filter = ApplyPolicyWithKappa(frame.detections, ctx.det_kappa(), policy);
    const auto detail = ctx.EvaluateDetailed(eval.filter.kept);
    eval.pkl = detail.pkl;
    eval.gt_hazards = ctx.gt_hazards();
    eval.pred_hazards = detail.hazards;
    eval.gt_trajectory = ctx.gt_trajectory();
    eval.pred_trajectory = detail.trajectory;
    eval.metrics = EvaluateFrame(frame, eval.filter.kept, params, match_radius);

    std::vector<double> kept_kappa;
    for (int i : eval.filter.kept_indices) kept_kappa.push_back(ctx.det_kappa()[i]);
    KeptOutcome o;
    o.pkl_total = detail.pkl.total;
    o.pred_hazardous = detail.hazards.is_hazardous();
    o.tp = detail.match.tp();
    o.fp = detail.match.fp();
    o.fn = detail.match.fn();
    o.mass = ComputeCriticalityMass(ctx.gt_kappa(), kept_kappa, detail.match);
    outcomes.push_back(o);

    Frame filtered = frame;
    filtered.detections = eval.filter.kept;
    filtered_frames.push_back(std::move(filtered));
    run.frames.push_back(std::move(eval));
  }

  std::vector<const KeptOutcome*> ptrs;
  std::int64_t induced = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    ptrs.push_back(&outcomes[i]);
    if (run.frames[i].perception_induced_hazard()) ++induced;
  }
  run.summary = Summarize(ptrs, AveragePrecision(filtered_frames, match_radius));
  run.summary.hazard_rate =
      static_cast<double>(induced) / static_cast<double>(outcomes.size());
  return run;
}

std::string_view PolicyFamilyName(PolicyFamily family) {
  switch (family) {
    case PolicyFamily::kConfidenceOnly:
      return "confidence_only";
    case PolicyFamily::kCascade:
      return "cascade";
    case PolicyFamily::kOverride:
      return "override";
    case PolicyFamily::kBinnedMap:
      return "binned_map";
  }
  return "confidence_only";
}

std::optional<PolicyFamily> ParsePolicyFamily(std::string_view name) {
  for (PolicyFamily f : {PolicyFamily::kConfidenceOnly, PolicyFamily::kCascade,
                         PolicyFamily::kOverride, PolicyFamily::kBinnedMap}) {
    if (PolicyFamilyName(f) == name) return f;
  }
  return std::nullopt;
}

std::string_view ObjectiveName(Objective objective) {
  switch (objective) {
    case Objective::kMedianPkl:
      return "median_pkl";
    case Objective::kMeanPkl:
      return "mean_pkl";
    case Objective::kHazardRate:
      return "hazard_rate";
  }
  return "median_pkl";
}

std::optional<Objective> ParseObjective(std::string_view name) {
  for (Objective o :
       {Objective::kMedianPkl, Objective::kMeanPkl, Objective::kHazardRate}) {
    if (ObjectiveName(o) == name) return o;
  }
  return std::nullopt;
}

absl::Status ValidateSweepSpec(const SweepSpec& spec) {
  CRITNAV_RETURN_IF_ERROR(ValidateGrid(spec.confidence_grid, "confidence_grid"));
  if (spec.family != PolicyFamily::kConfidenceOnly) {
    CRITNAV_RETURN_IF_ERROR(
        ValidateGrid(spec.criticality_grid, "criticality_grid"));
  }
  if (spec.family == PolicyFamily::kBinnedMap) {
    CRITNAV_RETURN_IF_ERROR(ValidateGrid(spec.secondary_confidence_grid,
                                         "secondary_confidence_grid"));
  }
  if (!(spec.match_radius > 0.0)) {
    return absl::InvalidArgumentError("sweep.match_radius must be > 0");
  }
  return absl::OkStatus();
}

std::vector<double> LinearGrid(double lo, double hi, int n) {
  std::vector<double> grid;
  if (n <= 1) return {lo};
  for (int i = 0; i < n; ++i) {
    // Integer-ratio form keeps values like 0.3 as close to decimal as
    // possible and pins both endpoints exactly.
    grid.push_back(i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1));
  }
  return grid;
}

double SweepRecord::ObjectiveValue(Objective objective) const {
  switch (objective) {
    case Objective::kMedianPkl:
      return summary.pkl.median;
    case Objective::kMeanPkl:
      return summary.pkl.mean;
    case Objective::kHazardRate:
      return summary.hazard_rate;
  }
  return summary.pkl.median;
}

std::size_t BestRecordIndex(std::span<const SweepRecord> records,
                            Objective objective) {
  auto key = [objective](const SweepRecord& r) {
    return std::make_tuple(r.ObjectiveValue(objective), r.confidence_threshold,
                           r.criticality_threshold.value_or(0.0),
                           r.secondary_confidence_threshold.value_or(0.0));
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (key(records[i]) < key(records[best])) best = i;
  }
  return best;
}

absl::StatusOr<SweepResult> RunSweep(const SweepSpec& spec,
                                     std::span<const Scenario> scenarios,
                                     const OcmParams& params,
                                     const PlannerConfig& cfg) {
  if (scenarios.empty()) {
    return absl::InvalidArgumentError("sweep needs at least one scenario");
  }
  CRITNAV_RETURN_IF_ERROR(ValidateSweepSpec(spec));
  CRITNAV_RETURN_IF_ERROR(ValidateOcmParams(params));
  CRITNAV_RETURN_IF_ERROR(ValidatePlannerConfig(cfg));
  for (const Scenario& s : scenarios) CRITNAV_RETURN_IF_ERROR(ValidateScenario(s));

  const std::vector<Config> configs = EnumerateConfigs(spec);
  const std::vector<FrameRef> refs = CollectFrames(scenarios);
  const std::size_t n_frames = refs.size();

  // outcome[c * n_frames + f] and kept[c * n_frames + f]
  std::vector<KeptOutcome> outcome(configs.size() * n_frames);
  std::vector<std::vector<int>> kept(configs.size() * n_frames);
  std::vector<char> gt_hazardous(n_frames, 0);

  ParallelFor(static_cast<int>(n_frames), spec.workers, [&](int f) {
    FrameContext ctx(refs[f], params, cfg, spec.match_radius);
    gt_hazardous[f] = ctx.gt_hazards().is_hazardous() ? 1 : 0;
    for (std::size_t c = 0; c < configs.size(); ++c) {
      const FilterOutcome filtered = ApplyPolicyWithKappa(
          ctx.frame().detections, ctx.det_kappa(), configs[c].policy);
      outcome[c * n_frames + f] = ctx.Evaluate(filtered.kept_indices);
      kept[c * n_frames + f] = filtered.kept_indices;
    }
  });

  SweepResult result;
  result.family = spec.family;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    std::vector<const KeptOutcome*> ptrs;
    std::vector<Frame> filtered_frames;
    std::int64_t induced = 0;
    std::vector<std::vector<double>> per_scenario_totals(scenarios.size());
    for (std::size_t f = 0; f < n_frames; ++f) {
      const KeptOutcome& o = outcome[c * n_frames + f];
      ptrs.push_back(&o);
      if (o.pred_hazardous && !gt_hazardous[f]) ++induced;
      per_scenario_totals[refs[f].scenario_index].push_back(o.pkl_total);
      const Frame& source = refs[f].scenario->frames[refs[f].frame_index];
      Frame filtered;
      filtered.ground_truth = source.ground_truth;
      for (int i : kept[c * n_frames + f]) {
        filtered.detections.push_back(source.detections[i]);
      }
      filtered_frames.push_back(std::move(filtered));
    }
    SweepRecord record;
    record.policy = configs[c].policy;
    record.confidence_threshold = configs[c].confidence;
    record.criticality_threshold = configs[c].criticality;
    record.secondary_confidence_threshold = configs[c].secondary;
    record.summary =
        Summarize(ptrs, AveragePrecision(filtered_frames, spec.match_radius));
    record.summary.hazard_rate =
        static_cast<double>(induced) / static_cast<double>(n_frames);
    for (const auto& totals : per_scenario_totals) {
      record.per_scenario.push_back(
          totals.empty() ? PklSummary{} : *AggregateTotals(totals));
    }
    result.records.push_back(std::move(record));
  }
  for (Objective o :
       {Objective::kMedianPkl, Objective::kMeanPkl, Objective::kHazardRate}) {
    result.best[o] = BestRecordIndex(result.records, o);
  }
  return result;
}

absl::StatusOr<SweepResult> RunStagedSweep(const SweepSpec& spec,
                                           std::span<const Scenario> scenarios,
                                           const OcmParams& params,
                                           const PlannerConfig& cfg,
                                           Objective objective) {
  SweepSpec first = spec;
  first.family = PolicyFamily::kConfidenceOnly;
  CRITNAV_ASSIGN_OR_RETURN(const SweepResult confidence_only,
                           RunSweep(first, scenarios, params, cfg));
  SweepSpec second = spec;
  second.confidence_grid = {
      confidence_only.Best(objective).confidence_threshold};
  return RunSweep(second, scenarios, params, cfg);
}

std::vector<ComparisonRow> RowsFromSweeps(std::span<const SweepResult> sweeps,
                                          Objective objective) {
  std::vector<ComparisonRow> rows;
  for (const SweepResult& s : sweeps) {
    rows.push_back({std::string(PolicyFamilyName(s.family)), s.Best(objective)});
  }
  return rows;
}

absl::StatusOr<std::vector<ComparisonRow>> ComparePolicies(
    std::span<const SweepSpec> specs, std::span<const Scenario> scenarios,
    const OcmParams& params, const PlannerConfig& cfg, Objective objective) {
  if (specs.empty()) {
    return absl::InvalidArgumentError("compare needs at least one policy");
  }
  std::vector<SweepResult> sweeps;
  for (const SweepSpec& spec : specs) {
    CRITNAV_ASSIGN_OR_RETURN(SweepResult r,
                             RunSweep(spec, scenarios, params, cfg));
    sweeps.push_back(std::move(r));
  }
  return RowsFromSweeps(sweeps, objective);
}

std::string RenderComparisonTable(std::span<const ComparisonRow> rows) {
  std::ostringstream out;
  out << absl::StrFormat("%-16s %-14s %12s %12s %12s %8s %8s\n", "policy",
                         "thresholds", "median PKL", "mean PKL", "hazard rate",
                         "R_S", "P_R");
  for (const ComparisonRow& row : rows) {
    const SweepRecord& r = row.record;
    std::string thresholds;
    if (r.criticality_threshold.has_value()) {
      thresholds = absl::StrFormat("[%.2f; %.2f", r.confidence_threshold,
                                   *r.criticality_threshold);
      if (r.secondary_confidence_threshold.has_value()) {
        absl::StrAppendFormat(&thresholds, "; %.2f",
                              *r.secondary_confidence_threshold);
      }
      thresholds += "]";
    } else {
      thresholds = absl::StrFormat("%.2f", r.confidence_threshold);
    }
    out << absl::StrFormat("%-16s %-14s %12.3f %12.3f %12.3f %8.3f %8.3f\n",
                           row.policy, thresholds, r.summary.pkl.median,
                           r.summary.pkl.mean, r.summary.hazard_rate,
                           r.summary.weighted_recall,
                           r.summary.weighted_precision);
  }
  return out.str();
}

}  // namespace critnav
