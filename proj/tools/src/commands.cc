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

#include "commands.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "birdview.h"
#include "critnav/filtering.h"
#include "critnav/planner.h"
#include "critnav/safety.h"
#include "critnav/scenario_io.h"
#include "critnav/sweep.h"
#include "critnav/synthesis.h"
#include "json.hpp"
#include "run_config.h"
#include "status_macros.h"

namespace critnav::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> sets;
  std::string scenarios;
  std::string out;
};

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat(path, ": cannot open file"));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

absl::Status WriteFile(const fs::path& path, const std::string& data) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) {
    return absl::PermissionDeniedError(absl::StrCat(
        path.parent_path().string(), ": cannot create directory: ", ec.message()));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << data;
  out.close();
  if (!out) {
    return absl::PermissionDeniedError(absl::StrCat(path.string(), ": cannot write file"));
  }
  return absl::OkStatus();
}

absl::StatusOr<RunConfig> LoadConfig(const CommonArgs& args) {
  std::string text;
  if (!args.config_path.empty()) {
    CRITNAV_ASSIGN_OR_RETURN(text, ReadFile(args.config_path));
  }
  CRITNAV_ASSIGN_OR_RETURN(
      RunConfig rc,
      ResolveRunConfig(text, args.config_path.empty() ? "<defaults>" : args.config_path,
                       args.sets));
  if (!args.scenarios.empty()) rc.scenarios_path = args.scenarios;
  if (!args.out.empty()) rc.output_dir = args.out;
  return rc;
}

// A file, or every *.scene.json in a directory in name order.
absl::StatusOr<std::vector<Scenario>> LoadScenarios(const std::string& path) {
  std::error_code ec;
  std::vector<fs::path> files;
  if (fs::is_directory(path, ec)) {
    for (const auto& entry : fs::directory_iterator(path, ec)) {
      const std::string name = entry.path().filename().string();
      if (entry.is_regular_file() && name.size() > 11 &&
          name.ends_with(".scene.json")) {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
      return absl::NotFoundError(absl::StrCat(path, ": no *.scene.json files"));
    }
  } else if (fs::exists(path, ec)) {
    files.push_back(path);
  } else {
    return absl::NotFoundError(absl::StrCat(path, ": no such file or directory"));
  }
  std::vector<Scenario> scenarios;
  for (const fs::path& f : files) {
    CRITNAV_ASSIGN_OR_RETURN(Scenario s, LoadScenario(f.string()));
    scenarios.push_back(std::move(s));
  }
  return scenarios;
}

Json PolicyJson(const FilterPolicy& policy) {
  Json j;
  j["type"] = PolicyName(policy);
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, BinnedMapPolicy>) {
          Json bins = Json::array();
          for (const CriticalityBin& b : p.bins) {
            bins.push_back({b.kappa_lower_bound, b.confidence_threshold});
          }
          j["bins"] = bins;
        } else {
          j["confidence"] = p.confidence_threshold;
          if constexpr (std::is_same_v<T, CascadePolicy>) {
            j["criticality"] = p.criticality_threshold;
          } else if constexpr (std::is_same_v<T, OverridePolicy>) {
            j["keep_criticality"] = p.keep_criticality;
          }
        }
      },
      policy);
  return j;
}

Json PoseJson(const Pose2D& p) { return {{"x", p.x}, {"y", p.y}, {"yaw", p.yaw}}; }

std::string Lines(const std::vector<Json>& records) {
  std::string out;
  for (const Json& r : records) absl::StrAppend(&out, r.dump(), "\n");
  return out;
}

absl::Status WriteEffectiveConfig(const RunConfig& rc) {
  Json j;
  j["config_hash"] = rc.hash;
  j["config"] = Json::parse(rc.effective.dump());
  return WriteFile(fs::path(rc.output_dir) / "config.json", j.dump(2) + "\n");
}

std::string FileStem(const std::string& id) {
  std::string stem = id;
  for (char& c : stem) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) {
      c = '_';
    }
  }
  return stem;
}

// ---- gen -------------------------------------------------------------------

std::uint64_t NoiseSeed(std::uint64_t layout_seed) {
  // SplitMix64 finalizer; keeps layout and noise streams unrelated.
  std::uint64_t z = layout_seed + 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

absl::Status RunGen(const RunConfig& rc, std::ostream& out) {
  const GenerateOptions& g = rc.generate;
  Json manifest;
  manifest["config_hash"] = rc.hash;
  manifest["preset"] = g.preset;
  Json entries = Json::array();
  for (int i = 0; i < g.count; ++i) {
    ScenarioLayout layout = g.layout;
    layout.id = absl::StrFormat("%s-%03d", g.preset, i);
    const std::uint64_t layout_seed = g.seed + static_cast<std::uint64_t>(i);
    CRITNAV_ASSIGN_OR_RETURN(Scenario scenario, GenerateScenario(layout, layout_seed));
    NoiseModel noise = g.noise;
    noise.seed = NoiseSeed(layout_seed);
    scenario = SynthesizeDetections(scenario, noise);
    const std::string file = FileStem(layout.id) + ".scene.json";
    CRITNAV_RETURN_IF_ERROR(
        WriteFile(fs::path(rc.output_dir) / file, SerializeScenario(scenario)));
    entries.push_back({{"id", scenario.id},
                       {"file", file},
                       {"layout_seed", layout_seed},
                       {"noise_seed", noise.seed}});
  }
  manifest["scenarios"] = entries;
  CRITNAV_RETURN_IF_ERROR(
      WriteFile(fs::path(rc.output_dir) / "manifest.json", manifest.dump(2) + "\n"));
  CRITNAV_RETURN_IF_ERROR(WriteEffectiveConfig(rc));
  out << absl::StrFormat("gen: wrote %d scenarios to %s (config %s)\n", g.count,
                         rc.output_dir, rc.hash.substr(0, 12));
  return absl::OkStatus();
}

// ---- eval / hazard ---------------------------------------------------------

Json HazardFrameJson(const RunConfig& rc, const FrameEvaluation& f) {
  Json hazards = Json::array();
  for (const Hazard& h : f.pred_hazards.hazards) {
    hazards.push_back({{"step", h.step_index},
                       {"time_offset", h.time_offset},
                       {"gt_track_id", h.gt_track_id},
                       {"ego_pose", PoseJson(h.ego_pose)}});
  }
  Json j;
  j["record"] = "frame";
  j["config_hash"] = rc.hash;
  j["scenario"] = f.scenario_id;
  j["frame"] = f.frame_index;
  j["timestamp"] = f.timestamp;
  j["gt_hazardous"] = f.gt_hazards.is_hazardous();
  j["pred_hazardous"] = f.pred_hazards.is_hazardous();
  j["perception_induced"] = f.perception_induced_hazard();
  j["hazards"] = hazards;
  return j;
}

Json HazardSummaryJson(const RunConfig& rc, const EvaluationRun& run) {
  std::int64_t induced = 0;
  for (const FrameEvaluation& f : run.frames) induced += f.perception_induced_hazard();
  Json j;
  j["record"] = "summary";
  j["config_hash"] = rc.hash;
  j["policy"] = PolicyJson(rc.policy);
  j["frames"] = run.summary.frames;
  j["perception_induced_frames"] = induced;
  j["hazard_rate"] = run.summary.hazard_rate;
  return j;
}

bool AnyInducedHazard(const EvaluationRun& run) {
  return std::any_of(run.frames.begin(), run.frames.end(),
                     [](const FrameEvaluation& f) { return f.perception_induced_hazard(); });
}

absl::Status WriteGridDumps(const RunConfig& rc, const std::vector<Scenario>& scenarios,
                            const EvaluationRun& run) {
  std::size_t next = 0;
  for (const Scenario& s : scenarios) {
    for (const Frame& frame : s.frames) {
      const FrameEvaluation& f = run.frames[next++];
      const PlanDistribution gt = Plan(frame.ground_truth, frame.ego, rc.planner);
      std::vector<OrientedBox> kept;
      for (const Detection& d : f.filter.kept) kept.push_back(d.box);
      const PlanDistribution pred = Plan(kept, frame.ego, rc.planner);
      const std::string stem =
          absl::StrFormat("%s-f%03d", FileStem(s.id), f.frame_index);
      for (const auto& [suffix, plan] :
           {std::pair<const char*, const PlanDistribution*>{"gt", &gt}, {"pred", &pred}}) {
        std::ostringstream bytes;
        WriteGridDump(*plan, rc.planner.horizon, bytes);
        CRITNAV_RETURN_IF_ERROR(WriteFile(
            fs::path(rc.output_dir) / "grids" / absl::StrCat(stem, "-", suffix, ".cngrid"),
            bytes.str()));
      }
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<int> RunEval(const RunConfig& rc, bool fail_on_hazard, std::ostream& out) {
  CRITNAV_ASSIGN_OR_RETURN(const std::vector<Scenario> scenarios,
                           LoadScenarios(rc.scenarios_path));
  CRITNAV_ASSIGN_OR_RETURN(
      const EvaluationRun run,
      EvaluatePolicy(scenarios, rc.policy, rc.ocm, rc.planner, rc.match_radius));

  std::vector<Json> metrics, pkl, hazards, audit;
  for (const FrameEvaluation& f : run.frames) {
    Json m;
    m["record"] = "frame";
    m["config_hash"] = rc.hash;
    m["scenario"] = f.scenario_id;
    m["frame"] = f.frame_index;
    m["timestamp"] = f.timestamp;
    m["kept"] = f.filter.kept.size();
    m["dropped"] = f.filter.dropped.size();
    m["tp"] = f.metrics.tp;
    m["fp"] = f.metrics.fp;
    m["fn"] = f.metrics.fn;
    m["precision"] = f.metrics.precision;
    m["recall"] = f.metrics.recall;
    m["avg_precision"] = f.metrics.avg_precision;
    m["weighted_precision"] = f.metrics.weighted_precision;
    m["weighted_recall"] = f.metrics.weighted_recall;
    metrics.push_back(std::move(m));

    Json p;
    p["record"] = "frame";
    p["config_hash"] = rc.hash;
    p["scenario"] = f.scenario_id;
    p["frame"] = f.frame_index;
    p["total"] = f.pkl.total;
    p["per_step"] = f.pkl.per_step;
    p["probability_floor"] = rc.planner.probability_floor;
    pkl.push_back(std::move(p));

    hazards.push_back(HazardFrameJson(rc, f));

    if (rc.outputs.filter_audit) {
      std::vector<std::pair<int, Json>> rows;
      for (std::size_t k = 0; k < f.filter.kept.size(); ++k) {
        const int index = f.filter.kept_indices[k];
        rows.push_back({index,
                        {{"index", index},
                         {"confidence", f.filter.kept[k].confidence},
                         {"kappa", f.filter.kappa[index]},
                         {"kept", true}}});
      }
      for (const DroppedDetection& d : f.filter.dropped) {
        rows.push_back({d.index,
                        {{"index", d.index},
                         {"confidence", d.detection.confidence},
                         {"kappa", f.filter.kappa[d.index]},
                         {"kept", false},
                         {"reason", DropReasonName(d.reason)}}});
      }
      std::sort(rows.begin(), rows.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      for (auto& [_, row] : rows) {
        Json r;
        r["config_hash"] = rc.hash;
        r["scenario"] = f.scenario_id;
        r["frame"] = f.frame_index;
        for (auto& [k, v] : row.items()) r[k] = v;
        audit.push_back(std::move(r));
      }
    }
  }

  const EvaluationSummary& s = run.summary;
  Json summary;
  summary["record"] = "summary";
  summary["config_hash"] = rc.hash;
  summary["policy"] = PolicyJson(rc.policy);
  summary["frames"] = s.frames;
  summary["precision"] = s.precision;
  summary["recall"] = s.recall;
  summary["avg_precision"] = s.avg_precision;
  summary["weighted_precision"] = s.weighted_precision;
  summary["weighted_recall"] = s.weighted_recall;
  summary["pkl_mean"] = s.pkl.mean;
  summary["pkl_median"] = s.pkl.median;
  summary["hazard_rate"] = s.hazard_rate;
  metrics.push_back(summary);

  Json pkl_summary;
  pkl_summary["record"] = "summary";
  pkl_summary["config_hash"] = rc.hash;
  pkl_summary["mean"] = s.pkl.mean;
  pkl_summary["median"] = s.pkl.median;
  pkl.push_back(std::move(pkl_summary));
  hazards.push_back(HazardSummaryJson(rc, run));

  const fs::path dir(rc.output_dir);
  CRITNAV_RETURN_IF_ERROR(WriteFile(dir / "metrics.jsonl", Lines(metrics)));
  CRITNAV_RETURN_IF_ERROR(WriteFile(dir / "pkl.jsonl", Lines(pkl)));
  CRITNAV_RETURN_IF_ERROR(WriteFile(dir / "hazards.jsonl", Lines(hazards)));
  if (rc.outputs.filter_audit) {
    CRITNAV_RETURN_IF_ERROR(WriteFile(dir / "filter_audit.jsonl", Lines(audit)));
  }
  if (rc.outputs.grid_dumps) CRITNAV_RETURN_IF_ERROR(WriteGridDumps(rc, scenarios, run));
  CRITNAV_RETURN_IF_ERROR(WriteEffectiveConfig(rc));

  out << absl::StrFormat(
      "eval: %s over %d frames: median PKL %.3f, mean PKL %.3f, hazard rate %.3f, "
      "R_S %.3f, P_R %.3f (config %s)\n",
      PolicyName(rc.policy), s.frames, s.pkl.median, s.pkl.mean, s.hazard_rate,
      s.weighted_recall, s.weighted_precision, rc.hash.substr(0, 12));
  return fail_on_hazard && AnyInducedHazard(run) ? kExitHazard : kExitOk;
}

absl::StatusOr<int> RunHazard(const RunConfig& rc, bool fail_on_hazard,
                              std::ostream& out) {
  CRITNAV_ASSIGN_OR_RETURN(const std::vector<Scenario> scenarios,
                           LoadScenarios(rc.scenarios_path));
  CRITNAV_ASSIGN_OR_RETURN(
      const EvaluationRun run,
      EvaluatePolicy(scenarios, rc.policy, rc.ocm, rc.planner, rc.match_radius));
  std::vector<Json> records;
  for (const FrameEvaluation& f : run.frames) records.push_back(HazardFrameJson(rc, f));
  records.push_back(HazardSummaryJson(rc, run));
  CRITNAV_RETURN_IF_ERROR(
      WriteFile(fs::path(rc.output_dir) / "hazards.jsonl", Lines(records)));
  CRITNAV_RETURN_IF_ERROR(WriteEffectiveConfig(rc));
  out << absl::StrFormat("hazard: %s over %d frames: perception-induced hazard rate %.3f\n",
                         PolicyName(rc.policy), run.summary.frames,
                         run.summary.hazard_rate);
  return fail_on_hazard && AnyInducedHazard(run) ? kExitHazard : kExitOk;
}

// ---- sweep -----------------------------------------------------------------

Json OptionalJson(const std::optional<double>& v) {
  return v.has_value() ? Json(*v) : Json(nullptr);
}

absl::Status RunSweepCommand(const RunConfig& rc, std::ostream& out) {
  CRITNAV_ASSIGN_OR_RETURN(const std::vector<Scenario> scenarios,
                           LoadScenarios(rc.scenarios_path));
  const SweepOptions& opts = rc.sweep;
  std::vector<SweepResult> sweeps;
  std::vector<Json> records;
  for (PolicyFamily family : opts.families) {
    SweepSpec spec;
    spec.family = family;
    spec.confidence_grid = opts.confidence_grid;
    if (family != PolicyFamily::kConfidenceOnly) spec.criticality_grid = opts.criticality_grid;
    if (family == PolicyFamily::kBinnedMap) {
      spec.secondary_confidence_grid = opts.secondary_confidence_grid;
    }
    spec.match_radius = rc.match_radius;
    spec.workers = opts.workers;
    absl::StatusOr<SweepResult> result =
        opts.staged && family != PolicyFamily::kConfidenceOnly
            ? RunStagedSweep(spec, scenarios, rc.ocm, rc.planner, opts.objective)
            : RunSweep(spec, scenarios, rc.ocm, rc.planner);
    if (!result.ok()) return result.status();
    const std::size_t best = result->best.at(opts.objective);
    for (std::size_t i = 0; i < result->records.size(); ++i) {
      const SweepRecord& r = result->records[i];
      Json j;
      j["record"] = "point";
      j["config_hash"] = rc.hash;
      j["family"] = PolicyFamilyName(family);
      j["index"] = i;
      j["policy"] = PolicyJson(r.policy);
      j["confidence_threshold"] = r.confidence_threshold;
      j["criticality_threshold"] = OptionalJson(r.criticality_threshold);
      j["secondary_confidence_threshold"] = OptionalJson(r.secondary_confidence_threshold);
      j["median_pkl"] = r.summary.pkl.median;
      j["mean_pkl"] = r.summary.pkl.mean;
      j["hazard_rate"] = r.summary.hazard_rate;
      j["weighted_recall"] = r.summary.weighted_recall;
      j["weighted_precision"] = r.summary.weighted_precision;
      j["precision"] = r.summary.precision;
      j["recall"] = r.summary.recall;
      j["avg_precision"] = r.summary.avg_precision;
      j["frames"] = r.summary.frames;
      Json per_scenario = Json::array();
      for (const PklSummary& p : r.per_scenario) {
        per_scenario.push_back({{"mean", p.mean}, {"median", p.median}});
      }
      j["per_scenario_pkl"] = per_scenario;
      records.push_back(std::move(j));
    }
    Json b;
    b["record"] = "best";
    b["config_hash"] = rc.hash;
    b["family"] = PolicyFamilyName(family);
    b["objective"] = ObjectiveName(opts.objective);
    b["index"] = best;
    b["policy"] = PolicyJson(result->records[best].policy);
    records.push_back(std::move(b));
    sweeps.push_back(*std::move(result));
  }
  const std::string table = absl::StrCat(
      "# config ", rc.hash, "\n# objective ", std::string(ObjectiveName(opts.objective)),
      "\n", RenderComparisonTable(RowsFromSweeps(sweeps, opts.objective)));
  const fs::path dir(rc.output_dir);
  CRITNAV_RETURN_IF_ERROR(WriteFile(dir / "sweep.jsonl", Lines(records)));
  CRITNAV_RETURN_IF_ERROR(WriteFile(dir / "sweep_table.txt", table));
  CRITNAV_RETURN_IF_ERROR(WriteEffectiveConfig(rc));
  out << table;
  return absl::OkStatus();
}

// ---- render ----------------------------------------------------------------

absl::Status RunRender(const RunConfig& rc, int frame_index, const std::string& svg_path,
                       std::ostream& out) {
  CRITNAV_ASSIGN_OR_RETURN(const std::vector<Scenario> scenarios,
                           LoadScenarios(rc.scenarios_path));
  if (!svg_path.empty() && scenarios.size() != 1) {
    return absl::InvalidArgumentError("--svg needs exactly one scenario");
  }
  for (const Scenario& s : scenarios) {
    if (frame_index < 0 || frame_index >= static_cast<int>(s.frames.size())) {
      return absl::OutOfRangeError(absl::StrFormat(
          "%s: frame %d out of range [0, %d)", s.id, frame_index, s.frames.size()));
    }
    const Frame& frame = s.frames[frame_index];
    CRITNAV_ASSIGN_OR_RETURN(const FilterOutcome filter,
                             ApplyPolicy(frame.detections, frame.ego, rc.ocm, rc.policy));
    std::vector<Pose2D> trajectory;
    auto layer = rc.render.layers.find("trajectory");
    if (layer != rc.render.layers.end() && layer->second) {
      std::vector<OrientedBox> kept;
      for (const Detection& d : filter.kept) kept.push_back(d.box);
      trajectory = MostProbableTrajectory(Plan(kept, frame.ego, rc.planner));
    }
    BirdviewScene scene{s.id, frame_index, &frame, &filter, trajectory};
    const fs::path path =
        svg_path.empty()
            ? fs::path(rc.output_dir) /
                  absl::StrFormat("%s-f%03d.svg", FileStem(s.id), frame_index)
            : fs::path(svg_path);
    CRITNAV_RETURN_IF_ERROR(WriteFile(path, RenderBirdview(scene, rc.render, rc.hash)));
    out << "render: wrote " << path.string() << "\n";
  }
  return absl::OkStatus();
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{
      "critnav: criticality-aware detection filtering and planner-based evaluation.\n"
      "All thresholds are inclusive (a score equal to the threshold passes).\n"
      "Exit codes: 0 success, 1 hazards found with --fail-on-hazard, 2 usage or "
      "config error.",
      "critnav"};
  app.set_version_flag("--version", "critnav 0.1.0");
  app.require_subcommand(1);

  CommonArgs common;
  app.add_option("-c,--config", common.config_path,
                 "JSON run configuration; unknown keys are errors");
  app.add_option("--set", common.sets,
                 "Override a config key, e.g. --set policy.confidence=0.4 (repeatable)")
      ->take_all();

  auto add_io = [&](CLI::App* sub, bool scenarios) {
    sub->fallthrough();
    if (scenarios) {
      sub->add_option("-s,--scenarios", common.scenarios,
                      "Scenario file or directory of *.scene.json "
                      "(default: paths.scenarios, \"scenarios\")");
    }
    sub->add_option("-o,--out", common.out,
                    "Output directory (default: paths.output, \"out\")");
  };

  CLI::App* gen = app.add_subcommand("gen", "Generate seeded synthetic scenarios");
  add_io(gen, false);
  std::string preset;
  int count = -1;
  std::int64_t seed = -1;
  bool noiseless = false;
  gen->add_option("--preset", preset, "Preset: urban, clutter, fig2 (default urban)");
  gen->add_option("--count", count, "Number of scenarios (default 10)");
  gen->add_option("--seed", seed, "Base seed; scenario i uses seed + i (default 1)");
  gen->add_flag("--noiseless", noiseless, "Perfect detections with confidence 1");

  bool fail_on_hazard = false;
  CLI::App* eval = app.add_subcommand("eval", "Metrics, PKL and hazards for one policy");
  add_io(eval, true);
  eval->add_flag("--fail-on-hazard", fail_on_hazard,
                 "Exit 1 if any frame has a perception-induced hazard");

  CLI::App* hazard = app.add_subcommand("hazard", "Overlap hazard check for one policy");
  add_io(hazard, true);
  hazard->add_flag("--fail-on-hazard", fail_on_hazard,
                   "Exit 1 if any frame has a perception-induced hazard");

  CLI::App* sweep = app.add_subcommand("sweep", "Grid search over policy thresholds");
  add_io(sweep, true);
  int workers = -1;
  sweep->add_option("-j,--workers", workers, "Worker threads (default sweep.workers, 1)");

  CLI::App* render = app.add_subcommand("render", "Birdview SVG of one frame per scenario");
  add_io(render, true);
  int frame_index = 0;
  std::string svg_path;
  render->add_option("-f,--frame", frame_index, "Frame index (default 0)");
  render->add_option("--svg", svg_path,
                     "Output file when rendering a single scenario "
                     "(default <out>/<scenario>-fNNN.svg)");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (gen->parsed()) {
    if (!preset.empty()) common.sets.push_back(Json(preset).dump().insert(0, "generate.preset="));
    if (count >= 0) common.sets.push_back(absl::StrCat("generate.count=", count));
    if (seed >= 0) common.sets.push_back(absl::StrCat("generate.seed=", seed));
    if (noiseless) common.sets.push_back("generate.noiseless=true");
  }
  if (sweep->parsed() && workers >= 0) {
    common.sets.push_back(absl::StrCat("sweep.workers=", workers));
  }

  absl::StatusOr<RunConfig> rc = LoadConfig(common);
  if (!rc.ok()) {
    err << "critnav: " << rc.status().message() << "\n";
    return kExitUsage;
  }

  absl::StatusOr<int> code = kExitOk;
  if (gen->parsed()) {
    const absl::Status s = RunGen(*rc, out);
    code = s.ok() ? absl::StatusOr<int>(kExitOk) : s;
  } else if (eval->parsed()) {
    code = RunEval(*rc, fail_on_hazard, out);
  } else if (hazard->parsed()) {
    code = RunHazard(*rc, fail_on_hazard, out);
  } else if (sweep->parsed()) {
    const absl::Status s = RunSweepCommand(*rc, out);
    code = s.ok() ? absl::StatusOr<int>(kExitOk) : s;
  } else if (render->parsed()) {
    const absl::Status s = RunRender(*rc, frame_index, svg_path, out);
    code = s.ok() ? absl::StatusOr<int>(kExitOk) : s;
  }
  if (!code.ok()) {
    err << "critnav: " << code.status().message() << "\n";
    return kExitUsage;
  }
  return *code;
}

}  // namespace critnav::cli
