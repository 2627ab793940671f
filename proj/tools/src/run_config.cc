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

#include "run_config.h"

#include <openssl/evp.h>

#include <cmath>
#include <optional>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "status_macros.h"

namespace critnav::cli {
namespace {

using nlohmann::json;

absl::Status ConfigError(const std::string& path, absl::string_view what) {
  return absl::InvalidArgumentError(
      absl::StrCat("config error: field `", path, "`: ", what));
}

std::string Join(const std::string& path, const std::string& key) {
  return path.empty() ? key : absl::StrCat(path, ".", key);
}

// Overlays `overlay` onto `base`. Keys absent from `base` are rejected;
// objects merge recursively, anything else (including null defaults)
// is replaced.
absl::Status Merge(json& base, const json& overlay, const std::string& path) {
  if (!overlay.is_object()) {
    return ConfigError(path.empty() ? "<root>" : path, "expected an object");
  }
  for (const auto& [key, value] : overlay.items()) {
    const std::string sub = Join(path, key);
    auto it = base.find(key);
    if (it == base.end()) return ConfigError(sub, "unknown key");
    if (it->is_object() && value.is_object() && !it->empty()) {
      CRITNAV_RETURN_IF_ERROR(Merge(*it, value, sub));
    } else {
      *it = value;
    }
  }
  return absl::OkStatus();
}

json ConfidenceJson(const ConfidenceModel& m) {
  return {{"alpha", m.alpha},
          {"beta", m.beta},
          {"fixed", m.fixed.has_value() ? json(*m.fixed) : json(nullptr)}};
}

json LayoutJson(const ScenarioLayout& l) {
  json lanes = json::array();
  for (const LaneSpec& lane : l.lanes) lanes.push_back({lane.offset, lane.direction});
  json actors = json::array();
  for (const ScriptedActor& a : l.actors) {
    actors.push_back({{"kind", a.kind == ActorKind::kBusOnPath ? "bus_on_path"
                                                               : "lead_vehicle"},
                      {"min_distance", a.min_distance},
                      {"max_distance", a.max_distance},
                      {"min_speed", a.min_speed},
                      {"max_speed", a.max_speed},
                      {"lateral_offset", a.lateral_offset}});
  }
  return {{"num_frames", l.num_frames},
          {"frame_period", l.frame_period},
          {"ego_speed", l.ego_speed},
          {"ego_yaw_rate", l.ego_yaw_rate},
          {"ego_length", l.ego_footprint.length},
          {"ego_width", l.ego_footprint.width},
          {"background_objects", l.background_objects},
          {"min_longitudinal", l.min_longitudinal},
          {"max_longitudinal", l.max_longitudinal},
          {"lanes", lanes},
          {"min_speed", l.min_speed},
          {"max_speed", l.max_speed},
          {"spawn_clearance", l.spawn_clearance},
          {"actors", actors},
          {"max_retries", l.max_retries}};
}

json NoiseJson(const NoiseModel& n) {
  return {{"miss_base", n.miss_base},
          {"miss_per_meter", n.miss_per_meter},
          {"center_jitter_sigma", n.center_jitter_sigma},
          {"size_jitter_sigma", n.size_jitter_sigma},
          {"yaw_jitter_sigma", n.yaw_jitter_sigma},
          {"velocity_jitter_sigma", n.velocity_jitter_sigma},
          {"tp_confidence", ConfidenceJson(n.tp_confidence)},
          {"fp_rate", n.fp_rate},
          {"fp_confidence", ConfidenceJson(n.fp_confidence)},
          {"fp_spawn_radius", n.fp_spawn_radius},
          {"fp_min_lateral", n.fp_min_lateral}};
}

// Same keys as LayoutJson / NoiseJson, all null: "use the preset's value".
json NullsLike(const json& shape) {
  json out = json::object();
  for (const auto& [key, _] : shape.items()) out[key] = nullptr;
  return out;
}

// Typed reads with path-aware errors.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {}

  const json& at(const std::string& key) const { return node_.at(key); }
  std::string sub(const std::string& key) const { return Join(path_, key); }

  absl::StatusOr<double> Number(const std::string& key) const {
    const json& v = node_.at(key);
    if (!v.is_number()) return ConfigError(sub(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) return ConfigError(sub(key), "must be finite");
    return d;
  }
  absl::StatusOr<std::int64_t> Integer(const std::string& key) const {
    const json& v = node_.at(key);
    if (!v.is_number_integer()) return ConfigError(sub(key), "expected an integer");
    return v.get<std::int64_t>();
  }
  absl::StatusOr<bool> Bool(const std::string& key) const {
    const json& v = node_.at(key);
    if (!v.is_boolean()) return ConfigError(sub(key), "expected true or false");
    return v.get<bool>();
  }
  absl::StatusOr<std::string> String(const std::string& key) const {
    const json& v = node_.at(key);
    if (!v.is_string()) return ConfigError(sub(key), "expected a string");
    return v.get<std::string>();
  }

 private:
  const json& node_;
  std::string path_;
};

absl::Status WithPath(const absl::Status& s, const std::string& section) {
  if (s.ok()) return s;
  return absl::InvalidArgumentError(
      absl::StrCat("config error in `", section, "`: ", s.message()));
}

absl::StatusOr<ConfidenceModel> ParseConfidence(const json& j,
                                                const std::string& path) {
  if (!j.is_object()) return ConfigError(path, "expected an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "alpha" && key != "beta" && key != "fixed") {
      return ConfigError(Join(path, key), "unknown key");
    }
  }
  if (!j.contains("alpha") || !j.contains("beta")) {
    return ConfigError(path, "needs alpha and beta");
  }
  Reader r(j, path);
  ConfidenceModel m;
  CRITNAV_ASSIGN_OR_RETURN(m.alpha, r.Number("alpha"));
  CRITNAV_ASSIGN_OR_RETURN(m.beta, r.Number("beta"));
  if (j.contains("fixed") && !j.at("fixed").is_null()) {
    CRITNAV_ASSIGN_OR_RETURN(m.fixed, r.Number("fixed"));
  }
  return m;
}

// Applies the non-null entries of `j` onto `layout`.
absl::Status ParseLayout(const json& j, const std::string& path,
                         ScenarioLayout& layout) {
  Reader r(j, path);
  auto num = [&](const char* key, double& out) -> absl::Status {
    if (j.at(key).is_null()) return absl::OkStatus();
    CRITNAV_ASSIGN_OR_RETURN(out, r.Number(key));
    return absl::OkStatus();
  };
  auto integer = [&](const char* key, int& out) -> absl::Status {
    if (j.at(key).is_null()) return absl::OkStatus();
    CRITNAV_ASSIGN_OR_RETURN(const std::int64_t v, r.Integer(key));
    out = static_cast<int>(v);
    return absl::OkStatus();
  };
  CRITNAV_RETURN_IF_ERROR(integer("num_frames", layout.num_frames));
  CRITNAV_RETURN_IF_ERROR(num("frame_period", layout.frame_period));
  CRITNAV_RETURN_IF_ERROR(num("ego_speed", layout.ego_speed));
  CRITNAV_RETURN_IF_ERROR(num("ego_yaw_rate", layout.ego_yaw_rate));
  CRITNAV_RETURN_IF_ERROR(num("ego_length", layout.ego_footprint.length));
  CRITNAV_RETURN_IF_ERROR(num("ego_width", layout.ego_footprint.width));
  CRITNAV_RETURN_IF_ERROR(integer("background_objects", layout.background_objects));
  CRITNAV_RETURN_IF_ERROR(num("min_longitudinal", layout.min_longitudinal));
  CRITNAV_RETURN_IF_ERROR(num("max_longitudinal", layout.max_longitudinal));
  CRITNAV_RETURN_IF_ERROR(num("min_speed", layout.min_speed));
  CRITNAV_RETURN_IF_ERROR(num("max_speed", layout.max_speed));
  CRITNAV_RETURN_IF_ERROR(num("spawn_clearance", layout.spawn_clearance));
  CRITNAV_RETURN_IF_ERROR(integer("max_retries", layout.max_retries));
  if (const json& lanes = j.at("lanes"); !lanes.is_null()) {
    if (!lanes.is_array()) return ConfigError(r.sub("lanes"), "expected an array");
    layout.lanes.clear();
    for (std::size_t i = 0; i < lanes.size(); ++i) {
      const json& lane = lanes[i];
      if (!lane.is_array() || lane.size() != 2 || !lane[0].is_number() ||
          !lane[1].is_number_integer()) {
        return ConfigError(absl::StrCat(r.sub("lanes"), "[", i, "]"),
                           "expected [offset, direction]");
      }
      layout.lanes.push_back({lane[0].get<double>(), lane[1].get<int>()});
    }
  }
  if (const json& actors = j.at("actors"); !actors.is_null()) {
    if (!actors.is_array()) return ConfigError(r.sub("actors"), "expected an array");
    layout.actors.clear();
    for (std::size_t i = 0; i < actors.size(); ++i) {
      const std::string apath = absl::StrCat(r.sub("actors"), "[", i, "]");
      json a = {{"kind", "bus_on_path"}, {"min_distance", 10.0},
                {"max_distance", 12.0},  {"min_speed", 0.0},
                {"max_speed", 0.0},      {"lateral_offset", 0.0}};
      CRITNAV_RETURN_IF_ERROR(Merge(a, actors[i], apath));
      Reader ar(a, apath);
      ScriptedActor actor;
      CRITNAV_ASSIGN_OR_RETURN(const std::string kind, ar.String("kind"));
      if (kind == "bus_on_path") {
        actor.kind = ActorKind::kBusOnPath;
      } else if (kind == "lead_vehicle") {
        actor.kind = ActorKind::kLeadVehicle;
      } else {
        return ConfigError(ar.sub("kind"), "expected bus_on_path or lead_vehicle");
      }
      CRITNAV_ASSIGN_OR_RETURN(actor.min_distance, ar.Number("min_distance"));
      CRITNAV_ASSIGN_OR_RETURN(actor.max_distance, ar.Number("max_distance"));
      CRITNAV_ASSIGN_OR_RETURN(actor.min_speed, ar.Number("min_speed"));
      CRITNAV_ASSIGN_OR_RETURN(actor.max_speed, ar.Number("max_speed"));
      CRITNAV_ASSIGN_OR_RETURN(actor.lateral_offset, ar.Number("lateral_offset"));
      layout.actors.push_back(actor);
    }
  }
  return WithPath(ValidateLayout(layout), path);
}

absl::Status ParseNoise(const json& j, const std::string& path, NoiseModel& noise) {
  Reader r(j, path);
  auto num = [&](const char* key, double& out) -> absl::Status {
    if (j.at(key).is_null()) return absl::OkStatus();
    CRITNAV_ASSIGN_OR_RETURN(out, r.Number(key));
    return absl::OkStatus();
  };
  CRITNAV_RETURN_IF_ERROR(num("miss_base", noise.miss_base));
  CRITNAV_RETURN_IF_ERROR(num("miss_per_meter", noise.miss_per_meter));
  CRITNAV_RETURN_IF_ERROR(num("center_jitter_sigma", noise.center_jitter_sigma));
  CRITNAV_RETURN_IF_ERROR(num("size_jitter_sigma", noise.size_jitter_sigma));
  CRITNAV_RETURN_IF_ERROR(num("yaw_jitter_sigma", noise.yaw_jitter_sigma));
  CRITNAV_RETURN_IF_ERROR(num("velocity_jitter_sigma", noise.velocity_jitter_sigma));
  CRITNAV_RETURN_IF_ERROR(num("fp_rate", noise.fp_rate));
  CRITNAV_RETURN_IF_ERROR(num("fp_spawn_radius", noise.fp_spawn_radius));
  CRITNAV_RETURN_IF_ERROR(num("fp_min_lateral", noise.fp_min_lateral));
  if (!j.at("tp_confidence").is_null()) {
    CRITNAV_ASSIGN_OR_RETURN(noise.tp_confidence,
                             ParseConfidence(j.at("tp_confidence"), r.sub("tp_confidence")));
  }
  if (!j.at("fp_confidence").is_null()) {
    CRITNAV_ASSIGN_OR_RETURN(noise.fp_confidence,
                             ParseConfidence(j.at("fp_confidence"), r.sub("fp_confidence")));
  }
  return WithPath(ValidateNoiseModel(noise), path);
}

absl::StatusOr<std::vector<double>> ParseGrid(const json& j, const std::string& path) {
  if (j.is_array()) {
    std::vector<double> grid;
    for (const json& v : j) {
      if (!v.is_number()) return ConfigError(path, "grid entries must be numbers");
      grid.push_back(v.get<double>());
    }
    return grid;
  }
  if (j.is_object()) {
    json spec = {{"lo", 0.0}, {"hi", 1.0}, {"n", 11}};
    CRITNAV_RETURN_IF_ERROR(Merge(spec, j, path));
    Reader r(spec, path);
    CRITNAV_ASSIGN_OR_RETURN(const double lo, r.Number("lo"));
    CRITNAV_ASSIGN_OR_RETURN(const double hi, r.Number("hi"));
    CRITNAV_ASSIGN_OR_RETURN(const std::int64_t n, r.Integer("n"));
    if (n < 1 || n > 1001) return ConfigError(r.sub("n"), "must be in [1, 1001]");
    if (n > 1 && !(hi > lo)) return ConfigError(path, "hi must exceed lo");
    return LinearGrid(lo, hi, static_cast<int>(n));
  }
  return ConfigError(path, "expected an array or {lo, hi, n}");
}

absl::StatusOr<FilterPolicy> ParsePolicy(const json& j) {
  Reader r(j, "policy");
  CRITNAV_ASSIGN_OR_RETURN(const std::string type, r.String("type"));
  CRITNAV_ASSIGN_OR_RETURN(const double confidence, r.Number("confidence"));
  FilterPolicy policy;
  if (type == "confidence_only") {
    policy = ConfidenceOnlyPolicy{confidence};
  } else if (type == "cascade") {
    CRITNAV_ASSIGN_OR_RETURN(const double k, r.Number("criticality"));
    policy = CascadePolicy{confidence, k};
  } else if (type == "override") {
    CRITNAV_ASSIGN_OR_RETURN(const double k, r.Number("keep_criticality"));
    policy = OverridePolicy{confidence, k};
  } else if (type == "binned_map") {
    const json& bins = j.at("bins");
    if (!bins.is_array()) return ConfigError("policy.bins", "expected an array");
    BinnedMapPolicy map;
    for (std::size_t i = 0; i < bins.size(); ++i) {
      const json& b = bins[i];
      if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number()) {
        return ConfigError(absl::StrCat("policy.bins[", i, "]"),
                           "expected [kappa_lower_bound, confidence_threshold]");
      }
      map.bins.push_back({b[0].get<double>(), b[1].get<double>()});
    }
    policy = map;
  } else {
    return ConfigError("policy.type",
                       "expected confidence_only, cascade, override or binned_map");
  }
  CRITNAV_RETURN_IF_ERROR(WithPath(ValidatePolicy(policy), "policy"));
  return policy;
}

absl::StatusOr<OcmParams> ParseOcm(const json& j) {
  Reader r(j, "ocm");
  OcmParams p;
  CRITNAV_ASSIGN_OR_RETURN(p.d_max, r.Number("d_max"));
  CRITNAV_ASSIGN_OR_RETURN(p.r_max, r.Number("r_max"));
  CRITNAV_ASSIGN_OR_RETURN(p.t_max, r.Number("t_max"));
  CRITNAV_ASSIGN_OR_RETURN(p.horizon, r.Number("horizon"));
  Reader w(j.at("weights"), "ocm.weights");
  CRITNAV_ASSIGN_OR_RETURN(p.w_distance, w.Number("distance"));
  CRITNAV_ASSIGN_OR_RETURN(p.w_route, w.Number("route"));
  CRITNAV_ASSIGN_OR_RETURN(p.w_ttc, w.Number("ttc"));
  CRITNAV_ASSIGN_OR_RETURN(const std::string decay, r.String("decay"));
  if (decay == "linear") {
    p.decay = DecayShape::kLinear;
  } else if (decay == "quadratic") {
    p.decay = DecayShape::kQuadratic;
  } else if (decay == "exponential") {
    p.decay = DecayShape::kExponential;
  } else {
    return ConfigError("ocm.decay", "expected linear, quadratic or exponential");
  }
  CRITNAV_RETURN_IF_ERROR(WithPath(ValidateOcmParams(p), "ocm"));
  return p;
}

absl::StatusOr<PlannerConfig> ParsePlanner(const json& j) {
  Reader r(j, "planner");
  PlannerConfig c;
  CRITNAV_ASSIGN_OR_RETURN(c.horizon, r.Number("horizon"));
  CRITNAV_ASSIGN_OR_RETURN(const std::int64_t steps, r.Integer("steps"));
  if (steps < 1 || steps > 1000) return ConfigError("planner.steps", "must be in [1, 1000]");
  c.steps = static_cast<int>(steps);
  CRITNAV_ASSIGN_OR_RETURN(c.half_extent, r.Number("half_extent"));
  CRITNAV_ASSIGN_OR_RETURN(c.cell_size, r.Number("cell_size"));
  CRITNAV_ASSIGN_OR_RETURN(c.obstacle_inflation, r.Number("obstacle_inflation"));
  CRITNAV_ASSIGN_OR_RETURN(c.beta, r.Number("beta"));
  CRITNAV_ASSIGN_OR_RETURN(c.obstacle_cost_weight, r.Number("obstacle_cost_weight"));
  CRITNAV_ASSIGN_OR_RETURN(c.prior_weight, r.Number("prior_weight"));
  CRITNAV_ASSIGN_OR_RETURN(c.probability_floor, r.Number("probability_floor"));
  CRITNAV_RETURN_IF_ERROR(WithPath(ValidatePlannerConfig(c), "planner"));
  return c;
}

absl::StatusOr<SweepOptions> ParseSweep(const json& j) {
  Reader r(j, "sweep");
  SweepOptions s;
  const json& families = j.at("families");
  if (!families.is_array() || families.empty()) {
    return ConfigError("sweep.families", "expected a nonempty array");
  }
  s.families.clear();
  for (const json& f : families) {
    auto family = f.is_string() ? ParsePolicyFamily(f.get<std::string>())
                                : std::nullopt;
    if (!family.has_value()) {
      return ConfigError("sweep.families",
                         "entries must be confidence_only, cascade, override or binned_map");
    }
    s.families.push_back(*family);
  }
  CRITNAV_ASSIGN_OR_RETURN(s.confidence_grid,
                           ParseGrid(j.at("confidence_grid"), "sweep.confidence_grid"));
  CRITNAV_ASSIGN_OR_RETURN(s.criticality_grid,
                           ParseGrid(j.at("criticality_grid"), "sweep.criticality_grid"));
  CRITNAV_ASSIGN_OR_RETURN(
      s.secondary_confidence_grid,
      ParseGrid(j.at("secondary_confidence_grid"), "sweep.secondary_confidence_grid"));
  CRITNAV_ASSIGN_OR_RETURN(const std::string objective, r.String("objective"));
  auto parsed = ParseObjective(objective);
  if (!parsed.has_value()) {
    return ConfigError("sweep.objective", "expected median_pkl, mean_pkl or hazard_rate");
  }
  s.objective = *parsed;
  CRITNAV_ASSIGN_OR_RETURN(s.staged, r.Bool("staged"));
  CRITNAV_ASSIGN_OR_RETURN(const std::int64_t workers, r.Integer("workers"));
  if (workers < 1 || workers > 256) return ConfigError("sweep.workers", "must be in [1, 256]");
  s.workers = static_cast<int>(workers);
  for (PolicyFamily f : s.families) {
    SweepSpec spec;
    spec.family = f;
    spec.confidence_grid = s.confidence_grid;
    spec.criticality_grid = s.criticality_grid;
    spec.secondary_confidence_grid = s.secondary_confidence_grid;
    CRITNAV_RETURN_IF_ERROR(WithPath(ValidateSweepSpec(spec), "sweep"));
  }
  return s;
}

absl::StatusOr<RenderOptions> ParseRender(const json& j) {
  Reader r(j, "render");
  RenderOptions o;
  CRITNAV_ASSIGN_OR_RETURN(o.extent, r.Number("extent"));
  CRITNAV_ASSIGN_OR_RETURN(o.scale, r.Number("scale"));
  if (!(o.extent > 0) || !(o.scale > 0)) {
    return ConfigError("render", "extent and scale must be > 0");
  }
  for (const auto& [layer, on] : j.at("layers").items()) {
    if (!on.is_boolean()) return ConfigError("render.layers." + layer, "expected true or false");
    o.layers[layer] = on.get<bool>();
  }
  for (const auto& [layer, color] : j.at("colors").items()) {
    if (!color.is_string()) return ConfigError("render.colors." + layer, "expected a string");
    const std::string c = color.get<std::string>();
    // Colors are written into attributes verbatim; keep them inert.
    for (char ch : c) {
      if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '#')) {
        return ConfigError("render.colors." + layer, "expected #rrggbb or a color name");
      }
    }
    o.colors[layer] = c;
  }
  return o;
}

}  // namespace

json DefaultConfigJson() {
  const OcmParams ocm;
  const PlannerConfig planner;
  const ScenarioLayout layout;
  const NoiseModel noise;
  return {
      {"format_version", kRunConfigVersion},
      {"paths", {{"scenarios", "scenarios"}, {"output", "out"}}},
      {"match_radius", kDefaultMatchRadius},
      {"ocm",
       {{"d_max", ocm.d_max},
        {"r_max", ocm.r_max},
        {"t_max", ocm.t_max},
        {"weights",
         {{"distance", ocm.w_distance}, {"route", ocm.w_route}, {"ttc", ocm.w_ttc}}},
        {"horizon", ocm.horizon},
        {"decay", "linear"}}},
      {"planner",
       {{"horizon", planner.horizon},
        {"steps", planner.steps},
        {"half_extent", planner.half_extent},
        {"cell_size", planner.cell_size},
        {"obstacle_inflation", planner.obstacle_inflation},
        {"beta", planner.beta},
        {"obstacle_cost_weight", planner.obstacle_cost_weight},
        {"prior_weight", planner.prior_weight},
        {"probability_floor", planner.probability_floor}}},
      {"policy",
       {{"type", "confidence_only"},
        {"confidence", 0.5},
        {"criticality", 0.0},
        {"keep_criticality", 0.8},
        {"bins", json::array({json::array({0.0, 0.5})})}}},
      {"generate",
       {{"preset", "urban"},
        {"count", 10},
        {"seed", 1},
        {"noiseless", false},
        {"layout", NullsLike(LayoutJson(layout))},
        {"noise", NullsLike(NoiseJson(noise))}}},
      {"sweep",
       {{"families", {"confidence_only", "cascade"}},
        {"confidence_grid", {{"lo", 0.0}, {"hi", 1.0}, {"n", 11}}},
        {"criticality_grid", {{"lo", 0.0}, {"hi", 1.0}, {"n", 11}}},
        {"secondary_confidence_grid", {{"lo", 0.0}, {"hi", 1.0}, {"n", 11}}},
        {"objective", "median_pkl"},
        {"staged", false},
        {"workers", 1}}},
      {"render",
       {{"extent", 40.0},
        {"scale", 10.0},
        {"layers",
         {{"ego", true},
          {"trajectory", false},
          {"ground_truth", true},
          {"kept", true},
          {"dropped", true},
          {"labels", true}}},
        {"colors",
         {{"ego", "#1f4e9c"},
          {"trajectory", "#1f4e9c"},
          {"ground_truth", "#2e7d32"},
          {"kept", "#c62828"},
          {"dropped", "#9e9e9e"},
          {"labels", "#212121"}}}}},
      {"outputs", {{"filter_audit", false}, {"grid_dumps", false}}},
  };
}

absl::Status ApplyOverride(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("config error: override '", assignment,
                     "' must look like section.key=value"));
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = text;
  json overlay = value;
  const std::vector<std::string> keys = absl::StrSplit(path, '.');
  for (auto it = keys.rbegin(); it != keys.rend(); ++it) {
    if (it->empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("config error: override path '", path, "' has an empty key"));
    }
    overlay = json{{*it, overlay}};
  }
  return Merge(config, overlay, "");
}

absl::StatusOr<RunConfig> ResolveRunConfig(const std::string& file_text,
                                           const std::string& source,
                                           const std::vector<std::string>& overrides) {
  json config = DefaultConfigJson();
  if (!file_text.empty()) {
    json file;
    try {
      file = json::parse(file_text);
    } catch (const json::parse_error& e) {
      return absl::InvalidArgumentError(
          absl::StrFormat("%s: config parse error at byte %d: %s", source,
                          e.byte, e.what()));
    }
    if (auto s = Merge(config, file, ""); !s.ok()) {
      return absl::InvalidArgumentError(absl::StrCat(source, ": ", s.message()));
    }
  }
  for (const std::string& o : overrides) {
    CRITNAV_RETURN_IF_ERROR(ApplyOverride(config, o));
  }
  if (config.at("format_version") != kRunConfigVersion) {
    return ConfigError("format_version",
                       absl::StrCat("unsupported (expected ", kRunConfigVersion, ")"));
  }

  RunConfig rc;
  Reader root(config, "");
  Reader paths(config.at("paths"), "paths");
  CRITNAV_ASSIGN_OR_RETURN(rc.scenarios_path, paths.String("scenarios"));
  CRITNAV_ASSIGN_OR_RETURN(rc.output_dir, paths.String("output"));
  CRITNAV_ASSIGN_OR_RETURN(rc.match_radius, root.Number("match_radius"));
  if (!(rc.match_radius > 0)) return ConfigError("match_radius", "must be > 0");
  CRITNAV_ASSIGN_OR_RETURN(rc.ocm, ParseOcm(config.at("ocm")));
  CRITNAV_ASSIGN_OR_RETURN(rc.planner, ParsePlanner(config.at("planner")));
  CRITNAV_ASSIGN_OR_RETURN(rc.policy, ParsePolicy(config.at("policy")));

  json& gen = config.at("generate");
  Reader g(gen, "generate");
  CRITNAV_ASSIGN_OR_RETURN(rc.generate.preset, g.String("preset"));
  auto preset = GetPreset(rc.generate.preset);
  if (!preset.ok()) return ConfigError("generate.preset", preset.status().message());
  CRITNAV_ASSIGN_OR_RETURN(const std::int64_t count, g.Integer("count"));
  if (count < 0 || count > 100000) return ConfigError("generate.count", "must be in [0, 100000]");
  rc.generate.count = static_cast<int>(count);
  if (!gen.at("seed").is_number_unsigned() && !gen.at("seed").is_number_integer()) {
    return ConfigError("generate.seed", "expected a nonnegative integer");
  }
  if (gen.at("seed").is_number_integer() && gen.at("seed").get<std::int64_t>() < 0 &&
      !gen.at("seed").is_number_unsigned()) {
    return ConfigError("generate.seed", "expected a nonnegative integer");
  }
  rc.generate.seed = gen.at("seed").get<std::uint64_t>();
  CRITNAV_ASSIGN_OR_RETURN(const bool noiseless, g.Bool("noiseless"));
  rc.generate.layout = preset->layout;
  rc.generate.noise = noiseless ? NoiseModel::Noiseless() : preset->noise;
  if (!gen.at("layout").is_object()) return ConfigError("generate.layout", "expected an object");
  if (!gen.at("noise").is_object()) return ConfigError("generate.noise", "expected an object");
  CRITNAV_RETURN_IF_ERROR(ParseLayout(gen.at("layout"), "generate.layout", rc.generate.layout));
  CRITNAV_RETURN_IF_ERROR(ParseNoise(gen.at("noise"), "generate.noise", rc.generate.noise));
  // Record the values actually used so the hash pins them.
  gen["layout"] = LayoutJson(rc.generate.layout);
  gen["noise"] = NoiseJson(rc.generate.noise);

  CRITNAV_ASSIGN_OR_RETURN(rc.sweep, ParseSweep(config.at("sweep")));
  CRITNAV_ASSIGN_OR_RETURN(rc.render, ParseRender(config.at("render")));
  Reader out(config.at("outputs"), "outputs");
  CRITNAV_ASSIGN_OR_RETURN(rc.outputs.filter_audit, out.Bool("filter_audit"));
  CRITNAV_ASSIGN_OR_RETURN(rc.outputs.grid_dumps, out.Bool("grid_dumps"));

  rc.effective = config;
  rc.effective.erase("paths");
  rc.hash = Sha256Hex(rc.effective.dump());
  return rc;
}

std::string Sha256Hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr);
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) absl::StrAppendFormat(&hex, "%02x", digest[i]);
  return hex;
}

}  // namespace critnav::cli
