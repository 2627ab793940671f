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

#include "critnav/scenario_io.h"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "json.hpp"
#include "status_macros.h"

namespace critnav {
namespace {

using nlohmann::json;

absl::Status FieldError(absl::string_view path, absl::string_view what) {
  return absl::InvalidArgumentError(
      absl::StrCat("validation error: field `", path, "`: ", what));
}

// Typed accessors over a JSON object that remember the path for errors.
class ObjectReader {
 public:
  ObjectReader(const json& node, std::string path)
      : node_(node), path_(std::move(path)) {}

  absl::Status CheckKeys(std::initializer_list<std::string_view> allowed) const {
    if (!node_.is_object()) return FieldError(path_, "expected an object");
    for (const auto& [key, _] : node_.items()) {
      bool known = false;
      for (std::string_view a : allowed) known = known || key == a;
      if (!known) return FieldError(Sub(key), "unknown key");
    }
    return absl::OkStatus();
  }

  absl::StatusOr<double> Number(std::string_view key) const {
    auto it = node_.find(std::string(key));
    if (it == node_.end()) return FieldError(Sub(key), "missing");
    if (!it->is_number()) return FieldError(Sub(key), "expected a number");
    const double v = it->get<double>();
    if (!std::isfinite(v)) return FieldError(Sub(key), "must be finite");
    return v;
  }

  absl::StatusOr<double> Positive(std::string_view key) const {
    auto v = Number(key);
    if (v.ok() && !(*v > 0.0)) return FieldError(Sub(key), "must be > 0");
    return v;
  }

  const json* Find(std::string_view key) const {
    auto it = node_.find(std::string(key));
    return it == node_.end() ? nullptr : &*it;
  }

  std::string Sub(std::string_view key) const {
    return path_.empty() ? std::string(key)
                         : absl::StrCat(path_, ".", std::string(key));
  }

 private:
  const json& node_;
  std::string path_;
};

absl::StatusOr<OrientedBox> ReadBox(const json& node, const std::string& path,
                                    bool detection, std::size_t index,
                                    double* confidence) {
  ObjectReader r(node, path);
  absl::Status keys =
      detection ? r.CheckKeys({"x", "y", "yaw", "length", "width", "vx", "vy",
                               "class", "confidence"})
                : r.CheckKeys({"x", "y", "yaw", "length", "width", "vx", "vy",
                               "class", "track_id"});
  if (!keys.ok()) return keys;
  OrientedBox box;
  CRITNAV_ASSIGN_OR_RETURN(box.center.x, r.Number("x"));
  CRITNAV_ASSIGN_OR_RETURN(box.center.y, r.Number("y"));
  double yaw;
  CRITNAV_ASSIGN_OR_RETURN(yaw, r.Number("yaw"));
  box.center.yaw = NormalizeAngle(yaw);
  CRITNAV_ASSIGN_OR_RETURN(box.length, r.Positive("length"));
  CRITNAV_ASSIGN_OR_RETURN(box.width, r.Positive("width"));
  CRITNAV_ASSIGN_OR_RETURN(box.velocity.x, r.Number("vx"));
  CRITNAV_ASSIGN_OR_RETURN(box.velocity.y, r.Number("vy"));
  const json* cls = r.Find("class");
  if (cls == nullptr) return FieldError(r.Sub("class"), "missing");
  if (!cls->is_string()) return FieldError(r.Sub("class"), "expected a string");
  auto label = ParseObjectClass(cls->get<std::string>());
  if (!label.has_value()) {
    return FieldError(r.Sub("class"),
                      absl::StrCat("unknown class '", cls->get<std::string>(),
                                   "'"));
  }
  box.label = *label;
  if (detection) {
    double c;
    CRITNAV_ASSIGN_OR_RETURN(c, r.Number("confidence"));
    if (c < 0.0 || c > 1.0) {
      return FieldError(r.Sub("confidence"), "must be in [0, 1]");
    }
    *confidence = c;
  } else if (const json* id = r.Find("track_id"); id != nullptr) {
    if (!id->is_number_integer() || id->get<std::int64_t>() < 0) {
      return FieldError(r.Sub("track_id"), "expected a nonnegative integer");
    }
    box.track_id = id->get<std::int64_t>();
  } else {
    box.track_id = static_cast<std::int64_t>(index);
  }
  return box;
}

absl::StatusOr<Scenario> FromJson(const json& doc) {
  ObjectReader root(doc, "");
  if (auto s = root.CheckKeys(
          {"format_version", "id", "frame_period", "ego_footprint", "frames"});
      !s.ok()) {
    return s;
  }
  const json* version = root.Find("format_version");
  if (version == nullptr) return FieldError("format_version", "missing");
  if (!version->is_number_integer() ||
      version->get<std::int64_t>() != kScenarioFormatVersion) {
    return FieldError("format_version",
                      absl::StrCat("unsupported (expected ",
                                   kScenarioFormatVersion, ")"));
  }
  Scenario scenario;
  const json* id = root.Find("id");
  if (id == nullptr) return FieldError("id", "missing");
  if (!id->is_string()) return FieldError("id", "expected a string");
  scenario.id = id->get<std::string>();
  CRITNAV_ASSIGN_OR_RETURN(scenario.frame_period, root.Positive("frame_period"));

  Footprint footprint;
  const json* fp = root.Find("ego_footprint");
  if (fp == nullptr) return FieldError("ego_footprint", "missing");
  ObjectReader fpr(*fp, "ego_footprint");
  if (auto s = fpr.CheckKeys({"length", "width"}); !s.ok()) return s;
  CRITNAV_ASSIGN_OR_RETURN(footprint.length, fpr.Positive("length"));
  CRITNAV_ASSIGN_OR_RETURN(footprint.width, fpr.Positive("width"));

  const json* frames = root.Find("frames");
  if (frames == nullptr) return FieldError("frames", "missing");
  if (!frames->is_array()) return FieldError("frames", "expected an array");
  if (frames->empty()) return FieldError("frames", "must contain at least one frame");

  for (std::size_t f = 0; f < frames->size(); ++f) {
    const std::string fpath = absl::StrCat("frames[", f, "]");
    ObjectReader fr((*frames)[f], fpath);
    if (auto s = fr.CheckKeys({"timestamp", "ego", "ground_truth", "detections"});
        !s.ok()) {
      return s;
    }
    Frame frame;
    CRITNAV_ASSIGN_OR_RETURN(frame.timestamp, fr.Number("timestamp"));
    if (!scenario.frames.empty() &&
        !(frame.timestamp > scenario.frames.back().timestamp)) {
      return FieldError(fr.Sub("timestamp"),
                        "timestamps must be strictly increasing");
    }
    const json* ego = fr.Find("ego");
    if (ego == nullptr) return FieldError(fr.Sub("ego"), "missing");
    ObjectReader er(*ego, fr.Sub("ego"));
    if (auto s = er.CheckKeys({"x", "y", "yaw", "vx", "vy"}); !s.ok()) return s;
    CRITNAV_ASSIGN_OR_RETURN(frame.ego.pose.x, er.Number("x"));
    CRITNAV_ASSIGN_OR_RETURN(frame.ego.pose.y, er.Number("y"));
    double yaw;
    CRITNAV_ASSIGN_OR_RETURN(yaw, er.Number("yaw"));
    frame.ego.pose.yaw = NormalizeAngle(yaw);
    CRITNAV_ASSIGN_OR_RETURN(frame.ego.velocity.x, er.Number("vx"));
    CRITNAV_ASSIGN_OR_RETURN(frame.ego.velocity.y, er.Number("vy"));
    frame.ego.footprint = footprint;

    for (const bool detection : {false, true}) {
      const char* key = detection ? "detections" : "ground_truth";
      const json* list = fr.Find(key);
      if (list == nullptr) return FieldError(fr.Sub(key), "missing");
      if (!list->is_array()) return FieldError(fr.Sub(key), "expected an array");
      for (std::size_t i = 0; i < list->size(); ++i) {
        double confidence = 1.0;
        auto box = ReadBox((*list)[i], absl::StrCat(fr.Sub(key), "[", i, "]"),
                           detection, i, &confidence);
        if (!box.ok()) return box.status();
        if (detection) {
          frame.detections.push_back({*box, confidence});
        } else {
          frame.ground_truth.push_back(*box);
        }
      }
    }
    scenario.frames.push_back(std::move(frame));
  }
  return scenario;
}

json BoxToJson(const OrientedBox& box) {
  return json{{"x", box.center.x},
              {"y", box.center.y},
              {"yaw", box.center.yaw},
              {"length", box.length},
              {"width", box.width},
              {"vx", box.velocity.x},
              {"vy", box.velocity.y},
              {"class", std::string(ObjectClassName(box.label))}};
}

}  // namespace

absl::StatusOr<Scenario> ParseScenario(std::string_view text,
                                       std::string_view source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // e.byte is the 1-based offset just past the offending character.
    const std::size_t end = std::min<std::size_t>(e.byte, text.size());
    std::size_t line = 1;
    std::size_t line_start = 0;
    for (std::size_t i = 0; i + 1 < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        line_start = i + 1;
      }
    }
    return absl::InvalidArgumentError(
        absl::StrFormat("%s:%d:%d: parse error: %s", std::string(source), line,
                        end - line_start, e.what()));
  }
  auto scenario = FromJson(doc);
  if (!scenario.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(std::string(source), ": ", scenario.status().message()));
  }
  return scenario;
}

absl::StatusOr<Scenario> LoadScenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot read ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseScenario(buffer.str(), path);
}

absl::Status ValidateScenario(const Scenario& scenario) {
  // Round-tripping through the file schema applies every loader rule.
  if (scenario.frames.empty()) {
    return FieldError("frames", "must contain at least one frame");
  }
  const Footprint& footprint = scenario.frames.front().ego.footprint;
  for (std::size_t f = 0; f < scenario.frames.size(); ++f) {
    if (!(scenario.frames[f].ego.footprint == footprint)) {
      return FieldError(absl::StrCat("frames[", f, "].ego"),
                        "footprint differs from the scenario footprint");
    }
  }
  return ParseScenario(SerializeScenario(scenario), scenario.id).status();
}

std::string SerializeScenario(const Scenario& scenario) {
  json doc;
  doc["format_version"] = kScenarioFormatVersion;
  doc["id"] = scenario.id;
  doc["frame_period"] = scenario.frame_period;
  const Footprint footprint = scenario.frames.empty()
                                  ? Footprint{}
                                  : scenario.frames.front().ego.footprint;
  doc["ego_footprint"] = {{"length", footprint.length},
                          {"width", footprint.width}};
  json frames = json::array();
  for (const Frame& frame : scenario.frames) {
    json gt = json::array();
    for (std::size_t i = 0; i < frame.ground_truth.size(); ++i) {
      const OrientedBox& box = frame.ground_truth[i];
      json j = BoxToJson(box);
      j["track_id"] = box.track_id >= 0 ? box.track_id
                                        : static_cast<std::int64_t>(i);
      gt.push_back(std::move(j));
    }
    json dets = json::array();
    for (const Detection& det : frame.detections) {
      json j = BoxToJson(det.box);
      j["confidence"] = det.confidence;
      dets.push_back(std::move(j));
    }
    frames.push_back({{"timestamp", frame.timestamp},
                      {"ego",
                       {{"x", frame.ego.pose.x},
                        {"y", frame.ego.pose.y},
                        {"yaw", frame.ego.pose.yaw},
                        {"vx", frame.ego.velocity.x},
                        {"vy", frame.ego.velocity.y}}},
                      {"ground_truth", std::move(gt)},
                      {"detections", std::move(dets)}});
  }
  doc["frames"] = std::move(frames);
  return doc.dump(1) + "\n";
}

absl::Status SaveScenario(const Scenario& scenario, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  out << SerializeScenario(scenario);
  out.close();
  if (!out) return absl::DataLossError(absl::StrCat("failed writing ", path));
  return absl::OkStatus();
}

}  // namespace critnav
