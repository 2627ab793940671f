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

#include "birdview.h"

#include <cmath>
#include <sstream>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace critnav::cli {
namespace {

std::string Fixed(double v) {
  std::string s = absl::StrFormat("%.3f", v);
  if (s == "-0.000") s = "0.000";
  return s;
}

std::string XmlEscape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

bool Finite(const OrientedBox& b) {
  return std::isfinite(b.center.x) && std::isfinite(b.center.y) &&
         std::isfinite(b.center.yaw) && std::isfinite(b.length) &&
         std::isfinite(b.width);
}

class Canvas {
 public:
  Canvas(Pose2D ego, const RenderOptions& o)
      : ego_(ego), extent_(o.extent), scale_(o.scale) {}

  double size() const { return 2.0 * extent_ * scale_; }
  double px(double x) const { return (x - ego_.x + extent_) * scale_; }
  double py(double y) const { return (extent_ - (y - ego_.y)) * scale_; }

  std::string Points(const OrientedBox& box) const {
    std::string out;
    for (const Vec2& c : BoxCorners(box)) {
      if (!out.empty()) out += ' ';
      absl::StrAppend(&out, Fixed(px(c.x)), ",", Fixed(py(c.y)));
    }
    return out;
  }

 private:
  Pose2D ego_;
  double extent_;
  double scale_;
};

class Svg {
 public:
  void Open(const std::string& layer, const std::string& color,
            const std::string& extra = "") {
    absl::StrAppend(&body_, "  <g id=\"", layer, "\" stroke=\"", color, "\"",
                    extra, ">\n");
  }
  void Close() { body_ += "  </g>\n"; }
  void Line(const std::string& element) { absl::StrAppend(&body_, "    ", element, "\n"); }
  const std::string& body() const { return body_; }

 private:
  std::string body_;
};

bool LayerOn(const RenderOptions& o, const std::string& layer) {
  auto it = o.layers.find(layer);
  return it != o.layers.end() && it->second;
}

std::string ColorOf(const RenderOptions& o, const std::string& layer) {
  auto it = o.colors.find(layer);
  return it != o.colors.end() ? it->second : "#000000";
}

}  // namespace

std::string RenderBirdview(const BirdviewScene& scene,
                           const RenderOptions& options,
                           const std::string& config_hash) {
  const Frame& frame = *scene.frame;
  const Canvas canvas(frame.ego.pose, options);
  Svg svg;

  if (LayerOn(options, "ground_truth")) {
    std::vector<std::string> items;
    for (std::size_t i = 0; i < frame.ground_truth.size(); ++i) {
      const OrientedBox& b = frame.ground_truth[i];
      if (!Finite(b)) continue;
      items.push_back(absl::StrFormat(
          "<polygon data-class=\"%s\" data-track=\"%d\" points=\"%s\"/>",
          std::string(ObjectClassName(b.label)),
          b.track_id >= 0 ? b.track_id : static_cast<std::int64_t>(i),
          canvas.Points(b)));
    }
    if (!items.empty()) {
      svg.Open("ground_truth", ColorOf(options, "ground_truth"),
               " fill=\"none\" stroke-width=\"2\"");
      for (const auto& e : items) svg.Line(e);
      svg.Close();
    }
  }

  const FilterOutcome* filter = scene.filter;
  auto kappa_of = [&](int index) {
    return filter != nullptr && index < static_cast<int>(filter->kappa.size())
               ? filter->kappa[index]
               : 0.0;
  };

  if (filter != nullptr && LayerOn(options, "kept")) {
    std::vector<std::string> items;
    for (int index : filter->kept_indices) {
      const Detection& d = frame.detections[index];
      if (!Finite(d.box)) continue;
      items.push_back(absl::StrFormat(
          "<polygon data-index=\"%d\" data-class=\"%s\" data-confidence=\"%s\" "
          "data-kappa=\"%s\" points=\"%s\"/>",
          index, std::string(ObjectClassName(d.box.label)), Fixed(d.confidence),
          Fixed(kappa_of(index)), canvas.Points(d.box)));
    }
    if (!items.empty()) {
      svg.Open("kept", ColorOf(options, "kept"), " fill=\"none\"");
      for (const auto& e : items) svg.Line(e);
      svg.Close();
    }
  }

  if (filter != nullptr && LayerOn(options, "dropped")) {
    std::vector<std::string> items;
    for (const DroppedDetection& d : filter->dropped) {
      if (!Finite(d.detection.box)) continue;
      items.push_back(absl::StrFormat(
          "<polygon data-index=\"%d\" data-class=\"%s\" data-confidence=\"%s\" "
          "data-kappa=\"%s\" data-reason=\"%s\" points=\"%s\"/>",
          d.index, std::string(ObjectClassName(d.detection.box.label)),
          Fixed(d.detection.confidence), Fixed(kappa_of(d.index)),
          std::string(DropReasonName(d.reason)), canvas.Points(d.detection.box)));
    }
    if (!items.empty()) {
      svg.Open("dropped", ColorOf(options, "dropped"),
               " fill=\"none\" stroke-dasharray=\"4 3\"");
      for (const auto& e : items) svg.Line(e);
      svg.Close();
    }
  }

  if (LayerOn(options, "trajectory") && !scene.trajectory.empty()) {
    std::string points =
        absl::StrCat(Fixed(canvas.px(frame.ego.pose.x)), ",",
                     Fixed(canvas.py(frame.ego.pose.y)));
    for (const Pose2D& p : scene.trajectory) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
      absl::StrAppend(&points, " ", Fixed(canvas.px(p.x)), ",", Fixed(canvas.py(p.y)));
    }
    svg.Open("trajectory", ColorOf(options, "trajectory"),
             " fill=\"none\" stroke-width=\"2\"");
    svg.Line(absl::StrCat("<polyline points=\"", points, "\"/>"));
    svg.Close();
  }

  if (LayerOn(options, "ego")) {
    const OrientedBox ego_box = FootprintBox(frame.ego.footprint, frame.ego.pose);
    // Short heading tick from the center through the front edge.
    const double reach = 0.5 * frame.ego.footprint.length + 1.0;
    const double hx = frame.ego.pose.x + reach * std::cos(frame.ego.pose.yaw);
    const double hy = frame.ego.pose.y + reach * std::sin(frame.ego.pose.yaw);
    svg.Open("ego", ColorOf(options, "ego"), " fill=\"none\" stroke-width=\"2\"");
    svg.Line(absl::StrCat("<polygon points=\"", canvas.Points(ego_box), "\"/>"));
    svg.Line(absl::StrCat("<line x1=\"", Fixed(canvas.px(frame.ego.pose.x)),
                          "\" y1=\"", Fixed(canvas.py(frame.ego.pose.y)),
                          "\" x2=\"", Fixed(canvas.px(hx)), "\" y2=\"",
                          Fixed(canvas.py(hy)), "\"/>"));
    svg.Close();
  }

  if (filter != nullptr && LayerOn(options, "labels") && !frame.detections.empty()) {
    std::vector<std::string> items;
    for (std::size_t i = 0; i < frame.detections.size(); ++i) {
      const OrientedBox& b = frame.detections[i].box;
      if (!Finite(b)) continue;
      const double k = kappa_of(static_cast<int>(i));
      // Heat: darker red for more critical objects.
      const int shade = static_cast<int>(std::lround(200.0 * (1.0 - k)));
      items.push_back(absl::StrFormat(
          "<text data-index=\"%d\" x=\"%s\" y=\"%s\" fill=\"rgb(255,%d,%d)\">"
          "&#954;=%.2f</text>",
          i, Fixed(canvas.px(b.center.x)),
          Fixed(canvas.py(b.center.y) - 0.5 * b.width * options.scale - 4.0), shade,
          shade, k));
    }
    if (!items.empty()) {
      svg.Open("labels", ColorOf(options, "labels"),
               " stroke-width=\"0.3\" font-family=\"monospace\" font-size=\"11\" "
               "text-anchor=\"middle\"");
      for (const auto& e : items) svg.Line(e);
      svg.Close();
    }
  }

  const std::string size = Fixed(canvas.size());
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size
      << "\" height=\"" << size << "\" viewBox=\"0 0 " << size << " " << size
      << "\" data-config-hash=\"" << config_hash << "\" data-scenario=\""
      << XmlEscape(scene.scenario_id) << "\" data-frame=\"" << scene.frame_index
      << "\">\n"
      << "  <rect width=\"" << size << "\" height=\"" << size
      << "\" fill=\"#ffffff\"/>\n"
      << svg.body() << "</svg>\n";
  return out.str();
}

}  // namespace critnav::cli
