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

#include "critnav/planner.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <ostream>

#include "absl/strings/str_format.h"

namespace critnav {

int PlannerConfig::cells_per_side() const {
  return 2 * static_cast<int>(std::lround(half_extent / cell_size)) + 1;
}

absl::Status ValidatePlannerConfig(const PlannerConfig& cfg) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  auto nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!positive(cfg.horizon)) {
    return absl::InvalidArgumentError("planner.horizon must be > 0");
  }
  if (cfg.steps < 1) return absl::InvalidArgumentError("planner.steps must be >= 1");
  if (!positive(cfg.cell_size)) {
    return absl::InvalidArgumentError("planner.cell_size must be > 0");
  }
  if (!positive(cfg.half_extent) || cfg.cells_per_side() < 1) {
    return absl::InvalidArgumentError(
        "planner.half_extent must cover at least one cell");
  }
  if (cfg.cells_per_side() > 4096) {
    return absl::InvalidArgumentError("planner grid exceeds 4096 cells per side");
  }
  if (!positive(cfg.beta)) return absl::InvalidArgumentError("planner.beta must be > 0");
  if (!nonneg(cfg.obstacle_inflation)) {
    return absl::InvalidArgumentError("planner.obstacle_inflation must be >= 0");
  }
  if (!nonneg(cfg.obstacle_cost_weight) || !nonneg(cfg.prior_weight)) {
    return absl::InvalidArgumentError("planner cost weights must be >= 0");
  }
  if (!positive(cfg.probability_floor) || cfg.probability_floor >= 1e-3) {
    return absl::InvalidArgumentError(
        "planner.probability_floor must be in (0, 1e-3)");
  }
  return absl::OkStatus();
}

PlanDistribution::PlanDistribution(int steps, int rows, int cols,
                                   double cell_size, Pose2D ego_pose)
    : steps_(steps),
      rows_(rows),
      cols_(cols),
      cell_size_(cell_size),
      ego_pose_(ego_pose),
      values_(static_cast<std::size_t>(steps) * rows * cols, 0.0) {}

std::span<const double> PlanDistribution::step(int t) const {
  const std::size_t n = static_cast<std::size_t>(rows_) * cols_;
  return std::span<const double>(values_).subspan(t * n, n);
}

std::span<double> PlanDistribution::mutable_step(int t) {
  const std::size_t n = static_cast<std::size_t>(rows_) * cols_;
  return std::span<double>(values_).subspan(t * n, n);
}

Vec2 PlanDistribution::CellOffset(int row, int col) const {
  return {(col + 0.5 - 0.5 * cols_) * cell_size_,
          (row + 0.5 - 0.5 * rows_) * cell_size_};
}

Vec2 PlanDistribution::CellCenter(std::size_t index) const {
  const int row = static_cast<int>(index / cols_);
  const int col = static_cast<int>(index % cols_);
  return ego_pose_.position() + CellOffset(row, col);
}

std::vector<double> SoftmaxWithFloor(std::span<const double> cost, double beta,
                                     double floor) {
  std::vector<double> p(cost.size(), 0.0);
  if (cost.empty()) return p;
  const double lowest = *std::min_element(cost.begin(), cost.end());
  double sum = 0.0;
  for (size_t i = 0; i < cost.size(); ++i) {
    p[i] = std::exp(-beta * (cost[i] - lowest));
    sum += p[i];
  }
  double floored_sum = 0.0;
  for (double& v : p) {
    v = std::max(v / sum, floor);
    floored_sum += v;
  }
  for (double& v : p) v /= floored_sum;
  return p;
}

namespace {

// Marks cells whose centers fall inside `box` grown by `inflation`. `rel`
// is the box center relative to the grid center.
void RasterizeBox(const OrientedBox& box, Vec2 rel, double inflation, int n,
                  double cell, std::vector<std::uint8_t>& mask) {
  const double c = std::abs(std::cos(box.center.yaw));
  const double s = std::abs(std::sin(box.center.yaw));
  const double hl = 0.5 * box.length + inflation;
  const double hw = 0.5 * box.width + inflation;
  const double rx = c * hl + s * hw;
  const double ry = s * hl + c * hw;
  const double half_n = 0.5 * n;
  // Cell index k has center (k + 0.5 - n/2) * cell.
  auto lo_index = [&](double v) {
    return std::max(0, static_cast<int>(std::ceil(v / cell + half_n - 0.5)));
  };
  auto hi_index = [&](double v) {
    return std::min(n - 1, static_cast<int>(std::floor(v / cell + half_n - 0.5)));
  };
  const int c0 = lo_index(rel.x - rx), c1 = hi_index(rel.x + rx);
  const int r0 = lo_index(rel.y - ry), r1 = hi_index(rel.y + ry);
  if (c0 > c1 || r0 > r1) return;
  OrientedBox local = box;
  local.center.x = rel.x;
  local.center.y = rel.y;
  for (int r = r0; r <= r1; ++r) {
    const double y = (r + 0.5 - half_n) * cell;
    for (int col = c0; col <= c1; ++col) {
      const double x = (col + 0.5 - half_n) * cell;
      if (ContainsPoint(local, {x, y}, inflation)) {
        mask[static_cast<std::size_t>(r) * n + col] = 1;
      }
    }
  }
}

}  // namespace

PlanDistribution Plan(std::span<const OrientedBox> objects,
                      const EgoState& ego, const PlannerConfig& cfg) {
  const int n = cfg.cells_per_side();
  const double cell = cfg.cell_size;
  PlanDistribution plan(cfg.steps, n, n, cell, ego.pose);

  const double max_center = (0.5 * n - 0.5) * cell;
  const double occupied_factor =
      std::exp(-cfg.beta * cfg.obstacle_cost_weight);
  const double prior_scale = cfg.beta * cfg.prior_weight;
  std::vector<double> gx(n), gy(n);
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n) * n);

  for (int t = 0; t < cfg.steps; ++t) {
    const double tau = (t + 1) * cfg.step_duration();
    const Vec2 mean{std::clamp(ego.velocity.x * tau, -max_center, max_center),
                    std::clamp(ego.velocity.y * tau, -max_center, max_center)};
    for (int k = 0; k < n; ++k) {
      const double offset = (k + 0.5 - 0.5 * n) * cell;
      gx[k] = std::exp(-prior_scale * (offset - mean.x) * (offset - mean.x));
      gy[k] = std::exp(-prior_scale * (offset - mean.y) * (offset - mean.y));
    }

    std::fill(mask.begin(), mask.end(), 0);
    for (const OrientedBox& obj : objects) {
      const OrientedBox moved = Extrapolate(obj, tau);
      RasterizeBox(moved, moved.center.position() - ego.pose.position(),
                   cfg.obstacle_inflation, n, cell, mask);
    }

    std::span<double> p = plan.mutable_step(t);
    double sum = 0.0;
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        const std::size_t i = static_cast<std::size_t>(r) * n + c;
        double v = gy[r] * gx[c];
        if (mask[i]) v *= occupied_factor;
        p[i] = v;
        sum += v;
      }
    }
    double floored_sum = 0.0;
    for (double& v : p) {
      v = std::max(v / sum, cfg.probability_floor);
      floored_sum += v;
    }
    for (double& v : p) v /= floored_sum;
  }
  return plan;
}

absl::StatusOr<PklScore> Pkl(const PlanDistribution& gt_plan,
                             const PlanDistribution& pred_plan) {
  if (gt_plan.steps() != pred_plan.steps() ||
      gt_plan.rows() != pred_plan.rows() ||
      gt_plan.cols() != pred_plan.cols()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "plan shapes differ: %dx%dx%d vs %dx%dx%d", gt_plan.steps(),
        gt_plan.rows(), gt_plan.cols(), pred_plan.steps(), pred_plan.rows(),
        pred_plan.cols()));
  }
  PklScore score;
  score.per_step.reserve(gt_plan.steps());
  for (int t = 0; t < gt_plan.steps(); ++t) {
    const auto p = gt_plan.step(t);
    const auto q = pred_plan.step(t);
    double kl = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
      if (p[i] != q[i]) kl += p[i] * std::log(p[i] / q[i]);
    }
    // Rounding can push a near-zero divergence slightly negative.
    kl = std::max(kl, 0.0);
    score.per_step.push_back(kl);
    score.total += kl;
  }
  return score;
}

absl::StatusOr<PklSummary> AggregateTotals(std::span<const double> totals) {
  if (totals.empty()) {
    return absl::InvalidArgumentError("cannot aggregate an empty PKL list");
  }
  std::vector<double> sorted(totals.begin(), totals.end());
  double sum = 0.0;
  for (double v : sorted) sum += v;
  std::sort(sorted.begin(), sorted.end());
  return PklSummary{sum / static_cast<double>(sorted.size()),
                    sorted[(sorted.size() - 1) / 2]};
}

absl::StatusOr<PklSummary> AggregatePkl(std::span<const PklScore> scores) {
  std::vector<double> totals;
  totals.reserve(scores.size());
  for (const PklScore& s : scores) totals.push_back(s.total);
  return AggregateTotals(totals);
}

std::vector<Pose2D> MostProbableTrajectory(const PlanDistribution& plan) {
  std::vector<Pose2D> out;
  out.reserve(plan.steps());
  double yaw = plan.ego_pose().yaw;
  for (int t = 0; t < plan.steps(); ++t) {
    const auto p = plan.step(t);
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.size(); ++i) {
      if (p[i] > p[best]) best = i;
    }
    const Vec2 pos = plan.CellCenter(best);
    if (!out.empty()) {
      const Vec2 d = pos - out.back().position();
      if (d.x != 0.0 || d.y != 0.0) yaw = std::atan2(d.y, d.x);
    }
    out.push_back({pos.x, pos.y, NormalizeAngle(yaw)});
  }
  return out;
}

namespace {

template <typename T>
void WriteLittleEndian(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little,
                "grid dumps assume a little-endian host");
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.write(bytes, sizeof(T));
}

}  // namespace

void WriteGridDump(const PlanDistribution& plan, double horizon,
                   std::ostream& out) {
  out.write("CNGRID01", 8);
  WriteLittleEndian<std::uint32_t>(out, plan.steps());
  WriteLittleEndian<std::uint32_t>(out, plan.rows());
  WriteLittleEndian<std::uint32_t>(out, plan.cols());
  WriteLittleEndian<double>(out, plan.cell_size());
  WriteLittleEndian<double>(
      out, plan.ego_pose().x - 0.5 * plan.cols() * plan.cell_size());
  WriteLittleEndian<double>(
      out, plan.ego_pose().y - 0.5 * plan.rows() * plan.cell_size());
  WriteLittleEndian<double>(out, horizon);
  for (double v : plan.values()) WriteLittleEndian<double>(out, v);
}

}  // namespace critnav
