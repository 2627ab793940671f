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

#ifndef CRITNAV_PLANNER_H_
#define CRITNAV_PLANNER_H_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "critnav/geometry.h"

namespace critnav {

// Cost-field softmax planner over an ego-centered, axis-aligned grid.
//
// For lead time tau_t = t * horizon / steps the cost of a cell is
//   prior_weight * |cell - ego_cv(tau_t)|^2
//     + obstacle_cost_weight * occupied(cell, tau_t)
// where ego_cv extrapolates the ego at constant velocity and a cell is
// occupied when its center lies inside any object footprint (extrapolated at
// constant velocity, grown by obstacle_inflation). The step distribution is
// softmax(-beta * cost), floored at probability_floor and renormalized.
struct PlannerConfig {
  double horizon = 4.0;  // seconds
  int steps = 16;
  double half_extent = 40.0;  // meters
  double cell_size = 0.5;     // meters
  // Grows object footprints; about half the ego diagonal, so a trajectory
  // that avoids occupied cells keeps the ego body clear of the object.
  double obstacle_inflation = 2.5;
  double beta = 1.0;
  double obstacle_cost_weight = 10.0;
  double prior_weight = 0.05;
  double probability_floor = 1e-12;

  // Odd, so the ego position is the center of the middle cell.
  int cells_per_side() const;
  double step_duration() const { return horizon / steps; }
};

absl::Status ValidatePlannerConfig(const PlannerConfig& cfg);

class PlanDistribution {
 public:
  PlanDistribution() = default;
  PlanDistribution(int steps, int rows, int cols, double cell_size,
                   Pose2D ego_pose);

  int steps() const { return steps_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double cell_size() const { return cell_size_; }
  // Ego pose at planning time; the grid is centered on its position.
  const Pose2D& ego_pose() const { return ego_pose_; }

  // Probabilities of step `t` (0-based), row-major with rows along +y and
  // columns along +x.
  std::span<const double> step(int t) const;
  std::span<double> mutable_step(int t);

  // Offset of cell (row, col) center from the ego position.
  Vec2 CellOffset(int row, int col) const;
  // World position of the center of flat cell `index`.
  Vec2 CellCenter(std::size_t index) const;

  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const PlanDistribution&,
                         const PlanDistribution&) = default;

 private:
  int steps_ = 0;
  int rows_ = 0;
  int cols_ = 0;
  double cell_size_ = 0.0;
  Pose2D ego_pose_;
  std::vector<double> values_;
};

// Plans around `objects` (ground truth or kept detections). `cfg` must be
// valid.
PlanDistribution Plan(std::span<const OrientedBox> objects,
                      const EgoState& ego, const PlannerConfig& cfg);

// Unnormalized-cost form used by Plan, exposed for small hand-checked grids:
// softmax(-beta * cost) with the probability floor applied.
std::vector<double> SoftmaxWithFloor(std::span<const double> cost, double beta,
                                     double floor);

struct PklScore {
  std::vector<double> per_step;  // nats
  double total = 0.0;
};

// Per-step KL(gt || pred), summed over steps.
absl::StatusOr<PklScore> Pkl(const PlanDistribution& gt_plan,
                             const PlanDistribution& pred_plan);

struct PklSummary {
  double mean = 0.0;
  double median = 0.0;  // lower median
};

absl::StatusOr<PklSummary> AggregatePkl(std::span<const PklScore> scores);
absl::StatusOr<PklSummary> AggregateTotals(std::span<const double> totals);

// Per-step argmax cell centers (ties: lowest row-major index). The first
// pose takes the ego heading, later ones the direction of travel from the
// previous step (held when the position does not change).
std::vector<Pose2D> MostProbableTrajectory(const PlanDistribution& plan);

// Binary grid dump, little-endian:
//   char[8] magic "CNGRID01"
//   uint32 steps, uint32 rows, uint32 cols
//   float64 cell_size, float64 origin_x, float64 origin_y, float64 horizon
//   float64 values[steps][rows][cols]
// origin is the world position of the lower-left corner of cell (0, 0).
void WriteGridDump(const PlanDistribution& plan, double horizon,
                   std::ostream& out);

}  // namespace critnav

#endif  // CRITNAV_PLANNER_H_
