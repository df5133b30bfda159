// Copyright 2026 The fabsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fabsim/common.hpp"

namespace fabsim {

/// Run metadata carried in the trajectory header record. Limits are stored
/// here so a trajectory file is self-contained for auditing.
struct TrajectoryMeta {
  std::string scenario;
  int dof = 0;
  int action_dim = 0;
  int fabric_rate_hz = 0;
  int action_rate_hz = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
  VectorXd lower_limits;
  VectorXd upper_limits;
  VectorXd effective_accel_limit;  // rad/s^2, after jerk folding
  VectorXd jerk_limit;             // rad/s^3
  VectorXd initial_q;              // fabric pose at t = 0 (rows start at t = dt)
  bool has_cube = false;

  double dt() const { return 1.0 / fabric_rate_hz; }
};

/// One 60 Hz step: fabric state after the step (with the acceleration
/// applied over it), plant state, the torque of the first plant substep,
/// the held action, the active wrench, and any events.
struct TrajectoryRecord {
  double t = 0.0;
  VectorXd fabric_q, fabric_qd, fabric_qdd;
  VectorXd plant_q, plant_qd, torque;
  VectorXd action;
  Vector3d wrench_force = Vector3d::Zero();
  Vector3d wrench_torque = Vector3d::Zero();
  long wrench_age = 0;
  Vector3d cube_position = Vector3d::Zero();
  Quaterniond cube_orientation = Quaterniond::Identity();
  std::vector<std::string> events;
};

struct Trajectory {
  TrajectoryMeta meta;
  std::vector<TrajectoryRecord> rows;

  /// Dimension and time-grid consistency; throws ConfigError on violation.
  void validate() const {
    if (meta.dof <= 0 || meta.fabric_rate_hz <= 0) {
      throw ConfigError("trajectory: header must declare dof and fabric_rate_hz");
    }
    const double dt = meta.dt();
    double prev_t = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const TrajectoryRecord& row = rows[i];
      if (row.fabric_q.size() != meta.dof || row.fabric_qd.size() != meta.dof ||
          row.fabric_qdd.size() != meta.dof) {
        throw ConfigError("trajectory: row " + std::to_string(i) +
                          " has inconsistent fabric dimensions");
      }
      if (row.plant_q.size() != 0 &&
          (row.plant_q.size() != meta.dof || row.plant_qd.size() != meta.dof ||
           row.torque.size() != meta.dof)) {
        throw ConfigError("trajectory: row " + std::to_string(i) +
                          " has inconsistent plant dimensions");
      }
      if (meta.action_dim > 0 && row.action.size() != meta.action_dim) {
        throw ConfigError("trajectory: row " + std::to_string(i) +
                          " has inconsistent action dimension");
      }
      if (i > 0 && !(row.t > prev_t)) {
        throw ConfigError("trajectory: timestamps must be strictly increasing");
      }
      const double expected = dt * static_cast<double>(i + 1);
      if (std::abs(row.t - expected) > 1e-9) {
        throw ConfigError("trajectory: row " + std::to_string(i) +
                          " is off the uniform time grid");
      }
      prev_t = row.t;
    }
  }
};

}  // namespace fabsim
