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

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "fabsim/actions.hpp"
#include "fabsim/analysis.hpp"
#include "fabsim/chain_model.hpp"
#include "fabsim/common.hpp"
#include "fabsim/cube.hpp"
#include "fabsim/plant.hpp"
#include "fabsim/solver.hpp"
#include "fabsim/trajectory.hpp"

namespace fabsim {

struct PlantConfig {
  bool enabled = true;
  VectorXd mass;     // kg m^2, per joint
  VectorXd viscous;  // N m s/rad, per joint
  int substeps = 4;  // per fabric step
  double kp = 2.0;
  double kd = 0.1;

  void validate(int dof) const {
    if (!enabled) return;
    if (mass.size() != dof || viscous.size() != dof) {
      throw ConfigError("plant.mass/viscous: must have one entry per joint");
    }
    if ((mass.array() <= 0.0).any()) throw ConfigError("plant.mass: entries must be > 0");
    if ((viscous.array() < 0.0).any()) throw ConfigError("plant.viscous: entries must be >= 0");
    if (substeps <= 0) throw ConfigError("plant.substeps: must be > 0");
    if (!(kp >= 0.0) || !(kd >= 0.0)) throw ConfigError("plant.kp/kd: must be >= 0");
  }
};

struct CubeConfig {
  bool enabled = false;
  double mass = 0.05;   // kg
  double side = 0.065;  // m
  Vector3d position = Vector3d::Zero();
  bool gravity = false;
  bool wrench_enabled = true;
  double wrench_accel_scale = 20.0;  // c1, m/s^2
  double wrench_resample_prob = 0.1;

  double torque_radius() const { return std::sqrt(3.0) / 2.0 * side; }  // c2, m

  void validate() const {
    if (!enabled) return;
    if (!(mass > 0.0)) throw ConfigError("cube.mass: must be > 0");
    if (!(side > 0.0)) throw ConfigError("cube.side: must be > 0");
    if (!(wrench_accel_scale >= 0.0)) throw ConfigError("cube.wrench_accel_scale: must be >= 0");
    if (!(wrench_resample_prob >= 0.0 && wrench_resample_prob <= 1.0)) {
      throw ConfigError("cube.wrench_resample_prob: must be in [0, 1]");
    }
  }
};

struct ScenarioConfig {
  std::string name;
  ChainModel model;
  FabricConfig fabric;
  FabricTerms terms;
  bool fingertip_goal_tracks_cube = true;  // retarget goal to the cube center
  PlantConfig plant;
  CubeConfig cube;
  ActionSourceSpec action;
  double duration_s = 10.0;
  std::uint64_t seed = 0;
  std::string output_path;
  VectorXd initial_q;   // empty = mid-range pose
  VectorXd initial_qd;  // empty = rest

  std::string config_hash;  // filled on load / by the caller

  void validate() const {
    model.validate();
    fabric.validate(model.dof());
    plant.validate(model.dof());
    cube.validate();
    if (!(duration_s > 0.0)) throw ConfigError("duration_s: must be > 0");
    if (initial_q.size() != 0 && initial_q.size() != model.dof()) {
      throw ConfigError("initial_q: must have one entry per joint");
    }
    if (initial_qd.size() != 0 && initial_qd.size() != model.dof()) {
      throw ConfigError("initial_qd: must have one entry per joint");
    }
  }
};

struct RunSummary {
  std::string scenario;
  long records = 0;
  double duration_s = 0.0;
  long joint_violations = 0;
  long accel_violations = 0;
  long jerk_violations = 0;
  double energy_initial = 0.0;
  double energy_final = 0.0;
  double energy_max_abs_drift = 0.0;
  double final_tracking_error = 0.0;  // ||q - q_f|| at the last record
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string output_path;

  bool audits_clean() const {
    return joint_violations == 0 && accel_violations == 0 && jerk_violations == 0;
  }
};

struct RunResult {
  Trajectory trajectory;
  RunSummary summary;
};

/// Couples action source -> fabric -> plant at the configured rates:
/// per action tick, the action is held for fabric_rate/action_rate fabric
/// substeps; each fabric substep is followed by plant.substeps plant (and
/// cube) substeps under zero-order hold of (q_f, q̇_f). One record is
/// appended per fabric step. Throws NumericFaultError with the step index
/// if the state leaves the finite range.
inline RunResult run_scenario(const ScenarioConfig& config) {
  config.validate();
  const int n = config.model.dof();
  const int action_dim = config.model.fingertip_dim();

  Fabric fabric(config.model, config.fabric, config.terms);
  ActionSource source(config.action, action_dim, config.seed);
  Rng wrench_rng(config.seed ^ 0x9e3779b97f4a7c15ull);

  const VectorXd q0 = config.initial_q.size() ? config.initial_q : config.model.mid_range();
  FabricState fabric_state = fabric.initial_state(q0);
  if (config.initial_qd.size()) fabric_state.qd = config.initial_qd;

  PlantState plant_state;
  if (config.plant.enabled) {
    plant_state = {q0, VectorXd::Zero(n), config.plant.mass, config.plant.viscous};
  }

  CubeState cube_state;
  WrenchSample wrench;
  if (config.cube.enabled) {
    cube_state.position = config.cube.position;
    cube_state.mass = config.cube.mass;
    cube_state.side = config.cube.side;
    if (config.cube.wrench_enabled) {
      // The initial wrench is a fresh draw; later ticks resample by chance.
      wrench.force = config.cube.wrench_accel_scale * cube_state.mass * wrench_rng.unit_vector();
      wrench.torque = config.cube.torque_radius() * wrench_rng.unit_vector().cross(wrench.force);
    }
  }

  const double fabric_dt = config.fabric.dt();
  const double plant_dt = fabric_dt / config.plant.substeps;
  const int fabric_substeps = config.fabric.substeps_per_action();
  const long action_ticks =
      std::llround(config.duration_s * config.fabric.action_rate_hz);
  if (action_ticks < 1) {
    throw ConfigError("duration_s: shorter than one action period");
  }

  RunResult result;
  Trajectory& traj = result.trajectory;
  traj.meta.scenario = config.name;
  traj.meta.dof = n;
  traj.meta.action_dim = action_dim;
  traj.meta.fabric_rate_hz = config.fabric.fabric_rate_hz;
  traj.meta.action_rate_hz = config.fabric.action_rate_hz;
  traj.meta.seed = config.seed;
  traj.meta.config_hash = config.config_hash;
  traj.meta.lower_limits = config.model.lower_limits;
  traj.meta.upper_limits = config.model.upper_limits;
  traj.meta.effective_accel_limit = fabric.effective_accel_limit();
  traj.meta.jerk_limit = config.fabric.jerk_limit;
  traj.meta.initial_q = q0;
  traj.meta.has_cube = config.cube.enabled;
  traj.rows.reserve(static_cast<std::size_t>(action_ticks) * fabric_substeps);

  long step_index = 0;
  for (long tick = 0; tick < action_ticks; ++tick) {
    const double tick_time =
        static_cast<double>(tick) / config.fabric.action_rate_hz;
    const VectorXd action = source.next_action(tick_time);

    bool fresh_wrench = false;
    if (config.cube.enabled && config.cube.wrench_enabled && tick > 0) {
      wrench = sample_disturbance_wrench(wrench_rng, cube_state.mass,
                                         config.cube.wrench_accel_scale,
                                         config.cube.torque_radius(), wrench,
                                         config.cube.wrench_resample_prob);
      fresh_wrench = (wrench.age == 0);
    }

    for (int sub = 0; sub < fabric_substeps; ++sub, ++step_index) {
      if (config.fingertip_goal_tracks_cube && config.cube.enabled) {
        VectorXd goal(action_dim);
        for (int f = 0; f < config.model.num_fingers(); ++f) {
          goal.segment<3>(3 * f) = cube_state.position;
        }
        fabric.set_fingertip_goal(goal);
      }

      FabricStepInfo info;
      try {
        fabric_state = fabric.step(fabric_state, action, &info);
      } catch (const NumericFaultError& fault) {
        throw NumericFaultError(fault.what(), step_index);
      }
      if (!fabric_state.q.allFinite() || !fabric_state.qd.allFinite() ||
          !fabric_state.qdd.allFinite()) {
        throw NumericFaultError("run_scenario: non-finite fabric state", step_index);
      }

      TrajectoryRecord row;
      row.t = fabric_dt * static_cast<double>(step_index + 1);
      row.action = action;
      if (config.plant.enabled) {
        for (int p = 0; p < config.plant.substeps; ++p) {
          const VectorXd tau = pd_torque(fabric_state.q, fabric_state.qd, plant_state.q,
                                         plant_state.qd, config.plant.kp, config.plant.kd);
          if (p == 0) row.torque = tau;
          plant_state = plant_step(plant_state, tau, plant_dt);
          if (config.cube.enabled) {
            cube_state = cube_step(cube_state, wrench, plant_dt, config.cube.gravity);
          }
        }
        if (!plant_state.q.allFinite() || !plant_state.qd.allFinite()) {
          throw NumericFaultError("run_scenario: non-finite plant state", step_index);
        }
        row.plant_q = plant_state.q;
        row.plant_qd = plant_state.qd;
      } else if (config.cube.enabled) {
        for (int p = 0; p < config.plant.substeps; ++p) {
          cube_state = cube_step(cube_state, wrench, plant_dt, config.cube.gravity);
        }
      }

      row.fabric_q = fabric_state.q;
      row.fabric_qd = fabric_state.qd;
      row.fabric_qdd = fabric_state.qdd;
      if (config.cube.enabled) {
        row.wrench_force = wrench.force;
        row.wrench_torque = wrench.torque;
        row.wrench_age = wrench.age;
        row.cube_position = cube_state.position;
        row.cube_orientation = cube_state.orientation;
        if (!cube_state.position.allFinite()) {
          throw NumericFaultError("run_scenario: non-finite cube state", step_index);
        }
      }
      if (fresh_wrench && sub == 0) row.events.push_back("wrench_resample");
      if (info.speed_capped) row.events.push_back("speed_cap");
      traj.rows.push_back(std::move(row));
    }
  }

  RunSummary& summary = result.summary;
  summary.scenario = config.name;
  summary.records = static_cast<long>(traj.rows.size());
  summary.duration_s = static_cast<double>(summary.records) * fabric_dt;
  summary.seed = config.seed;
  summary.config_hash = config.config_hash;
  summary.output_path = config.output_path;

  const LimitAuditReport audit = limit_audit(traj);
  summary.joint_violations = audit.joint_violations;
  summary.accel_violations = audit.accel_violations;
  summary.jerk_violations = audit.jerk_violations;

  const std::vector<double> energy = energy_trace(traj);
  if (!energy.empty()) {
    summary.energy_initial = energy.front();
    summary.energy_final = energy.back();
    for (double value : energy) {
      summary.energy_max_abs_drift =
          std::max(summary.energy_max_abs_drift, std::abs(value - energy.front()));
    }
  }
  if (config.plant.enabled && !traj.rows.empty()) {
    const TrajectoryRecord& last = traj.rows.back();
    summary.final_tracking_error = (last.plant_q - last.fabric_q).norm();
  }
  return result;
}

}  // namespace fabsim
