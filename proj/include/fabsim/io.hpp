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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fabsim/scenario.hpp"
#include "fabsim/trajectory.hpp"

namespace fabsim {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace detail {

inline const json& require(const json& j, const char* key, const std::string& context) {
  if (!j.contains(key)) throw ConfigError(context + "." + key + ": missing field");
  return j.at(key);
}

inline Vector3d vector3_from_json(const json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(context + ": expected 3-vector");
  return Vector3d(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

inline VectorXd vector_from_json(const json& j, const std::string& context) {
  if (!j.is_array()) throw ConfigError(context + ": expected array");
  VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = j[i].get<double>();
  return v;
}

/// Scalar values broadcast to n entries; arrays must have exactly n.
inline VectorXd vector_param(const json& j, int n, const std::string& context) {
  if (j.is_number()) return VectorXd::Constant(n, j.get<double>());
  const VectorXd v = vector_from_json(j, context);
  if (v.size() != n) {
    throw ConfigError(context + ": expected scalar or array of length " + std::to_string(n));
  }
  return v;
}

inline json vector_to_json(const VectorXd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

inline ordered_json vector_to_ordered_json(const VectorXd& v) {
  ordered_json out = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Hand model
// ---------------------------------------------------------------------------

inline ChainModel chain_model_from_json(const json& j) {
  ChainModel model;
  model.name = j.value("name", std::string{});
  const json& joints = detail::require(j, "joints", "hand model");
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const std::string ctx = "joints[" + std::to_string(i) + "]";
    JointDescriptor joint;
    joint.axis = detail::vector3_from_json(detail::require(joints[i], "axis", ctx), ctx + ".axis");
    joint.offset =
        detail::vector3_from_json(detail::require(joints[i], "offset", ctx), ctx + ".offset");
    joint.parent = joints[i].value("parent", -1);
    model.joints.push_back(joint);
  }
  const json& fingers = detail::require(j, "fingers", "hand model");
  for (std::size_t f = 0; f < fingers.size(); ++f) {
    const std::string ctx = "fingers[" + std::to_string(f) + "]";
    FingerDescriptor finger;
    for (const auto& idx : detail::require(fingers[f], "joints", ctx)) {
      finger.joints.push_back(idx.get<int>());
    }
    finger.tip_offset = detail::vector3_from_json(
        detail::require(fingers[f], "tip_offset", ctx), ctx + ".tip_offset");
    model.fingers.push_back(finger);
  }
  model.lower_limits =
      detail::vector_from_json(detail::require(j, "lower_limits", "hand model"), "lower_limits");
  model.upper_limits =
      detail::vector_from_json(detail::require(j, "upper_limits", "hand model"), "upper_limits");
  model.validate();
  return model;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return j;
}

inline ChainModel load_chain_model(const std::string& path) {
  try {
    return chain_model_from_json(load_json_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline json chain_model_to_json(const ChainModel& model) {
  json j;
  j["name"] = model.name;
  j["joints"] = json::array();
  for (const JointDescriptor& joint : model.joints) {
    j["joints"].push_back({{"axis", detail::vector_to_json(joint.axis)},
                           {"offset", detail::vector_to_json(joint.offset)},
                           {"parent", joint.parent}});
  }
  j["fingers"] = json::array();
  for (const FingerDescriptor& finger : model.fingers) {
    j["fingers"].push_back({{"joints", finger.joints},
                            {"tip_offset", detail::vector_to_json(finger.tip_offset)}});
  }
  j["lower_limits"] = detail::vector_to_json(model.lower_limits);
  j["upper_limits"] = detail::vector_to_json(model.upper_limits);
  return j;
}

// ---------------------------------------------------------------------------
// Scenario config
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

inline json scenario_to_json(const ScenarioConfig& config);

/// Hash of the canonical (key-sorted) config serialization, seed included.
inline std::string config_hash_hex(const ScenarioConfig& config) {
  std::ostringstream out;
  out << std::hex << fnv1a64(scenario_to_json(config).dump());
  return out.str();
}

inline ScenarioConfig scenario_from_json(const json& j, const std::string& base_dir) {
  ScenarioConfig config;
  config.name = j.value("name", std::string{"scenario"});

  const std::string model_ref = detail::require(j, "hand_model", "scenario").get<std::string>();
  const std::filesystem::path model_path =
      std::filesystem::path(model_ref).is_absolute()
          ? std::filesystem::path(model_ref)
          : std::filesystem::path(base_dir) / model_ref;
  config.model = load_chain_model(model_path.string());
  const int n = config.model.dof();

  const json& fabric = detail::require(j, "fabric", "scenario");
  config.fabric.beta = fabric.value("beta", 2.5);
  config.fabric.gamma = fabric.value("gamma", 10.0);
  config.fabric.accel_limit =
      detail::vector_param(detail::require(fabric, "accel_limit", "fabric"), n, "fabric.accel_limit");
  config.fabric.jerk_limit =
      detail::vector_param(detail::require(fabric, "jerk_limit", "fabric"), n, "fabric.jerk_limit");
  config.fabric.action_rate_hz = fabric.value("action_rate_hz", 30);
  config.fabric.fabric_rate_hz = fabric.value("fabric_rate_hz", 60);
  config.fabric.velocity_eps = fabric.value("velocity_eps", 1e-9);
  config.fabric.speed_cap = fabric.value("speed_cap", 0.0);

  const json& terms = detail::require(j, "terms", "scenario");
  const auto parse_attractor = [&](const char* key, int goal_dim, AttractorTermConfig* out) {
    if (!terms.contains(key)) {
      out->enabled = false;
      return;
    }
    const json& t = terms.at(key);
    const std::string ctx = std::string("terms.") + key;
    out->enabled = t.value("enabled", true);
    out->params.gain = detail::require(t, "k", ctx).get<double>();
    out->params.sharpness = detail::require(t, "sharpness", ctx).get<double>();
    out->params.metric_mass = detail::require(t, "mass", ctx).get<double>();
    const json& goal = detail::require(t, "goal", ctx);
    if (goal.is_string()) {
      const std::string mode = goal.get<std::string>();
      if (mode == "cube") {
        config.fingertip_goal_tracks_cube = true;
        out->goal = VectorXd::Zero(goal_dim);
      } else if (mode == "mid_range") {
        out->goal = config.model.mid_range();
      } else {
        throw ConfigError(ctx + ".goal: unknown mode '" + mode + "'");
      }
    } else {
      const VectorXd g = detail::vector_from_json(goal, ctx + ".goal");
      if (g.size() != goal_dim) {
        throw ConfigError(ctx + ".goal: expected dimension " + std::to_string(goal_dim));
      }
      out->goal = g;
    }
  };
  config.fingertip_goal_tracks_cube = false;
  parse_attractor("fingertip_attractor", config.model.fingertip_dim(),
                  &config.terms.fingertip_attractor);
  parse_attractor("posture_attractor", n, &config.terms.posture_attractor);
  const auto parse_barrier = [&](const char* key, BarrierTermConfig* out) {
    if (!terms.contains(key)) {
      out->enabled = false;
      return;
    }
    const json& t = terms.at(key);
    const std::string ctx = std::string("terms.") + key;
    out->enabled = t.value("enabled", true);
    out->params.gain = detail::require(t, "k", ctx).get<double>();
    out->params.accel = detail::require(t, "accel", ctx).get<double>();
    out->params.damping = detail::require(t, "damping", ctx).get<double>();
  };
  parse_barrier("upper_limit_barrier", &config.terms.upper_limit_barrier);
  parse_barrier("lower_limit_barrier", &config.terms.lower_limit_barrier);

  if (j.contains("plant")) {
    const json& plant = j.at("plant");
    config.plant.enabled = plant.value("enabled", true);
    if (config.plant.enabled) {
      config.plant.mass =
          detail::vector_param(detail::require(plant, "mass", "plant"), n, "plant.mass");
      config.plant.viscous =
          detail::vector_param(detail::require(plant, "viscous", "plant"), n, "plant.viscous");
      config.plant.substeps = plant.value("substeps", 4);
      config.plant.kp = plant.value("kp", 2.0);
      config.plant.kd = plant.value("kd", 0.1);
    }
  } else {
    config.plant.enabled = false;
  }

  if (j.contains("cube")) {
    const json& cube = j.at("cube");
    config.cube.enabled = cube.value("enabled", true);
    config.cube.mass = cube.value("mass", 0.05);
    config.cube.side = cube.value("side", 0.065);
    if (cube.contains("position")) {
      config.cube.position = detail::vector3_from_json(cube.at("position"), "cube.position");
    }
    config.cube.gravity = cube.value("gravity", false);
    if (cube.contains("wrench")) {
      const json& wrench = cube.at("wrench");
      config.cube.wrench_enabled = wrench.value("enabled", true);
      config.cube.wrench_accel_scale = wrench.value("accel_scale", 20.0);
      config.cube.wrench_resample_prob = wrench.value("resample_prob", 0.1);
    }
  } else {
    config.cube.enabled = false;
  }
  if (config.fingertip_goal_tracks_cube && !config.cube.enabled) {
    throw ConfigError("terms.fingertip_attractor.goal: 'cube' requires cube.enabled");
  }

  const json& action = detail::require(j, "action", "scenario");
  const std::string kind = detail::require(action, "kind", "action").get<std::string>();
  if (kind == "zero") {
    config.action.kind = ActionKind::kZero;
  } else if (kind == "bang_bang") {
    config.action.kind = ActionKind::kBangBang;
  } else if (kind == "uniform_random") {
    config.action.kind = ActionKind::kUniformRandom;
  } else if (kind == "scripted") {
    config.action.kind = ActionKind::kScripted;
  } else {
    throw ConfigError("action.kind: unknown kind '" + kind + "'");
  }
  config.action.period = action.value("period_s", 1.0);
  config.action.amplitude = action.value("amplitude", 1.5);
  if (config.action.kind == ActionKind::kScripted) {
    const std::string script_ref = detail::require(action, "file", "action").get<std::string>();
    const std::filesystem::path script_path =
        std::filesystem::path(script_ref).is_absolute()
            ? std::filesystem::path(script_ref)
            : std::filesystem::path(base_dir) / script_ref;
    const json rows = load_json_file(script_path.string());
    if (!rows.is_array()) throw ConfigError(script_path.string() + ": expected array of rows");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::string ctx = "script[" + std::to_string(i) + "]";
      const double t = detail::require(rows[i], "t", ctx).get<double>();
      const VectorXd a =
          detail::vector_from_json(detail::require(rows[i], "action", ctx), ctx + ".action");
      config.action.script.emplace_back(t, a);
    }
  }

  config.duration_s = j.value("duration_s", 10.0);
  config.seed = j.value("seed", std::uint64_t{0});
  config.output_path = j.value("output", std::string{"out/trajectory.jsonl"});
  if (j.contains("initial_q") && !j.at("initial_q").is_string()) {
    config.initial_q = detail::vector_from_json(j.at("initial_q"), "initial_q");
  }
  if (j.contains("initial_qd")) {
    config.initial_qd = detail::vector_from_json(j.at("initial_qd"), "initial_qd");
  }

  config.validate();
  config.config_hash = config_hash_hex(config);
  return config;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  const std::string base_dir = std::filesystem::path(path).parent_path().string();
  try {
    return scenario_from_json(load_json_file(path), base_dir);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline json scenario_to_json(const ScenarioConfig& config) {
  json j;
  j["name"] = config.name;
  j["hand_model"] = chain_model_to_json(config.model);
  j["duration_s"] = config.duration_s;
  j["seed"] = config.seed;
  json fabric;
  fabric["beta"] = config.fabric.beta;
  fabric["gamma"] = config.fabric.gamma;
  fabric["accel_limit"] = detail::vector_to_json(config.fabric.accel_limit);
  fabric["jerk_limit"] = detail::vector_to_json(config.fabric.jerk_limit);
  fabric["action_rate_hz"] = config.fabric.action_rate_hz;
  fabric["fabric_rate_hz"] = config.fabric.fabric_rate_hz;
  fabric["velocity_eps"] = config.fabric.velocity_eps;
  fabric["speed_cap"] = config.fabric.speed_cap;
  j["fabric"] = fabric;
  json terms;
  const auto attractor_json = [](const AttractorTermConfig& t) {
    return json{{"enabled", t.enabled},
                {"k", t.params.gain},
                {"sharpness", t.params.sharpness},
                {"mass", t.params.metric_mass},
                {"goal", detail::vector_to_json(t.goal)}};
  };
  const auto barrier_json = [](const BarrierTermConfig& t) {
    return json{{"enabled", t.enabled},
                {"k", t.params.gain},
                {"accel", t.params.accel},
                {"damping", t.params.damping}};
  };
  terms["fingertip_attractor"] = attractor_json(config.terms.fingertip_attractor);
  terms["posture_attractor"] = attractor_json(config.terms.posture_attractor);
  terms["upper_limit_barrier"] = barrier_json(config.terms.upper_limit_barrier);
  terms["lower_limit_barrier"] = barrier_json(config.terms.lower_limit_barrier);
  j["terms"] = terms;
  j["fingertip_goal_tracks_cube"] = config.fingertip_goal_tracks_cube;
  json plant;
  plant["enabled"] = config.plant.enabled;
  if (config.plant.enabled) {
    plant["mass"] = detail::vector_to_json(config.plant.mass);
    plant["viscous"] = detail::vector_to_json(config.plant.viscous);
    plant["substeps"] = config.plant.substeps;
    plant["kp"] = config.plant.kp;
    plant["kd"] = config.plant.kd;
  }
  j["plant"] = plant;
  json cube;
  cube["enabled"] = config.cube.enabled;
  if (config.cube.enabled) {
    cube["mass"] = config.cube.mass;
    cube["side"] = config.cube.side;
    cube["position"] = detail::vector_to_json(config.cube.position);
    cube["gravity"] = config.cube.gravity;
    cube["wrench"] = {{"enabled", config.cube.wrench_enabled},
                      {"accel_scale", config.cube.wrench_accel_scale},
                      {"resample_prob", config.cube.wrench_resample_prob}};
  }
  j["cube"] = cube;
  json action;
  switch (config.action.kind) {
    case ActionKind::kZero: action["kind"] = "zero"; break;
    case ActionKind::kBangBang: action["kind"] = "bang_bang"; break;
    case ActionKind::kUniformRandom: action["kind"] = "uniform_random"; break;
    case ActionKind::kScripted: action["kind"] = "scripted"; break;
  }
  action["period_s"] = config.action.period;
  action["amplitude"] = config.action.amplitude;
  if (!config.action.script.empty()) {
    action["script"] = json::array();
    for (const auto& [t, a] : config.action.script) {
      action["script"].push_back({{"t", t}, {"action", detail::vector_to_json(a)}});
    }
  }
  j["action"] = action;
  if (config.initial_q.size()) j["initial_q"] = detail::vector_to_json(config.initial_q);
  if (config.initial_qd.size()) j["initial_qd"] = detail::vector_to_json(config.initial_qd);
  return j;
}

// ---------------------------------------------------------------------------
// Trajectory files (line-delimited JSON, one record per 60 Hz step)
// ---------------------------------------------------------------------------

inline void write_trajectory(std::ostream& out, const Trajectory& traj) {
  ordered_json header;
  header["type"] = "header";
  header["scenario"] = traj.meta.scenario;
  header["dof"] = traj.meta.dof;
  header["action_dim"] = traj.meta.action_dim;
  header["fabric_rate_hz"] = traj.meta.fabric_rate_hz;
  header["action_rate_hz"] = traj.meta.action_rate_hz;
  header["seed"] = traj.meta.seed;
  header["config_hash"] = traj.meta.config_hash;
  header["lower_limits"] = detail::vector_to_ordered_json(traj.meta.lower_limits);
  header["upper_limits"] = detail::vector_to_ordered_json(traj.meta.upper_limits);
  header["effective_accel_limit"] =
      detail::vector_to_ordered_json(traj.meta.effective_accel_limit);
  header["jerk_limit"] = detail::vector_to_ordered_json(traj.meta.jerk_limit);
  header["initial_q"] = detail::vector_to_ordered_json(traj.meta.initial_q);
  header["has_cube"] = traj.meta.has_cube;
  out << header.dump() << "\n";

  for (const TrajectoryRecord& row : traj.rows) {
    ordered_json r;
    r["t"] = row.t;
    r["q_f"] = detail::vector_to_ordered_json(row.fabric_q);
    r["dq_f"] = detail::vector_to_ordered_json(row.fabric_qd);
    r["ddq_f"] = detail::vector_to_ordered_json(row.fabric_qdd);
    if (row.plant_q.size()) {
      r["q"] = detail::vector_to_ordered_json(row.plant_q);
      r["dq"] = detail::vector_to_ordered_json(row.plant_qd);
      r["tau"] = detail::vector_to_ordered_json(row.torque);
    }
    r["action"] = detail::vector_to_ordered_json(row.action);
    if (traj.meta.has_cube) {
      ordered_json wrench;
      wrench["force"] = detail::vector_to_ordered_json(row.wrench_force);
      wrench["torque"] = detail::vector_to_ordered_json(row.wrench_torque);
      wrench["age"] = row.wrench_age;
      r["wrench"] = wrench;
      ordered_json cube;
      cube["position"] = detail::vector_to_ordered_json(row.cube_position);
      cube["orientation"] =
          ordered_json::array({row.cube_orientation.w(), row.cube_orientation.x(),
                               row.cube_orientation.y(), row.cube_orientation.z()});
      r["cube"] = cube;
    }
    if (!row.events.empty()) r["events"] = row.events;
    out << r.dump() << "\n";
  }
}

inline void write_trajectory_file(const std::string& path, const Trajectory& traj) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  write_trajectory(out, traj);
}

inline Trajectory read_trajectory(std::istream& in) {
  Trajectory traj;
  std::string line;
  bool have_header = false;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ConfigError("trajectory line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!have_header) {
      if (j.value("type", std::string{}) != "header") {
        throw ConfigError("trajectory: first record must be the header");
      }
      traj.meta.scenario = j.value("scenario", std::string{});
      traj.meta.dof = j.at("dof").get<int>();
      traj.meta.action_dim = j.at("action_dim").get<int>();
      traj.meta.fabric_rate_hz = j.at("fabric_rate_hz").get<int>();
      traj.meta.action_rate_hz = j.at("action_rate_hz").get<int>();
      traj.meta.seed = j.at("seed").get<std::uint64_t>();
      traj.meta.config_hash = j.value("config_hash", std::string{});
      traj.meta.lower_limits = detail::vector_from_json(j.at("lower_limits"), "lower_limits");
      traj.meta.upper_limits = detail::vector_from_json(j.at("upper_limits"), "upper_limits");
      traj.meta.effective_accel_limit =
          detail::vector_from_json(j.at("effective_accel_limit"), "effective_accel_limit");
      traj.meta.jerk_limit = detail::vector_from_json(j.at("jerk_limit"), "jerk_limit");
      if (j.contains("initial_q")) {
        traj.meta.initial_q = detail::vector_from_json(j.at("initial_q"), "initial_q");
      }
      traj.meta.has_cube = j.value("has_cube", false);
      have_header = true;
      continue;
    }
    TrajectoryRecord row;
    row.t = j.at("t").get<double>();
    row.fabric_q = detail::vector_from_json(j.at("q_f"), "q_f");
    row.fabric_qd = detail::vector_from_json(j.at("dq_f"), "dq_f");
    row.fabric_qdd = detail::vector_from_json(j.at("ddq_f"), "ddq_f");
    if (j.contains("q")) {
      row.plant_q = detail::vector_from_json(j.at("q"), "q");
      row.plant_qd = detail::vector_from_json(j.at("dq"), "dq");
      row.torque = detail::vector_from_json(j.at("tau"), "tau");
    }
    row.action = detail::vector_from_json(j.at("action"), "action");
    if (j.contains("wrench")) {
      const json& wrench = j.at("wrench");
      row.wrench_force = detail::vector3_from_json(wrench.at("force"), "wrench.force");
      row.wrench_torque = detail::vector3_from_json(wrench.at("torque"), "wrench.torque");
      row.wrench_age = wrench.at("age").get<long>();
    }
    if (j.contains("cube")) {
      const json& cube = j.at("cube");
      row.cube_position = detail::vector3_from_json(cube.at("position"), "cube.position");
      const json& quat = cube.at("orientation");
      row.cube_orientation = Quaterniond(quat[0].get<double>(), quat[1].get<double>(),
                                         quat[2].get<double>(), quat[3].get<double>());
    }
    if (j.contains("events")) {
      for (const auto& e : j.at("events")) row.events.push_back(e.get<std::string>());
    }
    traj.rows.push_back(std::move(row));
  }
  if (!have_header) throw ConfigError("trajectory: missing header record");
  traj.validate();
  return traj;
}

inline Trajectory load_trajectory(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open trajectory file: " + path);
  return read_trajectory(in);
}

inline RunResult run_scenario_to_file(const ScenarioConfig& config,
                                      const std::string& out_path) {
  RunResult result = run_scenario(config);
  result.summary.output_path = out_path;
  write_trajectory_file(out_path, result.trajectory);
  return result;
}

inline ordered_json summary_to_json(const RunSummary& summary) {
  ordered_json j;
  j["scenario"] = summary.scenario;
  j["records"] = summary.records;
  j["duration_s"] = summary.duration_s;
  j["joint_violations"] = summary.joint_violations;
  j["accel_violations"] = summary.accel_violations;
  j["jerk_violations"] = summary.jerk_violations;
  j["energy_initial"] = summary.energy_initial;
  j["energy_final"] = summary.energy_final;
  j["energy_max_abs_drift"] = summary.energy_max_abs_drift;
  j["final_tracking_error"] = summary.final_tracking_error;
  j["seed"] = summary.seed;
  j["config_hash"] = summary.config_hash;
  j["output"] = summary.output_path;
  return j;
}

}  // namespace fabsim
