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

#include "fabsim/common.hpp"

namespace fabsim {

/// Free-flying rigid cube. Inertia is the uniform-cube scalar m s^2 / 6,
/// isotropic about the center.
struct CubeState {
  Vector3d position = Vector3d::Zero();          // m
  Quaterniond orientation = Quaterniond::Identity();
  Vector3d linear_velocity = Vector3d::Zero();   // m/s
  Vector3d angular_velocity = Vector3d::Zero();  // rad/s, world frame
  double mass = 0.05;   // kg
  double side = 0.065;  // m

  double inertia() const { return mass * side * side / 6.0; }
};

/// Disturbance wrench in cube-centric coordinates. Fresh samples satisfy
/// ||force|| = c1 m, torque ⟂ force, and ||torque|| <= c2 ||force||.
struct WrenchSample {
  Vector3d force = Vector3d::Zero();   // N, cube frame
  Vector3d torque = Vector3d::Zero();  // N m, cube frame
  long age = 0;                        // steps since sampled
};

/// With probability `resample_prob`, draw a fresh wrench: force c1 m f̂ with
/// f̂ uniform on the sphere, torque c2 r̂ x force with r̂ uniform on the
/// sphere. Otherwise return the previous wrench aged by one step.
inline WrenchSample sample_disturbance_wrench(Rng& rng, double cube_mass, double c1,
                                              double c2, const WrenchSample& prev,
                                              double resample_prob = 0.1) {
  if (!(cube_mass > 0.0)) {
    throw std::invalid_argument("sample_disturbance_wrench: cube mass must be > 0");
  }
  if (rng.uniform01() >= resample_prob) {
    WrenchSample held = prev;
    held.age = prev.age + 1;
    return held;
  }
  WrenchSample fresh;
  fresh.force = c1 * cube_mass * rng.unit_vector();
  fresh.torque = c2 * rng.unit_vector().cross(fresh.force);
  fresh.age = 0;
  return fresh;
}

/// Semi-implicit free-body substep under a cube-frame wrench, with an
/// optional gravity toggle. The quaternion is integrated by the world-frame
/// rotation increment and renormalized.
inline CubeState cube_step(const CubeState& state, const WrenchSample& wrench, double dt,
                           bool gravity = false) {
  if (!(dt > 0.0)) throw std::invalid_argument("cube_step: dt must be > 0");
  const Matrix3d rot = state.orientation.toRotationMatrix();
  const Vector3d world_force = rot * wrench.force;
  const Vector3d world_torque = rot * wrench.torque;

  CubeState next = state;
  Vector3d accel = world_force / state.mass;
  if (gravity) accel += Vector3d(0.0, 0.0, -9.81);
  next.linear_velocity = state.linear_velocity + dt * accel;
  next.position = state.position + dt * next.linear_velocity;

  next.angular_velocity = state.angular_velocity + dt * (world_torque / state.inertia());
  const double angle = next.angular_velocity.norm() * dt;
  if (angle > 0.0) {
    const Eigen::AngleAxisd increment(angle, next.angular_velocity.normalized());
    next.orientation = (Quaterniond(increment) * state.orientation).normalized();
  }
  return next;
}

}  // namespace fabsim
