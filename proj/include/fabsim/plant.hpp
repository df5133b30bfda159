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

/// Simulated robot state with diagonal inertia and viscous friction.
struct PlantState {
  VectorXd q;        // rad
  VectorXd qd;       // rad/s
  VectorXd mass;     // diagonal inertia, kg m^2
  VectorXd viscous;  // friction coefficients, N m s/rad

  void validate() const {
    const auto n = q.size();
    if (qd.size() != n || mass.size() != n || viscous.size() != n) {
      throw ConfigError("plant: state vectors must share one length");
    }
    if ((mass.array() <= 0.0).any()) throw ConfigError("plant.mass: entries must be > 0");
    if ((viscous.array() < 0.0).any()) throw ConfigError("plant.viscous: entries must be >= 0");
  }
};

/// Joint-level PD torque toward the fabric state:
///   τ = k_p (q_f - q) + k_d (q̇_f - q̇)
inline VectorXd pd_torque(const VectorXd& fabric_q, const VectorXd& fabric_qd,
                          const VectorXd& q, const VectorXd& qd, double kp, double kd) {
  if (fabric_q.size() != q.size() || fabric_qd.size() != qd.size() ||
      q.size() != qd.size()) {
    throw std::invalid_argument("pd_torque: dimension mismatch");
  }
  return kp * (fabric_q - q) + kd * (fabric_qd - qd);
}

/// Semi-implicit Euler substep of q̈ = M⁻¹(τ - viscous ∘ q̇).
inline PlantState plant_step(const PlantState& state, const VectorXd& tau, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("plant_step: dt must be > 0");
  if (tau.size() != state.q.size()) {
    throw std::invalid_argument("plant_step: torque dimension mismatch");
  }
  const VectorXd qdd =
      (tau - state.viscous.cwiseProduct(state.qd)).cwiseQuotient(state.mass);
  PlantState next = state;
  next.qd = state.qd + dt * qdd;
  next.q = state.q + dt * next.qd;
  return next;
}

}  // namespace fabsim
