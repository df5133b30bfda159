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

#include <utility>

#include "fabsim/chain_model.hpp"
#include "fabsim/common.hpp"

namespace fabsim {

/// Differentiable task map evaluated at one configuration-space state:
/// position x, Jacobian J (dim(x) x n), and curvature J̇q̇.
struct TaskMapEval {
  VectorXd x;
  MatrixXd jacobian;
  VectorXd curvature;
};

// Step for the central finite difference of J along the velocity direction.
inline constexpr double kCurvatureFdStep = 1e-6;  // rad

/// Stacked analytic fingertip Jacobian (3F x n). Columns of joints outside
/// a finger's chain are zero.
inline MatrixXd fingertip_jacobian(const ChainModel& model, const VectorXd& q) {
  MatrixXd jac = MatrixXd::Zero(model.fingertip_dim(), model.dof());
  for (int f = 0; f < model.num_fingers(); ++f) {
    const ChainFrames frames = chain_frames(model, f, q);
    const auto& chain = model.fingers[f].joints;
    for (std::size_t k = 0; k < chain.size(); ++k) {
      // Revolute joint: column = axis x (tip - joint anchor).
      jac.block<3, 1>(3 * f, chain[k]) =
          frames.joint_axis[k].cross(frames.tip - frames.joint_position[k]);
    }
  }
  return jac;
}

/// Concatenated fingertip task map: stacked tip positions, analytic
/// Jacobian, and curvature J̇q̇ by central finite difference of J along q̇.
inline TaskMapEval fingertip_map(const ChainModel& model, const VectorXd& q,
                                 const VectorXd& qd) {
  const int n = model.dof();
  if (q.size() != n || qd.size() != n) {
    throw std::invalid_argument("fingertip_map: q, qd must have length " + std::to_string(n));
  }
  TaskMapEval eval;
  eval.x.resize(model.fingertip_dim());
  for (int f = 0; f < model.num_fingers(); ++f) {
    eval.x.segment<3>(3 * f) = forward_position(model, f, q);
  }
  eval.jacobian = fingertip_jacobian(model, q);

  const double speed = qd.norm();
  if (speed == 0.0) {
    eval.curvature = VectorXd::Zero(model.fingertip_dim());
    return eval;
  }
  const VectorXd dir = qd / speed;
  const MatrixXd jac_plus = fingertip_jacobian(model, q + kCurvatureFdStep * dir);
  const MatrixXd jac_minus = fingertip_jacobian(model, q - kCurvatureFdStep * dir);
  const MatrixXd jac_dot = (jac_plus - jac_minus) * (speed / (2.0 * kCurvatureFdStep));
  eval.curvature = jac_dot * qd;
  return eval;
}

/// Identity task map over the configuration space (affine, zero curvature).
inline TaskMapEval identity_map(const VectorXd& q, const VectorXd& qd) {
  if (q.size() != qd.size()) throw std::invalid_argument("identity_map: dimension mismatch");
  TaskMapEval eval;
  eval.x = q;
  eval.jacobian = MatrixXd::Identity(q.size(), q.size());
  eval.curvature = VectorXd::Zero(q.size());
  (void)qd;
  return eval;
}

/// Joint-limit gap spaces: upper x = q̄ - q (J = -I), lower x = q - q̲ (J = I).
/// Both maps are affine, so curvature is identically zero.
inline std::pair<TaskMapEval, TaskMapEval> joint_limit_maps(const ChainModel& model,
                                                            const VectorXd& q,
                                                            const VectorXd& qd) {
  const int n = model.dof();
  if (q.size() != n || qd.size() != n) {
    throw std::invalid_argument("joint_limit_maps: q, qd must have length " + std::to_string(n));
  }
  TaskMapEval upper;
  upper.x = model.upper_limits - q;
  upper.jacobian = -MatrixXd::Identity(n, n);
  upper.curvature = VectorXd::Zero(n);
  TaskMapEval lower;
  lower.x = q - model.lower_limits;
  lower.jacobian = MatrixXd::Identity(n, n);
  lower.curvature = VectorXd::Zero(n);
  return {std::move(upper), std::move(lower)};
}

}  // namespace fabsim
