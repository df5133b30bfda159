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

/// Gains of a geometric attractor term.
struct AttractorParams {
  double gain = 1.0;         // attraction gain k, 1/m or 1/rad
  double sharpness = 1.0;    // tanh sharpness, 1/m or 1/rad
  double metric_mass = 1.0;  // isotropic metric mass m, dimensionless
};

/// Gains of a joint-limit barrier term.
struct BarrierParams {
  double gain = 0.5;     // barrier metric gain k_b (task units)
  double accel = 1.0;    // constant repulsive acceleration g, rad/s^2
  double damping = 1.0;  // damping b, 1/s
};

// Radius around the goal inside which the attractor direction is
// undefined; tanh vanishes there so the limit value is zero.
inline constexpr double kAttractorGoalEpsilon = 1e-9;

/// Attractor acceleration -k ||ẋ||² tanh(α ||x - x_g||) (x - x_g)/||x - x_g||.
/// Homogeneous of degree 2 in ẋ, always pointing toward the goal.
inline VectorXd attractor_accel(const VectorXd& x, const VectorXd& xdot,
                                const VectorXd& goal, double gain, double sharpness) {
  if (x.size() != xdot.size() || x.size() != goal.size()) {
    throw std::invalid_argument("attractor_accel: dimension mismatch");
  }
  const VectorXd delta = x - goal;
  const double dist = delta.norm();
  if (dist < kAttractorGoalEpsilon) return VectorXd::Zero(x.size());
  const double scale = -gain * xdot.squaredNorm() * std::tanh(sharpness * dist) / dist;
  return scale * delta;
}

/// Constant isotropic attractor metric m I.
inline MatrixXd attractor_metric(double mass, int dim) {
  if (!(mass > 0.0)) throw std::invalid_argument("attractor_metric: mass must be > 0");
  return mass * MatrixXd::Identity(dim, dim);
}

/// Diagonal barrier metric: entry i is k_b / x_i while moving toward the
/// limit (ẋ_i < 0) and 0 otherwise. Diverges as x_i -> 0+.
/// Throws LimitBreachError if any gap coordinate is non-positive.
inline MatrixXd barrier_metric(const VectorXd& x, const VectorXd& xdot, double gain) {
  if (x.size() != xdot.size()) {
    throw std::invalid_argument("barrier_metric: dimension mismatch");
  }
  MatrixXd metric = MatrixXd::Zero(x.size(), x.size());
  for (int i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) {
      throw LimitBreachError(
          i, "barrier_metric: joint " + std::to_string(i) +
                 " is at or beyond its limit (gap = " + std::to_string(x[i]) + ")");
    }
    if (xdot[i] < 0.0) metric(i, i) = gain / x[i];
  }
  return metric;
}

/// Desired barrier acceleration g - b ẋ. The caller converts it to a force
/// through the term's metric; the damping share enters the system damping
/// matrix as b times the term metric.
inline VectorXd barrier_forcing(const VectorXd& xdot, const VectorXd& accel, double damping) {
  if (xdot.size() != accel.size()) {
    throw std::invalid_argument("barrier_forcing: dimension mismatch");
  }
  return accel - damping * xdot;
}

}  // namespace fabsim
