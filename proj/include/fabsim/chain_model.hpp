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

#include <set>
#include <string>
#include <vector>

#include "fabsim/common.hpp"

namespace fabsim {

/// One revolute joint: rotation about `axis` (unit vector) following a fixed
/// translation `offset`, both expressed in the parent joint frame.
struct JointDescriptor {
  Vector3d axis = Vector3d::UnitZ();
  Vector3d offset = Vector3d::Zero();
  int parent = -1;  // -1 = hand base
};

/// A serial chain of joint indices rooted at the base plus the fixed
/// translation from the last joint frame to the fingertip.
struct FingerDescriptor {
  std::vector<int> joints;
  Vector3d tip_offset = Vector3d::Zero();
};

/// Kinematic description of an N-joint multi-finger hand. The model is
/// data, not code: the default hand and the tiny chains used in tests are
/// both instances of this struct.
struct ChainModel {
  std::string name;
  std::vector<JointDescriptor> joints;
  std::vector<FingerDescriptor> fingers;
  VectorXd lower_limits;  // rad
  VectorXd upper_limits;  // rad

  int dof() const { return static_cast<int>(joints.size()); }
  int num_fingers() const { return static_cast<int>(fingers.size()); }
  int fingertip_dim() const { return 3 * num_fingers(); }

  VectorXd mid_range() const { return 0.5 * (lower_limits + upper_limits); }

  void validate() const;
};

inline void ChainModel::validate() const {
  const int n = dof();
  if (n == 0) throw ConfigError("joints: list must not be empty");
  if (lower_limits.size() != n || upper_limits.size() != n) {
    throw ConfigError("lower_limits/upper_limits: must have one entry per joint");
  }
  for (int i = 0; i < n; ++i) {
    if (std::abs(joints[i].axis.norm() - 1.0) > 1e-12) {
      throw ConfigError("joints[" + std::to_string(i) + "].axis: must have unit norm");
    }
    if (joints[i].parent < -1 || joints[i].parent >= i) {
      throw ConfigError("joints[" + std::to_string(i) +
                        "].parent: must precede the joint or be -1");
    }
    if (!(lower_limits[i] < upper_limits[i])) {
      throw ConfigError("limits[" + std::to_string(i) + "]: lower must be < upper");
    }
  }
  if (fingers.empty()) throw ConfigError("fingers: list must not be empty");
  std::set<int> used;
  for (std::size_t f = 0; f < fingers.size(); ++f) {
    const auto& chain = fingers[f].joints;
    const std::string tag = "fingers[" + std::to_string(f) + "]";
    if (chain.empty()) throw ConfigError(tag + ".joints: must not be empty");
    for (std::size_t k = 0; k < chain.size(); ++k) {
      const int j = chain[k];
      if (j < 0 || j >= n) throw ConfigError(tag + ".joints: index out of range");
      if (!used.insert(j).second) {
        throw ConfigError(tag + ".joints: joint " + std::to_string(j) +
                          " appears in more than one finger");
      }
      const int expected_parent = (k == 0) ? -1 : chain[k - 1];
      if (joints[j].parent != expected_parent) {
        throw ConfigError(tag + ".joints: joint " + std::to_string(j) +
                          " does not form a chain rooted at the base");
      }
    }
  }
}

/// World-frame joint anchors and rotation axes along one finger chain,
/// plus the fingertip position. Basis for the analytic Jacobian.
struct ChainFrames {
  std::vector<Vector3d> joint_position;
  std::vector<Vector3d> joint_axis;
  Vector3d tip;
};

inline ChainFrames chain_frames(const ChainModel& model, int finger, const VectorXd& q) {
  if (finger < 0 || finger >= model.num_fingers()) {
    throw std::out_of_range("finger index out of range: " + std::to_string(finger));
  }
  if (q.size() != model.dof()) {
    throw std::invalid_argument("q: expected length " + std::to_string(model.dof()));
  }
  ChainFrames frames;
  Matrix3d rot = Matrix3d::Identity();
  Vector3d pos = Vector3d::Zero();
  for (int j : model.fingers[finger].joints) {
    const JointDescriptor& joint = model.joints[j];
    pos += rot * joint.offset;
    frames.joint_position.push_back(pos);
    frames.joint_axis.push_back(rot * joint.axis);
    rot = rot * Eigen::AngleAxisd(q[j], joint.axis).toRotationMatrix();
  }
  frames.tip = pos + rot * model.fingers[finger].tip_offset;
  return frames;
}

/// World-frame tip position of one finger chain.
inline Vector3d forward_position(const ChainModel& model, int finger, const VectorXd& q) {
  return chain_frames(model, finger, q).tip;
}

}  // namespace fabsim
