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

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <random>
#include <stdexcept>
#include <string>

namespace fabsim {

using Eigen::Matrix3d;
using Eigen::MatrixXd;
using Eigen::Quaterniond;
using Eigen::Vector3d;
using Eigen::VectorXd;

/// Configuration or input validation failure; the message names the field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A joint-limit gap coordinate became non-positive. The barrier and the
/// acceleration limiter keep the fabric strictly interior, so this signals
/// an integrator or configuration fault, not a recoverable condition.
class LimitBreachError : public std::runtime_error {
 public:
  LimitBreachError(int joint_index, const std::string& what)
      : std::runtime_error(what), joint_index_(joint_index) {}
  int joint_index() const { return joint_index_; }

 private:
  int joint_index_;
};

/// Non-finite state encountered mid-run. step_index() is -1 when unknown.
class NumericFaultError : public std::runtime_error {
 public:
  explicit NumericFaultError(const std::string& what, long step_index = -1)
      : std::runtime_error(what), step_index_(step_index) {}
  long step_index() const { return step_index_; }

 private:
  long step_index_;
};

inline void warn(const std::string& message) {
  static std::atomic<int> budget{16};
  if (budget.fetch_sub(1) > 0) {
    std::cerr << "[fabsim] warning: " << message << "\n";
  }
}

/// Deterministic seeded RNG. All conversions from raw engine output live
/// here so that streams are reproducible bit-for-bit for a given seed,
/// independent of standard-library distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller.
  double gaussian() {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  /// Uniform direction on the unit sphere (normalized 3-variate normal).
  Vector3d unit_vector() {
    while (true) {
      const Vector3d v(gaussian(), gaussian(), gaussian());
      const double n = v.norm();
      if (n > 1e-12) return v / n;
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fabsim
