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

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "fabsim/common.hpp"

namespace fabsim {

enum class ActionKind { kZero, kBangBang, kUniformRandom, kScripted };

/// Policy stand-ins that drive the force action space. The stochastic
/// sources deliberately overshoot the [-1, 1] clamp (default amplitude 1.5)
/// so the clamp is exercised on every run.
struct ActionSourceSpec {
  ActionKind kind = ActionKind::kZero;
  double period = 1.0;     // s, bang-bang square-wave period
  double amplitude = 1.5;  // bang-bang / uniform magnitude
  std::vector<std::pair<double, VectorXd>> script;  // (time, action) rows, sorted
};

class ActionSource {
 public:
  ActionSource(const ActionSourceSpec& spec, int dim, std::uint64_t seed)
      : spec_(spec), dim_(dim), rng_(seed) {
    if (dim_ <= 0) throw ConfigError("action: dimension must be > 0");
    switch (spec_.kind) {
      case ActionKind::kBangBang:
        if (!(spec_.period > 0.0)) throw ConfigError("action.period: must be > 0");
        phase_.resize(dim_);
        for (int d = 0; d < dim_; ++d) phase_[d] = rng_.uniform(0.0, spec_.period);
        break;
      case ActionKind::kScripted: {
        if (spec_.script.empty()) throw ConfigError("action.script: must not be empty");
        double prev = spec_.script.front().first;
        for (const auto& [t, a] : spec_.script) {
          if (a.size() != dim_) {
            throw ConfigError("action.script: rows must have the action dimension");
          }
          if (t < prev) throw ConfigError("action.script: times must be non-decreasing");
          prev = t;
        }
        break;
      }
      case ActionKind::kZero:
      case ActionKind::kUniformRandom:
        break;
    }
  }

  int dim() const { return dim_; }

  VectorXd next_action(double t) {
    if (t < last_t_ - 1e-12) {
      throw std::invalid_argument("next_action: time must be non-decreasing");
    }
    last_t_ = t;
    switch (spec_.kind) {
      case ActionKind::kZero:
        return VectorXd::Zero(dim_);
      case ActionKind::kBangBang: {
        VectorXd a(dim_);
        for (int d = 0; d < dim_; ++d) {
          const double s = std::fmod(t + phase_[d], spec_.period);
          a[d] = (s < 0.5 * spec_.period) ? spec_.amplitude : -spec_.amplitude;
        }
        return a;
      }
      case ActionKind::kUniformRandom: {
        VectorXd a(dim_);
        for (int d = 0; d < dim_; ++d) {
          a[d] = rng_.uniform(-spec_.amplitude, spec_.amplitude);
        }
        return a;
      }
      case ActionKind::kScripted: {
        // Last row with time <= t; times before the first row hold the first.
        auto it = std::upper_bound(
            spec_.script.begin(), spec_.script.end(), t,
            [](double value, const auto& row) { return value < row.first; });
        if (it != spec_.script.begin()) --it;
        return it->second;
      }
    }
    return VectorXd::Zero(dim_);
  }

 private:
  ActionSourceSpec spec_;
  int dim_;
  Rng rng_;
  std::vector<double> phase_;
  double last_t_ = -1e300;
};

}  // namespace fabsim
