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
#include <vector>

#include "fabsim/chain_model.hpp"
#include "fabsim/common.hpp"
#include "fabsim/task_map.hpp"
#include "fabsim/terms.hpp"

namespace fabsim {

/// Fabric state: position, velocity, the acceleration applied over the last
/// step, the one before it (for the discrete jerk audit), and the last
/// resolved system metric.
struct FabricState {
  VectorXd q;
  VectorXd qd;
  VectorXd qdd;
  VectorXd prev_qdd;
  MatrixXd metric;
};

struct FabricConfig {
  double beta = 2.5;    // geometry-preserving damping, 1/s
  double gamma = 10.0;  // action force scale, N
  VectorXd accel_limit;  // per joint, rad/s^2
  VectorXd jerk_limit;   // per joint, rad/s^3
  int action_rate_hz = 30;
  int fabric_rate_hz = 60;
  double velocity_eps = 1e-9;  // rad/s, energization cutoff
  double speed_cap = 0.0;      // rad/s, cap on ||qd||; <= 0 disables

  double dt() const { return 1.0 / fabric_rate_hz; }
  int substeps_per_action() const { return fabric_rate_hz / action_rate_hz; }

  void validate(int dof) const {
    if (!(beta >= 0.0)) throw ConfigError("fabric.beta: must be >= 0");
    if (!(gamma > 0.0)) throw ConfigError("fabric.gamma: must be > 0");
    if (action_rate_hz <= 0 || fabric_rate_hz <= 0) {
      throw ConfigError("fabric rates: must be positive");
    }
    if (fabric_rate_hz % action_rate_hz != 0) {
      throw ConfigError("fabric.fabric_rate_hz: must be an integer multiple of action_rate_hz");
    }
    if (accel_limit.size() != dof || jerk_limit.size() != dof) {
      throw ConfigError("fabric.accel_limit/jerk_limit: must have one entry per joint");
    }
    if ((accel_limit.array() <= 0.0).any() || (jerk_limit.array() <= 0.0).any()) {
      throw ConfigError("fabric.accel_limit/jerk_limit: entries must be > 0");
    }
    if (!(velocity_eps >= 0.0)) throw ConfigError("fabric.velocity_eps: must be >= 0");
  }
};

/// Solve M x = rhs for a symmetric PSD metric, falling back to a ridge
/// (1e-9 I) when the combined metric is numerically singular.
inline VectorXd solve_metric(const MatrixXd& metric, const VectorXd& rhs,
                             const char* context) {
  Eigen::LDLT<MatrixXd> ldlt(metric);
  if (ldlt.info() == Eigen::Success) {
    VectorXd x = ldlt.solve(rhs);
    if (x.allFinite() && (metric * x - rhs).norm() <= 1e-8 * (rhs.norm() + 1.0)) {
      return x;
    }
  }
  warn(std::string(context) + ": near-singular metric, using ridge-regularized solve");
  const MatrixXd ridged =
      metric + 1e-9 * MatrixXd::Identity(metric.rows(), metric.cols());
  return ridged.ldlt().solve(rhs);
}

/// One term pulled back to the root space, in M q̈ + f = 0 convention.
struct RootTerm {
  MatrixXd metric;
  VectorXd force;
};

/// Pull a task-space term through `map` to the root. Metric maps as JᵀMJ.
/// A desired task acceleration a maps to the force -JᵀM(a - curvature);
/// a raw task force maps through the transpose alone, Jᵀf.
inline RootTerm pull_back(const MatrixXd& task_metric, const VectorXd& accel_or_force,
                          const TaskMapEval& map, bool is_force = false) {
  const MatrixXd& jac = map.jacobian;
  if (task_metric.rows() != jac.rows() || task_metric.cols() != jac.rows() ||
      accel_or_force.size() != jac.rows()) {
    throw std::invalid_argument("pull_back: dimension mismatch");
  }
  RootTerm term;
  term.metric = jac.transpose() * task_metric * jac;
  if (is_force) {
    term.force = jac.transpose() * accel_or_force;
  } else {
    term.force = -jac.transpose() * (task_metric * (accel_or_force - map.curvature));
  }
  return term;
}

/// Combine pulled-back terms into (M_f, h̃): the system metric is the sum of
/// all metrics (geometry terms plus metric-only contributions such as the
/// barriers), while the nominal geometric acceleration h̃ is resolved over
/// the geometry terms alone, keeping it homogeneous of degree 2.
inline std::pair<MatrixXd, VectorXd> resolve_geometry(
    const std::vector<RootTerm>& geometry,
    const std::vector<MatrixXd>& extra_metrics = {}) {
  if (geometry.empty()) {
    throw std::invalid_argument("resolve_geometry: at least one geometry term required");
  }
  MatrixXd geo_metric = geometry[0].metric;
  VectorXd geo_force = geometry[0].force;
  for (std::size_t i = 1; i < geometry.size(); ++i) {
    geo_metric += geometry[i].metric;
    geo_force += geometry[i].force;
  }
  const VectorXd h = solve_metric(geo_metric, -geo_force, "resolve_geometry");
  MatrixXd system_metric = geo_metric;
  for (const MatrixXd& extra : extra_metrics) system_metric += extra;
  return {std::move(system_metric), h};
}

/// Energization coefficient: the multiple of q̇ that removes the component
/// of h̃ along q̇, conserving the kinetic energy ½‖q̇‖² along the nominal
/// flow. Zero below the velocity cutoff.
inline double energize(const VectorXd& h, const VectorXd& qd, double velocity_eps) {
  const double speed_sq = qd.squaredNorm();
  if (!(std::sqrt(speed_sq) > velocity_eps)) return 0.0;
  return -qd.dot(h) / speed_sq;
}

/// Policy force: clamp the action to [-1, 1] per component, scale by gamma,
/// and pull back through the fingertip Jacobian transpose.
inline VectorXd apply_policy_force(const VectorXd& action, double gamma,
                                   const TaskMapEval& fingertip) {
  if (action.size() != fingertip.jacobian.rows()) {
    throw std::invalid_argument("apply_policy_force: action must match the fingertip dimension");
  }
  const VectorXd clamped = action.cwiseMax(-1.0).cwiseMin(1.0);
  return gamma * (fingertip.jacobian.transpose() * clamped);
}

/// Full fabric acceleration before limiting:
///   q̈ = h̃ + α_L q̇ - M_f⁻¹(∂ψ + B q̇ + f_π) - β q̇
inline VectorXd compose_acceleration(const MatrixXd& system_metric, const VectorXd& h,
                                     double alpha_energize,
                                     const VectorXd& potential_gradient,
                                     const MatrixXd& damping, double beta,
                                     const VectorXd& qd, const VectorXd& policy_force) {
  const VectorXd forcing = potential_gradient + damping * qd + policy_force;
  return h + alpha_energize * qd -
         solve_metric(system_metric, forcing, "compose_acceleration") - beta * qd;
}

/// Fold the discrete jerk bound into the acceleration limit. The worst
/// step-to-step acceleration swing is 2 q̈̄, so capping q̈̄ at Δt q⃛̄ / 2 keeps
/// the discrete jerk within q⃛̄.
inline VectorXd jerk_to_accel_limit(const VectorXd& accel_limit,
                                    const VectorXd& jerk_limit, double dt) {
  if (accel_limit.size() != jerk_limit.size()) {
    throw std::invalid_argument("jerk_to_accel_limit: dimension mismatch");
  }
  return accel_limit.cwiseMin(0.5 * dt * jerk_limit);
}

struct LimitedAccel {
  VectorXd accel;
  double alpha = 0.0;
};

/// Closed-form acceleration limiting: q̈(α) = -(M_f + αI)⁻¹ f with the
/// smallest α >= 0 such that |q̈_i(α)| <= limit_i for all i. α is bracketed
/// by doubling from 1e-6 and refined with 60 bisection iterations; the
/// returned acceleration is the one evaluated at the feasible endpoint, so
/// the limits hold exactly.
inline LimitedAccel limit_acceleration(const MatrixXd& system_metric,
                                       const VectorXd& force, const VectorXd& limit) {
  if (force.size() != system_metric.rows() || limit.size() != force.size()) {
    throw std::invalid_argument("limit_acceleration: dimension mismatch");
  }
  if (!system_metric.allFinite() || !force.allFinite()) {
    throw NumericFaultError("limit_acceleration: non-finite input");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(
      0.5 * (system_metric + system_metric.transpose()));
  if (eig.info() != Eigen::Success) {
    throw NumericFaultError("limit_acceleration: eigendecomposition failed");
  }
  const VectorXd evals = eig.eigenvalues().cwiseMax(1e-12);
  const MatrixXd& basis = eig.eigenvectors();
  const VectorXd w = basis.transpose() * force;

  const auto accel_at = [&](double alpha) -> VectorXd {
    return basis * (-w.array() / (evals.array() + alpha)).matrix();
  };
  const auto feasible = [&](const VectorXd& accel) -> bool {
    return (accel.cwiseAbs().array() <= limit.array()).all();
  };

  VectorXd unconstrained = accel_at(0.0);
  if (feasible(unconstrained)) return {std::move(unconstrained), 0.0};

  double lo = 0.0;
  double hi = 1e-6;
  VectorXd at_hi = accel_at(hi);
  while (!feasible(at_hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) {
      throw NumericFaultError(
          "limit_acceleration: no feasible regularization below 1e12 "
          "(non-finite force input?)");
    }
    at_hi = accel_at(hi);
  }
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    VectorXd at_mid = accel_at(mid);
    if (feasible(at_mid)) {
      hi = mid;
      at_hi = std::move(at_mid);
    } else {
      lo = mid;
    }
  }
  return {std::move(at_hi), hi};
}

/// Approximate RK2 step:
///   q' = q + Δt q̇ + ½ Δt² q̈,  q̇' = q̇ + Δt q̈.
inline std::pair<VectorXd, VectorXd> step_rk2(const VectorXd& q, const VectorXd& qd,
                                              const VectorXd& qdd, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_rk2: dt must be > 0");
  return {q + dt * qd + 0.5 * dt * dt * qdd, qd + dt * qdd};
}

/// Named behavioral term blocks of the fabric.
struct AttractorTermConfig {
  bool enabled = true;
  AttractorParams params;
  VectorXd goal;
};

struct BarrierTermConfig {
  bool enabled = true;
  BarrierParams params;
};

struct FabricTerms {
  AttractorTermConfig fingertip_attractor;
  AttractorTermConfig posture_attractor;
  BarrierTermConfig upper_limit_barrier;
  BarrierTermConfig lower_limit_barrier;
};

struct FabricStepInfo {
  double limiter_alpha = 0.0;
  bool speed_capped = false;
};

/// The assembled fabric: attractor geometries, joint-limit barriers,
/// energization, damping, the policy force action space, acceleration/jerk
/// limiting, and RK2 integration.
///
/// A Fabric instance is immutable apart from the fingertip goal, which the
/// harness retargets when the goal tracks a moving object. Stepping takes
/// and returns explicit state; independent instances are safe to run on
/// different threads.
class Fabric {
 public:
  Fabric(ChainModel model, FabricConfig config, FabricTerms terms)
      : model_(std::move(model)), config_(std::move(config)), terms_(std::move(terms)) {
    model_.validate();
    config_.validate(model_.dof());
    validate_terms();
    effective_accel_limit_ =
        jerk_to_accel_limit(config_.accel_limit, config_.jerk_limit, config_.dt());
  }

  const ChainModel& model() const { return model_; }
  const FabricConfig& config() const { return config_; }
  const FabricTerms& terms() const { return terms_; }
  const VectorXd& effective_accel_limit() const { return effective_accel_limit_; }

  void set_fingertip_goal(const VectorXd& goal) {
    if (goal.size() != model_.fingertip_dim()) {
      throw std::invalid_argument("fingertip goal: expected dimension " +
                                  std::to_string(model_.fingertip_dim()));
    }
    terms_.fingertip_attractor.goal = goal;
  }

  /// Fabric state with q at q0 and everything else at rest.
  FabricState initial_state(const VectorXd& q0) const {
    if (q0.size() != model_.dof()) {
      throw std::invalid_argument("initial_state: q0 must have length " +
                                  std::to_string(model_.dof()));
    }
    FabricState state;
    state.q = q0;
    state.qd = VectorXd::Zero(model_.dof());
    state.qdd = VectorXd::Zero(model_.dof());
    state.prev_qdd = VectorXd::Zero(model_.dof());
    state.metric = MatrixXd::Identity(model_.dof(), model_.dof());
    return state;
  }

  /// One 60 Hz substep under a held action: resolve geometry, energize,
  /// apply forcing + policy force + β damping, limit, integrate.
  FabricState step(const FabricState& state, const VectorXd& action,
                   FabricStepInfo* info = nullptr) const {
    const int n = model_.dof();
    const TaskMapEval fingertip = fingertip_map(model_, state.q, state.qd);

    std::vector<RootTerm> geometry;
    if (terms_.fingertip_attractor.enabled) {
      const AttractorTermConfig& term = terms_.fingertip_attractor;
      const MatrixXd metric = attractor_metric(term.params.metric_mass, fingertip.x.size());
      const VectorXd accel =
          attractor_accel(fingertip.x, fingertip.jacobian * state.qd, term.goal,
                          term.params.gain, term.params.sharpness);
      geometry.push_back(pull_back(metric, accel, fingertip));
    }
    if (terms_.posture_attractor.enabled) {
      const AttractorTermConfig& term = terms_.posture_attractor;
      const TaskMapEval posture = identity_map(state.q, state.qd);
      const MatrixXd metric = attractor_metric(term.params.metric_mass, n);
      const VectorXd accel = attractor_accel(posture.x, state.qd, term.goal,
                                             term.params.gain, term.params.sharpness);
      geometry.push_back(pull_back(metric, accel, posture));
    }

    std::vector<MatrixXd> barrier_metrics;
    VectorXd potential_gradient = VectorXd::Zero(n);
    MatrixXd damping = MatrixXd::Zero(n, n);
    const auto [upper, lower] = joint_limit_maps(model_, state.q, state.qd);
    const auto add_barrier = [&](const TaskMapEval& map, const BarrierParams& params) {
      const VectorXd gap_rate = map.jacobian * state.qd;
      const MatrixXd metric = barrier_metric(map.x, gap_rate, params.gain);
      const VectorXd repulse = VectorXd::Constant(n, params.accel);
      // Potential gradient -M g pulled through Jᵀ; damping share b JᵀMJ.
      potential_gradient -= map.jacobian.transpose() * (metric * repulse);
      const MatrixXd pulled = map.jacobian.transpose() * metric * map.jacobian;
      damping += params.damping * pulled;
      barrier_metrics.push_back(pulled);
    };
    if (terms_.upper_limit_barrier.enabled) {
      add_barrier(upper, terms_.upper_limit_barrier.params);
    }
    if (terms_.lower_limit_barrier.enabled) {
      add_barrier(lower, terms_.lower_limit_barrier.params);
    }

    auto [system_metric, h] = resolve_geometry(geometry, barrier_metrics);
    const double alpha_energize = energize(h, state.qd, config_.velocity_eps);
    const VectorXd policy_force = apply_policy_force(action, config_.gamma, fingertip);
    const VectorXd unlimited =
        compose_acceleration(system_metric, h, alpha_energize, potential_gradient,
                             damping, config_.beta, state.qd, policy_force);
    LimitedAccel limited =
        limit_acceleration(system_metric, -(system_metric * unlimited),
                           effective_accel_limit_);

    auto [q_next, qd_next] = step_rk2(state.q, state.qd, limited.accel, config_.dt());
    bool capped = false;
    if (config_.speed_cap > 0.0) {
      const double speed = qd_next.norm();
      if (speed > config_.speed_cap) {
        qd_next *= config_.speed_cap / speed;
        capped = true;
      }
    }
    if (info != nullptr) {
      info->limiter_alpha = limited.alpha;
      info->speed_capped = capped;
    }

    FabricState next;
    next.q = std::move(q_next);
    next.qd = std::move(qd_next);
    next.qdd = std::move(limited.accel);
    next.prev_qdd = state.qdd;
    next.metric = std::move(system_metric);
    return next;
  }

 private:
  void validate_terms() const {
    const bool any_geometry = (terms_.fingertip_attractor.enabled &&
                               terms_.fingertip_attractor.params.metric_mass > 0.0) ||
                              (terms_.posture_attractor.enabled &&
                               terms_.posture_attractor.params.metric_mass > 0.0);
    if (!any_geometry) {
      throw ConfigError("terms: at least one attractor with positive metric mass required");
    }
    if (terms_.fingertip_attractor.enabled &&
        terms_.fingertip_attractor.goal.size() != model_.fingertip_dim()) {
      throw ConfigError("terms.fingertip_attractor.goal: expected dimension " +
                        std::to_string(model_.fingertip_dim()));
    }
    if (terms_.posture_attractor.enabled &&
        terms_.posture_attractor.goal.size() != model_.dof()) {
      throw ConfigError("terms.posture_attractor.goal: expected one entry per joint");
    }
    for (const auto* barrier : {&terms_.upper_limit_barrier, &terms_.lower_limit_barrier}) {
      if (!barrier->enabled) continue;
      if (!(barrier->params.gain > 0.0) || !(barrier->params.accel > 0.0) ||
          !(barrier->params.damping >= 0.0)) {
        throw ConfigError("barrier term: gain and accel must be > 0, damping >= 0");
      }
    }
  }

  ChainModel model_;
  FabricConfig config_;
  FabricTerms terms_;
  VectorXd effective_accel_limit_;
};

}  // namespace fabsim
