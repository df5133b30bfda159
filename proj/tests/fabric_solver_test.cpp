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

#include <gtest/gtest.h>

#include "fabsim/actions.hpp"
#include "fabsim/solver.hpp"
#include "test_util.hpp"

namespace {

using namespace fabsim;
using fabsim_test::four_finger_hand;
using fabsim_test::make_test_fabric;
using fabsim_test::random_vector;

TEST(PullBack, IdentityMapReturnsTermUnchanged) {
  const int n = 4;
  const TaskMapEval map = identity_map(VectorXd::Zero(n), VectorXd::Zero(n));
  const MatrixXd metric = 2.0 * MatrixXd::Identity(n, n);
  const VectorXd accel = VectorXd::Constant(n, 1.5);
  const RootTerm term = pull_back(metric, accel, map);
  EXPECT_LE((term.metric - metric).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((term.force + metric * accel).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(PullBack, ZeroJacobianGivesZeroContribution) {
  TaskMapEval map;
  map.x = VectorXd::Zero(3);
  map.jacobian = MatrixXd::Zero(3, 5);
  map.curvature = VectorXd::Zero(3);
  const RootTerm term = pull_back(MatrixXd::Identity(3, 3), VectorXd::Constant(3, 2.0), map);
  EXPECT_EQ(term.metric.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(term.force.cwiseAbs().maxCoeff(), 0.0);
}

// Single-joint fingertip attractor against a hand-composed scalar oracle
// built from finite differences of the tip position.
TEST(PullBack, ScalarChainMatchesFiniteDifferenceOracle) {
  ChainModel model;
  model.joints.push_back({Vector3d::UnitZ(), Vector3d::Zero(), -1});
  model.fingers.push_back({{0}, Vector3d(0.7, 0.0, 0.0)});
  model.lower_limits = VectorXd::Constant(1, -3.0);
  model.upper_limits = VectorXd::Constant(1, 3.0);

  const VectorXd q = VectorXd::Constant(1, 0.37);
  const VectorXd qd = VectorXd::Constant(1, 1.21);
  const TaskMapEval map = fingertip_map(model, q, qd);

  const double mass = 0.8;
  const Vector3d goal(0.2, 0.4, 0.0);
  const VectorXd accel =
      attractor_accel(map.x, map.jacobian * qd, goal, 1.3, 2.0);
  const RootTerm term = pull_back(mass * MatrixXd::Identity(3, 3), accel, map);

  const auto tip = [&](double angle) {
    return forward_position(model, 0, VectorXd::Constant(1, angle));
  };
  const double h = 1e-6;
  const Vector3d jac_fd = (tip(q[0] + h) - tip(q[0] - h)) / (2.0 * h);
  // Wider step for the second difference: it loses eps/h^2 to cancellation.
  const double h2 = 1e-4;
  const Vector3d jdot_fd =
      ((tip(q[0] + h2) - tip(q[0])) - (tip(q[0]) - tip(q[0] - h2))) / (h2 * h2) * qd[0];
  const double oracle_force = -jac_fd.dot(mass * (accel - jdot_fd * qd[0]));
  const double oracle_metric = mass * jac_fd.squaredNorm();

  EXPECT_NEAR(term.force[0], oracle_force, 1e-5);
  EXPECT_NEAR(term.metric(0, 0), oracle_metric, 1e-6);
}

TEST(ResolveGeometry, SingleIdentityTermReturnsItsAcceleration) {
  const int n = 3;
  const TaskMapEval map = identity_map(VectorXd::Zero(n), VectorXd::Zero(n));
  const VectorXd accel = VectorXd::LinSpaced(n, -1.0, 1.0);
  const auto [metric, h] =
      resolve_geometry({pull_back(MatrixXd::Identity(n, n), accel, map)});
  EXPECT_LE((h - accel).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((metric - MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ResolveGeometry, WeightedAverageOfIdentityTerms) {
  const int n = 4;
  Rng rng(21);
  const TaskMapEval map = identity_map(VectorXd::Zero(n), VectorXd::Zero(n));
  const double m1 = 0.7;
  const double m2 = 2.9;
  const VectorXd a1 = random_vector(rng, n, 2.0);
  const VectorXd a2 = random_vector(rng, n, 2.0);
  const auto [metric, h] =
      resolve_geometry({pull_back(m1 * MatrixXd::Identity(n, n), a1, map),
                        pull_back(m2 * MatrixXd::Identity(n, n), a2, map)});
  const VectorXd expected = (m1 * a1 + m2 * a2) / (m1 + m2);
  EXPECT_LE((h - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ResolveGeometry, ZeroVelocityGivesZeroNominalAcceleration) {
  const ChainModel model = four_finger_hand();
  const VectorXd q = model.mid_range() + VectorXd::Constant(16, 0.1);
  const VectorXd qd = VectorXd::Zero(16);
  const TaskMapEval ft = fingertip_map(model, q, qd);
  VectorXd goal(12);
  for (int f = 0; f < 4; ++f) goal.segment<3>(3 * f) = Vector3d(0.1, 0.0, 0.1);
  const VectorXd accel_ft = attractor_accel(ft.x, ft.jacobian * qd, goal, 0.6, 8.0);
  const VectorXd accel_ps = attractor_accel(q, qd, model.mid_range(), 0.35, 2.0);
  const auto [metric, h] = resolve_geometry(
      {pull_back(0.4 * MatrixXd::Identity(12, 12), accel_ft, ft),
       pull_back(MatrixXd::Identity(16, 16), accel_ps, identity_map(q, qd))});
  EXPECT_LE(h.cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ResolveGeometry, RequiresAtLeastOneTerm) {
  EXPECT_THROW(resolve_geometry({}), std::invalid_argument);
}

TEST(Energize, PerpendicularGivesZero) {
  VectorXd h(2), qd(2);
  h << 1.0, 0.0;
  qd << 0.0, 2.0;
  EXPECT_EQ(energize(h, qd, 1e-9), 0.0);
}

TEST(Energize, ParallelProjection) {
  const VectorXd qd = VectorXd::Constant(3, 0.7);
  EXPECT_NEAR(energize(qd, qd, 1e-9), -1.0, 1e-15);
}

TEST(Energize, BelowCutoffGivesZero) {
  const VectorXd qd = VectorXd::Constant(3, 1e-12);
  const VectorXd h = VectorXd::Constant(3, 5.0);
  EXPECT_EQ(energize(h, qd, 1e-9), 0.0);
}

TEST(Energize, RemovesVelocityComponentExactly) {
  Rng rng(22);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform01() * 16);
    const VectorXd h = random_vector(rng, n, 50.0);
    VectorXd qd = random_vector(rng, n, 3.0);
    if (qd.norm() < 1e-6) qd[0] += 1.0;
    const double alpha = energize(h, qd, 1e-9);
    EXPECT_LE(std::abs(qd.dot(h + alpha * qd)), 1e-10);
  }
}

TEST(ApplyPolicyForce, ZeroActionGivesZeroForce) {
  const ChainModel model = four_finger_hand();
  const TaskMapEval ft = fingertip_map(model, model.mid_range(), VectorXd::Zero(16));
  EXPECT_EQ(apply_policy_force(VectorXd::Zero(12), 10.0, ft).cwiseAbs().maxCoeff(), 0.0);
}

TEST(ApplyPolicyForce, ClampsBeforeScaling) {
  const ChainModel model = four_finger_hand();
  const TaskMapEval ft = fingertip_map(model, model.mid_range(), VectorXd::Zero(16));
  VectorXd a = VectorXd::Zero(12);
  a[0] = 2.0;
  a[1] = -3.0;
  a[2] = 0.5;
  VectorXd clamped = VectorXd::Zero(12);
  clamped[0] = 1.0;
  clamped[1] = -1.0;
  clamped[2] = 0.5;
  const VectorXd force = apply_policy_force(a, 7.0, ft);
  const VectorXd expected = 7.0 * ft.jacobian.transpose() * clamped;
  EXPECT_LE((force - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ApplyPolicyForce, SingleJointHandPullback) {
  ChainModel model;
  model.joints.push_back({Vector3d::UnitZ(), Vector3d::Zero(), -1});
  model.fingers.push_back({{0}, Vector3d(1.0, 0.0, 0.0)});
  model.lower_limits = VectorXd::Constant(1, -3.0);
  model.upper_limits = VectorXd::Constant(1, 3.0);
  const TaskMapEval ft = fingertip_map(model, VectorXd::Zero(1), VectorXd::Zero(1));
  // J column is (0, 1, 0)ᵀ at q = 0.
  const VectorXd force = apply_policy_force(Vector3d(0.0, 1.0, 0.0), 1.0, ft);
  EXPECT_NEAR(force[0], 1.0, 1e-14);
}

TEST(ComposeAcceleration, AllZeroTermsGiveZero) {
  const int n = 5;
  const VectorXd qdd = compose_acceleration(
      MatrixXd::Identity(n, n), VectorXd::Zero(n), 0.0, VectorXd::Zero(n),
      MatrixXd::Zero(n, n), 0.0, VectorXd::Zero(n), VectorXd::Zero(n));
  EXPECT_EQ(qdd.cwiseAbs().maxCoeff(), 0.0);
}

TEST(ComposeAcceleration, PureBetaDamping) {
  const int n = 3;
  const VectorXd qd = VectorXd::LinSpaced(n, -1.0, 2.0);
  const VectorXd qdd = compose_acceleration(
      MatrixXd::Identity(n, n), VectorXd::Zero(n), 0.0, VectorXd::Zero(n),
      MatrixXd::Zero(n, n), 4.0, qd, VectorXd::Zero(n));
  EXPECT_LE((qdd + 4.0 * qd).cwiseAbs().maxCoeff(), 1e-14);
}

// Full stack on a 2-joint chain against a monolithic oracle that evaluates
// the whole acceleration law in one chain of matrix expressions.
TEST(FabricStep, MatchesMonolithicExpressionOracle) {
  ChainModel model;
  model.joints.push_back({Vector3d::UnitZ(), Vector3d(0.0, 0.0, 0.05), -1});
  model.joints.push_back({Vector3d::UnitY(), Vector3d(0.0, 0.0, 0.06), 0});
  model.fingers.push_back({{0, 1}, Vector3d(0.0, 0.0, 0.05)});
  model.lower_limits = VectorXd::Constant(2, -2.0);
  model.upper_limits = VectorXd::Constant(2, 2.0);

  FabricConfig config;
  config.beta = 2.5;
  config.gamma = 9.0;
  config.accel_limit = VectorXd::Constant(2, 1e9);  // limiter inactive
  config.jerk_limit = VectorXd::Constant(2, 1e12);
  FabricTerms terms;
  terms.fingertip_attractor.params = {0.6, 8.0, 0.4};
  terms.fingertip_attractor.goal = Vector3d(0.05, 0.02, 0.12);
  terms.posture_attractor.params = {0.35, 2.0, 1.0};
  terms.posture_attractor.goal = VectorXd::Constant(2, 0.3);
  terms.upper_limit_barrier.params = {0.25, 2.0, 20.0};
  terms.lower_limit_barrier.params = {0.25, 2.0, 20.0};
  const Fabric fabric(model, config, terms);

  Rng rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    FabricState state = fabric.initial_state(random_vector(rng, 2, 1.0));
    state.qd = random_vector(rng, 2, 2.0);
    const VectorXd action = random_vector(rng, 3, 1.4);
    const FabricState next = fabric.step(state, action);

    const VectorXd& q = state.q;
    const VectorXd& qd = state.qd;
    const TaskMapEval ft = fingertip_map(model, q, qd);
    const VectorXd xdot = ft.jacobian * qd;
    const Vector3d delta_ft = ft.x - terms.fingertip_attractor.goal;
    const VectorXd accel_ft = -0.6 * xdot.squaredNorm() *
                              std::tanh(8.0 * delta_ft.norm()) * delta_ft /
                              delta_ft.norm();
    const VectorXd delta_ps = q - terms.posture_attractor.goal;
    const VectorXd accel_ps = -0.35 * qd.squaredNorm() *
                              std::tanh(2.0 * delta_ps.norm()) * delta_ps /
                              delta_ps.norm();
    const MatrixXd metric_ft = ft.jacobian.transpose() * (0.4 * ft.jacobian);
    const VectorXd force_ft =
        -ft.jacobian.transpose() * (0.4 * (accel_ft - ft.curvature));
    const MatrixXd metric_ps = MatrixXd::Identity(2, 2);
    const VectorXd force_ps = -accel_ps;
    const MatrixXd geo_metric = metric_ft + metric_ps;
    const VectorXd h = geo_metric.ldlt().solve(-(force_ft + force_ps));
    const double alpha = -qd.dot(h) / qd.squaredNorm();

    const VectorXd gap_upper = model.upper_limits - q;
    const VectorXd gap_lower = q - model.lower_limits;
    MatrixXd metric_up = MatrixXd::Zero(2, 2);
    MatrixXd metric_lo = MatrixXd::Zero(2, 2);
    for (int i = 0; i < 2; ++i) {
      if (-qd[i] < 0.0) metric_up(i, i) = 0.25 / gap_upper[i];
      if (qd[i] < 0.0) metric_lo(i, i) = 0.25 / gap_lower[i];
    }
    const VectorXd repulse = VectorXd::Constant(2, 2.0);
    const VectorXd dpsi = metric_up * repulse - metric_lo * repulse;
    const MatrixXd damping = 20.0 * (metric_up + metric_lo);
    const MatrixXd system_metric = geo_metric + metric_up + metric_lo;
    const VectorXd policy =
        9.0 * ft.jacobian.transpose() * action.cwiseMax(-1.0).cwiseMin(1.0);
    const VectorXd oracle =
        h + alpha * qd -
        system_metric.ldlt().solve(dpsi + damping * qd + policy) - 2.5 * qd;

    EXPECT_LE((next.qdd - oracle).norm(), 1e-9 * std::max(1.0, oracle.norm()));
  }
}

TEST(JerkToAccelLimit, FoldsWorstCaseSwing) {
  const VectorXd eff = jerk_to_accel_limit(VectorXd::Constant(1, 20.0),
                                           VectorXd::Constant(1, 1200.0), 1.0 / 60.0);
  EXPECT_NEAR(eff[0], 10.0, 1e-12);
}

TEST(JerkToAccelLimit, HugeJerkLimitLeavesAccelUnchanged) {
  const VectorXd eff = jerk_to_accel_limit(VectorXd::Constant(3, 20.0),
                                           VectorXd::Constant(3, 1e12), 1.0 / 60.0);
  EXPECT_EQ(eff, VectorXd::Constant(3, 20.0));
}

TEST(LimitAcceleration, UnconstrainedSolutionPassesThrough) {
  const MatrixXd metric = MatrixXd::Identity(3, 3);
  const VectorXd force = VectorXd::Constant(3, -1.0);
  const LimitedAccel lim = limit_acceleration(metric, force, VectorXd::Constant(3, 10.0));
  EXPECT_EQ(lim.alpha, 0.0);
  EXPECT_LE((lim.accel - VectorXd::Constant(3, 1.0)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(LimitAcceleration, ScalarClosedForm) {
  const MatrixXd metric = MatrixXd::Identity(1, 1);
  const VectorXd force = VectorXd::Constant(1, -100.0);
  const LimitedAccel lim = limit_acceleration(metric, force, VectorXd::Constant(1, 10.0));
  // q̈(α) = 100 / (1 + α); feasibility boundary at α = 9.
  EXPECT_NEAR(lim.alpha, 9.0, 1e-6);
  EXPECT_LE(lim.accel[0], 10.0);
  EXPECT_GE(lim.accel[0], 10.0 - 1e-6);
}

TEST(LimitAcceleration, RejectsNonFiniteInput) {
  const MatrixXd metric = MatrixXd::Identity(2, 2);
  VectorXd force(2);
  force << std::numeric_limits<double>::quiet_NaN(), 0.0;
  EXPECT_THROW(limit_acceleration(metric, force, VectorXd::Constant(2, 1.0)),
               NumericFaultError);
}

// ||q̈(α)||_M is non-increasing in α and vanishes as α grows.
TEST(LimitAcceleration, MonotoneVanishingInAlpha) {
  Rng rng(24);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform01() * 10);
    MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
    const MatrixXd metric = a.transpose() * a + 0.1 * MatrixXd::Identity(n, n);
    const VectorXd force = random_vector(rng, n, 20.0);
    double prev_norm = std::numeric_limits<double>::infinity();
    double norm = prev_norm;
    for (double alpha = 1e-6; alpha <= 1e9; alpha *= 10.0) {
      const VectorXd accel = -(metric + alpha * MatrixXd::Identity(n, n))
                                  .ldlt()
                                  .solve(force)
                                  .eval();
      norm = std::sqrt(accel.dot(metric * accel));
      EXPECT_LE(norm, prev_norm * (1.0 + 1e-12));
      prev_norm = norm;
    }
    EXPECT_LE(norm, 1e-6 * force.norm());
  }
}

TEST(StepRk2, RestStaysAtRest) {
  const VectorXd q = VectorXd::Constant(2, 0.4);
  const auto [q1, qd1] = step_rk2(q, VectorXd::Zero(2), VectorXd::Zero(2), 1.0 / 60.0);
  EXPECT_EQ(q1, q);
  EXPECT_EQ(qd1.cwiseAbs().maxCoeff(), 0.0);
}

TEST(StepRk2, ConstantAccelerationArithmetic) {
  const auto [q1, qd1] =
      step_rk2(VectorXd::Zero(1), VectorXd::Zero(1), VectorXd::Constant(1, 60.0), 1.0 / 60.0);
  EXPECT_NEAR(q1[0], 1.0 / 120.0, 1e-15);
  EXPECT_NEAR(qd1[0], 1.0, 1e-15);
}

TEST(StepRk2, ConstantAccelerationMatchesClosedForm) {
  const double dt = 1.0 / 60.0;
  const VectorXd qdd = VectorXd::Constant(3, 1.7);
  VectorXd q = VectorXd::Zero(3);
  VectorXd qd = VectorXd::Constant(3, -0.3);
  const VectorXd q0 = q;
  const VectorXd qd0 = qd;
  const int steps = 240;
  for (int k = 0; k < steps; ++k) std::tie(q, qd) = step_rk2(q, qd, qdd, dt);
  const double t = steps * dt;
  const VectorXd q_exact = q0 + t * qd0 + 0.5 * t * t * qdd;
  const VectorXd qd_exact = qd0 + t * qdd;
  EXPECT_LE((q - q_exact).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((qd - qd_exact).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FabricStep, PostureGoalAtRestIsFixedPoint) {
  const ChainModel model = four_finger_hand();
  Fabric fabric = make_test_fabric(model, 2.5, /*barriers=*/true);
  FabricState state = fabric.initial_state(model.mid_range());
  const FabricState next = fabric.step(state, VectorXd::Zero(12));
  EXPECT_EQ(next.qdd.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(next.q, state.q);
  EXPECT_EQ(next.qd.cwiseAbs().maxCoeff(), 0.0);
}

// With a velocity running into the upper limit, the composed barrier
// forcing decelerates that joint (pushes it away from the limit).
TEST(FabricStep, BarrierRepulsionIsOutward) {
  const ChainModel model = four_finger_hand();
  FabricConfig config;
  config.beta = 0.0;
  config.gamma = 60.0;
  config.accel_limit = VectorXd::Constant(16, 1e9);
  config.jerk_limit = VectorXd::Constant(16, 1e12);
  FabricTerms terms;
  terms.fingertip_attractor.enabled = false;
  terms.posture_attractor.params = {1e-12, 1.0, 1.0};  // negligible geometry
  terms.posture_attractor.goal = model.mid_range();
  terms.upper_limit_barrier.params = {0.25, 2.0, 20.0};
  terms.lower_limit_barrier.params = {0.25, 2.0, 20.0};
  const Fabric fabric(model, config, terms);

  VectorXd q = model.mid_range();
  q[3] = model.upper_limits[3] - 0.05;
  FabricState state = fabric.initial_state(q);
  state.qd = VectorXd::Zero(16);
  state.qd[3] = 0.5;  // toward the upper limit
  const FabricState next = fabric.step(state, VectorXd::Zero(12));
  EXPECT_LT(next.qdd[3], 0.0);

  // Mirror case at the lower limit.
  q = model.mid_range();
  q[7] = model.lower_limits[7] + 0.05;
  state = fabric.initial_state(q);
  state.qd = VectorXd::Zero(16);
  state.qd[7] = -0.5;
  const FabricState next_lower = fabric.step(state, VectorXd::Zero(12));
  EXPECT_GT(next_lower.qdd[7], 0.0);
}

TEST(FabricStep, ShortBangBangRunRespectsAllLimits) {
  const ChainModel model = four_finger_hand();
  const Fabric fabric = make_test_fabric(model, 2.5, /*barriers=*/true);
  const VectorXd eff = fabric.effective_accel_limit();
  ActionSourceSpec spec;
  spec.kind = ActionKind::kBangBang;
  spec.period = 2.0;
  ActionSource source(spec, 12, 5);

  FabricState state = fabric.initial_state(model.mid_range());
  const double dt = fabric.config().dt();
  for (int tick = 0; tick < 1000; ++tick) {
    const VectorXd action = source.next_action(tick / 30.0);
    for (int sub = 0; sub < 2; ++sub) {
      const FabricState next = fabric.step(state, action);
      for (int j = 0; j < 16; ++j) {
        ASSERT_GT(next.q[j], model.lower_limits[j]);
        ASSERT_LT(next.q[j], model.upper_limits[j]);
        ASSERT_LE(std::abs(next.qdd[j]), eff[j] * (1.0 + 1e-12));
        ASSERT_LE(std::abs(next.qdd[j] - state.qdd[j]) / dt,
                  fabric.config().jerk_limit[j] * (1.0 + 1e-9));
      }
      state = next;
    }
  }
}

TEST(FabricStep, SpeedCapRescalesVelocity) {
  const ChainModel model = four_finger_hand();
  FabricConfig config;
  config.beta = 0.0;
  config.gamma = 200.0;
  config.accel_limit = VectorXd::Constant(16, 20.0);
  config.jerk_limit = VectorXd::Constant(16, 1200.0);
  config.speed_cap = 0.2;
  FabricTerms terms = make_test_fabric(model, 0.0, false).terms();
  const Fabric fabric(model, config, terms);
  FabricState state = fabric.initial_state(model.mid_range());
  const VectorXd action = VectorXd::Constant(12, 1.0);
  bool capped = false;
  for (int k = 0; k < 200; ++k) {
    FabricStepInfo info;
    state = fabric.step(state, action, &info);
    capped = capped || info.speed_capped;
    ASSERT_LE(state.qd.norm(), config.speed_cap * (1.0 + 1e-12));
  }
  EXPECT_TRUE(capped);
}

TEST(FabricStep, EnergyConservedWithoutForcing) {
  const ChainModel model = four_finger_hand();
  const Fabric fabric = make_test_fabric(model, 0.0, /*barriers=*/false);
  Rng rng(31);
  FabricState state = fabric.initial_state(model.mid_range() + VectorXd::Constant(16, 0.08));
  VectorXd qd = random_vector(rng, 16, 1.0);
  state.qd = 0.3 * qd / qd.norm();
  const double initial = 0.5 * state.qd.squaredNorm();
  double max_drift = 0.0;
  for (int k = 0; k < 1000; ++k) {
    state = fabric.step(state, VectorXd::Zero(12));
    max_drift = std::max(max_drift, std::abs(0.5 * state.qd.squaredNorm() - initial));
  }
  EXPECT_LE(max_drift / initial, 1e-3);
}

}  // namespace
