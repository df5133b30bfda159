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

#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "fabsim/common.hpp"
#include "fabsim/trajectory.hpp"

namespace fabsim {

struct SpectrumPoint {
  double frequency = 0.0;  // Hz
  double amplitude = 0.0;
};

/// One-sided amplitude spectrum of a uniformly sampled scalar series:
/// |DFT|/N for bins 0..N/2, mean removed before the transform.
/// Rectangular window; only relative comparisons are meaningful.
inline std::vector<SpectrumPoint> amplitude_spectrum(const std::vector<double>& signal,
                                                     double rate_hz) {
  const std::size_t n = signal.size();
  if (n < 2) throw std::invalid_argument("amplitude_spectrum: need at least 2 samples");
  if (!(rate_hz > 0.0)) throw std::invalid_argument("amplitude_spectrum: rate must be > 0");

  double mean = 0.0;
  for (double v : signal) mean += v;
  mean /= static_cast<double>(n);

  std::vector<SpectrumPoint> spectrum(n / 2 + 1);
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const double angle = -2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
    const std::complex<double> step(std::cos(angle), std::sin(angle));
    std::complex<double> rot(1.0, 0.0);
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      acc += (signal[i] - mean) * rot;
      rot *= step;
    }
    spectrum[k].frequency = static_cast<double>(k) * rate_hz / static_cast<double>(n);
    spectrum[k].amplitude = std::abs(acc) / static_cast<double>(n);
  }
  return spectrum;
}

/// Share of spectral amplitude strictly above the cutoff frequency.
/// Zero when the spectrum carries no amplitude at all.
inline double high_freq_ratio(const std::vector<SpectrumPoint>& spectrum,
                              double cutoff_hz = 5.0) {
  if (spectrum.empty()) throw std::invalid_argument("high_freq_ratio: empty spectrum");
  double total = 0.0;
  double high = 0.0;
  for (const SpectrumPoint& p : spectrum) {
    total += p.amplitude;
    if (p.frequency > cutoff_hz) high += p.amplitude;
  }
  return total > 0.0 ? high / total : 0.0;
}

namespace detail {

inline std::vector<double> cumulative_arc_length(const std::vector<VectorXd>& path) {
  std::vector<double> arc(path.size(), 0.0);
  for (std::size_t i = 1; i < path.size(); ++i) {
    arc[i] = arc[i - 1] + (path[i] - path[i - 1]).norm();
  }
  return arc;
}

/// Linear interpolation of a polyline at arc-length position s.
inline VectorXd sample_at_arc(const std::vector<VectorXd>& path,
                              const std::vector<double>& arc, double s) {
  std::size_t hi = 1;
  while (hi + 1 < arc.size() && arc[hi] < s) ++hi;
  const double seg = arc[hi] - arc[hi - 1];
  if (seg <= 0.0) return path[hi];
  const double w = std::min(std::max((s - arc[hi - 1]) / seg, 0.0), 1.0);
  return (1.0 - w) * path[hi - 1] + w * path[hi];
}

}  // namespace detail

/// RMS pointwise distance between two curves after arc-length
/// reparameterization. Both curves are resampled at `samples` positions
/// uniformly spaced over the arc span they have in common, so runs that
/// traverse the same path for different lengths (slower or more damped
/// runs) are compared over the shared portion.
inline double path_consistency_error(const std::vector<VectorXd>& path_a,
                                     const std::vector<VectorXd>& path_b,
                                     int samples = 200) {
  if (path_a.size() < 2 || path_b.size() < 2) {
    throw std::invalid_argument("path_consistency_error: need at least 2 samples per path");
  }
  const std::vector<double> arc_a = detail::cumulative_arc_length(path_a);
  const std::vector<double> arc_b = detail::cumulative_arc_length(path_b);
  const double common = std::min(arc_a.back(), arc_b.back());
  if (!(common > 1e-6)) {
    throw std::invalid_argument("path_consistency_error: degenerate (stationary) trajectory");
  }
  double sum_sq = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double s = common * static_cast<double>(i) / static_cast<double>(samples - 1);
    const VectorXd pa = detail::sample_at_arc(path_a, arc_a, s);
    const VectorXd pb = detail::sample_at_arc(path_b, arc_b, s);
    sum_sq += (pa - pb).squaredNorm();
  }
  return std::sqrt(sum_sq / static_cast<double>(samples));
}

inline std::vector<VectorXd> fabric_path(const Trajectory& traj) {
  std::vector<VectorXd> path;
  path.reserve(traj.rows.size() + 1);
  // Anchor at the t = 0 pose so runs covering different arc extents of the
  // same path still align from a common start.
  if (traj.meta.initial_q.size()) path.push_back(traj.meta.initial_q);
  for (const TrajectoryRecord& row : traj.rows) path.push_back(row.fabric_q);
  return path;
}

inline double path_consistency_error(const Trajectory& a, const Trajectory& b,
                                     int samples = 200) {
  return path_consistency_error(fabric_path(a), fabric_path(b), samples);
}

struct LimitViolation {
  long row = 0;
  int joint = 0;
  std::string kind;  // "joint", "accel", "jerk"
  double value = 0.0;
  double bound = 0.0;
};

struct LimitAuditReport {
  long joint_violations = 0;
  long accel_violations = 0;
  long jerk_violations = 0;
  VectorXd min_lower_gap;  // rad, per joint
  VectorXd min_upper_gap;  // rad, per joint
  double worst_accel_margin = std::numeric_limits<double>::infinity();
  double worst_jerk_margin = std::numeric_limits<double>::infinity();
  std::vector<LimitViolation> violations;  // first 32 kept

  bool clean() const {
    return joint_violations == 0 && accel_violations == 0 && jerk_violations == 0;
  }
};

// Relative slack on acceleration/jerk bound checks; the limiter caps
// accelerations exactly at the bound, so comparisons need float headroom.
inline constexpr double kAuditRelTolerance = 1e-9;

/// Counts joint-limit, acceleration-limit, and discrete-jerk violations of
/// the fabric signals against the limits carried in the trajectory header.
inline LimitAuditReport limit_audit(const Trajectory& traj) {
  const TrajectoryMeta& meta = traj.meta;
  if (meta.lower_limits.size() != meta.dof || meta.upper_limits.size() != meta.dof ||
      meta.effective_accel_limit.size() != meta.dof || meta.jerk_limit.size() != meta.dof) {
    throw ConfigError("limit_audit: trajectory header is missing limit arrays");
  }
  LimitAuditReport report;
  report.min_lower_gap = VectorXd::Constant(meta.dof, std::numeric_limits<double>::infinity());
  report.min_upper_gap = VectorXd::Constant(meta.dof, std::numeric_limits<double>::infinity());
  const double dt = meta.dt();

  const auto record = [&report](long row, int joint, const char* kind, double value,
                                double bound, long& counter) {
    ++counter;
    if (report.violations.size() < 32) {
      report.violations.push_back({row, joint, kind, value, bound});
    }
  };

  for (std::size_t r = 0; r < traj.rows.size(); ++r) {
    const TrajectoryRecord& row = traj.rows[r];
    for (int j = 0; j < meta.dof; ++j) {
      const double lower_gap = row.fabric_q[j] - meta.lower_limits[j];
      const double upper_gap = meta.upper_limits[j] - row.fabric_q[j];
      report.min_lower_gap[j] = std::min(report.min_lower_gap[j], lower_gap);
      report.min_upper_gap[j] = std::min(report.min_upper_gap[j], upper_gap);
      if (lower_gap <= 0.0 || upper_gap <= 0.0) {
        record(static_cast<long>(r), j, "joint", row.fabric_q[j],
               lower_gap <= 0.0 ? meta.lower_limits[j] : meta.upper_limits[j],
               report.joint_violations);
      }

      const double accel_bound = meta.effective_accel_limit[j];
      const double accel = std::abs(row.fabric_qdd[j]);
      report.worst_accel_margin = std::min(report.worst_accel_margin, accel_bound - accel);
      if (accel > accel_bound * (1.0 + kAuditRelTolerance)) {
        record(static_cast<long>(r), j, "accel", row.fabric_qdd[j], accel_bound,
               report.accel_violations);
      }

      if (r > 0) {
        const double jerk = std::abs(row.fabric_qdd[j] - traj.rows[r - 1].fabric_qdd[j]) / dt;
        report.worst_jerk_margin = std::min(report.worst_jerk_margin, meta.jerk_limit[j] - jerk);
        if (jerk > meta.jerk_limit[j] * (1.0 + kAuditRelTolerance)) {
          record(static_cast<long>(r), j, "jerk", jerk, meta.jerk_limit[j],
                 report.jerk_violations);
        }
      }
    }
  }
  return report;
}

/// Kinetic energy ½‖q̇_f‖² per row.
inline std::vector<double> energy_trace(const Trajectory& traj) {
  std::vector<double> energy;
  energy.reserve(traj.rows.size());
  for (const TrajectoryRecord& row : traj.rows) {
    energy.push_back(0.5 * row.fabric_qd.squaredNorm());
  }
  return energy;
}

}  // namespace fabsim
