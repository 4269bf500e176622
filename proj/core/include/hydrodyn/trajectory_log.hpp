#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hydrodyn/actuator_model.hpp"

namespace hydrodyn {

/// 1 kHz time series for one joint.
struct JointSeries {
  std::vector<double> q;      // rad
  std::vector<double> q_des;  // rad
  std::vector<double> qd;     // rad/s
  std::vector<double> tau;    // N*m
};

/// Full 12-joint trajectory log on a strict 1 ms grid. An optional reference
/// column carries the closed-loop command (q reference in position mode,
/// torque reference in torque mode).
struct TrajectoryLog {
  std::vector<double> t;  // s, strictly increasing by 1 ms
  std::array<JointSeries, kNumJoints> joints;
  std::optional<std::vector<double>> reference;

  std::size_t size() const { return t.size(); }

  void reserve(std::size_t n);
  void push_row(double time, const std::array<JointSnapshot, kNumJoints>& row);

  JointSnapshot snapshot(std::size_t joint, std::size_t i) const {
    const JointSeries& s = joints[joint];
    return {s.q[i], s.q_des[i], s.qd[i], s.tau[i]};
  }
};

inline constexpr double kLogDt = 1e-3;  // s

/// Canonical CSV schema: "t" then per joint j the four columns
/// q_j, q_des_j, qd_j, tau_j, optionally a trailing "ref" column. Values are
/// written with 17 significant digits so a write/parse round trip is exact.
void write_trajectory_csv(const TrajectoryLog& log, const std::string& path);

/// Strict parser: header must match the canonical column list, every field
/// must be a finite number (errors carry the 1-based line), and timestamps
/// must be strictly increasing.
TrajectoryLog parse_trajectory_csv(const std::string& path);

}  // namespace hydrodyn
