#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hydrodyn/cylinder.hpp"
#include "hydrodyn/pid.hpp"
#include "hydrodyn/trajectory_log.hpp"

namespace hydrodyn {

enum class LoopMode { position, torque };

/// Dual-rate closed loop: the reference is sampled at command_rate_hz and
/// held (ZOH) while the PID and the physics run at inner_rate_hz.
struct LoopConfig {
  LoopMode mode = LoopMode::position;
  int inner_rate_hz = 1000;
  int command_rate_hz = 100;
  PidGains gains;
  double divergence_qd = 500.0;  // rad/s, |qd| beyond this aborts the run

  bool valid() const {
    return inner_rate_hz > 0 && command_rate_hz > 0 &&
           inner_rate_hz % command_rate_hz == 0 && gains.valid() &&
           divergence_qd > 0;
  }
};

enum class ProfileType { hold, steps, sine, chirp, mixed };

/// Reference trajectory shape, evaluated on the command-rate grid. Units are
/// rad in position mode and N*m in torque mode. Per-joint variation draws
/// phases and step sequences from the seed so the 12 joints decorrelate.
struct ProfileConfig {
  ProfileType type = ProfileType::sine;
  double center = 2.0;
  double amplitude = 0.5;
  double freq_hz = 0.5;
  double freq_end_hz = 2.0;  // chirp only
  double hold_s = 0.5;       // steps only
  bool per_joint_variation = true;
};

/// Deterministic reference source for all 12 joints over a fixed horizon.
class ReferenceGenerator {
 public:
  ReferenceGenerator(const ProfileConfig& cfg, std::uint64_t seed,
                     double duration_s, int command_rate_hz = 100);

  /// Reference for `joint` at command index `cmd` (ZOH between commands).
  double value(std::size_t joint, std::size_t cmd) const;

  int command_rate_hz() const { return command_rate_hz_; }

 private:
  ProfileConfig cfg_;
  int command_rate_hz_;
  double duration_s_;
  std::array<double, kNumJoints> phase_{};
  std::vector<std::array<double, kNumJoints>> step_values_;
  std::size_t cmds_per_hold_ = 1;
};

struct LoopResult {
  TrajectoryLog log;
  bool diverged = false;
  double t_end = 0.0;  // time of the last recorded row
};

/// Run the 12-rig closed loop for `duration_s`. Each row records the state
/// at its timestamp and the reference active there; the reference column is
/// always present (q_des in position mode, torque target in torque mode).
/// On divergence the partial log is returned with `diverged` set.
LoopResult run_closed_loop(const LoopConfig& cfg, const RigParams& rp,
                           const CylinderParams& cp,
                           const ReferenceGenerator& profile,
                           double duration_s);

enum class LagChannel { torque, position };

/// Phase lag of the measured channel behind the reference column at the
/// given reference frequency, in degrees folded to [0, 180). Estimated from
/// the cross-correlation peak with parabolic sub-sample refinement. Requires
/// at least 3 full periods of data and a reference column.
double phase_lag(const TrajectoryLog& log, double ref_freq_hz,
                 std::size_t joint = 0,
                 LagChannel channel = LagChannel::torque);

/// Smallest kp (ki, kd scaled from it) that settles a step of `step_rad` to
/// 2% within `settle_s` on the given rig, found by bisection. Used once to
/// produce the defaults stored in the shipped config.
PidGains autotune_position_gains(const RigParams& rp, const CylinderParams& cp,
                                 double step_rad = 0.3, double settle_s = 0.6);

}  // namespace hydrodyn
