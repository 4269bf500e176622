#pragma once

#include <cstdint>

#include "hydrodyn/control_loop.hpp"

namespace hydrodyn {

/// Additive Gaussian measurement noise applied to the recorded columns
/// (never to the loop itself). All zero by default.
struct NoiseConfig {
  double q_std = 0.0;    // rad
  double qd_std = 0.0;   // rad/s
  double tau_std = 0.0;  // N*m
};

/// Generate a ground-truth training log: run the rig closed loop under
/// position PID at 1 kHz with the commanded profile held at 100 Hz, then
/// apply optional measurement noise. Byte-deterministic for a given seed.
TrajectoryLog synthesize_log(const RigParams& rp, const CylinderParams& cp,
                             const LoopConfig& loop, const ProfileConfig& profile,
                             double duration_s, std::uint64_t seed,
                             const NoiseConfig& noise = {});

}  // namespace hydrodyn
