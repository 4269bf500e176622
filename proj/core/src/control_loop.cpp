#include "hydrodyn/control_loop.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace hydrodyn {

namespace {

std::mt19937_64 joint_rng(std::uint64_t seed, std::size_t joint) {
  return std::mt19937_64(seed ^ (0x9e3779b97f4a7c15ULL * (joint + 1)));
}

}  // namespace

ReferenceGenerator::ReferenceGenerator(const ProfileConfig& cfg,
                                       std::uint64_t seed, double duration_s,
                                       int command_rate_hz)
    : cfg_(cfg), command_rate_hz_(command_rate_hz), duration_s_(duration_s) {
  if (duration_s <= 0) {
    throw std::invalid_argument("ReferenceGenerator: duration must be > 0");
  }
  for (std::size_t j = 0; j < kNumJoints; ++j) {
    if (cfg_.per_joint_variation) {
      auto rng = joint_rng(seed, j);
      std::uniform_real_distribution<double> uni(0.0, 2.0 * std::numbers::pi);
      phase_[j] = uni(rng);
    } else {
      phase_[j] = 0.0;
    }
  }

  if (cfg_.type == ProfileType::steps || cfg_.type == ProfileType::mixed) {
    cmds_per_hold_ = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(cfg_.hold_s * command_rate_hz_)));
    const std::size_t n_cmds =
        static_cast<std::size_t>(std::ceil(duration_s * command_rate_hz_)) + 1;
    step_values_.resize(n_cmds / cmds_per_hold_ + 2);
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      auto rng = joint_rng(seed * 0x2545f4914f6cdd1dULL + 1,
                           cfg_.per_joint_variation ? j : 0);
      std::uniform_real_distribution<double> uni(-cfg_.amplitude,
                                                 cfg_.amplitude);
      for (auto& hold : step_values_) hold[j] = cfg_.center + uni(rng);
    }
  }
}

double ReferenceGenerator::value(std::size_t joint, std::size_t cmd) const {
  const double t = static_cast<double>(cmd) / command_rate_hz_;
  const double two_pi = 2.0 * std::numbers::pi;
  switch (cfg_.type) {
    case ProfileType::hold:
      return cfg_.center;
    case ProfileType::sine:
      return cfg_.center +
             cfg_.amplitude * std::sin(two_pi * cfg_.freq_hz * t + phase_[joint]);
    case ProfileType::chirp: {
      // linear sweep freq_hz -> freq_end_hz over the horizon
      const double rate = (cfg_.freq_end_hz - cfg_.freq_hz) / duration_s_;
      const double ph = two_pi * (cfg_.freq_hz * t + 0.5 * rate * t * t);
      return cfg_.center + cfg_.amplitude * std::sin(ph + phase_[joint]);
    }
    case ProfileType::steps: {
      const std::size_t hold = std::min(cmd / cmds_per_hold_,
                                        step_values_.size() - 1);
      return step_values_[hold][joint];
    }
    case ProfileType::mixed: {
      const std::size_t hold = std::min(cmd / cmds_per_hold_,
                                        step_values_.size() - 1);
      return 0.5 * (step_values_[hold][joint] + cfg_.center) +
             0.5 * cfg_.amplitude *
                 std::sin(two_pi * cfg_.freq_hz * t + phase_[joint]);
    }
  }
  return cfg_.center;
}

LoopResult run_closed_loop(const LoopConfig& cfg, const RigParams& rp,
                           const CylinderParams& cp,
                           const ReferenceGenerator& profile,
                           double duration_s) {
  if (!cfg.valid()) throw std::invalid_argument("LoopConfig invalid");
  if (duration_s <= 0) {
    throw std::invalid_argument("run_closed_loop: duration must be > 0");
  }

  const double dt = 1.0 / cfg.inner_rate_hz;
  const int steps_per_cmd = cfg.inner_rate_hz / cfg.command_rate_hz;
  const std::size_t n_steps =
      static_cast<std::size_t>(std::llround(duration_s * cfg.inner_rate_hz));

  LoopResult res;
  res.log.reserve(n_steps);
  res.log.reference.emplace();
  res.log.reference->reserve(n_steps);

  std::array<RigState, kNumJoints> rigs;
  std::array<PidState, kNumJoints> pids{};
  std::array<double, kNumJoints> refs{};
  for (std::size_t j = 0; j < kNumJoints; ++j) {
    const double ref0 = profile.value(j, 0);
    // start at the reference in position mode, at rest mid-range otherwise
    const double q0 = cfg.mode == LoopMode::position
                          ? ref0
                          : 0.5 * (rp.q_min + rp.q_max);
    rigs[j] = make_rig_state(rp, cp, q0);
  }

  for (std::size_t i = 0; i < n_steps; ++i) {
    if (i % steps_per_cmd == 0) {
      const std::size_t cmd = i / steps_per_cmd;
      for (std::size_t j = 0; j < kNumJoints; ++j) {
        refs[j] = profile.value(j, cmd);
      }
    }

    std::array<JointSnapshot, kNumJoints> row;
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      const double tau = rig_torque(rp, rigs[j]);
      row[j] = {rigs[j].q,
                cfg.mode == LoopMode::position ? refs[j] : rigs[j].q,
                rigs[j].qd, tau};
    }
    res.log.push_row(i * dt, row);
    res.log.reference->push_back(refs[0]);

    for (std::size_t j = 0; j < kNumJoints; ++j) {
      const double measured = cfg.mode == LoopMode::position
                                  ? rigs[j].q
                                  : rig_torque(rp, rigs[j]);
      const double u = pid_step(cfg.gains, refs[j] - measured, pids[j], dt);
      rigs[j] = step_rig(rp, cp, rigs[j], u, dt);
      if (std::abs(rigs[j].qd) > cfg.divergence_qd) {
        res.diverged = true;
        res.t_end = i * dt;
        return res;
      }
    }
    res.t_end = i * dt;
  }
  return res;
}

double phase_lag(const TrajectoryLog& log, double ref_freq_hz,
                 std::size_t joint, LagChannel channel) {
  if (!log.reference) {
    throw std::invalid_argument("phase_lag: log has no reference column");
  }
  if (ref_freq_hz <= 0) {
    throw std::invalid_argument("phase_lag: ref_freq must be > 0");
  }
  const std::size_t n = log.size();
  const double fs = 1.0 / kLogDt;
  const std::size_t period =
      static_cast<std::size_t>(std::llround(fs / ref_freq_hz));
  if (period < 4 || n < 3 * period) {
    throw std::invalid_argument(
        "phase_lag: log must contain at least 3 full periods");
  }

  const std::vector<double>& ref = *log.reference;
  const std::vector<double>& meas = channel == LagChannel::torque
                                        ? log.joints[joint].tau
                                        : log.joints[joint].q;

  double ref_mean = 0.0, meas_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ref_mean += ref[i];
    meas_mean += meas[i];
  }
  ref_mean /= n;
  meas_mean /= n;

  // cross-correlation over one period of candidate delays; every lag uses
  // the same window t in [period, n) so the peak is not window-biased
  std::vector<double> corr(period, 0.0);
  for (std::size_t k = 0; k < period; ++k) {
    double c = 0.0;
    for (std::size_t t = period; t < n; ++t) {
      c += (ref[t - k] - ref_mean) * (meas[t] - meas_mean);
    }
    corr[k] = c;
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k < period; ++k) {
    if (corr[k] > corr[best]) best = k;
  }

  // parabolic sub-sample refinement with cyclic neighbors
  const double cm = corr[(best + period - 1) % period];
  const double c0 = corr[best];
  const double cp = corr[(best + 1) % period];
  double shift = 0.0;
  const double denom = cm - 2.0 * c0 + cp;
  if (denom < 0.0) shift = 0.5 * (cm - cp) / denom;

  double frac = (static_cast<double>(best) + shift) / period;
  frac -= std::floor(frac);
  double deg = 360.0 * frac;
  if (deg >= 180.0) deg = 360.0 - deg;
  return deg;
}

PidGains autotune_position_gains(const RigParams& rp, const CylinderParams& cp,
                                 double step_rad, double settle_s) {
  const auto settles = [&](double kp) {
    PidGains g;
    g.kp = kp;
    g.ki = 0.2 * kp;
    g.kd = 0.0;  // derivative excites the 100 Hz ZOH staircase
    g.i_limit = 0.5;
    g.u_limit = cp.xs_max;

    const double q0 = 0.5 * (rp.q_min + rp.q_max);
    RigState rig = make_rig_state(rp, cp, q0);
    PidState pid;
    const double q_des = q0 + step_rad;
    const double dt = kLogDt;
    const double horizon = settle_s + 0.3;
    bool ok = true;
    for (double t = 0.0; t < horizon; t += dt) {
      const double u = pid_step(g, q_des - rig.q, pid, dt);
      rig = step_rig(rp, cp, rig, u, dt);
      if (std::abs(rig.qd) > 200.0) return false;
      if (t >= settle_s && std::abs(rig.q - q_des) > 0.02 * step_rad) {
        ok = false;
      }
    }
    return ok;
  };

  double lo = 1e-4, hi = 10.0;
  if (!settles(hi)) hi = 1.0;  // fall back if the aggressive end is unstable
  // find a settling upper bracket
  while (!settles(hi) && hi > lo) hi *= 0.5;
  if (!settles(hi)) throw std::runtime_error("autotune: no settling kp found");
  // bisect down to the smallest settling gain
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (settles(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }

  PidGains g;
  g.kp = 1.5 * hi;  // headroom above the bare settling threshold
  g.ki = 0.2 * g.kp;
  g.kd = 0.0;
  g.i_limit = 0.5;
  g.u_limit = cp.xs_max;
  return g;
}

}  // namespace hydrodyn
