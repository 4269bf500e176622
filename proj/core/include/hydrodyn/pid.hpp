#pragma once

namespace hydrodyn {

/// PID gains for either loop flavor. Units of kp/ki/kd depend on the loop
/// (valve command per rad in position mode, per N*m in torque mode).
struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double i_limit = 1.0;  // integral clamp, error*s
  double u_limit = 1.0;  // output clamp, valve command m

  bool valid() const {
    return kp >= 0 && ki >= 0 && kd >= 0 && i_limit > 0 && u_limit > 0;
  }
};

struct PidState {
  double integral = 0.0;
  double prev_err = 0.0;
};

/// One PID update. The derivative acts on the error; the integral is clamped
/// to +-i_limit and frozen while the output saturates (conditional
/// integration anti-windup). Returns the clamped valve command.
double pid_step(const PidGains& g, double err, PidState& state, double dt);

}  // namespace hydrodyn
