#include "hydrodyn/pid.hpp"

#include <algorithm>
#include <stdexcept>

namespace hydrodyn {

double pid_step(const PidGains& g, double err, PidState& state, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("pid_step: dt must be > 0");

  const double derivative = (err - state.prev_err) / dt;
  const double u_raw = g.kp * err + g.ki * state.integral + g.kd * derivative;
  const double u = std::clamp(u_raw, -g.u_limit, g.u_limit);

  if (u == u_raw) {
    state.integral =
        std::clamp(state.integral + err * dt, -g.i_limit, g.i_limit);
  }
  state.prev_err = err;
  return u;
}

}  // namespace hydrodyn
