#include "hydrodyn/cylinder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hydrodyn {

namespace {

double clamp(double v, double lo, double hi) {
  return std::min(std::max(v, lo), hi);
}

struct FlowRates {
  double f_dot;
  double xs_dot;
};

// Right-hand side of the coupled (f, x_s) ODE at piston position x with the
// piston velocity imposed.
FlowRates rates(const CylinderParams& p, double f, double x_s, double x,
                double x_dot, double u) {
  const double inv_vol = 1.0 / (p.V0A + p.A * x) + 1.0 / (p.V0B + p.A * (p.L - x));
  const double g = -p.A * p.A * p.beta * inv_vol;
  const double sgn_xs = (x_s > 0.0) - (x_s < 0.0);
  const double radicand =
      std::max((p.PS - p.PT) / p.rho - sgn_xs * f / (p.rho * p.A), 0.0);
  const double h = p.Cd * p.w * p.beta * p.A * std::sqrt(radicand) * inv_vol;
  return {g * x_dot + h * x_s, (u - x_s) / p.tau_v};
}

}  // namespace

std::pair<double, double> flow_coefficients(const CylinderParams& p, double f,
                                            double x, int xs_sign) {
  if (!p.valid()) throw std::domain_error("CylinderParams invalid");
  if (x < 0.0 || x > p.L) {
    throw std::domain_error("flow_coefficients: x outside [0, L]");
  }
  const double inv_vol = 1.0 / (p.V0A + p.A * x) + 1.0 / (p.V0B + p.A * (p.L - x));
  const double g = -p.A * p.A * p.beta * inv_vol;
  const double radicand =
      std::max((p.PS - p.PT) / p.rho - xs_sign * f / (p.rho * p.A), 0.0);
  const double h = p.Cd * p.w * p.beta * p.A * std::sqrt(radicand) * inv_vol;
  return {g, h};
}

CylinderState step_cylinder(const CylinderParams& p, const CylinderState& s,
                            double u, double x_dot, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("step_cylinder: dt must be > 0");
  if (!p.valid()) throw std::domain_error("CylinderParams invalid");

  const double u_eff = clamp(u, -p.xs_max, p.xs_max);

  // RK4 on (f, x_s); x moves linearly within the step.
  const auto x_at = [&](double t) { return clamp(s.x + x_dot * t, 0.0, p.L); };

  const FlowRates k1 = rates(p, s.f, s.x_s, x_at(0.0), x_dot, u_eff);
  const FlowRates k2 = rates(p, s.f + 0.5 * dt * k1.f_dot,
                             s.x_s + 0.5 * dt * k1.xs_dot, x_at(0.5 * dt),
                             x_dot, u_eff);
  const FlowRates k3 = rates(p, s.f + 0.5 * dt * k2.f_dot,
                             s.x_s + 0.5 * dt * k2.xs_dot, x_at(0.5 * dt),
                             x_dot, u_eff);
  const FlowRates k4 = rates(p, s.f + dt * k3.f_dot, s.x_s + dt * k3.xs_dot,
                             x_at(dt), x_dot, u_eff);

  CylinderState out;
  out.f = s.f + dt / 6.0 * (k1.f_dot + 2.0 * k2.f_dot + 2.0 * k3.f_dot + k4.f_dot);
  out.f = clamp(out.f, -p.A * p.PS, p.A * p.PS);  // relief/cavitation limit
  out.x_s = s.x_s + dt / 6.0 *
            (k1.xs_dot + 2.0 * k2.xs_dot + 2.0 * k3.xs_dot + k4.xs_dot);
  out.x_s = clamp(out.x_s, -p.xs_max, p.xs_max);
  out.x = x_at(dt);
  out.x_dot = x_dot;
  return out;
}

RigState step_rig(const RigParams& rp, const CylinderParams& cp,
                  const RigState& s, double u, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("step_rig: dt must be > 0");
  if (!rp.valid()) throw std::domain_error("RigParams invalid");

  const int n_sub = std::max(1, static_cast<int>(std::lround(dt / kRigSubstep)));
  const double h = dt / n_sub;

  RigState st = s;
  for (int i = 0; i < n_sub; ++i) {
    const auto accel = [&](double q, double qd, double f) {
      return (rp.R * f - rp.damping * qd - rp.gravity_torque_amp * std::sin(q)) /
             rp.inertia;
    };

    // kick-drift
    double qd_half = st.qd + 0.5 * h * accel(st.q, st.qd, st.cyl.f);
    double q_new = st.q + h * qd_half;
    if (q_new < rp.q_min) { q_new = rp.q_min; qd_half = 0.0; }
    if (q_new > rp.q_max) { q_new = rp.q_max; qd_half = 0.0; }

    // fluid advances along the imposed piston motion
    CylinderState cyl = step_cylinder(cp, st.cyl, u, rp.R * qd_half, h);
    cyl.x = clamp(rp.R * q_new, 0.0, cp.L);

    // kick
    double qd_new = qd_half + 0.5 * h * accel(q_new, qd_half, cyl.f);
    if ((q_new <= rp.q_min && qd_new < 0.0) ||
        (q_new >= rp.q_max && qd_new > 0.0)) {
      qd_new = 0.0;
    }

    st.q = q_new;
    st.qd = qd_new;
    st.cyl = cyl;
    st.cyl.x_dot = rp.R * qd_new;
  }
  return st;
}

RigState make_rig_state(const RigParams& rp, const CylinderParams& cp,
                        double q, double qd) {
  RigState s;
  s.q = clamp(q, rp.q_min, rp.q_max);
  s.qd = qd;
  s.cyl.x = clamp(rp.R * s.q, 0.0, cp.L);
  s.cyl.x_dot = rp.R * qd;
  s.cyl.f = rp.gravity_torque_amp * std::sin(s.q) / rp.R;  // tau = R*f balance
  s.cyl.x_s = 0.0;
  return s;
}

}  // namespace hydrodyn
