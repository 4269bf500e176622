#pragma once

#include <utility>

#include "hydrodyn/actuator_model.hpp"

namespace hydrodyn {

/// Physical parameters of the nonlinear single-cylinder + valve oracle.
struct CylinderParams {
  double A = 1e-3;     // piston area, m^2
  double L = 0.2;      // cylinder stroke, m
  double beta = 1.5e9; // bulk modulus, Pa
  double rho = 870.0;  // oil density, kg/m^3
  double V0A = 1e-5;   // dead volume, chamber A, m^3
  double V0B = 1e-5;   // dead volume, chamber B, m^3
  double Cd = 0.6;     // discharge coefficient
  double w = 2.5e-4;   // area gradient, m (sized for ~15 L/min at full open)
  double PS = 2.1e7;   // supply pressure, Pa
  double PT = 5.0e5;   // return pressure, Pa
  double tau_v = 5e-3; // valve time constant, s
  double xs_max = 0.01;// valve opening limit, m

  bool valid() const {
    return A > 0 && L > 0 && beta > 0 && rho > 0 && V0A > 0 && V0B > 0 &&
           Cd > 0 && w > 0 && PS > PT && PT > 0 && tau_v > 0 && xs_max > 0;
  }
};

/// Dynamic state of one cylinder: piston position/velocity, force, valve
/// opening.
struct CylinderState {
  double x = 0.0;     // m, in [0, L]
  double x_dot = 0.0; // m/s
  double f = 0.0;     // N
  double x_s = 0.0;   // m, in [-xs_max, xs_max]
};

/// 1-DOF joint rig the cylinder drives through the sprocket: a gravity-loaded
/// rotary inertia standing in for one leg joint.
struct RigParams {
  double inertia = 2.0;             // kg*m^2
  double damping = 150.0;           // N*m*s/rad, seals + joint friction lump
  double gravity_torque_amp = 200.0;// N*m, torque is -amp*sin(q)
  double R = 0.05;                  // sprocket radius, m
  double q_min = 0.0;               // rad
  double q_max = 4.0;               // rad

  bool valid() const {
    return inertia > 0 && damping >= 0 && R > 0 && q_min < q_max;
  }
};

struct RigState {
  double q = 0.0;   // rad
  double qd = 0.0;  // rad/s
  CylinderState cyl;
};

/// Pressure-flow coefficients of the cylinder force ODE
/// f' = g(x) x' + h(f,x) x_s. xs_sign selects the flow direction term in h
/// (the sign of the valve opening); the radicand is clamped at zero so the
/// flow stalls instead of going imaginary.
std::pair<double, double> flow_coefficients(const CylinderParams& p, double f,
                                            double x, int xs_sign);

/// Advance force and valve opening by one RK4 step of length dt with the
/// piston velocity imposed externally. The valve is a first-order lag toward
/// the (saturated) command u with time constant tau_v. The piston position
/// advances kinematically by x_dot*dt and is clamped to the stroke. The
/// force is relief-limited to |f| <= A*PS (chamber pressure cannot exceed
/// supply).
CylinderState step_cylinder(const CylinderParams& p, const CylinderState& s,
                            double u, double x_dot, double dt);

/// One physics step of the joint rig at the log rate (dt is typically 1 ms,
/// integrated internally at kRigSubstep). The piston is slaved to the joint
/// (x = R*q, x' = R*q'), the cylinder force maps back as tau = R*f, and the
/// joint obeys  I q'' = tau - damping*q' - gravity_torque_amp*sin(q).
/// The joint integrator is the symplectic kick-drift-kick scheme; q is
/// clamped to its limits with qd zeroed at contact.
RigState step_rig(const RigParams& rp, const CylinderParams& cp,
                  const RigState& s, double u, double dt);

/// Joint torque produced by the rig state through the sprocket.
inline double rig_torque(const RigParams& rp, const RigState& s) {
  return rp.R * s.cyl.f;
}

/// Rig state with the piston consistent with q and the cylinder force chosen
/// to balance gravity (static equilibrium start).
RigState make_rig_state(const RigParams& rp, const CylinderParams& cp,
                        double q, double qd = 0.0);

inline constexpr double kRigSubstep = 1e-4;  // s, internal RK4 step

}  // namespace hydrodyn
