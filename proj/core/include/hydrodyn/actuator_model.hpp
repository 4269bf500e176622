#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hydrodyn {

inline constexpr std::size_t kNumJoints = 12;

/// Identified parameters of the simplified actuator model, per joint.
/// The model is a per-millisecond step map: given the joint state and the
/// position target it returns the torque one step ahead.
struct ActuatorCoeffs {
  double k1 = 0.0;  // stiffness-like gain, N/m per step
  double k2 = 0.0;  // force decay fraction per step, dimensionless
  double k3 = 0.0;  // viscous resistance, N*s/m
  double k4 = 0.0;  // impact-correction gain, 1/m
  double R = 0.05;  // sprocket radius, m

  bool valid() const {
    return R > 0.0 && k1 >= 0.0 && k2 >= 0.0 && k2 < 1.0 && k3 >= 0.0 &&
           k4 >= 0.0 && std::isfinite(k1) && std::isfinite(k2) &&
           std::isfinite(k3) && std::isfinite(k4) && std::isfinite(R);
  }
};

/// One joint sample: measured angle, commanded angle, velocity, torque.
struct JointSnapshot {
  double q = 0.0;      // rad
  double q_des = 0.0;  // rad
  double qd = 0.0;     // rad/s
  double tau = 0.0;    // N*m
};

/// Physical quantities behind the impact-correction gain.
struct ImpactParams {
  double B = 1.5e9;     // fluid bulk modulus, Pa
  double A = 1e-3;      // effective piston area, m^2
  double V = 1e-4;      // chamber volume, m^3
  double f_max = 1.5e4; // maximum actuator force, N

  bool valid() const { return B > 0.0 && A > 0.0 && V > 0.0 && f_max > 0.0; }
};

namespace detail {

inline double sgn(double v) { return (v > 0.0) - (v < 0.0); }

// Force-delta kernel, no validation. Kept inline so the scalar and batch
// paths compile to the identical instruction sequence.
inline double force_delta_kernel(const ActuatorCoeffs& k, double f, double dx,
                                 double x_dot) {
  const double impact = dx * std::max(-f * sgn(dx), 0.0);
  return k.k1 * dx - k.k2 * f - k.k3 * x_dot + k.k4 * impact;
}

inline double torque_next_kernel(const ActuatorCoeffs& k,
                                 const JointSnapshot& s) {
  const double dq = s.q_des - s.q;
  const double r2 = k.R * k.R;
  const double impact = dq * std::max(-s.tau * sgn(dq), 0.0);
  return k.k1 * r2 * dq + (1.0 - k.k2) * s.tau - k.k3 * r2 * s.qd +
         k.k4 * k.R * impact;
}

}  // namespace detail

/// Force-space single-step model (linear-delta form).
/// dx is the commanded displacement x_des - x; the last term activates only
/// when the force opposes the commanded direction. sgn(0) = 0, so dx = 0
/// kills the impact term.
double predict_force_delta(const ActuatorCoeffs& coeffs, double f, double x,
                           double x_des, double x_dot);

/// Torque-space single-step model on the sprocket joint (tau = R*f).
double predict_torque_next(const ActuatorCoeffs& coeffs,
                           const JointSnapshot& s);

/// All 12 actuators in one call. Allocation free; element i is bitwise
/// identical to predict_torque_next(coeffs[i], states[i]).
std::array<double, kNumJoints> predict_batch12(
    std::span<const ActuatorCoeffs> coeffs,
    std::span<const JointSnapshot> states);

/// Physically derived impact force correction. Active only when the force
/// opposes the displacement (f*dx < 0); zero otherwise.
double impact_correction(const ImpactParams& p, double f, double dx);

/// Coefficient sets for all 12 joints, serialized as a JSON array of
/// {"joint_id", "k1".."k4", "R"} objects.
using JointCoeffs = std::array<ActuatorCoeffs, kNumJoints>;

std::string coeffs_to_json(const JointCoeffs& coeffs);
JointCoeffs coeffs_from_json(const std::string& text);
void save_coeffs(const JointCoeffs& coeffs, const std::string& path);
JointCoeffs load_coeffs(const std::string& path);

}  // namespace hydrodyn
