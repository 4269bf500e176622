#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "hydrodyn/actuator_model.hpp"
#include "hydrodyn/trajectory_log.hpp"

namespace hydrodyn {

/// Per-joint linear regression extracted from a log. The torque-step model
/// is linear in (k1..k4): targets ~= features * [k1, k2, k3, k4] with the
/// feature columns [R^2*dq, -tau, -R^2*qd, R*dq*max(-tau*sgn(dq), 0)].
struct RegressionProblem {
  Eigen::MatrixXd features;  // N x 4
  Eigen::VectorXd targets;   // N, tau_{t+1} - tau_t
  std::size_t joint_id = 0;
  double R = 0.0;
  std::size_t skipped_gaps = 0;  // consecutive pairs dropped at time gaps
};

struct FitOptions {
  double ridge = 0.0;                 // optional Tikhonov weight on scaled columns
  double impact_min_fraction = 0.01;  // min share of impact rows to fit k4
  double rank_tolerance = 1e-10;
};

struct FitReport {
  std::array<double, 4> std_errors{};  // per coefficient; NaN if not fitted
  double residual_rms = 0.0;
  bool k4_unidentified = false;
  std::size_t n_rows = 0;
  std::size_t impact_rows = 0;
  std::size_t skipped_gaps = 0;
};

/// One row per consecutive 1 ms record pair; pairs spanning a timestamp gap
/// are skipped and counted.
RegressionProblem build_regression(const TrajectoryLog& log, double R,
                                   std::size_t joint_id);

/// Ordinary least squares through a column-pivoting QR on internally
/// unit-RMS-scaled columns (the torque column is ~1000x the position ones).
/// Throws ExcitationError naming the deficient column(s) when the feature
/// matrix drops rank. If fewer than impact_min_fraction of rows activate the
/// impact feature, k4 is fixed at 0 and flagged unidentified. k2 is clamped
/// to [0, 0.999] and k1/k3/k4 floored at 0 so the result is always a valid
/// coefficient set; residual_rms reports the unclamped OLS residual.
std::pair<ActuatorCoeffs, FitReport> fit_coefficients(
    const RegressionProblem& prob, const FitOptions& opts = {});

/// Fit all 12 joints from one log; joints run in parallel (HYDRODYN_THREADS
/// caps the workers).
std::pair<JointCoeffs, std::array<FitReport, kNumJoints>> fit_all_joints(
    const TrajectoryLog& log, double R, const FitOptions& opts = {});

/// Residual report renderers for the fit CLI.
std::string fit_report_table(const JointCoeffs& coeffs,
                             const std::array<FitReport, kNumJoints>& reports);
std::string fit_report_json(const JointCoeffs& coeffs,
                            const std::array<FitReport, kNumJoints>& reports);

}  // namespace hydrodyn
