#pragma once

#include <array>
#include <map>
#include <string>

#include <Eigen/Dense>

#include "hydrodyn/actuator_model.hpp"

namespace hydrodyn {

inline constexpr std::size_t kNumFeet = 4;
inline constexpr double kCmdZeroTol = 1e-6;  // |cmd| = 0 tested at this norm

using JointVec = Eigen::Matrix<double, 12, 1>;

/// Full robot snapshot feeding the reward terms. Histories are ordered
/// newest first: q_des_hist = [a_t, a_{t-1}, a_{t-2}], grf_hist likewise.
struct RobotState {
  Eigen::Vector2d v_xy = Eigen::Vector2d::Zero();   // base linear velocity
  double v_z = 0.0;                                 // vertical velocity
  Eigen::Vector3d omega = Eigen::Vector3d::Zero();  // base angular velocity
  double h = 0.0;                                   // base height
  double h0 = 0.0;                                  // nominal base height
  JointVec q = JointVec::Zero();
  JointVec qd = JointVec::Zero();
  JointVec qd_prev = JointVec::Zero();
  JointVec q_nom = JointVec::Zero();
  JointVec tau = JointVec::Zero();
  JointVec tau_clip = JointVec::Zero();     // torque-limit overflow magnitudes
  JointVec q_des_clip = JointVec::Zero();   // action-limit overflow magnitudes
  JointVec q_limit = JointVec::Zero();      // upper joint limits
  std::array<JointVec, 3> q_des_hist = {JointVec::Zero(), JointVec::Zero(),
                                        JointVec::Zero()};
  std::array<bool, kNumFeet> contacts{};
  std::array<Eigen::Vector3d, kNumFeet> foot_v = {
      Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(),
      Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()};
  std::array<double, kNumFeet> foot_h{};
  double h_tar = 0.0;                       // target foot clearance
  std::array<std::array<double, 3>, kNumFeet> grf_hist{};
  std::array<double, kNumFeet> T_a{};       // current airtime per foot, s
  std::array<double, kNumFeet> T_s{};       // current stance time per foot, s
  Eigen::Vector3d cmd = Eigen::Vector3d::Zero();  // vx, vy, yaw rate
  std::array<double, kNumFeet> prev_c1{};   // previous-step clearance-1 values
};

/// Weights for every term plus the curriculum factor. The table expressions
/// are computed as printed; penalty terms come out non-negative and take
/// their sign from the (normally negative) gains in config.
struct RewardCoeffs {
  double k_cmd = 1.0;
  double k_yaw = 1.0;
  double k_h = 1.0;
  double k_m = 1.0;
  double k_tau = 1.0;
  double k_tauclip = 1.0;
  double k_q = 1.0;
  double k_qd = 1.0;
  double k_qdd = 1.0;
  double k_s = 1.0;
  double k_fl = 1.0;
  double k_a = 1.0;
  double k_slip = 1.0;
  double k_c1 = 1.0;
  double k_c2 = 1.0;
  double k_grf = 1.0;
  double k_act = 1.0;
  double k_l = 1.0;
  double c_f = 1.0;  // curriculum factor in [0, 1]

  /// Trip the yaw bonus branch on cmd_z = 0 instead of omega_z = 0.
  bool yaw_branch_on_command = false;

  bool valid() const { return c_f >= 0.0 && c_f <= 1.0; }
};

/// Policy observation: [omega(3), q(12), qd(12), q_des_prev(12), cmd(3)].
Eigen::Matrix<double, 42, 1> assemble_observation(const RobotState& state,
                                                  const JointVec& q_des_prev,
                                                  const Eigen::Vector3d& cmd);

/// The ten whole-body terms, keyed by name.
std::map<std::string, double> global_rewards(const RobotState& state,
                                             const RewardCoeffs& k);

/// Per-foot and per-joint terms, keyed "name_i".
std::map<std::string, double> local_rewards(const RobotState& state,
                                            const RewardCoeffs& k);

/// Sum of every global and local term.
double total_reward(const RobotState& state, const RewardCoeffs& k);

/// JSON fixture support for the rewards-check CLI command.
RobotState robot_state_from_json(const std::string& text);
RewardCoeffs reward_coeffs_from_json(const std::string& text);
std::string reward_terms_to_json(const std::map<std::string, double>& global,
                                 const std::map<std::string, double>& local,
                                 double total);

}  // namespace hydrodyn
