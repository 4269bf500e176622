#include "hydrodyn/rewards.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace hydrodyn {

namespace {

bool cmd_is_zero(const Eigen::Vector3d& cmd) {
  return cmd.norm() <= kCmdZeroTol;
}

}  // namespace

Eigen::Matrix<double, 42, 1> assemble_observation(const RobotState& state,
                                                  const JointVec& q_des_prev,
                                                  const Eigen::Vector3d& cmd) {
  Eigen::Matrix<double, 42, 1> obs;
  obs.segment<3>(0) = state.omega;
  obs.segment<12>(3) = state.q;
  obs.segment<12>(15) = state.qd;
  obs.segment<12>(27) = q_des_prev;
  obs.segment<3>(39) = cmd;
  return obs;
}

std::map<std::string, double> global_rewards(const RobotState& state,
                                             const RewardCoeffs& k) {
  if (!k.valid()) throw std::domain_error("RewardCoeffs: c_f outside [0,1]");
  std::map<std::string, double> r;

  const Eigen::Vector2d v_err = state.cmd.head<2>() - state.v_xy;
  const double yaw_err = state.cmd(2) - state.omega(2);
  r["command"] =
      k.k_cmd * (std::exp(-v_err.squaredNorm()) *
                     (1.0 + std::exp(-0.5 * v_err.norm())) +
                 std::exp(-1.5 * yaw_err * yaw_err));

  const bool yaw_bonus = k.yaw_branch_on_command
                             ? std::abs(state.cmd(2)) <= kCmdZeroTol
                             : state.omega(2) == 0.0;
  r["yaw"] = (yaw_bonus ? 10.0 : 1.0) * k.c_f * k.k_yaw * yaw_err * yaw_err;

  r["base_height"] = k.k_h * std::exp(-40.0 * std::abs(state.h0 - state.h));
  r["base_motion"] =
      k.k_m * (state.v_z * state.v_z +
               0.02 * (std::abs(state.omega(0)) + std::abs(state.omega(1))));
  r["torque"] = k.c_f * k.k_tau * state.tau.squaredNorm();
  r["torque_clip"] = k.c_f * k.k_tauclip * state.tau_clip.squaredNorm();

  const double q_dev = (state.q - state.q_nom).norm();
  r["nominal_position"] =
      (cmd_is_zero(state.cmd) ? 10.0 : 1.0) * k.c_f * k.k_q * q_dev;

  r["joint_velocity"] = k.c_f * k.k_qd * state.qd.squaredNorm();
  r["joint_acceleration"] =
      k.c_f * k.k_qdd * (state.qd - state.qd_prev).squaredNorm();

  const JointVec& a0 = state.q_des_hist[0];
  const JointVec& a1 = state.q_des_hist[1];
  const JointVec& a2 = state.q_des_hist[2];
  r["action_smoothness"] =
      k.c_f * k.k_s * (0.5 * (a0 - 2.0 * a1 + a2).squaredNorm() +
                       (a0 - a1).squaredNorm());
  return r;
}

std::map<std::string, double> local_rewards(const RobotState& state,
                                            const RewardCoeffs& k) {
  if (!k.valid()) throw std::domain_error("RewardCoeffs: c_f outside [0,1]");
  std::map<std::string, double> r;

  bool any_contact = false;
  for (bool c : state.contacts) any_contact |= c;
  r["flight_phase"] = any_contact ? 0.0 : k.c_f * k.k_fl;

  const bool zero_cmd = cmd_is_zero(state.cmd);
  for (std::size_t i = 0; i < kNumFeet; ++i) {
    const std::string suffix = "_" + std::to_string(i);

    // airtime branches, first match wins, in table order
    double air;
    if (zero_cmd) {
      air = k.k_a * std::min(std::max(state.T_s[i] - state.T_a[i], -0.25), 0.25);
    } else if (state.T_a[i] < 0.25) {
      air = k.k_a * std::min(state.T_a[i], 0.2);
    } else if (state.T_s[i] < 0.25) {
      air = k.k_a * std::min(state.T_s[i], 0.2);
    } else {
      air = 0.0;
    }
    r["airtime" + suffix] = air;

    r["foot_slip" + suffix] =
        state.contacts[i]
            ? k.c_f * k.k_slip * state.foot_v[i].head<2>().squaredNorm()
            : 0.0;

    const double dh = state.foot_h[i] - state.h_tar;
    r["clearance1" + suffix] =
        (!state.contacts[i] && !zero_cmd)
            ? k.k_c1 * state.foot_v[i].norm() * dh * dh
            : 0.0;

    r["clearance2" + suffix] =
        state.contacts[i] ? k.k_c2 * state.prev_c1[i] : 0.0;

    const double g0 = state.grf_hist[i][0];
    const double g1 = state.grf_hist[i][1];
    const double g2 = state.grf_hist[i][2];
    const double d2 = g0 - 2.0 * g1 + g2;
    const double d1 = g0 - g1;
    r["grf_smooth" + suffix] = k.c_f * k.k_grf * (0.5 * d2 * d2 + d1 * d1);
  }

  for (std::size_t j = 0; j < kNumJoints; ++j) {
    const std::string suffix = "_" + std::to_string(j);
    r["action_clip" + suffix] =
        k.c_f * k.k_act * std::abs(state.q_des_clip(static_cast<int>(j)));
    r["joint_limit" + suffix] =
        state.q(static_cast<int>(j)) > state.q_limit(static_cast<int>(j))
            ? k.c_f * k.k_l
            : 0.0;
  }
  return r;
}

double total_reward(const RobotState& state, const RewardCoeffs& k) {
  double total = 0.0;
  for (const auto& [name, value] : global_rewards(state, k)) total += value;
  for (const auto& [name, value] : local_rewards(state, k)) total += value;
  return total;
}

namespace {

JointVec joint_vec(const nlohmann::json& j, const std::string& key) {
  const auto& arr = j.at(key);
  if (!arr.is_array() || arr.size() != 12) {
    throw std::invalid_argument("RobotState field '" + key +
                                "' must be an array of 12");
  }
  JointVec v;
  for (int i = 0; i < 12; ++i) v(i) = arr[static_cast<std::size_t>(i)];
  return v;
}

Eigen::Vector3d vec3(const nlohmann::json& j, const std::string& key) {
  const auto& arr = j.at(key);
  if (!arr.is_array() || arr.size() != 3) {
    throw std::invalid_argument("RobotState field '" + key +
                                "' must be an array of 3");
  }
  return {arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>()};
}

}  // namespace

RobotState robot_state_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  RobotState s;
  const auto& vxy = j.at("v_xy");
  s.v_xy = Eigen::Vector2d(vxy.at(0).get<double>(), vxy.at(1).get<double>());
  s.v_z = j.at("v_z").get<double>();
  s.omega = vec3(j, "omega");
  s.h = j.at("h").get<double>();
  s.h0 = j.at("h0").get<double>();
  s.q = joint_vec(j, "q");
  s.qd = joint_vec(j, "qd");
  s.qd_prev = joint_vec(j, "qd_prev");
  s.q_nom = joint_vec(j, "q_nom");
  s.tau = joint_vec(j, "tau");
  s.tau_clip = joint_vec(j, "tau_clip");
  s.q_des_clip = joint_vec(j, "q_des_clip");
  s.q_limit = joint_vec(j, "q_limit");
  const auto& hist = j.at("q_des_hist");
  if (!hist.is_array() || hist.size() != 3) {
    throw std::invalid_argument("q_des_hist must hold 3 action vectors");
  }
  for (std::size_t t = 0; t < 3; ++t) {
    const auto& arr = hist[t];
    for (int i = 0; i < 12; ++i) {
      s.q_des_hist[t](i) = arr.at(static_cast<std::size_t>(i)).get<double>();
    }
  }
  for (std::size_t i = 0; i < kNumFeet; ++i) {
    s.contacts[i] = j.at("contacts").at(i).get<bool>();
    const auto& fv = j.at("foot_v").at(i);
    s.foot_v[i] = Eigen::Vector3d(fv.at(0).get<double>(),
                                  fv.at(1).get<double>(),
                                  fv.at(2).get<double>());
    s.foot_h[i] = j.at("foot_h").at(i).get<double>();
    const auto& gh = j.at("grf_hist").at(i);
    for (std::size_t t = 0; t < 3; ++t) s.grf_hist[i][t] = gh.at(t).get<double>();
    s.T_a[i] = j.at("T_a").at(i).get<double>();
    s.T_s[i] = j.at("T_s").at(i).get<double>();
    s.prev_c1[i] = j.at("prev_c1").at(i).get<double>();
  }
  s.h_tar = j.at("h_tar").get<double>();
  s.cmd = vec3(j, "cmd");
  return s;
}

RewardCoeffs reward_coeffs_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  RewardCoeffs k;
  k.k_cmd = j.value("k_cmd", k.k_cmd);
  k.k_yaw = j.value("k_yaw", k.k_yaw);
  k.k_h = j.value("k_h", k.k_h);
  k.k_m = j.value("k_m", k.k_m);
  k.k_tau = j.value("k_tau", k.k_tau);
  k.k_tauclip = j.value("k_tauclip", k.k_tauclip);
  k.k_q = j.value("k_q", k.k_q);
  k.k_qd = j.value("k_qd", k.k_qd);
  k.k_qdd = j.value("k_qdd", k.k_qdd);
  k.k_s = j.value("k_s", k.k_s);
  k.k_fl = j.value("k_fl", k.k_fl);
  k.k_a = j.value("k_a", k.k_a);
  k.k_slip = j.value("k_slip", k.k_slip);
  k.k_c1 = j.value("k_c1", k.k_c1);
  k.k_c2 = j.value("k_c2", k.k_c2);
  k.k_grf = j.value("k_grf", k.k_grf);
  k.k_act = j.value("k_act", k.k_act);
  k.k_l = j.value("k_l", k.k_l);
  k.c_f = j.value("c_f", k.c_f);
  k.yaw_branch_on_command =
      j.value("yaw_branch_on_command", k.yaw_branch_on_command);
  if (!k.valid()) throw ::std::invalid_argument("c_f must lie in [0, 1]");
  return k;
}

std::string reward_terms_to_json(const std::map<std::string, double>& global,
                                 const std::map<std::string, double>& local,
                                 double total) {
  nlohmann::json j = {{"global", global}, {"local", local}, {"total", total}};
  return j.dump(2);
}

}  // namespace hydrodyn
