#include "hydrodyn/config.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "hydrodyn/errors.hpp"

namespace hydrodyn {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& section) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown key '" + key + "' in section '" + section +
                        "'");
    }
  }
}

double num(const json& j, const std::string& key, double fallback,
           const std::string& section) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) {
    throw ConfigError("'" + section + "." + key + "' must be a number");
  }
  return j.at(key).get<double>();
}

ProfileType profile_type(const std::string& name) {
  if (name == "hold") return ProfileType::hold;
  if (name == "steps") return ProfileType::steps;
  if (name == "sine") return ProfileType::sine;
  if (name == "chirp") return ProfileType::chirp;
  if (name == "mixed") return ProfileType::mixed;
  throw ConfigError("unknown profile type '" + name + "'");
}

std::string profile_type_name(ProfileType t) {
  switch (t) {
    case ProfileType::hold: return "hold";
    case ProfileType::steps: return "steps";
    case ProfileType::sine: return "sine";
    case ProfileType::chirp: return "chirp";
    case ProfileType::mixed: return "mixed";
  }
  return "sine";
}

void parse_cylinder(const json& j, CylinderParams& p) {
  check_keys(j, {"A", "L", "beta", "rho", "V0A", "V0B", "Cd", "w", "PS", "PT",
                 "tau_v", "xs_max"},
             "oracle");
  p.A = num(j, "A", p.A, "oracle");
  p.L = num(j, "L", p.L, "oracle");
  p.beta = num(j, "beta", p.beta, "oracle");
  p.rho = num(j, "rho", p.rho, "oracle");
  p.V0A = num(j, "V0A", p.V0A, "oracle");
  p.V0B = num(j, "V0B", p.V0B, "oracle");
  p.Cd = num(j, "Cd", p.Cd, "oracle");
  p.w = num(j, "w", p.w, "oracle");
  p.PS = num(j, "PS", p.PS, "oracle");
  p.PT = num(j, "PT", p.PT, "oracle");
  p.tau_v = num(j, "tau_v", p.tau_v, "oracle");
  p.xs_max = num(j, "xs_max", p.xs_max, "oracle");
  if (!p.valid()) throw ConfigError("oracle: parameters out of range");
}

void parse_rig(const json& j, RigParams& p) {
  check_keys(j, {"inertia", "damping", "gravity_torque_amp", "R", "q_min",
                 "q_max"},
             "rig");
  p.inertia = num(j, "inertia", p.inertia, "rig");
  p.damping = num(j, "damping", p.damping, "rig");
  p.gravity_torque_amp =
      num(j, "gravity_torque_amp", p.gravity_torque_amp, "rig");
  p.R = num(j, "R", p.R, "rig");
  p.q_min = num(j, "q_min", p.q_min, "rig");
  p.q_max = num(j, "q_max", p.q_max, "rig");
  if (!p.valid()) throw ConfigError("rig: parameters out of range");
}

void parse_gains(const json& j, PidGains& g, const std::string& section) {
  check_keys(j, {"kp", "ki", "kd", "i_limit", "u_limit"}, section);
  g.kp = num(j, "kp", g.kp, section);
  g.ki = num(j, "ki", g.ki, section);
  g.kd = num(j, "kd", g.kd, section);
  g.i_limit = num(j, "i_limit", g.i_limit, section);
  g.u_limit = num(j, "u_limit", g.u_limit, section);
  if (!g.valid()) throw ConfigError(section + ": gains out of range");
}

void parse_loop(const json& j, LoopConfig& cfg) {
  check_keys(j, {"mode", "inner_rate_hz", "command_rate_hz", "gains",
                 "divergence_qd"},
             "loop");
  if (j.contains("mode")) {
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "position") {
      cfg.mode = LoopMode::position;
    } else if (mode == "torque") {
      cfg.mode = LoopMode::torque;
    } else {
      throw ConfigError("loop.mode must be 'position' or 'torque'");
    }
  }
  cfg.inner_rate_hz = static_cast<int>(
      num(j, "inner_rate_hz", cfg.inner_rate_hz, "loop"));
  cfg.command_rate_hz = static_cast<int>(
      num(j, "command_rate_hz", cfg.command_rate_hz, "loop"));
  cfg.divergence_qd = num(j, "divergence_qd", cfg.divergence_qd, "loop");
  if (j.contains("gains")) parse_gains(j.at("gains"), cfg.gains, "loop.gains");
  if (!cfg.valid()) {
    throw ConfigError("loop: invalid configuration (inner rate must be a "
                      "multiple of the command rate)");
  }
}

void parse_profile(const json& j, ProfileConfig& p, const std::string& section) {
  check_keys(j, {"type", "center", "amplitude", "freq_hz", "freq_end_hz",
                 "hold_s", "per_joint_variation"},
             section);
  if (j.contains("type")) {
    p.type = profile_type(j.at("type").get<std::string>());
  }
  p.center = num(j, "center", p.center, section);
  p.amplitude = num(j, "amplitude", p.amplitude, section);
  p.freq_hz = num(j, "freq_hz", p.freq_hz, section);
  p.freq_end_hz = num(j, "freq_end_hz", p.freq_end_hz, section);
  p.hold_s = num(j, "hold_s", p.hold_s, section);
  if (j.contains("per_joint_variation")) {
    p.per_joint_variation = j.at("per_joint_variation").get<bool>();
  }
  if (p.amplitude < 0 || p.freq_hz < 0 || p.hold_s <= 0) {
    throw ConfigError(section + ": amplitude/freq must be >= 0, hold_s > 0");
  }
}

void parse_noise(const json& j, NoiseConfig& n) {
  check_keys(j, {"q_std", "qd_std", "tau_std"}, "noise");
  n.q_std = num(j, "q_std", n.q_std, "noise");
  n.qd_std = num(j, "qd_std", n.qd_std, "noise");
  n.tau_std = num(j, "tau_std", n.tau_std, "noise");
  if (n.q_std < 0 || n.qd_std < 0 || n.tau_std < 0) {
    throw ConfigError("noise: standard deviations must be >= 0");
  }
}

void parse_fit(const json& j, FitOptions& f) {
  check_keys(j, {"ridge", "impact_min_fraction", "rank_tolerance"}, "fit");
  f.ridge = num(j, "ridge", f.ridge, "fit");
  f.impact_min_fraction =
      num(j, "impact_min_fraction", f.impact_min_fraction, "fit");
  f.rank_tolerance = num(j, "rank_tolerance", f.rank_tolerance, "fit");
  if (f.ridge < 0 || f.impact_min_fraction < 0 || f.rank_tolerance <= 0) {
    throw ConfigError("fit: options out of range");
  }
}

void parse_baseline(const json& j, BaselineConfig& b) {
  check_keys(j, {"arch", "iterations", "learning_rate", "momentum",
                 "tbptt_window"},
             "baseline");
  if (j.contains("arch")) {
    b.arch = arch_from_name(j.at("arch").get<std::string>());
  }
  b.iterations =
      static_cast<int>(num(j, "iterations", b.iterations, "baseline"));
  b.learning_rate = num(j, "learning_rate", b.learning_rate, "baseline");
  b.momentum = num(j, "momentum", b.momentum, "baseline");
  b.tbptt_window =
      static_cast<int>(num(j, "tbptt_window", b.tbptt_window, "baseline"));
  if (b.iterations < 1 || b.learning_rate <= 0 || b.momentum < 0 ||
      b.momentum >= 1 || b.tbptt_window < 1) {
    throw ConfigError("baseline: hyperparameters out of range");
  }
}

void parse_rewards(const json& j, RewardCoeffs& k) {
  check_keys(j, {"k_cmd", "k_yaw", "k_h", "k_m", "k_tau", "k_tauclip", "k_q",
                 "k_qd", "k_qdd", "k_s", "k_fl", "k_a", "k_slip", "k_c1",
                 "k_c2", "k_grf", "k_act", "k_l", "c_f",
                 "yaw_branch_on_command"},
             "rewards");
  k.k_cmd = num(j, "k_cmd", k.k_cmd, "rewards");
  k.k_yaw = num(j, "k_yaw", k.k_yaw, "rewards");
  k.k_h = num(j, "k_h", k.k_h, "rewards");
  k.k_m = num(j, "k_m", k.k_m, "rewards");
  k.k_tau = num(j, "k_tau", k.k_tau, "rewards");
  k.k_tauclip = num(j, "k_tauclip", k.k_tauclip, "rewards");
  k.k_q = num(j, "k_q", k.k_q, "rewards");
  k.k_qd = num(j, "k_qd", k.k_qd, "rewards");
  k.k_qdd = num(j, "k_qdd", k.k_qdd, "rewards");
  k.k_s = num(j, "k_s", k.k_s, "rewards");
  k.k_fl = num(j, "k_fl", k.k_fl, "rewards");
  k.k_a = num(j, "k_a", k.k_a, "rewards");
  k.k_slip = num(j, "k_slip", k.k_slip, "rewards");
  k.k_c1 = num(j, "k_c1", k.k_c1, "rewards");
  k.k_c2 = num(j, "k_c2", k.k_c2, "rewards");
  k.k_grf = num(j, "k_grf", k.k_grf, "rewards");
  k.k_act = num(j, "k_act", k.k_act, "rewards");
  k.k_l = num(j, "k_l", k.k_l, "rewards");
  k.c_f = num(j, "c_f", k.c_f, "rewards");
  if (j.contains("yaw_branch_on_command")) {
    k.yaw_branch_on_command = j.at("yaw_branch_on_command").get<bool>();
  }
  if (!k.valid()) throw ConfigError("rewards: c_f must lie in [0, 1]");
}

json profile_to_json(const ProfileConfig& p) {
  return {{"type", profile_type_name(p.type)},
          {"center", p.center},
          {"amplitude", p.amplitude},
          {"freq_hz", p.freq_hz},
          {"freq_end_hz", p.freq_end_hz},
          {"hold_s", p.hold_s},
          {"per_joint_variation", p.per_joint_variation}};
}

json gains_to_json(const PidGains& g) {
  return {{"kp", g.kp},
          {"ki", g.ki},
          {"kd", g.kd},
          {"i_limit", g.i_limit},
          {"u_limit", g.u_limit}};
}

}  // namespace

RunConfig default_config() {
  RunConfig cfg;

  // position-loop gains from the scripted settling search on the default rig
  // (autotune_position_gains output, rounded)
  cfg.loop.mode = LoopMode::position;
  cfg.loop.gains.kp = 0.04;
  cfg.loop.gains.ki = 0.008;
  cfg.loop.gains.kd = 0.0;
  cfg.loop.gains.i_limit = 0.5;
  cfg.loop.gains.u_limit = cfg.oracle.xs_max;

  cfg.torque_gains.kp = 5e-6;
  cfg.torque_gains.ki = 2.5e-5;
  cfg.torque_gains.kd = 0.0;
  cfg.torque_gains.i_limit = 5000.0;
  cfg.torque_gains.u_limit = cfg.oracle.xs_max;

  cfg.train_profile.type = ProfileType::sine;
  cfg.train_profile.center = 2.0;
  cfg.train_profile.amplitude = 0.5;
  cfg.train_profile.freq_hz = 1.0;

  cfg.impact_profile.type = ProfileType::steps;
  cfg.impact_profile.center = 2.0;
  cfg.impact_profile.amplitude = 0.9;
  cfg.impact_profile.hold_s = 0.3;

  // winner of the build-time grid {3e-4, 1e-3, 3e-3, 1e-2, 3e-2} on the
  // default training log
  cfg.baseline.learning_rate = 1e-3;

  // reward gains are placeholders, unspecified-by-paper
  cfg.rewards.k_cmd = 1.0;
  cfg.rewards.k_yaw = -0.5;
  cfg.rewards.k_h = 0.5;
  cfg.rewards.k_m = -0.2;
  cfg.rewards.k_tau = -1e-5;
  cfg.rewards.k_tauclip = -1e-4;
  cfg.rewards.k_q = -0.05;
  cfg.rewards.k_qd = -1e-4;
  cfg.rewards.k_qdd = -1e-3;
  cfg.rewards.k_s = -0.1;
  cfg.rewards.k_fl = -1.0;
  cfg.rewards.k_a = 1.0;
  cfg.rewards.k_slip = -0.3;
  cfg.rewards.k_c1 = -5.0;
  cfg.rewards.k_c2 = -0.5;
  cfg.rewards.k_grf = -1e-5;
  cfg.rewards.k_act = -0.1;
  cfg.rewards.k_l = -2.0;
  return cfg;
}

RunConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");
  check_keys(j, {"seed", "duration_s", "oracle", "rig", "loop", "torque_gains",
                 "train_profile", "impact_profile", "noise", "fit", "baseline",
                 "rewards", "bench"},
             "(root)");

  RunConfig cfg = default_config();
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) {
      throw ConfigError("'seed' must be a non-negative integer");
    }
    cfg.seed = j.at("seed").get<std::uint64_t>();
  }
  cfg.duration_s = num(j, "duration_s", cfg.duration_s, "(root)");
  if (cfg.duration_s <= 0) throw ConfigError("duration_s must be > 0");

  if (j.contains("oracle")) parse_cylinder(j.at("oracle"), cfg.oracle);
  if (j.contains("rig")) parse_rig(j.at("rig"), cfg.rig);
  if (j.contains("loop")) parse_loop(j.at("loop"), cfg.loop);
  if (j.contains("torque_gains")) {
    parse_gains(j.at("torque_gains"), cfg.torque_gains, "torque_gains");
  }
  if (j.contains("train_profile")) {
    parse_profile(j.at("train_profile"), cfg.train_profile, "train_profile");
  }
  if (j.contains("impact_profile")) {
    parse_profile(j.at("impact_profile"), cfg.impact_profile,
                  "impact_profile");
  }
  if (j.contains("noise")) parse_noise(j.at("noise"), cfg.noise);
  if (j.contains("fit")) parse_fit(j.at("fit"), cfg.fit);
  if (j.contains("baseline")) parse_baseline(j.at("baseline"), cfg.baseline);
  if (j.contains("rewards")) parse_rewards(j.at("rewards"), cfg.rewards);
  if (j.contains("bench")) {
    check_keys(j.at("bench"), {"iterations"}, "bench");
    const double it = num(j.at("bench"), "iterations",
                          static_cast<double>(cfg.bench.iterations), "bench");
    if (it < 1) throw ConfigError("bench.iterations must be >= 1");
    cfg.bench.iterations = static_cast<std::size_t>(it);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return config_from_json(text);
}

std::string config_to_json(const RunConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["duration_s"] = cfg.duration_s;
  j["oracle"] = {{"A", cfg.oracle.A},       {"L", cfg.oracle.L},
                 {"beta", cfg.oracle.beta}, {"rho", cfg.oracle.rho},
                 {"V0A", cfg.oracle.V0A},   {"V0B", cfg.oracle.V0B},
                 {"Cd", cfg.oracle.Cd},     {"w", cfg.oracle.w},
                 {"PS", cfg.oracle.PS},     {"PT", cfg.oracle.PT},
                 {"tau_v", cfg.oracle.tau_v}, {"xs_max", cfg.oracle.xs_max}};
  j["rig"] = {{"inertia", cfg.rig.inertia},
              {"damping", cfg.rig.damping},
              {"gravity_torque_amp", cfg.rig.gravity_torque_amp},
              {"R", cfg.rig.R},
              {"q_min", cfg.rig.q_min},
              {"q_max", cfg.rig.q_max}};
  j["loop"] = {{"mode", cfg.loop.mode == LoopMode::position ? "position"
                                                            : "torque"},
               {"inner_rate_hz", cfg.loop.inner_rate_hz},
               {"command_rate_hz", cfg.loop.command_rate_hz},
               {"divergence_qd", cfg.loop.divergence_qd},
               {"gains", gains_to_json(cfg.loop.gains)}};
  j["torque_gains"] = gains_to_json(cfg.torque_gains);
  j["train_profile"] = profile_to_json(cfg.train_profile);
  j["impact_profile"] = profile_to_json(cfg.impact_profile);
  j["noise"] = {{"q_std", cfg.noise.q_std},
                {"qd_std", cfg.noise.qd_std},
                {"tau_std", cfg.noise.tau_std}};
  j["fit"] = {{"ridge", cfg.fit.ridge},
              {"impact_min_fraction", cfg.fit.impact_min_fraction},
              {"rank_tolerance", cfg.fit.rank_tolerance}};
  j["baseline"] = {{"arch", arch_name(cfg.baseline.arch)},
                   {"iterations", cfg.baseline.iterations},
                   {"learning_rate", cfg.baseline.learning_rate},
                   {"momentum", cfg.baseline.momentum},
                   {"tbptt_window", cfg.baseline.tbptt_window}};
  j["rewards"] = {{"k_cmd", cfg.rewards.k_cmd},
                  {"k_yaw", cfg.rewards.k_yaw},
                  {"k_h", cfg.rewards.k_h},
                  {"k_m", cfg.rewards.k_m},
                  {"k_tau", cfg.rewards.k_tau},
                  {"k_tauclip", cfg.rewards.k_tauclip},
                  {"k_q", cfg.rewards.k_q},
                  {"k_qd", cfg.rewards.k_qd},
                  {"k_qdd", cfg.rewards.k_qdd},
                  {"k_s", cfg.rewards.k_s},
                  {"k_fl", cfg.rewards.k_fl},
                  {"k_a", cfg.rewards.k_a},
                  {"k_slip", cfg.rewards.k_slip},
                  {"k_c1", cfg.rewards.k_c1},
                  {"k_c2", cfg.rewards.k_c2},
                  {"k_grf", cfg.rewards.k_grf},
                  {"k_act", cfg.rewards.k_act},
                  {"k_l", cfg.rewards.k_l},
                  {"c_f", cfg.rewards.c_f},
                  {"yaw_branch_on_command", cfg.rewards.yaw_branch_on_command}};
  j["bench"] = {{"iterations", cfg.bench.iterations}};
  return j.dump(2);
}

}  // namespace hydrodyn
