#pragma once

#include <cstdint>
#include <string>

#include "hydrodyn/control_loop.hpp"
#include "hydrodyn/nn.hpp"
#include "hydrodyn/rewards.hpp"
#include "hydrodyn/synthesis.hpp"
#include "hydrodyn/sysid.hpp"

namespace hydrodyn {

struct BaselineConfig {
  Arch arch = Arch::mlp;
  int iterations = 1000;
  double learning_rate = 1e-3;  // grid-selected, see default_config
  double momentum = 0.9;
  int tbptt_window = 50;
};

struct BenchConfig {
  std::size_t iterations = 1'000'000;
};

/// Everything a pipeline run needs. Defaults are the shipped configuration;
/// a JSON file overrides fields section by section and is validated before
/// any run.
struct RunConfig {
  std::uint64_t seed = 7;
  double duration_s = 20.0;
  CylinderParams oracle;
  RigParams rig;
  LoopConfig loop;           // position loop with tuned default gains
  PidGains torque_gains;     // torque-mode PID
  ProfileConfig train_profile;    // impact-poor training commands
  ProfileConfig impact_profile;   // impact-rich evaluation commands
  NoiseConfig noise;
  FitOptions fit;
  BaselineConfig baseline;
  RewardCoeffs rewards;      // placeholder gains, unspecified-by-paper
  BenchConfig bench;
};

RunConfig default_config();

/// Parse + validate a JSON config. Unknown keys and invalid values raise
/// ConfigError naming the offending field.
RunConfig load_config(const std::string& path);
RunConfig config_from_json(const std::string& text);
std::string config_to_json(const RunConfig& cfg);

}  // namespace hydrodyn
