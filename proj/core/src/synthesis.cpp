#include "hydrodyn/synthesis.hpp"

#include <random>
#include <stdexcept>

#include "hydrodyn/errors.hpp"

namespace hydrodyn {

TrajectoryLog synthesize_log(const RigParams& rp, const CylinderParams& cp,
                             const LoopConfig& loop, const ProfileConfig& profile,
                             double duration_s, std::uint64_t seed,
                             const NoiseConfig& noise) {
  if (duration_s <= 0) {
    throw ConfigError("synthesize_log: duration must be > 0");
  }
  LoopConfig cfg = loop;
  cfg.mode = LoopMode::position;

  const ReferenceGenerator gen(profile, seed, duration_s, cfg.command_rate_hz);
  LoopResult res = run_closed_loop(cfg, rp, cp, gen, duration_s);
  if (res.diverged) {
    throw DivergedError("synthesize_log: loop diverged at t=" +
                        std::to_string(res.t_end));
  }

  if (noise.q_std > 0 || noise.qd_std > 0 || noise.tau_std > 0) {
    std::mt19937_64 rng(seed ^ 0xa02bdbf7bb3c0a7ULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (auto& joint : res.log.joints) {
      for (std::size_t i = 0; i < res.log.size(); ++i) {
        joint.q[i] += noise.q_std * gauss(rng);
        joint.qd[i] += noise.qd_std * gauss(rng);
        joint.tau[i] += noise.tau_std * gauss(rng);
      }
    }
  }
  return res.log;
}

}  // namespace hydrodyn
