#pragma once

#include <cstdint>
#include <string>

#include "hydrodyn/actuator_model.hpp"

namespace hydrodyn {

/// Wall-clock statistics for predict_batch12, nanoseconds per 12-joint call.
/// The checksum folds every output in, so the timed calls cannot be
/// optimized away and a run can be replayed bit-exactly.
struct LatencyStats {
  double median_ns = 0.0;
  double p99_ns = 0.0;
  double min_ns = 0.0;
  std::size_t iterations = 0;
  double checksum = 0.0;
  bool batched = false;            // coarse timer forced time-K-calls-divide
  double timer_resolution_ns = 0;
};

/// Time predict_batch12 over n_iters calls on seeded random snapshots drawn
/// from a pre-generated pool (no generation cost inside the timed region).
/// If the clock cannot resolve 100 ns, timing switches to batches of calls
/// divided by the batch size. Single-threaded by design.
LatencyStats bench_latency(const JointCoeffs& coeffs, std::size_t n_iters,
                           std::uint64_t seed);

/// Same call sequence without the timers; returns the checksum.
double bench_checksum_replay(const JointCoeffs& coeffs, std::size_t n_iters,
                             std::uint64_t seed);

std::string latency_stats_to_json(const LatencyStats& stats);

}  // namespace hydrodyn
