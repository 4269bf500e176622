#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "hydrodyn/actuator_model.hpp"
#include "hydrodyn/cylinder.hpp"
#include "hydrodyn/nn.hpp"

namespace {

using namespace hydrodyn;

JointCoeffs sample_coeffs() {
  JointCoeffs coeffs;
  for (std::size_t j = 0; j < kNumJoints; ++j) {
    coeffs[j] = {4e5 + 1e4 * static_cast<double>(j), 0.02, 1e3, 50.0, 0.05};
  }
  return coeffs;
}

std::vector<std::array<JointSnapshot, kNumJoints>> sample_states(
    std::size_t n) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> q(0.5, 3.5);
  std::uniform_real_distribution<double> dq(-0.05, 0.05);
  std::uniform_real_distribution<double> qd(-3.0, 3.0);
  std::uniform_real_distribution<double> tau(-400.0, 400.0);
  std::vector<std::array<JointSnapshot, kNumJoints>> states(n);
  for (auto& row : states) {
    for (auto& s : row) {
      s.q = q(rng);
      s.q_des = s.q + dq(rng);
      s.qd = qd(rng);
      s.tau = tau(rng);
    }
  }
  return states;
}

void BM_PredictTorqueSingle(benchmark::State& state) {
  const JointCoeffs coeffs = sample_coeffs();
  const auto states = sample_states(1024);
  std::size_t i = 0;
  for (auto _ : state) {
    const double tau = predict_torque_next(coeffs[0], states[i & 1023][0]);
    benchmark::DoNotOptimize(tau);
    ++i;
  }
}
BENCHMARK(BM_PredictTorqueSingle);

void BM_PredictBatch12(benchmark::State& state) {
  const JointCoeffs coeffs = sample_coeffs();
  const auto states = sample_states(1024);
  std::size_t i = 0;
  double checksum = 0.0;
  for (auto _ : state) {
    const auto out = predict_batch12(coeffs, states[i & 1023]);
    checksum += out[0];
    benchmark::DoNotOptimize(checksum);
    ++i;
  }
}
BENCHMARK(BM_PredictBatch12);

void BM_StepRig1ms(benchmark::State& state) {
  const RigParams rp;
  const CylinderParams cp;
  RigState rig = make_rig_state(rp, cp, 2.0);
  for (auto _ : state) {
    rig = step_rig(rp, cp, rig, 1e-4, 1e-3);
    benchmark::DoNotOptimize(rig.q);
  }
}
BENCHMARK(BM_StepRig1ms);

void BM_MlpForward(benchmark::State& state) {
  const NetParams net = init_net(Arch::mlp, 1);
  RecurrentState rs = RecurrentState::zero();
  const Eigen::VectorXd frame = Eigen::VectorXd::Constant(kNetInput, 0.1);
  for (auto _ : state) {
    const Eigen::VectorXd y = forward(net, frame, rs);
    benchmark::DoNotOptimize(y.sum());
  }
}
BENCHMARK(BM_MlpForward);

}  // namespace

BENCHMARK_MAIN();
