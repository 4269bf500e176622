#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "hydrodyn/actuator_model.hpp"

using namespace hydrodyn;

namespace {

std::vector<JointSnapshot> random_snapshots(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> q(-2.0, 2.0);
  std::uniform_real_distribution<double> dq(-0.2, 0.2);
  std::uniform_real_distribution<double> qd(-5.0, 5.0);
  std::uniform_real_distribution<double> tau(-500.0, 500.0);
  std::vector<JointSnapshot> out(n);
  for (auto& s : out) {
    s.q = q(rng);
    s.q_des = s.q + dq(rng);
    s.qd = qd(rng);
    s.tau = tau(rng);
  }
  return out;
}

ActuatorCoeffs random_coeffs(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> k1(1e4, 1e6);
  std::uniform_real_distribution<double> k2(0.0, 0.5);
  std::uniform_real_distribution<double> k3(0.0, 5e3);
  std::uniform_real_distribution<double> k4(0.0, 200.0);
  std::uniform_real_distribution<double> R(0.02, 0.1);
  return {k1(rng), k2(rng), k3(rng), k4(rng), R(rng)};
}

}  // namespace

TEST_CASE("force delta is zero at rest with zero force") {
  const ActuatorCoeffs k{1000.0, 0.02, 10.0, 50.0, 0.05};
  CHECK(predict_force_delta(k, 0.0, 0.3, 0.3, 0.0) == 0.0);
}

TEST_CASE("force delta matches hand arithmetic") {
  const ActuatorCoeffs k{1000.0, 0.02, 10.0, 0.0, 0.05};
  // k1*dx - k2*f - k3*xdot = 10 - 2 - 1
  const double df = predict_force_delta(k, 100.0, 0.0, 0.01, 0.1);
  CHECK(df == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("force delta impact branch") {
  const ActuatorCoeffs k{0.0, 0.0, 0.0, 50.0, 0.05};
  // force opposes commanded direction: k4*dx*max(-f*sgn(dx), 0) = 50*0.01*100
  const double df = predict_force_delta(k, -100.0, 0.0, 0.01, 0.0);
  CHECK(df == doctest::Approx(50.0).epsilon(1e-12));

  // same sign: impact term vanishes
  CHECK(predict_force_delta(k, 100.0, 0.0, 0.01, 0.0) == 0.0);
  // dx = 0 kills the term via sgn(0) = 0 even with nonzero force
  CHECK(predict_force_delta(k, -100.0, 0.3, 0.3, 0.0) == 0.0);
}

TEST_CASE("force delta rejects non-finite inputs and bad coeffs") {
  const ActuatorCoeffs k{1000.0, 0.02, 10.0, 0.0, 0.05};
  CHECK_THROWS_AS(predict_force_delta(k, std::nan(""), 0.0, 0.1, 0.0),
                  std::domain_error);
  ActuatorCoeffs bad = k;
  bad.k2 = 1.5;
  CHECK_THROWS_AS(predict_force_delta(bad, 0.0, 0.0, 0.0, 0.0),
                  std::domain_error);
  bad = k;
  bad.R = 0.0;
  CHECK_THROWS_AS(predict_force_delta(bad, 0.0, 0.0, 0.0, 0.0),
                  std::domain_error);
}

TEST_CASE("torque prediction identity case") {
  const ActuatorCoeffs k{4e5, 0.02, 1e3, 50.0, 0.05};
  CHECK(predict_torque_next(k, {1.0, 1.0, 0.0, 0.0}) == 0.0);
}

TEST_CASE("torque prediction matches hand arithmetic") {
  const ActuatorCoeffs k{4e5, 0.02, 1e3, 0.0, 0.05};
  // k1*R^2*dq + (1-k2)*tau - k3*R^2*qd = 10 + 98 - 0.25
  const double tau = predict_torque_next(k, {1.0, 1.01, 0.1, 100.0});
  CHECK(tau == doctest::Approx(107.75).epsilon(1e-12));
}

TEST_CASE("torque prediction impact branch") {
  const ActuatorCoeffs k{0.0, 0.0, 0.0, 50.0, 0.05};
  // -100 + 50*0.05*0.01*100
  const double tau = predict_torque_next(k, {1.0, 1.01, 0.0, -100.0});
  CHECK(tau == doctest::Approx(-97.5).epsilon(1e-12));
}

TEST_CASE("impact term vanishes whenever tau*sgn(dq) >= 0") {
  std::mt19937_64 rng(7);
  const auto snaps = random_snapshots(2000, 11);
  for (const auto& s : snaps) {
    const double dq = s.q_des - s.q;
    const double sgn = (dq > 0) - (dq < 0);
    if (s.tau * sgn < 0) continue;
    ActuatorCoeffs with = random_coeffs(rng);
    ActuatorCoeffs without = with;
    without.k4 = 0.0;
    CHECK(predict_torque_next(with, s) == predict_torque_next(without, s));
  }
}

TEST_CASE("torque delta is linear in dq when k2=k3=k4=0") {
  const ActuatorCoeffs k{3e5, 0.0, 0.0, 0.0, 0.05};
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> uq(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double q = uq(rng);
    const double dq = 0.1 * uq(rng);
    const double alpha = 3.7;
    JointSnapshot s{q, q + dq, 0.0, 50.0};
    JointSnapshot s_scaled{q, q + alpha * dq, 0.0, 50.0};
    const double d1 = predict_torque_next(k, s) - s.tau;
    const double d2 = predict_torque_next(k, s_scaled) - s_scaled.tau;
    CHECK(d2 == doctest::Approx(alpha * d1).epsilon(1e-12));
  }
}

TEST_CASE("force-space and torque-space models agree") {
  // tau = R*f, x = R*q, x_des = R*q_des, xdot = R*qd maps one model onto
  // the other exactly
  std::mt19937_64 rng(29);
  const auto snaps = random_snapshots(10000, 31);
  for (const auto& s : snaps) {
    const ActuatorCoeffs k = random_coeffs(rng);
    const double f = s.tau / k.R;
    const double df =
        predict_force_delta(k, f, k.R * s.q, k.R * s.q_des, k.R * s.qd);
    const double tau_from_force = k.R * (f + df);
    const double tau_direct = predict_torque_next(k, s);
    CHECK(tau_direct ==
          doctest::Approx(tau_from_force).epsilon(1e-9));
  }
}

TEST_CASE("batch of identity snapshots returns zeros") {
  JointCoeffs coeffs;
  std::array<JointSnapshot, kNumJoints> states;
  for (std::size_t j = 0; j < kNumJoints; ++j) {
    coeffs[j] = {4e5, 0.02, 1e3, 50.0, 0.05};
    states[j] = {1.0, 1.0, 0.0, 0.0};
  }
  for (double tau : predict_batch12(coeffs, states)) CHECK(tau == 0.0);
}

TEST_CASE("batch replicates the single-joint hand value") {
  JointCoeffs coeffs;
  std::array<JointSnapshot, kNumJoints> states;
  for (std::size_t j = 0; j < kNumJoints; ++j) {
    coeffs[j] = {4e5, 0.02, 1e3, 0.0, 0.05};
    states[j] = {1.0, 1.01, 0.1, 100.0};
  }
  for (double tau : predict_batch12(coeffs, states)) {
    CHECK(tau == doctest::Approx(107.75).epsilon(1e-12));
  }
}

TEST_CASE("batch is bitwise identical to scalar calls") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    JointCoeffs coeffs;
    std::array<JointSnapshot, kNumJoints> states;
    const auto snaps = random_snapshots(kNumJoints, 1000 + trial);
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      coeffs[j] = random_coeffs(rng);
      states[j] = snaps[j];
    }
    const auto batch = predict_batch12(coeffs, states);
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      CHECK(batch[j] == predict_torque_next(coeffs[j], states[j]));
    }
  }
}

TEST_CASE("batch rejects length mismatch") {
  std::vector<ActuatorCoeffs> coeffs(11);
  std::vector<JointSnapshot> states(12);
  CHECK_THROWS_AS(predict_batch12(coeffs, states), std::invalid_argument);
}

TEST_CASE("impact correction hand value") {
  const ImpactParams p{1.5e9, 1e-3, 1e-4, 1.5e4};
  CHECK(impact_correction(p, 0.0, 1e-3) == 0.0);
  CHECK(impact_correction(p, -1e3, 0.0) == 0.0);
  // (B*A^2)/(V*f_max) * f * dx = 1e3 * (-1e3) * 1e-3
  CHECK(impact_correction(p, -1e3, 1e-3) ==
        doctest::Approx(-1000.0).epsilon(1e-12));
  // same sign: inactive
  CHECK(impact_correction(p, 1e3, 1e-3) == 0.0);
}

TEST_CASE("coefficients JSON round trip") {
  JointCoeffs coeffs;
  for (std::size_t j = 0; j < kNumJoints; ++j) {
    coeffs[j] = {4e5 + static_cast<double>(j), 0.02, 1e3, 50.0, 0.05};
  }
  const JointCoeffs back = coeffs_from_json(coeffs_to_json(coeffs));
  for (std::size_t j = 0; j < kNumJoints; ++j) {
    CHECK(back[j].k1 == coeffs[j].k1);
    CHECK(back[j].k2 == coeffs[j].k2);
    CHECK(back[j].k3 == coeffs[j].k3);
    CHECK(back[j].k4 == coeffs[j].k4);
    CHECK(back[j].R == coeffs[j].R);
  }
  CHECK_THROWS(coeffs_from_json("[]"));
}
