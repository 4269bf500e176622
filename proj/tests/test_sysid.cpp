#include <doctest.h>

#include <cmath>
#include <random>

#include "hydrodyn/errors.hpp"
#include "hydrodyn/sysid.hpp"

using namespace hydrodyn;

namespace {

// log whose torque column follows the step model exactly
TrajectoryLog model_log(const ActuatorCoeffs& k, std::size_t rows,
                        std::uint64_t seed, bool positive_only = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dq(positive_only ? 0.001 : -0.05,
                                            0.05);
  std::uniform_real_distribution<double> qd(-3.0, 3.0);
  std::uniform_real_distribution<double> q0(1.0, 3.0);

  TrajectoryLog log;
  log.reserve(rows);
  std::array<double, kNumJoints> tau{};
  tau.fill(positive_only ? 100.0 : 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    std::array<JointSnapshot, kNumJoints> row;
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      const double q = q0(rng);
      row[j] = {q, q + dq(rng), qd(rng), tau[j]};
      tau[j] = predict_torque_next(k, row[j]);
    }
    log.push_row(static_cast<double>(i) * kLogDt, row);
  }
  return log;
}

// single-regressor least squares, the brute-force nested-model oracle
double single_column_residual_rms(const RegressionProblem& prob, int col) {
  const auto x = prob.features.col(col);
  const double beta = x.dot(prob.targets) / x.dot(x);
  return std::sqrt((prob.targets - beta * x).squaredNorm() /
                   static_cast<double>(prob.targets.size()));
}

const ActuatorCoeffs kTrue{4e5, 0.02, 1e3, 50.0, 0.05};

}  // namespace

TEST_CASE("regression has one row per consecutive pair") {
  const TrajectoryLog log = model_log(kTrue, 20000, 5);
  const RegressionProblem prob = build_regression(log, kTrue.R, 0);
  CHECK(prob.features.rows() == 19999);
  CHECK(prob.targets.size() == 19999);
  CHECK(prob.skipped_gaps == 0);
}

TEST_CASE("feature row matches the hand computation") {
  TrajectoryLog log;
  std::array<JointSnapshot, kNumJoints> row{};
  row[3] = {1.0, 1.01, 0.1, 100.0};
  log.push_row(0.0, row);
  row[3] = {1.0, 1.01, 0.1, 107.75};
  log.push_row(1e-3, row);
  row[3] = {1.0, 1.01, 0.1, 100.0};
  log.push_row(2e-3, row);
  row[3] = {1.0, 1.01, 0.1, -100.0};
  log.push_row(3e-3, row);
  log.push_row(4e-3, row);

  const RegressionProblem prob = build_regression(log, 0.05, 3);
  // same-sign torque: impact feature is 0
  CHECK(prob.features(0, 0) == doctest::Approx(2.5e-5).epsilon(1e-12));
  CHECK(prob.features(0, 1) == doctest::Approx(-100.0));
  CHECK(prob.features(0, 2) == doctest::Approx(-2.5e-4).epsilon(1e-12));
  CHECK(prob.features(0, 3) == 0.0);
  CHECK(prob.targets(0) == doctest::Approx(7.75));
  // opposing torque activates it: R*dq*|tau|
  CHECK(prob.features(3, 3) == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("timestamp gaps are skipped and counted") {
  const ActuatorCoeffs k = kTrue;
  TrajectoryLog log = model_log(k, 100, 6);
  for (std::size_t i = 50; i < log.size(); ++i) log.t[i] += 5e-3;  // gap
  const RegressionProblem prob = build_regression(log, k.R, 0);
  CHECK(prob.skipped_gaps == 1);
  CHECK(prob.features.rows() == 98);
}

TEST_CASE("noiseless recovery is exact to 1e-9") {
  const TrajectoryLog log = model_log(kTrue, 20000, 7);
  const RegressionProblem prob = build_regression(log, kTrue.R, 0);
  const auto [fit, report] = fit_coefficients(prob);
  CHECK(fit.k1 == doctest::Approx(kTrue.k1).epsilon(1e-9));
  CHECK(fit.k2 == doctest::Approx(kTrue.k2).epsilon(1e-9));
  CHECK(fit.k3 == doctest::Approx(kTrue.k3).epsilon(1e-9));
  CHECK(fit.k4 == doctest::Approx(kTrue.k4).epsilon(1e-9));
  CHECK(report.residual_rms < 1e-7);
  CHECK(!report.k4_unidentified);
  CHECK(report.impact_rows > 0);
}

TEST_CASE("recovery tolerates 1% torque noise to 2% on k1..k3") {
  TrajectoryLog log = model_log(kTrue, 20000, 8);
  double rms = 0.0;
  for (std::size_t i = 0; i < log.size(); ++i) {
    rms += log.joints[0].tau[i] * log.joints[0].tau[i];
  }
  rms = std::sqrt(rms / static_cast<double>(log.size()));
  std::mt19937_64 rng(99);
  std::normal_distribution<double> noise(0.0, 0.01 * rms);
  for (auto& v : log.joints[0].tau) v += noise(rng);

  const RegressionProblem prob = build_regression(log, kTrue.R, 0);
  const auto [fit, report] = fit_coefficients(prob);
  CHECK(fit.k1 == doctest::Approx(kTrue.k1).epsilon(0.02));
  CHECK(fit.k2 == doctest::Approx(kTrue.k2).epsilon(0.02));
  CHECK(fit.k3 == doctest::Approx(kTrue.k3).epsilon(0.02));
  for (int c = 0; c < 3; ++c) {
    CHECK(report.std_errors[static_cast<std::size_t>(c)] > 0.0);
  }
}

TEST_CASE("constant log reports insufficient excitation") {
  TrajectoryLog log;
  std::array<JointSnapshot, kNumJoints> row{};
  for (auto& s : row) s = {2.0, 2.0, 0.0, 0.0};
  for (int i = 0; i < 100; ++i) {
    log.push_row(i * kLogDt, row);
  }
  const RegressionProblem prob = build_regression(log, 0.05, 0);
  CHECK_THROWS_WITH_AS(static_cast<void>(fit_coefficients(prob)),
                       doctest::Contains("insufficient excitation"),
                       ExcitationError);
}

TEST_CASE("collinear regressors are reported rank-deficient") {
  // qd proportional to dq makes columns 0 and 2 dependent
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dq(-0.05, 0.05);
  std::uniform_real_distribution<double> tau(-100.0, 100.0);
  TrajectoryLog log;
  for (int i = 0; i < 500; ++i) {
    std::array<JointSnapshot, kNumJoints> row{};
    const double d = dq(rng);
    for (auto& s : row) s = {2.0, 2.0 + d, 3.0 * d, tau(rng)};
    log.push_row(i * kLogDt, row);
  }
  const RegressionProblem prob = build_regression(log, 0.05, 0);
  CHECK_THROWS_AS(static_cast<void>(fit_coefficients(prob)), ExcitationError);
}

TEST_CASE("full fit beats every single-coefficient sub-model") {
  TrajectoryLog log = model_log(kTrue, 5000, 12);
  std::mt19937_64 rng(13);
  std::normal_distribution<double> noise(0.0, 5.0);
  for (auto& v : log.joints[0].tau) v += noise(rng);

  const RegressionProblem prob = build_regression(log, kTrue.R, 0);
  const auto [fit, report] = fit_coefficients(prob);
  for (int col = 0; col < 4; ++col) {
    CHECK(report.residual_rms <= single_column_residual_rms(prob, col) + 1e-12);
  }
}

TEST_CASE("fit is invariant under time reindexing") {
  const TrajectoryLog log = model_log(kTrue, 3000, 14);
  TrajectoryLog shifted = log;
  for (auto& t : shifted.t) t += 1234.5;

  const auto [a, ra] = fit_coefficients(build_regression(log, kTrue.R, 0));
  const auto [b, rb] = fit_coefficients(build_regression(shifted, kTrue.R, 0));
  CHECK(a.k1 == doctest::Approx(b.k1).epsilon(1e-9));
  CHECK(a.k2 == doctest::Approx(b.k2).epsilon(1e-9));
  CHECK(a.k3 == doctest::Approx(b.k3).epsilon(1e-9));
  CHECK(a.k4 == doctest::Approx(b.k4).epsilon(1e-9));
}

TEST_CASE("no impact samples leaves k4 unidentified at zero") {
  const TrajectoryLog log = model_log(kTrue, 5000, 15, /*positive_only=*/true);
  const RegressionProblem prob = build_regression(log, kTrue.R, 0);
  CHECK(prob.features.col(3).cwiseAbs().maxCoeff() == 0.0);

  const auto [fit, report] = fit_coefficients(prob);
  CHECK(report.k4_unidentified);
  CHECK(fit.k4 == 0.0);
  CHECK(std::isnan(report.std_errors[3]));
  CHECK(fit.k1 == doctest::Approx(kTrue.k1).epsilon(1e-9));
  CHECK(fit.k2 == doctest::Approx(kTrue.k2).epsilon(1e-9));
  CHECK(fit.k3 == doctest::Approx(kTrue.k3).epsilon(1e-9));
}

TEST_CASE("ridge option stays close on well-conditioned data") {
  const TrajectoryLog log = model_log(kTrue, 5000, 16);
  const RegressionProblem prob = build_regression(log, kTrue.R, 0);
  FitOptions opts;
  opts.ridge = 1e-8;
  const auto [fit, report] = fit_coefficients(prob, opts);
  CHECK(fit.k1 == doctest::Approx(kTrue.k1).epsilon(1e-3));
  CHECK(fit.k3 == doctest::Approx(kTrue.k3).epsilon(1e-3));
}

TEST_CASE("all twelve joints fit independently") {
  std::array<ActuatorCoeffs, kNumJoints> truth;
  TrajectoryLog log;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> dq(-0.05, 0.05);
  std::uniform_real_distribution<double> qd(-3.0, 3.0);

  for (std::size_t j = 0; j < kNumJoints; ++j) {
    truth[j] = {3e5 + 1e4 * static_cast<double>(j),
                0.01 + 0.002 * static_cast<double>(j),
                800.0 + 50.0 * static_cast<double>(j),
                40.0 + 2.0 * static_cast<double>(j), 0.05};
  }
  std::array<double, kNumJoints> tau{};
  for (int i = 0; i < 8000; ++i) {
    std::array<JointSnapshot, kNumJoints> row;
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      row[j] = {2.0, 2.0 + dq(rng), qd(rng), tau[j]};
      tau[j] = predict_torque_next(truth[j], row[j]);
    }
    log.push_row(i * kLogDt, row);
  }

  const auto [coeffs, reports] = fit_all_joints(log, 0.05);
  for (std::size_t j = 0; j < kNumJoints; ++j) {
    CHECK(coeffs[j].k1 == doctest::Approx(truth[j].k1).epsilon(1e-8));
    CHECK(coeffs[j].k2 == doctest::Approx(truth[j].k2).epsilon(1e-8));
    CHECK(coeffs[j].k3 == doctest::Approx(truth[j].k3).epsilon(1e-8));
    CHECK(coeffs[j].k4 == doctest::Approx(truth[j].k4).epsilon(1e-8));
  }
  const std::string table = fit_report_table(coeffs, reports);
  CHECK(table.find("fitted") != std::string::npos);
  const std::string json = fit_report_json(coeffs, reports);
  CHECK(json.find("residual_rms") != std::string::npos);
}
