#include "hydrodyn/sysid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "hydrodyn/errors.hpp"
#include "parallel.hpp"

namespace hydrodyn {

namespace {

constexpr std::array<const char*, 4> kColumnNames = {
    "k1 (R^2*dq)", "k2 (-tau)", "k3 (-R^2*qd)", "k4 (impact)"};

constexpr double kGapTolerance = 1e-6;  // s, slack on the 1 ms grid

double sgn(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

RegressionProblem build_regression(const TrajectoryLog& log, double R,
                                   std::size_t joint_id) {
  if (joint_id >= kNumJoints) {
    throw std::invalid_argument("build_regression: joint_id out of range");
  }
  if (R <= 0) throw std::domain_error("build_regression: R must be > 0");
  if (log.size() < 2) {
    throw std::invalid_argument(
        "build_regression: need at least 2 consecutive records");
  }

  const JointSeries& s = log.joints[joint_id];
  const std::size_t n_pairs = log.size() - 1;

  RegressionProblem prob;
  prob.joint_id = joint_id;
  prob.R = R;
  prob.features.resize(static_cast<Eigen::Index>(n_pairs), 4);
  prob.targets.resize(static_cast<Eigen::Index>(n_pairs));

  const double r2 = R * R;
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < n_pairs; ++i) {
    if (std::abs((log.t[i + 1] - log.t[i]) - kLogDt) > kGapTolerance) {
      ++prob.skipped_gaps;
      continue;
    }
    const double dq = s.q_des[i] - s.q[i];
    const double tau = s.tau[i];
    prob.features(row, 0) = r2 * dq;
    prob.features(row, 1) = -tau;
    prob.features(row, 2) = -r2 * s.qd[i];
    prob.features(row, 3) = R * dq * std::max(-tau * sgn(dq), 0.0);
    prob.targets(row) = s.tau[i + 1] - tau;
    ++row;
  }
  prob.features.conservativeResize(row, 4);
  prob.targets.conservativeResize(row);

  if (row < 4) {
    throw std::invalid_argument(
        "build_regression: fewer than 4 usable sample pairs");
  }
  return prob;
}

std::pair<ActuatorCoeffs, FitReport> fit_coefficients(
    const RegressionProblem& prob, const FitOptions& opts) {
  const Eigen::Index n = prob.features.rows();
  if (n < 4) {
    throw std::invalid_argument("fit_coefficients: need N >= 4 rows");
  }
  if (!prob.features.allFinite() || !prob.targets.allFinite()) {
    throw std::domain_error("fit_coefficients: non-finite regression data");
  }

  FitReport report;
  report.n_rows = static_cast<std::size_t>(n);
  report.skipped_gaps = prob.skipped_gaps;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (prob.features(i, 3) != 0.0) ++report.impact_rows;
  }

  const double impact_fraction =
      static_cast<double>(report.impact_rows) / static_cast<double>(n);
  const bool fit_k4 = impact_fraction >= opts.impact_min_fraction;
  report.k4_unidentified = !fit_k4;
  const Eigen::Index p = fit_k4 ? 4 : 3;

  Eigen::MatrixXd X = prob.features.leftCols(p);

  // scale columns to unit RMS; a zero column is unexcited by construction
  Eigen::VectorXd scale(p);
  std::vector<int> dead_columns;
  for (Eigen::Index j = 0; j < p; ++j) {
    const double rms = std::sqrt(X.col(j).squaredNorm() / n);
    scale(j) = rms;
    if (rms <= 0.0) dead_columns.push_back(static_cast<int>(j));
  }
  if (!dead_columns.empty()) {
    std::ostringstream msg;
    msg << "insufficient excitation: zero regressor column(s)";
    for (int j : dead_columns) msg << " [" << kColumnNames[j] << "]";
    throw ExcitationError(msg.str());
  }
  Eigen::MatrixXd Xs = X * scale.cwiseInverse().asDiagonal();

  Eigen::VectorXd beta_scaled;
  Eigen::MatrixXd gram;  // scaled-column Gram matrix, for standard errors
  if (opts.ridge > 0.0) {
    // augmented least squares [Xs; sqrt(ridge) I] keeps the QR route
    Eigen::MatrixXd Xa(n + p, p);
    Xa.topRows(n) = Xs;
    Xa.bottomRows(p) =
        std::sqrt(opts.ridge) * Eigen::MatrixXd::Identity(p, p);
    Eigen::VectorXd ya = Eigen::VectorXd::Zero(n + p);
    ya.head(n) = prob.targets;
    beta_scaled = Xa.colPivHouseholderQr().solve(ya);
    gram = Xs.transpose() * Xs +
           opts.ridge * Eigen::MatrixXd::Identity(p, p);
  } else {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xs);
    qr.setThreshold(opts.rank_tolerance);
    if (qr.rank() < p) {
      // pivots beyond the numerical rank name the dependent columns
      const auto perm = qr.colsPermutation().indices();
      std::ostringstream msg;
      msg << "insufficient excitation: rank " << qr.rank() << " < " << p
          << ", dependent column(s)";
      for (Eigen::Index j = qr.rank(); j < p; ++j) {
        msg << " [" << kColumnNames[perm(j)] << "]";
      }
      throw ExcitationError(msg.str());
    }
    beta_scaled = qr.solve(prob.targets);
    gram = Xs.transpose() * Xs;
  }

  Eigen::VectorXd beta = beta_scaled.cwiseQuotient(scale);

  const Eigen::VectorXd residuals = prob.targets - X * beta;
  report.residual_rms = std::sqrt(residuals.squaredNorm() / n);

  // standard errors from the scaled Gram matrix
  const double dof = static_cast<double>(n - p);
  const double sigma2 = dof > 0 ? residuals.squaredNorm() / dof : 0.0;
  const Eigen::MatrixXd cov = sigma2 * gram.inverse();
  for (Eigen::Index j = 0; j < 4; ++j) {
    report.std_errors[static_cast<std::size_t>(j)] =
        j < p ? std::sqrt(std::max(cov(j, j), 0.0)) / scale(j)
              : std::numeric_limits<double>::quiet_NaN();
  }

  ActuatorCoeffs coeffs;
  coeffs.R = prob.R;
  coeffs.k1 = std::max(beta(0), 0.0);
  coeffs.k2 = std::clamp(beta(1), 0.0, 0.999);
  coeffs.k3 = std::max(beta(2), 0.0);
  coeffs.k4 = fit_k4 ? std::max(beta(3), 0.0) : 0.0;
  return {coeffs, report};
}

std::pair<JointCoeffs, std::array<FitReport, kNumJoints>> fit_all_joints(
    const TrajectoryLog& log, double R, const FitOptions& opts) {
  JointCoeffs coeffs;
  std::array<FitReport, kNumJoints> reports;
  std::array<std::exception_ptr, kNumJoints> errors{};

  detail::parallel_for(kNumJoints, [&](std::size_t j) {
    try {
      const RegressionProblem prob = build_regression(log, R, j);
      std::tie(coeffs[j], reports[j]) = fit_coefficients(prob, opts);
    } catch (...) {
      errors[j] = std::current_exception();
    }
  });
  for (std::size_t j = 0; j < kNumJoints; ++j) {
    if (errors[j]) std::rethrow_exception(errors[j]);
  }
  return {coeffs, reports};
}

std::string fit_report_table(
    const JointCoeffs& coeffs,
    const std::array<FitReport, kNumJoints>& reports) {
  std::ostringstream out;
  out << "joint        k1           k2           k3           k4      "
         "resid_rms  rows    impact  k4_status\n";
  char line[256];
  for (std::size_t j = 0; j < kNumJoints; ++j) {
    const auto& c = coeffs[j];
    const auto& r = reports[j];
    std::snprintf(line, sizeof(line),
                  "%5zu  %11.5g  %11.5g  %11.5g  %11.5g  %9.4g  %6zu  %6zu  %s\n",
                  j, c.k1, c.k2, c.k3, c.k4, r.residual_rms, r.n_rows,
                  r.impact_rows, r.k4_unidentified ? "unidentified" : "fitted");
    out << line;
  }
  return out.str();
}

std::string fit_report_json(
    const JointCoeffs& coeffs,
    const std::array<FitReport, kNumJoints>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t j = 0; j < kNumJoints; ++j) {
    const auto& r = reports[j];
    nlohmann::json se = nlohmann::json::array();
    for (double v : r.std_errors) {
      if (std::isnan(v)) {
        se.push_back(nullptr);
      } else {
        se.push_back(v);
      }
    }
    arr.push_back({{"joint_id", j},
                   {"k1", coeffs[j].k1},
                   {"k2", coeffs[j].k2},
                   {"k3", coeffs[j].k3},
                   {"k4", coeffs[j].k4},
                   {"R", coeffs[j].R},
                   {"std_errors", se},
                   {"residual_rms", r.residual_rms},
                   {"rows", r.n_rows},
                   {"impact_rows", r.impact_rows},
                   {"skipped_gaps", r.skipped_gaps},
                   {"k4_unidentified", r.k4_unidentified}});
  }
  return arr.dump(2);
}

}  // namespace hydrodyn
