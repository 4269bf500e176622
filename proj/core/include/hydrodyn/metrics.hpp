#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hydrodyn/actuator_model.hpp"
#include "hydrodyn/nn.hpp"
#include "hydrodyn/trajectory_log.hpp"

namespace hydrodyn {

/// Scoring protocol: plain RMSE over everything, plus RMSE/MAPE restricted
/// to samples whose |actual| clears the threshold (50 N*m by default; small
/// torques blow up percentage errors). Thresholded fields are empty when no
/// sample qualifies.
struct MetricsReport {
  double rmse_all = 0.0;
  std::optional<double> rmse_thresh;
  std::optional<double> mape_thresh;  // percent
  std::size_t n_total = 0;
  std::size_t n_thresh = 0;
  std::string model;
  std::string dataset;
};

MetricsReport thresholded_metrics(std::span<const double> pred,
                                  std::span<const double> actual,
                                  double thresh = 50.0);

struct Histogram2D {
  std::vector<double> x_edges;           // nx + 1
  std::vector<double> y_edges;           // ny + 1
  std::vector<std::uint64_t> counts;     // nx * ny, row-major in x
  std::size_t nx = 0, ny = 0;

  std::uint64_t total() const;
};

/// Share of samples where torque opposes the position command, plus the 2D
/// (q_des - q, tau) density over all joints. Bin ranges are symmetric about
/// zero and padded 5% beyond the data extremes.
struct QuadrantStats {
  double opposite_fraction = 0.0;
  std::size_t n_total = 0;
  Histogram2D hist;
};

QuadrantStats quadrant_stats(const TrajectoryLog& log, std::size_t bins = 64);

/// CSV rows (bin_x, bin_y, count) with bin centers, for external plotting.
std::string histogram_to_csv(const Histogram2D& hist);
std::string quadrant_stats_to_json(const QuadrantStats& stats);

/// A scoreable model: maps a log to next-step torque predictions, element t
/// predicting the 12 torques at row t+1.
struct LabeledPredictor {
  std::string label;
  std::function<std::vector<std::array<double, kNumJoints>>(
      const TrajectoryLog&)>
      predict;
};

LabeledPredictor make_analytic_predictor(std::string label,
                                         const JointCoeffs& coeffs);
LabeledPredictor make_net_predictor(std::string label, NetParams net);

struct LabeledLog {
  std::string label;
  const TrajectoryLog* log = nullptr;
};

struct EvalCell {
  MetricsReport metrics;
  bool failed = false;
  std::string error;
};

/// Models x datasets score matrix. Cells are independent and scored in
/// parallel (HYDRODYN_THREADS caps the workers); a predictor failure marks
/// its cell and the run continues.
struct EvalReport {
  std::vector<std::string> model_labels;
  std::vector<std::string> dataset_labels;
  std::vector<EvalCell> cells;  // row-major: model * n_datasets + dataset

  const EvalCell& cell(std::size_t model, std::size_t dataset) const {
    return cells[model * dataset_labels.size() + dataset];
  }
};

EvalReport table3_report(std::span<const LabeledPredictor> models,
                         std::span<const LabeledLog> logs,
                         double thresh = 50.0);

std::string eval_report_to_text(const EvalReport& report);
std::string eval_report_to_csv(const EvalReport& report);

/// Pooled (pred, actual) pairs over all joints for one predictor on one log.
void collect_pairs(const LabeledPredictor& model, const TrajectoryLog& log,
                   std::vector<double>& pred, std::vector<double>& actual);

}  // namespace hydrodyn
