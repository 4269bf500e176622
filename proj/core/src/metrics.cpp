#include "hydrodyn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "parallel.hpp"

namespace hydrodyn {

MetricsReport thresholded_metrics(std::span<const double> pred,
                                  std::span<const double> actual,
                                  double thresh) {
  if (pred.size() != actual.size() || pred.empty()) {
    throw std::invalid_argument(
        "thresholded_metrics: sequences must be non-empty and equal length");
  }
  MetricsReport rep;
  rep.n_total = pred.size();

  double sq_all = 0.0, sq_thresh = 0.0, ape = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double err = pred[i] - actual[i];
    sq_all += err * err;
    if (std::abs(actual[i]) > thresh) {
      ++rep.n_thresh;
      sq_thresh += err * err;
      ape += std::abs(err) / std::abs(actual[i]);
    }
  }
  rep.rmse_all = std::sqrt(sq_all / static_cast<double>(rep.n_total));
  if (rep.n_thresh > 0) {
    rep.rmse_thresh = std::sqrt(sq_thresh / static_cast<double>(rep.n_thresh));
    rep.mape_thresh = 100.0 * ape / static_cast<double>(rep.n_thresh);
  }
  return rep;
}

std::uint64_t Histogram2D::total() const {
  std::uint64_t sum = 0;
  for (std::uint64_t c : counts) sum += c;
  return sum;
}

QuadrantStats quadrant_stats(const TrajectoryLog& log, std::size_t bins) {
  if (log.size() == 0) {
    throw std::invalid_argument("quadrant_stats: empty log");
  }
  if (bins == 0) throw std::invalid_argument("quadrant_stats: bins must be > 0");

  QuadrantStats stats;
  double max_dq = 0.0, max_tau = 0.0;
  std::size_t opposite = 0;
  for (const JointSeries& s : log.joints) {
    for (std::size_t i = 0; i < log.size(); ++i) {
      const double dq = s.q_des[i] - s.q[i];
      max_dq = std::max(max_dq, std::abs(dq));
      max_tau = std::max(max_tau, std::abs(s.tau[i]));
      if (s.tau[i] * dq < 0.0) ++opposite;
    }
  }
  stats.n_total = log.size() * kNumJoints;
  stats.opposite_fraction =
      static_cast<double>(opposite) / static_cast<double>(stats.n_total);

  const double rx = max_dq > 0 ? 1.05 * max_dq : 1.0;
  const double ry = max_tau > 0 ? 1.05 * max_tau : 1.0;
  Histogram2D& h = stats.hist;
  h.nx = h.ny = bins;
  h.x_edges.resize(bins + 1);
  h.y_edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    h.x_edges[i] = -rx + 2.0 * rx * static_cast<double>(i) / bins;
    h.y_edges[i] = -ry + 2.0 * ry * static_cast<double>(i) / bins;
  }
  h.counts.assign(bins * bins, 0);

  const auto bin_of = [bins](double v, double r) {
    const double frac = (v + r) / (2.0 * r);
    const auto idx = static_cast<std::ptrdiff_t>(frac * static_cast<double>(bins));
    return static_cast<std::size_t>(
        std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(bins) - 1));
  };
  for (const JointSeries& s : log.joints) {
    for (std::size_t i = 0; i < log.size(); ++i) {
      const std::size_t bx = bin_of(s.q_des[i] - s.q[i], rx);
      const std::size_t by = bin_of(s.tau[i], ry);
      ++h.counts[bx * bins + by];
    }
  }
  return stats;
}

std::string histogram_to_csv(const Histogram2D& hist) {
  std::string out = "bin_x,bin_y,count\n";
  char line[96];
  for (std::size_t ix = 0; ix < hist.nx; ++ix) {
    const double cx = 0.5 * (hist.x_edges[ix] + hist.x_edges[ix + 1]);
    for (std::size_t iy = 0; iy < hist.ny; ++iy) {
      const double cy = 0.5 * (hist.y_edges[iy] + hist.y_edges[iy + 1]);
      const int n = std::snprintf(line, sizeof(line), "%.17g,%.17g,%llu\n", cx,
                                  cy,
                                  static_cast<unsigned long long>(
                                      hist.counts[ix * hist.ny + iy]));
      out.append(line, static_cast<std::size_t>(n));
    }
  }
  return out;
}

std::string quadrant_stats_to_json(const QuadrantStats& stats) {
  nlohmann::json j = {{"opposite_fraction", stats.opposite_fraction},
                      {"n_total", stats.n_total},
                      {"bins_x", stats.hist.nx},
                      {"bins_y", stats.hist.ny},
                      {"x_edges", stats.hist.x_edges},
                      {"y_edges", stats.hist.y_edges}};
  return j.dump(2);
}

LabeledPredictor make_analytic_predictor(std::string label,
                                         const JointCoeffs& coeffs) {
  return {std::move(label), [coeffs](const TrajectoryLog& log) {
            std::vector<std::array<double, kNumJoints>> out;
            if (log.size() < 2) return out;
            out.resize(log.size() - 1);
            for (std::size_t t = 0; t + 1 < log.size(); ++t) {
              for (std::size_t j = 0; j < kNumJoints; ++j) {
                out[t][j] = predict_torque_next(coeffs[j], log.snapshot(j, t));
              }
            }
            return out;
          }};
}

LabeledPredictor make_net_predictor(std::string label, NetParams net) {
  return {std::move(label), [net = std::move(net)](const TrajectoryLog& log) {
            return predict_log(net, log);
          }};
}

void collect_pairs(const LabeledPredictor& model, const TrajectoryLog& log,
                   std::vector<double>& pred, std::vector<double>& actual) {
  pred.clear();
  actual.clear();
  const auto predictions = model.predict(log);
  if (predictions.size() + 1 != log.size()) {
    throw std::runtime_error("predictor '" + model.label +
                             "' returned wrong number of rows");
  }
  pred.reserve(predictions.size() * kNumJoints);
  actual.reserve(predictions.size() * kNumJoints);
  for (std::size_t t = 0; t < predictions.size(); ++t) {
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      pred.push_back(predictions[t][j]);
      actual.push_back(log.joints[j].tau[t + 1]);
    }
  }
}

EvalReport table3_report(std::span<const LabeledPredictor> models,
                         std::span<const LabeledLog> logs, double thresh) {
  EvalReport report;
  for (const auto& m : models) report.model_labels.push_back(m.label);
  for (const auto& l : logs) report.dataset_labels.push_back(l.label);
  report.cells.resize(models.size() * logs.size());

  detail::parallel_for(report.cells.size(), [&](std::size_t idx) {
    const std::size_t mi = idx / logs.size();
    const std::size_t di = idx % logs.size();
    EvalCell& cell = report.cells[idx];
    try {
      std::vector<double> pred, actual;
      collect_pairs(models[mi], *logs[di].log, pred, actual);
      cell.metrics = thresholded_metrics(pred, actual, thresh);
      cell.metrics.model = models[mi].label;
      cell.metrics.dataset = logs[di].label;
    } catch (const std::exception& e) {
      cell.failed = true;
      cell.error = e.what();
    }
  });
  return report;
}

std::string eval_report_to_text(const EvalReport& report) {
  std::ostringstream out;
  const std::size_t nd = report.dataset_labels.size();

  out << "model           ";
  for (const auto& d : report.dataset_labels) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "| %-28s", d.c_str());
    out << buf;
  }
  out << "\n                ";
  for (std::size_t i = 0; i < nd; ++i) {
    out << "| RMSE     RMSE>50  MAPE>50% ";
  }
  out << "\n";

  for (std::size_t mi = 0; mi < report.model_labels.size(); ++mi) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%-16s", report.model_labels[mi].c_str());
    out << buf;
    for (std::size_t di = 0; di < nd; ++di) {
      const EvalCell& c = report.cell(mi, di);
      if (c.failed) {
        std::snprintf(buf, sizeof(buf), "| %-28s", "failed");
        out << buf;
        continue;
      }
      const auto opt = [](const std::optional<double>& v, char* b,
                          std::size_t n) {
        if (v) {
          std::snprintf(b, n, "%8.3f", *v);
        } else {
          std::snprintf(b, n, "%8s", "undef");
        }
      };
      char t1[16], t2[16];
      opt(c.metrics.rmse_thresh, t1, sizeof(t1));
      opt(c.metrics.mape_thresh, t2, sizeof(t2));
      std::snprintf(buf, sizeof(buf), "| %8.3f %s %s ", c.metrics.rmse_all, t1,
                    t2);
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

std::string eval_report_to_csv(const EvalReport& report) {
  std::string out = "model,dataset,rmse,rmse_thresh,mape_thresh,n_total,"
                    "n_thresh,status\n";
  char buf[256];
  for (std::size_t mi = 0; mi < report.model_labels.size(); ++mi) {
    for (std::size_t di = 0; di < report.dataset_labels.size(); ++di) {
      const EvalCell& c = report.cell(mi, di);
      if (c.failed) {
        std::snprintf(buf, sizeof(buf), "%s,%s,,,,,,failed\n",
                      report.model_labels[mi].c_str(),
                      report.dataset_labels[di].c_str());
        out += buf;
        continue;
      }
      std::string t1 = c.metrics.rmse_thresh
                           ? std::to_string(*c.metrics.rmse_thresh)
                           : "undefined";
      std::string t2 = c.metrics.mape_thresh
                           ? std::to_string(*c.metrics.mape_thresh)
                           : "undefined";
      std::snprintf(buf, sizeof(buf), "%s,%s,%.10g,%s,%s,%zu,%zu,ok\n",
                    report.model_labels[mi].c_str(),
                    report.dataset_labels[di].c_str(), c.metrics.rmse_all,
                    t1.c_str(), t2.c_str(), c.metrics.n_total,
                    c.metrics.n_thresh);
      out += buf;
    }
  }
  return out;
}

}  // namespace hydrodyn
