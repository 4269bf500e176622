#include "hydrodyn/actuator_model.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace hydrodyn {

namespace {

void require_finite(std::initializer_list<double> vals, const char* what) {
  for (double v : vals) {
    if (!std::isfinite(v)) {
      throw std::domain_error(std::string(what) + ": non-finite input");
    }
  }
}

void require_valid_coeffs(const ActuatorCoeffs& c) {
  if (!c.valid()) {
    throw std::domain_error("ActuatorCoeffs out of range (need R>0, k1>=0, "
                            "0<=k2<1, k3>=0, k4>=0, all finite)");
  }
}

}  // namespace

double predict_force_delta(const ActuatorCoeffs& coeffs, double f, double x,
                           double x_des, double x_dot) {
  require_valid_coeffs(coeffs);
  require_finite({f, x, x_des, x_dot}, "predict_force_delta");
  return detail::force_delta_kernel(coeffs, f, x_des - x, x_dot);
}

double predict_torque_next(const ActuatorCoeffs& coeffs,
                           const JointSnapshot& s) {
  require_valid_coeffs(coeffs);
  require_finite({s.q, s.q_des, s.qd, s.tau}, "predict_torque_next");
  return detail::torque_next_kernel(coeffs, s);
}

std::array<double, kNumJoints> predict_batch12(
    std::span<const ActuatorCoeffs> coeffs,
    std::span<const JointSnapshot> states) {
  if (coeffs.size() != kNumJoints || states.size() != kNumJoints) {
    throw std::invalid_argument("predict_batch12: both spans must have 12 "
                                "elements");
  }
  std::array<double, kNumJoints> out;
  for (std::size_t i = 0; i < kNumJoints; ++i) {
    out[i] = detail::torque_next_kernel(coeffs[i], states[i]);
  }
  return out;
}

double impact_correction(const ImpactParams& p, double f, double dx) {
  if (!p.valid()) {
    throw std::domain_error("ImpactParams must be strictly positive");
  }
  if (f * dx >= 0.0) return 0.0;
  return (p.B * p.A * p.A) / (p.V * p.f_max) * f * dx;
}

std::string coeffs_to_json(const JointCoeffs& coeffs) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    const auto& c = coeffs[j];
    arr.push_back({{"joint_id", j},
                   {"k1", c.k1},
                   {"k2", c.k2},
                   {"k3", c.k3},
                   {"k4", c.k4},
                   {"R", c.R}});
  }
  return arr.dump(2);
}

JointCoeffs coeffs_from_json(const std::string& text) {
  nlohmann::json arr = nlohmann::json::parse(text);
  if (!arr.is_array() || arr.size() != kNumJoints) {
    throw std::invalid_argument("coefficient JSON must be an array of 12");
  }
  JointCoeffs out;
  std::array<bool, kNumJoints> seen{};
  for (const auto& item : arr) {
    const std::size_t id = item.at("joint_id").get<std::size_t>();
    if (id >= kNumJoints || seen[id]) {
      throw std::invalid_argument("coefficient JSON: bad or duplicate "
                                  "joint_id " + std::to_string(id));
    }
    seen[id] = true;
    ActuatorCoeffs& c = out[id];
    c.k1 = item.at("k1").get<double>();
    c.k2 = item.at("k2").get<double>();
    c.k3 = item.at("k3").get<double>();
    c.k4 = item.at("k4").get<double>();
    c.R = item.at("R").get<double>();
  }
  return out;
}

void save_coeffs(const JointCoeffs& coeffs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  out << coeffs_to_json(coeffs) << "\n";
}

JointCoeffs load_coeffs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return coeffs_from_json(text);
}

}  // namespace hydrodyn
