#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hydrodyn/trajectory_log.hpp"

namespace hydrodyn {

enum class Arch { mlp, lstm, gru };

std::string arch_name(Arch a);
Arch arch_from_name(const std::string& name);

inline constexpr int kNetInput = 48;
inline constexpr int kNetHidden = 64;
inline constexpr int kNetOutput = 12;
inline constexpr double kTorqueFeatureScale = 0.01;  // tau conditioning

/// Dense network parameters for the 48-64-12 baselines. The recurrent archs
/// stack their gate blocks row-wise in Wx/Wh/b: LSTM [i; f; g; o], GRU
/// [z; r; n]. For the MLP, Wx/b are the hidden layer and Wh is empty.
struct NetParams {
  Arch arch = Arch::mlp;
  Eigen::MatrixXd Wx;  // gates*hidden x input
  Eigen::MatrixXd Wh;  // gates*hidden x hidden (empty for MLP)
  Eigen::VectorXd b;   // gates*hidden
  Eigen::MatrixXd W2;  // output x hidden
  Eigen::VectorXd b2;  // output

  std::size_t parameter_count() const;
  bool shapes_valid() const;
};

/// Hidden (and cell, for LSTM) state threaded through recurrent calls.
struct RecurrentState {
  Eigen::VectorXd h;
  Eigen::VectorXd c;

  static RecurrentState zero();
};

/// Small random weights, deterministic in the seed.
NetParams init_net(Arch arch, std::uint64_t seed);

/// Single-frame forward pass. frame must be a 48-vector; returns the
/// 12-vector of next-step torques. MLP ignores and does not touch state.
Eigen::VectorXd forward(const NetParams& net, const Eigen::VectorXd& frame,
                        RecurrentState& state);

/// 48 features for log row t, joint-major: for each joint
/// [q_des - q, tau/100, qd, previous-step q_des - q]. Row 0 reuses its own
/// position error as the previous one.
Eigen::VectorXd build_feature_frame(const TrajectoryLog& log, std::size_t t);

/// Feature/target matrices over a whole log: column t holds the frame at t
/// and the 12 torques at t+1 (so N = log.size() - 1).
struct Dataset {
  Eigen::MatrixXd X;  // 48 x N, time-ordered
  Eigen::MatrixXd Y;  // 12 x N
};

Dataset build_dataset(const TrajectoryLog& log);

struct TrainConfig {
  int iterations = 1000;
  double learning_rate = 0.05;
  double momentum = 0.9;
  int tbptt_window = 50;  // recurrent archs only
  std::uint64_t seed = 0; // weight init
};

struct TrainResult {
  double initial_loss = 0.0;
  double final_loss = 0.0;
};

/// Full-batch gradient descent with momentum on the MSE loss. Recurrent
/// archs are trained by truncated BPTT: the sequence is cut into windows of
/// tbptt_window frames (remainder dropped), each starting from zero state,
/// and all windows are processed as one batch per iteration. Deterministic
/// for a given seed. Throws DivergedError naming the iteration if the loss
/// goes non-finite.
TrainResult train(NetParams& net, const Dataset& data, const TrainConfig& cfg);

/// Parameter gradients in the same layout as NetParams.
struct Gradients {
  Eigen::MatrixXd Wx, Wh, W2;
  Eigen::VectorXd b, b2;
};

/// Analytic gradient of the MSE loss over the given frames. For recurrent
/// archs the frames form one sequence processed from zero state.
Gradients compute_gradients(const NetParams& net, const Eigen::MatrixXd& X,
                            const Eigen::MatrixXd& Y);

/// MSE loss matching compute_gradients.
double compute_loss(const NetParams& net, const Eigen::MatrixXd& X,
                    const Eigen::MatrixXd& Y);

/// Max relative error between analytic and central finite-difference
/// gradients over every parameter.
double gradient_check(const NetParams& net, const Eigen::MatrixXd& X,
                      const Eigen::MatrixXd& Y, double eps = 1e-5);

/// Stateful evaluation over a log: element t predicts the 12 torques at
/// t+1 from the frame at t (recurrent state threaded across the whole log).
std::vector<std::array<double, kNumJoints>> predict_log(
    const NetParams& net, const TrajectoryLog& log);

/// Flat binary weights file: little-endian uint32 header length, a JSON
/// header naming arch and tensor shapes, then the tensors as column-major
/// float64 in order Wx, Wh, b, W2, b2.
void save_net(const NetParams& net, const std::string& path);
NetParams load_net(const std::string& path);

}  // namespace hydrodyn
