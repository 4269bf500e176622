#include "hydrodyn/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "hydrodyn/errors.hpp"

namespace hydrodyn {

namespace {

int gate_blocks(Arch a) {
  switch (a) {
    case Arch::mlp: return 1;
    case Arch::lstm: return 4;
    case Arch::gru: return 3;
  }
  return 1;
}

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) {
  return ((-z.array()).exp() + 1.0).inverse().matrix();
}

Eigen::MatrixXd tanh_m(const Eigen::MatrixXd& z) {
  return z.array().tanh().matrix();
}

struct LstmStepCache {
  Eigen::MatrixXd x, h_prev, c_prev, i, f, g, o, c, hc, h;
};

struct GruStepCache {
  Eigen::MatrixXd x, h_prev, z, r, rh, n, h;
};

// One training sequence batch: xs[t] is 48 x B, ys[t] is 12 x B.
struct SeqData {
  std::vector<Eigen::MatrixXd> xs, ys;
  Eigen::Index total_cols = 0;
};

void zero_like(const NetParams& net, Gradients& g) {
  g.Wx = Eigen::MatrixXd::Zero(net.Wx.rows(), net.Wx.cols());
  g.Wh = Eigen::MatrixXd::Zero(net.Wh.rows(), net.Wh.cols());
  g.b = Eigen::VectorXd::Zero(net.b.size());
  g.W2 = Eigen::MatrixXd::Zero(net.W2.rows(), net.W2.cols());
  g.b2 = Eigen::VectorXd::Zero(net.b2.size());
}

double mlp_forward_backward(const NetParams& net, const Eigen::MatrixXd& X,
                            const Eigen::MatrixXd& Y, Gradients* grads) {
  const Eigen::Index n = X.cols();
  const double denom = static_cast<double>(Y.size());
  Eigen::MatrixXd H = tanh_m((net.Wx * X).colwise() + net.b);
  Eigen::MatrixXd Yp = (net.W2 * H).colwise() + net.b2;
  Eigen::MatrixXd E = Yp - Y;
  const double loss = E.squaredNorm() / denom;
  if (grads) {
    zero_like(net, *grads);
    Eigen::MatrixXd dY = 2.0 * E / denom;
    grads->W2 = dY * H.transpose();
    grads->b2 = dY.rowwise().sum();
    Eigen::MatrixXd dH = net.W2.transpose() * dY;
    Eigen::MatrixXd dZ =
        (dH.array() * (1.0 - H.array().square())).matrix();
    grads->Wx = dZ * X.transpose();
    grads->b = dZ.rowwise().sum();
  }
  (void)n;
  return loss;
}

double lstm_forward_backward(const NetParams& net, const SeqData& seq,
                             Gradients* grads) {
  const int H = kNetHidden;
  const Eigen::Index T = static_cast<Eigen::Index>(seq.xs.size());
  const double denom = static_cast<double>(kNetOutput * seq.total_cols);

  std::vector<LstmStepCache> cache(T);
  std::vector<Eigen::MatrixXd> dys(T);
  double loss = 0.0;

  const Eigen::Index B = seq.xs[0].cols();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(H, B);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(H, B);

  for (Eigen::Index t = 0; t < T; ++t) {
    LstmStepCache& s = cache[t];
    s.x = seq.xs[t];
    s.h_prev = h;
    s.c_prev = c;
    Eigen::MatrixXd z = (net.Wx * s.x + net.Wh * h).colwise() + net.b;
    s.i = sigmoid(z.topRows(H));
    s.f = sigmoid(z.middleRows(H, H));
    s.g = tanh_m(z.middleRows(2 * H, H));
    s.o = sigmoid(z.middleRows(3 * H, H));
    s.c = s.f.cwiseProduct(c) + s.i.cwiseProduct(s.g);
    s.hc = tanh_m(s.c);
    s.h = s.o.cwiseProduct(s.hc);
    h = s.h;
    c = s.c;

    Eigen::MatrixXd yp = (net.W2 * h).colwise() + net.b2;
    Eigen::MatrixXd e = yp - seq.ys[t];
    loss += e.squaredNorm() / denom;
    if (grads) dys[t] = 2.0 * e / denom;
  }
  if (!grads) return loss;

  zero_like(net, *grads);
  Eigen::MatrixXd dh_next = Eigen::MatrixXd::Zero(H, B);
  Eigen::MatrixXd dc_next = Eigen::MatrixXd::Zero(H, B);
  for (Eigen::Index t = T - 1; t >= 0; --t) {
    const LstmStepCache& s = cache[t];
    grads->W2 += dys[t] * s.h.transpose();
    grads->b2 += dys[t].rowwise().sum();

    Eigen::MatrixXd dh = net.W2.transpose() * dys[t] + dh_next;
    Eigen::MatrixXd do_ = dh.cwiseProduct(s.hc);
    Eigen::MatrixXd dc =
        (dh.cwiseProduct(s.o).array() * (1.0 - s.hc.array().square()))
            .matrix() +
        dc_next;
    Eigen::MatrixXd di = dc.cwiseProduct(s.g);
    Eigen::MatrixXd df = dc.cwiseProduct(s.c_prev);
    Eigen::MatrixXd dg = dc.cwiseProduct(s.i);
    dc_next = dc.cwiseProduct(s.f);

    Eigen::MatrixXd dz(4 * H, B);
    dz.topRows(H) = (di.array() * s.i.array() * (1.0 - s.i.array())).matrix();
    dz.middleRows(H, H) =
        (df.array() * s.f.array() * (1.0 - s.f.array())).matrix();
    dz.middleRows(2 * H, H) =
        (dg.array() * (1.0 - s.g.array().square())).matrix();
    dz.middleRows(3 * H, H) =
        (do_.array() * s.o.array() * (1.0 - s.o.array())).matrix();

    grads->Wx += dz * s.x.transpose();
    grads->Wh += dz * s.h_prev.transpose();
    grads->b += dz.rowwise().sum();
    dh_next = net.Wh.transpose() * dz;
  }
  return loss;
}

double gru_forward_backward(const NetParams& net, const SeqData& seq,
                            Gradients* grads) {
  const int H = kNetHidden;
  const Eigen::Index T = static_cast<Eigen::Index>(seq.xs.size());
  const double denom = static_cast<double>(kNetOutput * seq.total_cols);

  std::vector<GruStepCache> cache(T);
  std::vector<Eigen::MatrixXd> dys(T);
  double loss = 0.0;

  const Eigen::Index B = seq.xs[0].cols();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(H, B);

  for (Eigen::Index t = 0; t < T; ++t) {
    GruStepCache& s = cache[t];
    s.x = seq.xs[t];
    s.h_prev = h;
    Eigen::MatrixXd zr = (net.Wx.topRows(2 * H) * s.x +
                          net.Wh.topRows(2 * H) * h)
                             .colwise() +
                         net.b.head(2 * H);
    s.z = sigmoid(zr.topRows(H));
    s.r = sigmoid(zr.bottomRows(H));
    s.rh = s.r.cwiseProduct(h);
    Eigen::MatrixXd npre = (net.Wx.bottomRows(H) * s.x +
                            net.Wh.bottomRows(H) * s.rh)
                               .colwise() +
                           net.b.tail(H);
    s.n = tanh_m(npre);
    s.h = (1.0 - s.z.array()).matrix().cwiseProduct(s.n) +
          s.z.cwiseProduct(h);
    h = s.h;

    Eigen::MatrixXd yp = (net.W2 * h).colwise() + net.b2;
    Eigen::MatrixXd e = yp - seq.ys[t];
    loss += e.squaredNorm() / denom;
    if (grads) dys[t] = 2.0 * e / denom;
  }
  if (!grads) return loss;

  zero_like(net, *grads);
  Eigen::MatrixXd dh_next = Eigen::MatrixXd::Zero(H, B);
  for (Eigen::Index t = T - 1; t >= 0; --t) {
    const GruStepCache& s = cache[t];
    grads->W2 += dys[t] * s.h.transpose();
    grads->b2 += dys[t].rowwise().sum();

    Eigen::MatrixXd dh = net.W2.transpose() * dys[t] + dh_next;
    Eigen::MatrixXd dz_gate = dh.cwiseProduct(s.h_prev - s.n);
    Eigen::MatrixXd dn =
        dh.cwiseProduct((1.0 - s.z.array()).matrix());
    Eigen::MatrixXd dh_prev = dh.cwiseProduct(s.z);

    Eigen::MatrixXd dnpre = (dn.array() * (1.0 - s.n.array().square())).matrix();
    grads->Wx.bottomRows(H) += dnpre * s.x.transpose();
    grads->Wh.bottomRows(H) += dnpre * s.rh.transpose();
    grads->b.tail(H) += dnpre.rowwise().sum();
    Eigen::MatrixXd drh = net.Wh.bottomRows(H).transpose() * dnpre;
    Eigen::MatrixXd dr = drh.cwiseProduct(s.h_prev);
    dh_prev += drh.cwiseProduct(s.r);

    Eigen::MatrixXd dzpre =
        (dz_gate.array() * s.z.array() * (1.0 - s.z.array())).matrix();
    Eigen::MatrixXd drpre =
        (dr.array() * s.r.array() * (1.0 - s.r.array())).matrix();
    grads->Wx.topRows(H) += dzpre * s.x.transpose();
    grads->Wh.topRows(H) += dzpre * s.h_prev.transpose();
    grads->b.head(H) += dzpre.rowwise().sum();
    grads->Wx.middleRows(H, H) += drpre * s.x.transpose();
    grads->Wh.middleRows(H, H) += drpre * s.h_prev.transpose();
    grads->b.segment(H, H) += drpre.rowwise().sum();
    dh_prev += net.Wh.topRows(H).transpose() * dzpre;
    dh_prev += net.Wh.middleRows(H, H).transpose() * drpre;

    dh_next = dh_prev;
  }
  return loss;
}

SeqData make_windows(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                     int window) {
  const Eigen::Index n = X.cols();
  const Eigen::Index w = std::min<Eigen::Index>(window, n);
  const Eigen::Index n_win = n / w;

  SeqData seq;
  seq.xs.resize(w);
  seq.ys.resize(w);
  seq.total_cols = n_win * w;
  for (Eigen::Index t = 0; t < w; ++t) {
    seq.xs[t].resize(X.rows(), n_win);
    seq.ys[t].resize(Y.rows(), n_win);
    for (Eigen::Index b = 0; b < n_win; ++b) {
      seq.xs[t].col(b) = X.col(b * w + t);
      seq.ys[t].col(b) = Y.col(b * w + t);
    }
  }
  return seq;
}

SeqData make_single_sequence(const Eigen::MatrixXd& X,
                             const Eigen::MatrixXd& Y) {
  SeqData seq;
  const Eigen::Index n = X.cols();
  seq.xs.resize(n);
  seq.ys.resize(n);
  seq.total_cols = n;
  for (Eigen::Index t = 0; t < n; ++t) {
    seq.xs[t] = X.col(t);
    seq.ys[t] = Y.col(t);
  }
  return seq;
}

double seq_loss(const NetParams& net, const SeqData& seq, Gradients* grads) {
  switch (net.arch) {
    case Arch::lstm: return lstm_forward_backward(net, seq, grads);
    case Arch::gru: return gru_forward_backward(net, seq, grads);
    case Arch::mlp: break;
  }
  throw std::logic_error("seq_loss: not a recurrent arch");
}

}  // namespace

std::string arch_name(Arch a) {
  switch (a) {
    case Arch::mlp: return "mlp";
    case Arch::lstm: return "lstm";
    case Arch::gru: return "gru";
  }
  return "mlp";
}

Arch arch_from_name(const std::string& name) {
  if (name == "mlp") return Arch::mlp;
  if (name == "lstm") return Arch::lstm;
  if (name == "gru") return Arch::gru;
  throw std::invalid_argument("unknown arch '" + name + "'");
}

std::size_t NetParams::parameter_count() const {
  return static_cast<std::size_t>(Wx.size() + Wh.size() + b.size() +
                                  W2.size() + b2.size());
}

bool NetParams::shapes_valid() const {
  const int gh = gate_blocks(arch) * kNetHidden;
  const bool wh_ok = arch == Arch::mlp
                         ? Wh.size() == 0
                         : (Wh.rows() == gh && Wh.cols() == kNetHidden);
  return Wx.rows() == gh && Wx.cols() == kNetInput && wh_ok &&
         b.size() == gh && W2.rows() == kNetOutput &&
         W2.cols() == kNetHidden && b2.size() == kNetOutput;
}

RecurrentState RecurrentState::zero() {
  RecurrentState s;
  s.h = Eigen::VectorXd::Zero(kNetHidden);
  s.c = Eigen::VectorXd::Zero(kNetHidden);
  return s;
}

NetParams init_net(Arch arch, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto fill = [&rng](Eigen::MatrixXd& m, double r) {
    std::uniform_real_distribution<double> uni(-r, r);
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, c) = uni(rng);
    }
  };

  const int gh = gate_blocks(arch) * kNetHidden;
  NetParams net;
  net.arch = arch;
  net.Wx.resize(gh, kNetInput);
  fill(net.Wx, 1.0 / std::sqrt(static_cast<double>(kNetInput)));
  if (arch == Arch::mlp) {
    net.Wh.resize(0, 0);
  } else {
    net.Wh.resize(gh, kNetHidden);
    fill(net.Wh, 1.0 / std::sqrt(static_cast<double>(kNetHidden)));
  }
  net.b = Eigen::VectorXd::Zero(gh);
  net.W2.resize(kNetOutput, kNetHidden);
  fill(net.W2, 1.0 / std::sqrt(static_cast<double>(kNetHidden)));
  net.b2 = Eigen::VectorXd::Zero(kNetOutput);
  return net;
}

Eigen::VectorXd forward(const NetParams& net, const Eigen::VectorXd& frame,
                        RecurrentState& state) {
  if (!net.shapes_valid() || frame.size() != kNetInput) {
    throw std::invalid_argument("forward: shape mismatch");
  }
  const int H = kNetHidden;
  switch (net.arch) {
    case Arch::mlp: {
      const Eigen::VectorXd h = (net.Wx * frame + net.b).array().tanh();
      return net.W2 * h + net.b2;
    }
    case Arch::lstm: {
      if (state.h.size() != H || state.c.size() != H) {
        throw std::invalid_argument("forward: recurrent state shape mismatch");
      }
      const Eigen::VectorXd z = net.Wx * frame + net.Wh * state.h + net.b;
      const Eigen::ArrayXd i = 1.0 / (1.0 + (-z.head(H).array()).exp());
      const Eigen::ArrayXd f = 1.0 / (1.0 + (-z.segment(H, H).array()).exp());
      const Eigen::ArrayXd g = z.segment(2 * H, H).array().tanh();
      const Eigen::ArrayXd o = 1.0 / (1.0 + (-z.tail(H).array()).exp());
      state.c = (f * state.c.array() + i * g).matrix();
      state.h = (o * state.c.array().tanh()).matrix();
      return net.W2 * state.h + net.b2;
    }
    case Arch::gru: {
      if (state.h.size() != H) {
        throw std::invalid_argument("forward: recurrent state shape mismatch");
      }
      const Eigen::VectorXd zr = net.Wx.topRows(2 * H) * frame +
                                 net.Wh.topRows(2 * H) * state.h +
                                 net.b.head(2 * H);
      const Eigen::ArrayXd z = 1.0 / (1.0 + (-zr.head(H).array()).exp());
      const Eigen::ArrayXd r = 1.0 / (1.0 + (-zr.tail(H).array()).exp());
      const Eigen::VectorXd rh = (r * state.h.array()).matrix();
      const Eigen::ArrayXd n = (net.Wx.bottomRows(H) * frame +
                                net.Wh.bottomRows(H) * rh + net.b.tail(H))
                                   .array()
                                   .tanh();
      state.h = ((1.0 - z) * n + z * state.h.array()).matrix();
      return net.W2 * state.h + net.b2;
    }
  }
  throw std::logic_error("forward: unknown arch");
}

Eigen::VectorXd build_feature_frame(const TrajectoryLog& log, std::size_t t) {
  if (t >= log.size()) {
    throw std::invalid_argument("build_feature_frame: row out of range");
  }
  Eigen::VectorXd frame(kNetInput);
  const std::size_t prev = t == 0 ? 0 : t - 1;
  for (std::size_t j = 0; j < kNumJoints; ++j) {
    const JointSeries& s = log.joints[j];
    frame(4 * j + 0) = s.q_des[t] - s.q[t];
    frame(4 * j + 1) = s.tau[t] * kTorqueFeatureScale;
    frame(4 * j + 2) = s.qd[t];
    frame(4 * j + 3) = s.q_des[prev] - s.q[prev];
  }
  return frame;
}

Dataset build_dataset(const TrajectoryLog& log) {
  if (log.size() < 2) {
    throw std::invalid_argument("build_dataset: log needs at least 2 rows");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(log.size()) - 1;
  Dataset data;
  data.X.resize(kNetInput, n);
  data.Y.resize(kNetOutput, n);
  for (Eigen::Index t = 0; t < n; ++t) {
    data.X.col(t) = build_feature_frame(log, static_cast<std::size_t>(t));
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      data.Y(static_cast<Eigen::Index>(j), t) =
          log.joints[j].tau[static_cast<std::size_t>(t) + 1];
    }
  }
  return data;
}

double compute_loss(const NetParams& net, const Eigen::MatrixXd& X,
                    const Eigen::MatrixXd& Y) {
  if (net.arch == Arch::mlp) {
    return mlp_forward_backward(net, X, Y, nullptr);
  }
  const SeqData seq = make_single_sequence(X, Y);
  return seq_loss(net, seq, nullptr);
}

Gradients compute_gradients(const NetParams& net, const Eigen::MatrixXd& X,
                            const Eigen::MatrixXd& Y) {
  Gradients grads;
  if (net.arch == Arch::mlp) {
    mlp_forward_backward(net, X, Y, &grads);
    return grads;
  }
  const SeqData seq = make_single_sequence(X, Y);
  seq_loss(net, seq, &grads);
  return grads;
}

TrainResult train(NetParams& net, const Dataset& data, const TrainConfig& cfg) {
  if (data.X.cols() == 0 || data.X.cols() != data.Y.cols()) {
    throw std::invalid_argument("train: empty or mismatched dataset");
  }
  if (!net.shapes_valid()) throw std::invalid_argument("train: bad net shapes");

  SeqData seq;
  if (net.arch != Arch::mlp) {
    seq = make_windows(data.X, data.Y, cfg.tbptt_window);
  }

  Gradients vel;
  zero_like(net, vel);
  Gradients grads;

  TrainResult result;
  for (int it = 0; it < cfg.iterations; ++it) {
    const double loss = net.arch == Arch::mlp
                            ? mlp_forward_backward(net, data.X, data.Y, &grads)
                            : seq_loss(net, seq, &grads);
    if (it == 0) result.initial_loss = loss;
    if (!std::isfinite(loss)) {
      throw DivergedError("train: diverged at iteration " + std::to_string(it));
    }

    vel.Wx = cfg.momentum * vel.Wx - cfg.learning_rate * grads.Wx;
    vel.b = cfg.momentum * vel.b - cfg.learning_rate * grads.b;
    vel.W2 = cfg.momentum * vel.W2 - cfg.learning_rate * grads.W2;
    vel.b2 = cfg.momentum * vel.b2 - cfg.learning_rate * grads.b2;
    net.Wx += vel.Wx;
    net.b += vel.b;
    net.W2 += vel.W2;
    net.b2 += vel.b2;
    if (net.arch != Arch::mlp) {
      vel.Wh = cfg.momentum * vel.Wh - cfg.learning_rate * grads.Wh;
      net.Wh += vel.Wh;
    }
  }
  result.final_loss = net.arch == Arch::mlp
                          ? mlp_forward_backward(net, data.X, data.Y, nullptr)
                          : seq_loss(net, seq, nullptr);
  if (!std::isfinite(result.final_loss)) {
    throw DivergedError("train: diverged at iteration " +
                        std::to_string(cfg.iterations));
  }
  return result;
}

double gradient_check(const NetParams& net, const Eigen::MatrixXd& X,
                      const Eigen::MatrixXd& Y, double eps) {
  const Gradients analytic = compute_gradients(net, X, Y);

  NetParams probe = net;
  double max_rel = 0.0;
  const auto check_tensor = [&](Eigen::MatrixXd& param,
                                const Eigen::MatrixXd& grad) {
    for (Eigen::Index c = 0; c < param.cols(); ++c) {
      for (Eigen::Index r = 0; r < param.rows(); ++r) {
        const double saved = param(r, c);
        param(r, c) = saved + eps;
        const double lp = compute_loss(probe, X, Y);
        param(r, c) = saved - eps;
        const double lm = compute_loss(probe, X, Y);
        param(r, c) = saved;
        const double numeric = (lp - lm) / (2.0 * eps);
        const double ga = grad(r, c);
        const double rel = std::abs(ga - numeric) /
                           std::max({std::abs(ga), std::abs(numeric), 1e-8});
        max_rel = std::max(max_rel, rel);
      }
    }
  };

  const auto check_vector = [&](Eigen::VectorXd& param,
                                const Eigen::VectorXd& grad) {
    for (Eigen::Index r = 0; r < param.size(); ++r) {
      const double saved = param(r);
      param(r) = saved + eps;
      const double lp = compute_loss(probe, X, Y);
      param(r) = saved - eps;
      const double lm = compute_loss(probe, X, Y);
      param(r) = saved;
      const double numeric = (lp - lm) / (2.0 * eps);
      const double ga = grad(r);
      max_rel = std::max(max_rel, std::abs(ga - numeric) /
                                      std::max({std::abs(ga),
                                                std::abs(numeric), 1e-8}));
    }
  };

  check_tensor(probe.Wx, analytic.Wx);
  if (probe.Wh.size() > 0) check_tensor(probe.Wh, analytic.Wh);
  check_tensor(probe.W2, analytic.W2);
  check_vector(probe.b, analytic.b);
  check_vector(probe.b2, analytic.b2);
  return max_rel;
}

std::vector<std::array<double, kNumJoints>> predict_log(
    const NetParams& net, const TrajectoryLog& log) {
  if (log.size() < 2) return {};
  std::vector<std::array<double, kNumJoints>> out(log.size() - 1);
  RecurrentState state = RecurrentState::zero();
  for (std::size_t t = 0; t + 1 < log.size(); ++t) {
    const Eigen::VectorXd y = forward(net, build_feature_frame(log, t), state);
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      out[t][j] = y(static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

void save_net(const NetParams& net, const std::string& path) {
  if (!net.shapes_valid()) throw std::invalid_argument("save_net: bad shapes");
  nlohmann::json header = {
      {"format", "hydrodyn-net"},
      {"version", 1},
      {"arch", arch_name(net.arch)},
      {"input", kNetInput},
      {"hidden", kNetHidden},
      {"output", kNetOutput},
      {"tensors",
       {{{"name", "Wx"}, {"rows", net.Wx.rows()}, {"cols", net.Wx.cols()}},
        {{"name", "Wh"}, {"rows", net.Wh.rows()}, {"cols", net.Wh.cols()}},
        {{"name", "b"}, {"rows", net.b.size()}, {"cols", 1}},
        {{"name", "W2"}, {"rows", net.W2.rows()}, {"cols", net.W2.cols()}},
        {{"name", "b2"}, {"rows", net.b2.size()}, {"cols", 1}}}}};
  const std::string htext = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  const std::uint32_t hlen = static_cast<std::uint32_t>(htext.size());
  out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  out.write(htext.data(), static_cast<std::streamsize>(htext.size()));
  const auto dump = [&out](const double* data, Eigen::Index count) {
    out.write(reinterpret_cast<const char*>(data),
              static_cast<std::streamsize>(count * sizeof(double)));
  };
  dump(net.Wx.data(), net.Wx.size());
  if (net.Wh.size() > 0) dump(net.Wh.data(), net.Wh.size());
  dump(net.b.data(), net.b.size());
  dump(net.W2.data(), net.W2.size());
  dump(net.b2.data(), net.b2.size());
  if (!out) throw std::runtime_error("write failed: " + path);
}

NetParams load_net(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::uint32_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  if (!in || hlen == 0 || hlen > (1u << 20)) {
    throw std::runtime_error("bad weights header length");
  }
  std::string htext(hlen, '\0');
  in.read(htext.data(), hlen);
  const nlohmann::json header = nlohmann::json::parse(htext);
  if (header.at("format") != "hydrodyn-net") {
    throw std::runtime_error("not a hydrodyn weights file");
  }

  NetParams net;
  net.arch = arch_from_name(header.at("arch").get<std::string>());
  const int gh = gate_blocks(net.arch) * kNetHidden;
  net.Wx.resize(gh, kNetInput);
  net.Wh.resize(net.arch == Arch::mlp ? 0 : gh,
                net.arch == Arch::mlp ? 0 : kNetHidden);
  net.b.resize(gh);
  net.W2.resize(kNetOutput, kNetHidden);
  net.b2.resize(kNetOutput);

  const auto slurp = [&in, &path](double* data, Eigen::Index count) {
    in.read(reinterpret_cast<char*>(data),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw std::runtime_error("truncated weights file: " + path);
  };
  slurp(net.Wx.data(), net.Wx.size());
  if (net.Wh.size() > 0) slurp(net.Wh.data(), net.Wh.size());
  slurp(net.b.data(), net.b.size());
  slurp(net.W2.data(), net.W2.size());
  slurp(net.b2.data(), net.b2.size());
  if (!net.shapes_valid()) throw std::runtime_error("bad tensor shapes");
  return net;
}

}  // namespace hydrodyn
