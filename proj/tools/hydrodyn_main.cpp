// hydrodyn CLI: simulate -> fit -> train -> eval -> bench pipeline glue.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hydrodyn/config.hpp"
#include "hydrodyn/errors.hpp"
#include "hydrodyn/latency.hpp"
#include "hydrodyn/metrics.hpp"
#include "hydrodyn/nn.hpp"
#include "hydrodyn/sysid.hpp"

namespace fs = std::filesystem;
using namespace hydrodyn;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
};

RunConfig resolve_config(const CommonOpts& opts) {
  RunConfig cfg =
      opts.config_path.empty() ? default_config() : load_config(opts.config_path);
  if (opts.seed) cfg.seed = *opts.seed;
  return cfg;
}

fs::path out_path(const CommonOpts& opts, const std::string& name) {
  fs::create_directories(opts.out_dir);
  return fs::path(opts.out_dir) / name;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + path.string());
  out << text;
}

const ProfileConfig& pick_profile(const RunConfig& cfg,
                                  const std::string& name) {
  if (name == "train") return cfg.train_profile;
  if (name == "impact") return cfg.impact_profile;
  throw ConfigError("unknown profile '" + name + "' (use train|impact)");
}

int cmd_simulate(const CommonOpts& opts, const std::string& profile_name,
                 const std::string& mode, double duration_override,
                 const std::string& output) {
  RunConfig cfg = resolve_config(opts);
  const double duration =
      duration_override > 0 ? duration_override : cfg.duration_s;

  TrajectoryLog log;
  if (mode == "position") {
    log = synthesize_log(cfg.rig, cfg.oracle, cfg.loop,
                         pick_profile(cfg, profile_name), duration, cfg.seed,
                         cfg.noise);
  } else if (mode == "torque") {
    LoopConfig loop = cfg.loop;
    loop.mode = LoopMode::torque;
    loop.gains = cfg.torque_gains;
    const ReferenceGenerator gen(pick_profile(cfg, profile_name), cfg.seed,
                                 duration, loop.command_rate_hz);
    LoopResult res = run_closed_loop(loop, cfg.rig, cfg.oracle, gen, duration);
    if (res.diverged) {
      throw DivergedError("torque loop diverged at t=" +
                          std::to_string(res.t_end));
    }
    log = std::move(res.log);
  } else {
    throw ConfigError("mode must be position|torque");
  }

  const fs::path path = out_path(opts, output);
  write_trajectory_csv(log, path.string());
  std::cout << "wrote " << path.string() << " (" << log.size() << " rows)\n";
  return 0;
}

int cmd_fit(const CommonOpts& opts, const std::string& log_path,
            const std::string& output) {
  RunConfig cfg = resolve_config(opts);
  const TrajectoryLog log = parse_trajectory_csv(log_path);
  const auto [coeffs, reports] = fit_all_joints(log, cfg.rig.R, cfg.fit);

  const fs::path coeffs_path = out_path(opts, output);
  save_coeffs(coeffs, coeffs_path.string());
  write_text(out_path(opts, "residual_report.txt"),
             fit_report_table(coeffs, reports));
  write_text(out_path(opts, "residual_report.json"),
             fit_report_json(coeffs, reports));
  std::cout << fit_report_table(coeffs, reports);
  std::cout << "wrote " << coeffs_path.string() << "\n";
  return 0;
}

int cmd_train(const CommonOpts& opts, const std::string& arch,
              const std::string& log_path, const std::string& output,
              int iters_override) {
  RunConfig cfg = resolve_config(opts);
  cfg.baseline.arch = arch_from_name(arch);
  if (iters_override > 0) cfg.baseline.iterations = iters_override;

  const TrajectoryLog log = parse_trajectory_csv(log_path);
  const Dataset data = build_dataset(log);

  NetParams net = init_net(cfg.baseline.arch, cfg.seed);
  TrainConfig tc;
  tc.iterations = cfg.baseline.iterations;
  tc.learning_rate = cfg.baseline.learning_rate;
  tc.momentum = cfg.baseline.momentum;
  tc.tbptt_window = cfg.baseline.tbptt_window;
  tc.seed = cfg.seed;
  const TrainResult res = train(net, data, tc);

  const fs::path path = out_path(opts, output);
  save_net(net, path.string());
  std::printf("trained %s: loss %.6g -> %.6g over %d iterations\n",
              arch.c_str(), res.initial_loss, res.final_loss,
              cfg.baseline.iterations);
  std::cout << "wrote " << path.string() << "\n";
  return 0;
}

LabeledPredictor load_predictor(const std::string& label,
                                const std::string& path) {
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
    return make_analytic_predictor(label, load_coeffs(path));
  }
  return make_net_predictor(label, load_net(path));
}

std::pair<std::string, std::string> split_label(const std::string& spec) {
  const auto pos = spec.find('=');
  if (pos == std::string::npos || pos == 0 || pos + 1 == spec.size()) {
    throw ConfigError("expected label=path, got '" + spec + "'");
  }
  return {spec.substr(0, pos), spec.substr(pos + 1)};
}

int cmd_eval(const CommonOpts& opts, const std::vector<std::string>& models,
             const std::vector<std::string>& logs) {
  if (models.empty() || logs.empty()) {
    throw ConfigError("eval needs at least one --model and one --log");
  }
  std::vector<LabeledPredictor> predictors;
  for (const auto& spec : models) {
    const auto [label, path] = split_label(spec);
    predictors.push_back(load_predictor(label, path));
  }
  std::vector<TrajectoryLog> storage;
  storage.reserve(logs.size());
  std::vector<LabeledLog> datasets;
  for (const auto& spec : logs) {
    const auto [label, path] = split_label(spec);
    storage.push_back(parse_trajectory_csv(path));
    datasets.push_back({label, &storage.back()});
  }

  const EvalReport report = table3_report(predictors, datasets);
  const std::string text = eval_report_to_text(report);
  write_text(out_path(opts, "eval_report.txt"), text);
  write_text(out_path(opts, "eval_report.csv"), eval_report_to_csv(report));
  std::cout << text;
  return 0;
}

int cmd_dist(const CommonOpts& opts, const std::string& log_path,
             std::size_t bins, const std::string& prefix) {
  const TrajectoryLog log = parse_trajectory_csv(log_path);
  const QuadrantStats stats = quadrant_stats(log, bins);
  write_text(out_path(opts, prefix + ".json"), quadrant_stats_to_json(stats));
  write_text(out_path(opts, prefix + "_histogram.csv"),
             histogram_to_csv(stats.hist));
  std::printf("opposite_fraction %.4f over %zu samples\n",
              stats.opposite_fraction, stats.n_total);
  return 0;
}

int cmd_bench(const CommonOpts& opts, const std::string& coeffs_path,
              std::size_t iters_override) {
  RunConfig cfg = resolve_config(opts);
  JointCoeffs coeffs;
  if (coeffs_path.empty()) {
    for (auto& c : coeffs) c = {4e5, 0.02, 1e3, 50.0, cfg.rig.R};
  } else {
    coeffs = load_coeffs(coeffs_path);
  }
  const std::size_t iters =
      iters_override > 0 ? iters_override : cfg.bench.iterations;

  const LatencyStats stats = bench_latency(coeffs, iters, cfg.seed);
  write_text(out_path(opts, "latency.json"), latency_stats_to_json(stats));
  std::printf("predict_batch12: median %.1f ns, p99 %.1f ns, min %.1f ns over "
              "%zu iterations%s\n",
              stats.median_ns, stats.p99_ns, stats.min_ns, stats.iterations,
              stats.batched ? " (batched timing)" : "");
  return 0;
}

int cmd_rewards_check(const CommonOpts& opts, const std::string& state_path,
                      const std::string& gains_path,
                      const std::string& output) {
  RunConfig cfg = resolve_config(opts);
  std::ifstream in(state_path);
  if (!in) throw ConfigError("cannot open state fixture: " + state_path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  const RobotState state = robot_state_from_json(text);

  RewardCoeffs gains = cfg.rewards;
  if (!gains_path.empty()) {
    std::ifstream gin(gains_path);
    if (!gin) throw ConfigError("cannot open gains: " + gains_path);
    std::string gtext((std::istreambuf_iterator<char>(gin)),
                      std::istreambuf_iterator<char>());
    gains = reward_coeffs_from_json(gtext);
  }

  const auto global = global_rewards(state, gains);
  const auto local = local_rewards(state, gains);
  const std::string report =
      reward_terms_to_json(global, local, total_reward(state, gains));
  if (!output.empty()) {
    write_text(out_path(opts, output), report);
  }
  std::cout << report << "\n";
  return 0;
}

int cmd_pipeline(const CommonOpts& opts) {
  RunConfig cfg = resolve_config(opts);

  std::cout << "[1/6] synthesize training log (" << cfg.duration_s << " s)\n";
  const TrajectoryLog train_log =
      synthesize_log(cfg.rig, cfg.oracle, cfg.loop, cfg.train_profile,
                     cfg.duration_s, cfg.seed, cfg.noise);
  write_trajectory_csv(train_log, out_path(opts, "train_log.csv").string());

  std::cout << "[2/6] synthesize impact-rich log\n";
  const TrajectoryLog impact_log =
      synthesize_log(cfg.rig, cfg.oracle, cfg.loop, cfg.impact_profile,
                     cfg.duration_s, cfg.seed + 1, cfg.noise);
  write_trajectory_csv(impact_log, out_path(opts, "impact_log.csv").string());

  std::cout << "[3/6] fit actuator coefficients\n";
  const auto [coeffs, reports] = fit_all_joints(train_log, cfg.rig.R, cfg.fit);
  save_coeffs(coeffs, out_path(opts, "coeffs.json").string());
  write_text(out_path(opts, "residual_report.txt"),
             fit_report_table(coeffs, reports));
  write_text(out_path(opts, "residual_report.json"),
             fit_report_json(coeffs, reports));

  std::cout << "[4/6] train " << arch_name(cfg.baseline.arch) << " baseline ("
            << cfg.baseline.iterations << " iterations)\n";
  NetParams net = init_net(cfg.baseline.arch, cfg.seed);
  TrainConfig tc;
  tc.iterations = cfg.baseline.iterations;
  tc.learning_rate = cfg.baseline.learning_rate;
  tc.momentum = cfg.baseline.momentum;
  tc.tbptt_window = cfg.baseline.tbptt_window;
  tc.seed = cfg.seed;
  train(net, build_dataset(train_log), tc);
  save_net(net, out_path(opts, "baseline.bin").string());

  std::cout << "[5/6] evaluate\n";
  std::vector<LabeledPredictor> predictors;
  predictors.push_back(make_analytic_predictor("actuator_model", coeffs));
  predictors.push_back(
      make_net_predictor(arch_name(cfg.baseline.arch), std::move(net)));
  const std::vector<LabeledLog> datasets = {{"train", &train_log},
                                            {"impact", &impact_log}};
  const EvalReport report = table3_report(predictors, datasets);
  write_text(out_path(opts, "eval_report.txt"), eval_report_to_text(report));
  write_text(out_path(opts, "eval_report.csv"), eval_report_to_csv(report));
  std::cout << eval_report_to_text(report);

  const QuadrantStats train_stats = quadrant_stats(train_log);
  const QuadrantStats impact_stats = quadrant_stats(impact_log);
  write_text(out_path(opts, "dist_train.json"),
             quadrant_stats_to_json(train_stats));
  write_text(out_path(opts, "dist_train_histogram.csv"),
             histogram_to_csv(train_stats.hist));
  write_text(out_path(opts, "dist_impact.json"),
             quadrant_stats_to_json(impact_stats));
  write_text(out_path(opts, "dist_impact_histogram.csv"),
             histogram_to_csv(impact_stats.hist));

  // latency.json holds wall-clock measurements and is the one artifact
  // excluded from the byte-determinism contract
  std::cout << "[6/6] latency benchmark\n";
  const LatencyStats stats =
      bench_latency(coeffs, cfg.bench.iterations, cfg.seed);
  write_text(out_path(opts, "latency.json"), latency_stats_to_json(stats));
  std::printf("predict_batch12: median %.1f ns, p99 %.1f ns over %zu "
              "iterations\n",
              stats.median_ns, stats.p99_ns, stats.iterations);
  return 0;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"hydraulic actuator model toolkit"};
  app.require_subcommand(1);

  CommonOpts opts;
  app.add_option("--config", opts.config_path, "JSON run configuration");
  app.add_option("--out", opts.out_dir, "output directory");
  std::uint64_t seed_flag = 0;
  auto* seed_opt = app.add_option("--seed", seed_flag, "seed override");

  auto* sim = app.add_subcommand("simulate", "run the oracle closed loop");
  std::string sim_profile = "train", sim_mode = "position",
              sim_output = "log.csv";
  double sim_duration = 0.0;
  sim->add_option("--profile", sim_profile, "config profile: train|impact");
  sim->add_option("--mode", sim_mode, "position|torque");
  sim->add_option("--duration", sim_duration, "seconds (config default)");
  sim->add_option("--output", sim_output, "output CSV name");

  auto* fit = app.add_subcommand("fit", "least-squares coefficient fit");
  std::string fit_log, fit_output = "coeffs.json";
  fit->add_option("--log", fit_log, "trajectory CSV")->required();
  fit->add_option("--output", fit_output, "coefficients JSON name");

  auto* tr = app.add_subcommand("train-baseline", "train a neural baseline");
  std::string tr_arch = "mlp", tr_log, tr_output = "baseline.bin";
  int tr_iters = 0;
  tr->add_option("--arch", tr_arch, "mlp|lstm|gru");
  tr->add_option("--log", tr_log, "trajectory CSV")->required();
  tr->add_option("--output", tr_output, "weights file name");
  tr->add_option("--iters", tr_iters, "iteration override");

  auto* ev = app.add_subcommand("eval", "score models on datasets");
  std::vector<std::string> ev_models, ev_logs;
  ev->add_option("--model", ev_models, "label=path (.json coeffs or .bin net)")
      ->required();
  ev->add_option("--log", ev_logs, "label=path trajectory CSV")->required();

  auto* di = app.add_subcommand("dist", "torque/command distribution stats");
  std::string di_log, di_prefix = "dist";
  std::size_t di_bins = 64;
  di->add_option("--log", di_log, "trajectory CSV")->required();
  di->add_option("--bins", di_bins, "histogram bins per axis");
  di->add_option("--prefix", di_prefix, "output name prefix");

  auto* be = app.add_subcommand("bench", "latency microbenchmark");
  std::string be_coeffs;
  std::size_t be_iters = 0;
  be->add_option("--coeffs", be_coeffs, "coefficients JSON");
  be->add_option("--iters", be_iters, "iteration override");

  auto* rc = app.add_subcommand("rewards-check", "evaluate reward terms");
  std::string rc_state, rc_gains, rc_output;
  rc->add_option("--state", rc_state, "RobotState JSON fixture")->required();
  rc->add_option("--gains", rc_gains, "RewardCoeffs JSON (config default)");
  rc->add_option("--output", rc_output, "also write the term map here");

  auto* pi = app.add_subcommand("pipeline", "simulate->fit->train->eval->bench");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  if (seed_opt->count() > 0) opts.seed = seed_flag;

  if (sim->parsed()) {
    return cmd_simulate(opts, sim_profile, sim_mode, sim_duration, sim_output);
  }
  if (fit->parsed()) return cmd_fit(opts, fit_log, fit_output);
  if (tr->parsed()) return cmd_train(opts, tr_arch, tr_log, tr_output, tr_iters);
  if (ev->parsed()) return cmd_eval(opts, ev_models, ev_logs);
  if (di->parsed()) return cmd_dist(opts, di_log, di_bins, di_prefix);
  if (be->parsed()) return cmd_bench(opts, be_coeffs, be_iters);
  if (rc->parsed()) return cmd_rewards_check(opts, rc_state, rc_gains, rc_output);
  if (pi->parsed()) return cmd_pipeline(opts);
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const CsvError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return 2;
  }
}
