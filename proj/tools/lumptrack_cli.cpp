#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "lumptrack/config_io.hpp"
#include "lumptrack/control.hpp"
#include "lumptrack/errors.hpp"
#include "lumptrack/experiment.hpp"
#include "lumptrack/lump.hpp"
#include "lumptrack/presets.hpp"
#include "lumptrack/stream_io.hpp"

namespace {

using namespace lumptrack;

Scenario resolve_scenario(const std::string& config, const std::string& preset,
                          const std::string& camera) {
  const CameraMode camera_mode = camera_mode_from_string(camera);
  if (!config.empty()) {
    Scenario s = load_scenario(config);
    if (s.camera_mode != camera_mode) {
      throw ConfigError("scenario file is " + to_string(s.camera_mode) + " but --camera asked for " +
                        camera);
    }
    return s;
  }
  if (preset == "davinci") return davinci_scenario(camera_mode);
  if (preset == "davinci_servo") return davinci_servo_scenario();
  if (preset == "baxter") return baxter_scenario();
  throw ConfigError("unknown preset '" + preset + "'");
}

FilterConfig resolve_filter(const std::string& filter_file, const std::string& preset,
                            const std::string& mode, const std::string& camera) {
  FilterConfig config;
  if (!filter_file.empty()) {
    config = load_filter_config(filter_file);
  } else if (preset == "baxter") {
    config = baxter_filter_config(tracking_mode_from_string(mode));
  } else if (preset == "davinci_servo") {
    config = davinci_servo_filter_config();
  } else {
    config = davinci_filter_config(tracking_mode_from_string(mode),
                                   camera_mode_from_string(camera));
  }
  config.mode = tracking_mode_from_string(mode);
  return config;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  return out;
}

int run_simulate(const std::string& config, const std::string& preset, const std::string& camera,
                 std::uint64_t seed, const std::string& out_path, const std::string& meta_path) {
  Scenario scenario = resolve_scenario(config, preset, camera);
  SceneSimulator simulator(scenario, seed);
  SimulationMeta meta;
  meta.camera_mode = scenario.camera_mode;
  meta.calibrated_base = simulator.calibrated_base();
  meta.calibration_error = simulator.calibration_error().to_pose();
  auto out = open_out(out_path);
  for (int t = 0; t < scenario.trajectory.steps; ++t) {
    TruthRow row = simulator.step();
    StepInput input;
    input.t = row.t;
    input.q_meas = row.q_meas;
    input.q_cam_meas = row.q_cam_meas;
    input.cameras = row.batches;
    write_stream_record(out, input);
    row.batches.clear();
    meta.truth.push_back(std::move(row));
  }
  if (!meta_path.empty()) write_meta_file(meta_path, meta);
  return 0;
}

int run_track(const std::string& config, const std::string& preset, const std::string& camera,
              const std::string& filter_file, const std::string& mode,
              const std::string& meta_path, const std::string& stream_path,
              std::uint64_t seed, const std::string& out_path) {
  Scenario scenario = resolve_scenario(config, preset, camera);
  FilterConfig filter = resolve_filter(filter_file, preset, mode, camera);
  SimulationMeta meta = read_meta_file(meta_path);
  TrackerSetup setup;
  setup.chain = scenario.chain;
  setup.rig = scenario.rig;
  setup.camera_mode = scenario.camera_mode;
  setup.calibrated_base = meta.calibrated_base;
  setup.camera_chain = scenario.camera_chain;
  ParticleTracker tracker(setup, filter, seed);
  auto out = open_out(out_path);
  for (const StepInput& input : read_stream_file(stream_path)) {
    const Estimate est = tracker.update(input);
    write_estimate_record(out, input.t, est);
  }
  return 0;
}

int run_experiment_cmd(const std::string& config, const std::string& preset,
                       const std::string& camera, const std::string& filter_file,
                       const std::string& mode, int trials, std::uint64_t seed, int burn_in,
                       const std::string& out_path, bool print_summary) {
  ExperimentSpec spec;
  spec.scenario = resolve_scenario(config, preset, camera);
  spec.filter = resolve_filter(filter_file, preset, mode, camera);
  spec.trials = trials;
  spec.seed = seed;
  spec.burn_in = burn_in;
  const ExperimentResult result = run_experiment(spec);
  auto out = open_out(out_path);
  write_result_csv(out, result);
  if (print_summary) {
    const ExperimentSummary summary = summarize(result, burn_in);
    write_summary(std::cout, summary, result);
  }
  return 0;
}

int run_servo(const std::string& config, const std::string& preset, const std::string& camera,
              const std::string& filter_file, std::vector<double> goal,
              std::vector<double> goal_rot, double gamma_s, double tol, int max_iters,
              std::uint64_t seed, bool no_tracking, const std::string& out_path) {
  Scenario scenario = resolve_scenario(config, preset, camera);
  FilterConfig filter = resolve_filter(filter_file, preset, "lumped", camera);
  SceneSimulator simulator(scenario, seed);
  TrackerSetup setup;
  setup.chain = scenario.chain;
  setup.rig = scenario.rig;
  setup.camera_mode = scenario.camera_mode;
  setup.calibrated_base = simulator.calibrated_base();
  setup.camera_chain = scenario.camera_chain;
  ParticleTracker tracker(setup, filter, seed + 1);
  ControllerConfig controller;
  controller.max_step_mm = gamma_s;
  controller.tolerance_mm = tol;
  controller.max_iterations = max_iters;
  Goal g;
  g.position = Vec3(goal[0], goal[1], goal[2]);
  if (goal_rot.size() == 3) {
    g.rotation = rotation_exp(Vec3(goal_rot[0], goal_rot[1], goal_rot[2]));
  }
  ServoOptions options;
  options.use_tracking = !no_tracking;
  const ServoResult result = servo_loop(simulator, tracker, controller, g, options);
  if (!out_path.empty()) {
    auto out = open_out(out_path);
    out << "iteration,believed_error_mm,true_error_mm\n";
    for (const auto& it : result.log) {
      out << it.iteration << "," << format_double(it.believed_error_mm) << ","
          << format_double(it.true_error_mm) << "\n";
    }
  }
  std::cout << (result.converged ? "converged" : "did not converge") << " after "
            << result.iterations << " iterations; believed error "
            << format_double(result.believed_error_mm) << " mm, true error "
            << format_double(result.true_position_error_mm) << " mm\n";
  return result.converged ? 0 : 2;
}

int run_lump_check(int chains, std::uint64_t seed, double tolerance) {
  RandomStream rng = RandomStream::derive(seed, 0x10c);
  double worst = 0.0;
  for (int c = 0; c < chains; ++c) {
    const int n = 2 + static_cast<int>(rng.uniform() * 9.0);
    KinematicChain chain;
    for (int i = 0; i < n; ++i) {
      MdhJoint j;
      j.alpha = rng.uniform(-M_PI, M_PI);
      j.a = rng.uniform(-50.0, 50.0);
      j.theta_offset = rng.uniform(-M_PI, M_PI);
      j.d_offset = rng.uniform(-50.0, 50.0);
      j.kind = rng.uniform() < 0.5 ? JointKind::Revolute : JointKind::Prismatic;
      chain.joints.push_back(j);
    }
    chain.n_b = n;
    VecX q(n), e(n), beta(n);
    for (int i = 0; i < n; ++i) {
      q[i] = rng.uniform(-1.5, 1.5);
      e[i] = rng.uniform(-0.1, 0.1);
      beta[i] = rng.uniform(-1.0, 2.0);
    }
    RigidTransform lhs;
    RigidTransform rhs_chain;
    for (int i = 0; i < n; ++i) {
      lhs = lhs * mdh_transform(chain.joints[i], q[i] + e[i]);
      rhs_chain = rhs_chain * mdh_transform(chain.joints[i], q[i] + beta[i] * e[i]);
    }
    const RigidTransform rhs = analytical_lump(chain, q, e, beta) * rhs_chain;
    const double dev =
        std::max((lhs.rotation - rhs.rotation).cwiseAbs().maxCoeff(),
                 (lhs.translation - rhs.translation).cwiseAbs().maxCoeff());
    worst = std::max(worst, dev);
  }
  std::cout << "checked " << chains << " random chains; max elementwise deviation " << worst
            << " (tolerance " << tolerance << ")\n";
  return worst < tolerance ? 0 : 2;
}

int run_preset_dump(const std::string& name, const std::string& out_dir) {
  Scenario scenario;
  FilterConfig filter;
  if (name == "davinci") {
    scenario = davinci_scenario(CameraMode::Stationary);
    filter = davinci_filter_config(TrackingMode::Lumped, CameraMode::Stationary);
  } else if (name == "davinci_eih") {
    scenario = davinci_scenario(CameraMode::EyeInHand);
    filter = davinci_filter_config(TrackingMode::Lumped, CameraMode::EyeInHand);
  } else if (name == "davinci_servo") {
    scenario = davinci_servo_scenario();
    filter = davinci_servo_filter_config();
  } else if (name == "baxter") {
    scenario = baxter_scenario();
    filter = baxter_filter_config(TrackingMode::LumpedPlusJoints);
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  const auto scenario_file = save_scenario_bundle(scenario, out_dir);
  save_filter_config(filter, std::filesystem::path(out_dir) / "filter.json");
  std::cout << "wrote " << scenario_file.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lumped-error tool tracking: simulation, filtering and experiments"};
  app.require_subcommand(1);

  std::string config, preset = "davinci", camera = "stationary", filter_file, mode = "lumped";
  std::string stream_path, meta_path, out_path, summary_out, name;
  std::uint64_t seed = 0;
  int trials = 50, burn_in = 100, max_iters = 200, chains = 1000;
  double gamma_s = 3.0, tol = 0.5, lump_tol = 1e-9;
  bool no_tracking = false, print_summary = false;
  std::vector<double> goal{0.0, 0.0, 100.0}, goal_rot;

  auto add_scene_flags = [&](CLI::App* cmd) {
    cmd->add_option("--config", config, "Scenario file (overrides --preset)");
    cmd->add_option("--preset", preset, "Built-in preset: davinci, davinci_servo, baxter");
    cmd->add_option("--camera", camera, "Camera mode: stationary or eye_in_hand");
    cmd->add_option("--seed", seed, "Base seed");
  };

  auto* simulate = app.add_subcommand("simulate", "Emit a synthetic feature stream");
  add_scene_flags(simulate);
  simulate->add_option("--out", out_path, "Output stream (JSONL)")->required();
  simulate->add_option("--meta", meta_path, "Sidecar with calibration and ground truth");

  auto* track = app.add_subcommand("track", "Replay a feature stream through the filter");
  add_scene_flags(track);
  track->add_option("--filter", filter_file, "Filter config file");
  track->add_option("--mode", mode, "Tracking mode");
  track->add_option("--stream", stream_path, "Input stream (JSONL)")->required();
  track->add_option("--meta", meta_path, "Meta sidecar from simulate")->required();
  track->add_option("--out", out_path, "Output estimates (JSONL)")->required();

  auto* run = app.add_subcommand("run", "End-to-end experiment to CSV");
  add_scene_flags(run);
  run->add_option("--filter", filter_file, "Filter config file");
  run->add_option("--mode", mode, "Tracking mode");
  run->add_option("--trials", trials, "Number of trials");
  run->add_option("--burn-in", burn_in, "Steps excluded from the summary");
  run->add_option("--out", out_path, "Output CSV")->required();
  run->add_flag("--summary", print_summary, "Print post-burn-in summary statistics");

  auto* servo = app.add_subcommand("servo", "Closed-loop position/orientation regulation");
  add_scene_flags(servo);
  servo->add_option("--filter", filter_file, "Filter config file");
  servo->add_option("--goal", goal, "Goal position in the camera frame (mm)")->expected(3);
  servo->add_option("--goal-rot", goal_rot, "Goal orientation, axis-angle (rad)")->expected(3);
  servo->add_option("--gamma-s", gamma_s, "Max step size (mm)");
  servo->add_option("--tol", tol, "Convergence tolerance (mm)");
  servo->add_option("--max-iters", max_iters, "Iteration cap");
  servo->add_flag("--no-tracking", no_tracking, "Pin the lump to identity");
  servo->add_option("--out", out_path, "Per-iteration log CSV");

  auto* lump_check = app.add_subcommand("lump-check", "Run the lump identity suite standalone");
  lump_check->add_option("--chains", chains, "Number of random chains");
  lump_check->add_option("--seed", seed, "Seed");
  lump_check->add_option("--tol", lump_tol, "Elementwise tolerance");

  auto* preset_cmd = app.add_subcommand("preset", "Write a preset config bundle");
  preset_cmd->add_option("--name", name, "davinci, davinci_eih, davinci_servo, baxter")
      ->required();
  preset_cmd->add_option("--out-dir", out_path, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      if (preset == "davinci_servo") camera = "stationary";
      return run_simulate(config, preset, camera, seed, out_path, meta_path);
    }
    if (track->parsed()) {
      return run_track(config, preset, camera, filter_file, mode, meta_path, stream_path, seed,
                       out_path);
    }
    if (run->parsed()) {
      return run_experiment_cmd(config, preset, camera, filter_file, mode, trials, seed, burn_in,
                                out_path, print_summary);
    }
    if (servo->parsed()) {
      if (config.empty() && preset == "davinci") preset = "davinci_servo";
      return run_servo(config, preset, camera, filter_file, goal, goal_rot, gamma_s, tol,
                       max_iters, seed, no_tracking, out_path);
    }
    if (lump_check->parsed()) {
      return run_lump_check(chains, seed, lump_tol);
    }
    if (preset_cmd->parsed()) {
      return run_preset_dump(name, out_path);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
