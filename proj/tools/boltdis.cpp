// Command-line front end: plan, run, sweep, calibrate.
//
// Exit codes: 0 success, 1 usage or input error, 2 experiment failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "boltdis/config.hpp"
#include "boltdis/executor.hpp"
#include "boltdis/experiment.hpp"
#include "boltdis/pddl.hpp"
#include "boltdis/planner.hpp"

#ifndef BOLTDIS_DOMAIN_DIR
#define BOLTDIS_DOMAIN_DIR "domains"
#endif

namespace fs = std::filesystem;
using namespace boltdis;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

struct Inputs {
  std::string domain_path = std::string(BOLTDIS_DOMAIN_DIR) + "/bolt_disassembly.pddl";
  std::string problem_path = std::string(BOLTDIS_DOMAIN_DIR) + "/bolt_task.pddl";
  std::string config_path;
  bool lenient = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--domain", domain_path, "Domain file")->capture_default_str();
    cmd->add_option("--problem", problem_path, "Problem file")->capture_default_str();
    cmd->add_option("--config", config_path, "Experiment config file");
    cmd->add_flag("--lenient", lenient, "Accept the shorthand and unbalanced listings");
  }

  Domain domain() const { return parse_domain(slurp(domain_path), {lenient}); }
  Problem problem(const Domain& d) const {
    return parse_problem(slurp(problem_path), d, {lenient});
  }
  ExperimentConfig config() const {
    return config_path.empty() ? ExperimentConfig{} : load_config(config_path);
  }
};

int cmd_plan(const Inputs& in) {
  const Domain domain = in.domain();
  const Problem problem = in.problem(domain);
  const ExperimentConfig cfg = in.config();
  try {
    const Plan p = plan(domain, belief_from_literals(problem.init), problem.goal,
                        cfg.episode.planner);
    for (const auto& step : p.steps) std::cout << step.label() << '\n';
  } catch (const NoPlanFound& e) {
    std::cerr << "no plan: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

struct RunArgs {
  double sigma = 1.0;
  double pose_error = -1.0;
  bool blocking = false;
  std::string mode = "no_obstacles";
  std::string method = "neurosymbolic";
  std::uint64_t seed = 1;
  std::string trace_path;
};

int cmd_run(const Inputs& in, const RunArgs& args) {
  const Domain domain = in.domain();
  const Problem problem = in.problem(domain);
  const ExperimentConfig cfg = in.config();
  const ObstacleMode mode = obstacle_mode_from_string(args.mode);
  const Method method = method_from_string(args.method);

  Rng scene_rng(derive_seed(args.seed, {0}));
  const sim::WorldState world =
      args.pose_error >= 0.0
          ? adaptation_scene(args.pose_error, args.blocking, cfg.scene, scene_rng)
          : generate_scene(args.sigma, mode, cfg.scene, scene_rng);
  const EpisodeResult r =
      method == Method::kBaseline
          ? run_baseline_episode(kBaselineSequence, world, cfg.episode.world, args.seed)
          : run_episode(domain, problem, world, cfg.episode, args.seed);
  std::cout << format_episode(r) << '\n';

  if (!args.trace_path.empty()) {
    std::ofstream out(args.trace_path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + args.trace_path + "'");
    out << sim::trace_header(cfg.episode.world) << '\n';
    for (const auto& record : r.trace) out << sim::format_trace_record(record) << '\n';
  }
  return 0;
}

struct SweepArgs {
  std::string method;
  std::string mode;
  std::size_t episodes = 0;
  std::size_t threads = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string csv_path;
  std::string out_dir;
};

int cmd_sweep(const Inputs& in, const SweepArgs& args) {
  const Domain domain = in.domain();
  const Problem problem = in.problem(domain);
  ExperimentConfig cfg = in.config();
  if (!args.mode.empty()) cfg.mode = obstacle_mode_from_string(args.mode);
  if (args.episodes > 0) cfg.episodes_per_sigma = args.episodes;
  if (args.threads > 0) cfg.threads = args.threads;
  if (args.seed_set) cfg.master_seed = args.seed;

  if (args.method == "both") {
    if (args.out_dir.empty()) throw UsageError("--method both needs --out-dir");
    fs::create_directories(args.out_dir);
    const std::string stem = std::string(to_string(cfg.mode));
    cfg.method = Method::kNeurosymbolic;
    const SweepResult ns = run_sweep(cfg, domain, problem);
    cfg.method = Method::kBaseline;
    const SweepResult bl = run_sweep(cfg, domain, problem);
    const fs::path dir(args.out_dir);
    emit_csv(ns, dir / (stem + "_neurosymbolic.csv"));
    emit_csv(bl, dir / (stem + "_baseline.csv"));
    emit_plot(ns, bl, PlotKind::kSuccessRate, dir / (stem + "_sr.svg"));
    emit_plot(ns, bl, PlotKind::kMeanSteps, dir / (stem + "_steps.svg"));
    std::cout << "# neurosymbolic\n" << format_csv(ns) << "# baseline\n" << format_csv(bl);
    return 0;
  }

  if (!args.method.empty()) cfg.method = method_from_string(args.method);
  const SweepResult result = run_sweep(cfg, domain, problem);
  if (args.csv_path.empty()) {
    std::cout << format_csv(result);
  } else {
    emit_csv(result, args.csv_path);
  }
  return 0;
}

int cmd_calibrate(const Inputs& in, std::size_t samples, std::uint64_t seed) {
  const ExperimentConfig cfg = in.config();
  const auto print = [](const char* label, const CalibrationReport& r) {
    std::printf("%s samples=%zu observation_sigma_mm=%g\n", label, r.samples,
                r.observation_sigma_mm);
    std::printf("  target_aim   accuracy=%.4f target=[0.96, 1.00] %s\n", r.aim_accuracy,
                r.aim_accuracy >= 0.96 ? "ok" : "outside");
    std::printf("  target_clear accuracy=%.4f target=[0.94, 0.98] %s\n", r.clear_accuracy,
                r.clear_accuracy >= 0.94 && r.clear_accuracy <= 0.98 ? "ok" : "outside");
  };
  print("labeled", calibrate(cfg, samples, 0.0, seed));
  print("sensor", calibrate(cfg, samples, cfg.episode.grounder.observation_sigma_mm, seed));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bolt disassembly planning and experiments"};
  app.require_subcommand(1);

  Inputs inputs;
  auto* plan_cmd = app.add_subcommand("plan", "Print a plan from the problem's initial state");
  inputs.attach(plan_cmd);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run one episode and print its record");
  inputs.attach(run_cmd);
  run_cmd->add_option("--sigma", run_args.sigma, "Pose noise stddev in mm (> 0)")
      ->capture_default_str();
  run_cmd->add_option("--pose-error", run_args.pose_error,
                      "Exact pose error in mm instead of sampled noise");
  run_cmd->add_flag("--blocking-obstacle", run_args.blocking,
                    "With --pose-error: put a nut 2 mm from the bolt");
  run_cmd->add_option("--mode", run_args.mode, "no_obstacles | with_obstacles")
      ->capture_default_str();
  run_cmd->add_option("--method", run_args.method, "neurosymbolic | baseline")
      ->capture_default_str();
  run_cmd->add_option("--seed", run_args.seed, "Episode seed")->capture_default_str();
  run_cmd->add_option("--trace", run_args.trace_path, "Write the episode trace here");

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a sigma sweep and write CSV");
  inputs.attach(sweep_cmd);
  sweep_cmd->add_option("--method", sweep_args.method, "neurosymbolic | baseline | both");
  sweep_cmd->add_option("--mode", sweep_args.mode, "no_obstacles | with_obstacles");
  sweep_cmd->add_option("--episodes", sweep_args.episodes, "Episodes per sigma");
  sweep_cmd->add_option("--threads", sweep_args.threads, "Worker threads");
  auto* seed_opt = sweep_cmd->add_option("--seed", sweep_args.seed, "Master seed");
  sweep_cmd->add_option("--csv", sweep_args.csv_path, "CSV output (default stdout)");
  sweep_cmd->add_option("--out-dir", sweep_args.out_dir,
                        "With --method both: directory for CSVs and SVG plots");

  std::size_t samples = 10000;
  std::uint64_t calib_seed = 1;
  auto* calib_cmd = app.add_subcommand("calibrate", "Report grounder argmax accuracy");
  inputs.attach(calib_cmd);
  calib_cmd->add_option("--samples", samples, "Labeled scenes")->capture_default_str();
  calib_cmd->add_option("--seed", calib_seed, "Seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*plan_cmd) return cmd_plan(inputs);
    if (*run_cmd) return cmd_run(inputs, run_args);
    if (*sweep_cmd) {
      sweep_args.seed_set = seed_opt->count() > 0;
      return cmd_sweep(inputs, sweep_args);
    }
    if (*calib_cmd) return cmd_calibrate(inputs, samples, calib_seed);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const PddlError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "experiment failed: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
