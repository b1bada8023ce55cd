#include "boltdis/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "boltdis/belief.hpp"

namespace boltdis {

std::string_view to_string(ObstacleMode mode) {
  return mode == ObstacleMode::kNoObstacles ? "no_obstacles" : "with_obstacles";
}

std::string_view to_string(Method method) {
  return method == Method::kNeurosymbolic ? "neurosymbolic" : "baseline";
}

ObstacleMode obstacle_mode_from_string(std::string_view text) {
  if (text == "no_obstacles") return ObstacleMode::kNoObstacles;
  if (text == "with_obstacles") return ObstacleMode::kWithObstacles;
  throw std::invalid_argument("unknown obstacle mode '" + std::string(text) + "'");
}

Method method_from_string(std::string_view text) {
  if (text == "neurosymbolic") return Method::kNeurosymbolic;
  if (text == "baseline") return Method::kBaseline;
  throw std::invalid_argument("unknown method '" + std::string(text) + "'");
}

void SceneConfig::validate() const {
  if (!(workspace_mm > 0.0)) throw std::invalid_argument("workspace_mm must be positive");
  if (obstacle_types.empty()) throw std::invalid_argument("no obstacle types");
  for (const auto& t : obstacle_types) {
    if (!(t.radius_mm > 0.0)) {
      throw std::invalid_argument("obstacle radius of '" + t.name + "' must be positive");
    }
  }
  if (!(obstacle_offset_scale >= 0.0)) {
    throw std::invalid_argument("obstacle_offset_scale must be >= 0");
  }
  if (!(thread_pitch_mm > 0.0) || !(engaged_turns >= 0.0)) {
    throw std::invalid_argument("invalid thread geometry");
  }
}

void ExperimentConfig::validate() const {
  if (sigma_list.empty()) throw std::invalid_argument("sigma_list is empty");
  for (double s : sigma_list) {
    if (!(s > 0.0)) throw std::invalid_argument("sigma values must be > 0");
  }
  if (episodes_per_sigma < 1) throw std::invalid_argument("episodes_per_sigma must be >= 1");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  scene.validate();
  episode.planner.validate();
  episode.executor.validate();
  episode.grounder.validate();
  episode.world.validate();
}

sim::WorldState generate_scene(double sigma_mm, ObstacleMode mode, const SceneConfig& cfg,
                               Rng& rng) {
  if (!(sigma_mm > 0.0)) throw std::invalid_argument("sigma must be > 0");
  sim::WorldState w;
  w.bolt = {rng.uniform(0.0, cfg.workspace_mm), rng.uniform(0.0, cfg.workspace_mm),
            cfg.bolt_height_mm};
  w.thread_pitch_mm = cfg.thread_pitch_mm;
  w.engaged_turns = cfg.engaged_turns;
  w.believed_bolt = {w.bolt.x + rng.normal(0.0, sigma_mm),
                     w.bolt.y + rng.normal(0.0, sigma_mm), w.bolt.z};
  w.nutrunner = cfg.home;
  if (mode == ObstacleMode::kWithObstacles) {
    const ObstacleType& type = cfg.obstacle_types[rng.index(cfg.obstacle_types.size())];
    const double spread = cfg.obstacle_offset_scale * sigma_mm;
    sim::Obstacle o;
    o.center = {w.bolt.x + rng.normal(0.0, spread), w.bolt.y + rng.normal(0.0, spread)};
    o.radius = type.radius_mm;
    o.movable = true;
    w.obstacles.push_back(o);
  }
  return w;
}

sim::WorldState adaptation_scene(double pose_error_mm, bool blocking_obstacle,
                                 const SceneConfig& cfg, Rng& rng) {
  if (!(pose_error_mm >= 0.0)) throw std::invalid_argument("pose error must be >= 0");
  sim::WorldState w;
  w.bolt = {rng.uniform(0.0, cfg.workspace_mm), rng.uniform(0.0, cfg.workspace_mm),
            cfg.bolt_height_mm};
  w.thread_pitch_mm = cfg.thread_pitch_mm;
  w.engaged_turns = cfg.engaged_turns;
  const double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
  w.believed_bolt = {w.bolt.x + pose_error_mm * std::cos(heading),
                     w.bolt.y + pose_error_mm * std::sin(heading), w.bolt.z};
  w.nutrunner = cfg.home;
  if (blocking_obstacle) {
    // A nut 2 mm from the bolt axis.
    const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double radius = 4.0;
    const double offset = radius + 2.0;
    w.obstacles.push_back(
        {{w.bolt.x + offset * std::cos(phi), w.bolt.y + offset * std::sin(phi)}, radius, true});
  }
  return w;
}

std::uint64_t episode_seed(std::uint64_t master_seed, Method method, ObstacleMode mode,
                           std::size_t sigma_index, std::size_t episode_index) {
  return derive_seed(master_seed, {static_cast<std::uint64_t>(method),
                                   static_cast<std::uint64_t>(mode), sigma_index,
                                   episode_index});
}

EpisodeResult run_sweep_episode(const ExperimentConfig& cfg, const Domain& domain,
                                const Problem& problem, std::size_t sigma_index,
                                std::size_t episode_index) {
  const std::uint64_t seed =
      episode_seed(cfg.master_seed, cfg.method, cfg.mode, sigma_index, episode_index);
  Rng scene_rng(derive_seed(seed, {0}));
  const sim::WorldState world =
      generate_scene(cfg.sigma_list.at(sigma_index), cfg.mode, cfg.scene, scene_rng);
  if (cfg.method == Method::kBaseline) {
    return run_baseline_episode(kBaselineSequence, world, cfg.episode.world, seed);
  }
  return run_episode(domain, problem, world, cfg.episode, seed);
}

namespace {

struct Outcome {
  bool success = false;
  bool pushed = false;
  std::size_t steps = 0;
  std::size_t replans = 0;
};

}  // namespace

SweepResult run_sweep(const ExperimentConfig& cfg, const Domain& domain,
                      const Problem& problem) {
  cfg.validate();
  const std::size_t per_sigma = cfg.episodes_per_sigma;
  const std::size_t total = cfg.sigma_list.size() * per_sigma;
  std::vector<Outcome> outcomes(total);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      try {
        const EpisodeResult r = run_sweep_episode(cfg, domain, problem, i / per_sigma,
                                                  i % per_sigma);
        outcomes[i] = {r.success, r.executed("Push"), r.steps_executed, r.replans};
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = total;
      }
    }
  };
  const std::size_t n_threads = std::min(cfg.threads, total);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  SweepResult result;
  for (std::size_t s = 0; s < cfg.sigma_list.size(); ++s) {
    SweepRow row;
    row.sigma = cfg.sigma_list[s];
    row.episodes = per_sigma;
    std::size_t steps = 0, replans = 0, pushes = 0;
    for (std::size_t e = 0; e < per_sigma; ++e) {
      const Outcome& o = outcomes[s * per_sigma + e];
      row.successes += o.success ? 1 : 0;
      pushes += o.pushed ? 1 : 0;
      steps += o.steps;
      replans += o.replans;
    }
    const double n = static_cast<double>(per_sigma);
    row.sr = static_cast<double>(row.successes) / n;
    row.mean_steps = static_cast<double>(steps) / n;
    row.mean_replans = static_cast<double>(replans) / n;
    row.push_frequency = static_cast<double>(pushes) / n;
    result.rows.push_back(row);
  }
  return result;
}

CalibrationReport calibrate(const ExperimentConfig& cfg, std::size_t samples,
                            double observation_sigma_mm, std::uint64_t seed) {
  cfg.validate();
  if (samples == 0) throw std::invalid_argument("calibration needs at least one sample");
  if (!(observation_sigma_mm >= 0.0)) {
    throw std::invalid_argument("observation sigma must be >= 0");
  }
  const GrounderConfig& g = cfg.episode.grounder;
  std::size_t aim_hits = 0, clear_hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    Rng rng(derive_seed(seed, {i}));
    const double sigma = cfg.sigma_list[i % cfg.sigma_list.size()];
    const sim::WorldState scene =
        generate_scene(sigma, ObstacleMode::kWithObstacles, cfg.scene, rng);
    // After Approach the socket is above the believed pose.
    const double e = sim::distance(scene.believed_bolt.xy(), scene.bolt.xy());
    const double d = scene.clearance();

    const double e_obs = std::max(0.0, e + rng.normal(0.0, observation_sigma_mm));
    const double d_obs = std::max(0.0, d + rng.normal(0.0, observation_sigma_mm));
    const bool aim_label = e <= g.aim_threshold_mm;
    const bool clear_label = d >= g.clear_threshold_mm;
    aim_hits += ground_target_aim(e_obs, g, rng).argmax_true() == aim_label ? 1 : 0;
    clear_hits += ground_target_clear(d_obs, g, rng).argmax_true() == clear_label ? 1 : 0;
  }
  const double n = static_cast<double>(samples);
  return {samples, observation_sigma_mm, static_cast<double>(aim_hits) / n,
          static_cast<double>(clear_hits) / n};
}

}  // namespace boltdis
