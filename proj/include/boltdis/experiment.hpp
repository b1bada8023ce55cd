#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "boltdis/executor.hpp"
#include "boltdis/pddl.hpp"
#include "boltdis/rng.hpp"
#include "boltdis/simworld.hpp"

namespace boltdis {

enum class ObstacleMode { kNoObstacles, kWithObstacles };
enum class Method { kNeurosymbolic, kBaseline };

std::string_view to_string(ObstacleMode mode);
std::string_view to_string(Method method);
ObstacleMode obstacle_mode_from_string(std::string_view text);
Method method_from_string(std::string_view text);

struct ObstacleType {
  std::string name;
  double radius_mm = 0.0;
};

struct SceneConfig {
  double workspace_mm = 200.0;
  double bolt_height_mm = 0.0;
  double thread_pitch_mm = 1.5;
  double engaged_turns = 8.0;
  sim::Vec3 home{100.0, 100.0, 300.0};
  std::vector<ObstacleType> obstacle_types{{"bolt", 5.0}, {"nut", 4.0}, {"wood_block", 20.0}};
  /// Obstacle center offset is N(0, (scale * sigma)^2) per axis.
  double obstacle_offset_scale = 6.0;

  void validate() const;
};

struct ExperimentConfig {
  std::vector<double> sigma_list{0.5, 1.0, 2.0, 3.0, 4.0, 5.0};
  std::size_t episodes_per_sigma = 200;
  ObstacleMode mode = ObstacleMode::kNoObstacles;
  Method method = Method::kNeurosymbolic;
  std::uint64_t master_seed = 1;
  std::size_t threads = 1;
  SceneConfig scene;
  EpisodeConfig episode;

  void validate() const;
};

/// Bolt uniform in the workspace; believed pose = true pose + N(0, sigma^2)
/// per horizontal axis. With obstacles, one movable obstacle of a uniformly
/// chosen type is centered at the bolt plus a Gaussian offset. The
/// nutrunner starts at the home pose.
sim::WorldState generate_scene(double sigma_mm, ObstacleMode mode, const SceneConfig& cfg,
                               Rng& rng);

/// Scene with the believed bolt exactly pose_error_mm away from the true
/// bolt in a random direction, optionally with a movable nut 2 mm from the
/// bolt axis.
sim::WorldState adaptation_scene(double pose_error_mm, bool blocking_obstacle,
                                 const SceneConfig& cfg, Rng& rng);

/// Seed of one episode, from its coordinates only.
std::uint64_t episode_seed(std::uint64_t master_seed, Method method, ObstacleMode mode,
                           std::size_t sigma_index, std::size_t episode_index);

/// Scene and execution of a single sweep episode.
EpisodeResult run_sweep_episode(const ExperimentConfig& cfg, const Domain& domain,
                                const Problem& problem, std::size_t sigma_index,
                                std::size_t episode_index);

struct SweepRow {
  double sigma = 0.0;
  std::size_t episodes = 0;
  std::size_t successes = 0;
  double sr = 0.0;
  double mean_steps = 0.0;
  double mean_replans = 0.0;
  double push_frequency = 0.0;

  bool operator==(const SweepRow&) const = default;
};

struct SweepResult {
  std::vector<SweepRow> rows;

  bool operator==(const SweepResult&) const = default;
};

/// Runs episodes_per_sigma episodes per sigma on cfg.threads threads.
/// Aggregation is by episode index, so the result does not depend on the
/// thread count.
SweepResult run_sweep(const ExperimentConfig& cfg, const Domain& domain,
                      const Problem& problem);

/// Header `sigma,episodes,successes,sr,mean_steps,mean_replans,push_freq`
/// and one row per sigma, numbers with 6 significant digits.
std::string format_csv(const SweepResult& result);
void emit_csv(const SweepResult& result, const std::filesystem::path& path);

enum class PlotKind { kSuccessRate, kMeanSteps };

/// Self-contained SVG with one polyline per method and a legend. The x axis
/// spans [0, max sigma]; the y axis spans [0, 1] for success rates and
/// [0, ceil(max steps)] for step counts. Throws if the sweeps have
/// different sigma lists.
std::string render_plot(const SweepResult& neurosymbolic, const SweepResult& baseline,
                        PlotKind kind);
void emit_plot(const SweepResult& neurosymbolic, const SweepResult& baseline,
               PlotKind kind, const std::filesystem::path& path);

struct CalibrationReport {
  std::size_t samples = 0;
  double observation_sigma_mm = 0.0;
  double aim_accuracy = 0.0;
  double clear_accuracy = 0.0;
};

/// Argmax accuracy of both grounders over labeled scenes from the scene
/// generator, cycling through cfg.sigma_list. target_aim is scored on the
/// post-Approach alignment error against the label e <= aim_threshold;
/// target_clear on obstacle scenes against clearance >= clear_threshold.
/// The grounders see the true geometry plus N(0, observation_sigma^2).
CalibrationReport calibrate(const ExperimentConfig& cfg, std::size_t samples,
                            double observation_sigma_mm, std::uint64_t seed);

}  // namespace boltdis
