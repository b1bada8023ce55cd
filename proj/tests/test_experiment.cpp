#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <vector>

#include "boltdis/config.hpp"
#include "boltdis/experiment.hpp"

using namespace boltdis;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Task {
  Domain domain = parse_domain(slurp(std::string(BOLTDIS_DOMAIN_DIR) + "/bolt_disassembly.pddl"));
  Problem problem =
      parse_problem(slurp(std::string(BOLTDIS_DOMAIN_DIR) + "/bolt_task.pddl"), domain);
};

// Minimal XML well-formedness: balanced, properly nested tags.
bool well_formed_xml(const std::string& text) {
  std::vector<std::string> stack;
  std::size_t pos = 0;
  while ((pos = text.find('<', pos)) != std::string::npos) {
    const std::size_t end = text.find('>', pos);
    if (end == std::string::npos) return false;
    std::string tag = text.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.empty()) return false;
    if (tag.front() == '?' || tag.front() == '!') continue;
    if (tag.front() == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
      continue;
    }
    if (tag.back() == '/') continue;
    stack.push_back(tag.substr(0, tag.find_first_of(" \n\t")));
  }
  return stack.empty();
}

}  // namespace

TEST_CASE("scene generator moments") {
  const SceneConfig cfg;
  Rng rng(1);
  const int n = 10000;
  const double sigma = 2.0;
  double sum_x = 0, sum_y = 0, sq_x = 0, sq_y = 0;
  for (int i = 0; i < n; ++i) {
    const sim::WorldState w = generate_scene(sigma, ObstacleMode::kNoObstacles, cfg, rng);
    CHECK(w.bolt.x >= 0.0);
    CHECK(w.bolt.x <= 200.0);
    CHECK(w.bolt.y <= 200.0);
    CHECK(std::isinf(w.clearance()));
    CHECK(w.nutrunner == cfg.home);
    const double dx = w.believed_bolt.x - w.bolt.x, dy = w.believed_bolt.y - w.bolt.y;
    sum_x += dx;
    sum_y += dy;
    sq_x += dx * dx;
    sq_y += dy * dy;
  }
  // Mean within 5 standard errors, stddev within 5%.
  CHECK(std::abs(sum_x / n) < 5 * sigma / std::sqrt(n));
  CHECK(std::abs(sum_y / n) < 5 * sigma / std::sqrt(n));
  CHECK(std::sqrt(sq_x / n) == doctest::Approx(sigma).epsilon(0.05));
  CHECK(std::sqrt(sq_y / n) == doctest::Approx(sigma).epsilon(0.05));
}

TEST_CASE("scene generator obstacles") {
  SceneConfig cfg;
  Rng rng(2);
  CHECK_THROWS_AS(generate_scene(0.0, ObstacleMode::kNoObstacles, cfg, rng),
                  std::invalid_argument);
  int blocking = 0;
  const int n = 2000;
  for (int i = 0; i < n; ++i) {
    const sim::WorldState w = generate_scene(0.01, ObstacleMode::kWithObstacles, cfg, rng);
    REQUIRE(w.obstacles.size() == 1);
    const double r = w.obstacles[0].radius;
    CHECK((r == 5.0 || r == 4.0 || r == 20.0));
    blocking += w.clearance() < sim::WorldConfig{}.required_clearance_mm ? 1 : 0;
  }
  CHECK(blocking == n);
}

TEST_CASE("adaptation scene") {
  Rng rng(3);
  const sim::WorldState w = adaptation_scene(4.0, true, SceneConfig{}, rng);
  CHECK(std::hypot(w.believed_bolt.x - w.bolt.x, w.believed_bolt.y - w.bolt.y) ==
        doctest::Approx(4.0));
  CHECK(w.clearance() == doctest::Approx(2.0));
}

TEST_CASE("episode seeds depend only on coordinates") {
  const auto s = episode_seed(1, Method::kNeurosymbolic, ObstacleMode::kNoObstacles, 2, 7);
  CHECK(s == episode_seed(1, Method::kNeurosymbolic, ObstacleMode::kNoObstacles, 2, 7));
  CHECK(s != episode_seed(1, Method::kBaseline, ObstacleMode::kNoObstacles, 2, 7));
  CHECK(s != episode_seed(1, Method::kNeurosymbolic, ObstacleMode::kWithObstacles, 2, 7));
  CHECK(s != episode_seed(1, Method::kNeurosymbolic, ObstacleMode::kNoObstacles, 3, 7));
  CHECK(s != episode_seed(2, Method::kNeurosymbolic, ObstacleMode::kNoObstacles, 2, 7));
}

TEST_CASE("episode results do not depend on the rest of the sweep") {
  const Task t;
  ExperimentConfig small;
  small.mode = ObstacleMode::kWithObstacles;
  small.sigma_list = {2.0};
  ExperimentConfig large = small;
  large.sigma_list = {2.0, 5.0};
  for (std::size_t e = 0; e < 20; ++e) {
    CHECK(format_episode(run_sweep_episode(small, t.domain, t.problem, 0, e)) ==
          format_episode(run_sweep_episode(large, t.domain, t.problem, 0, e)));
  }
}

TEST_CASE("sweep invariants and thread independence") {
  const Task t;
  ExperimentConfig cfg;
  cfg.episodes_per_sigma = 40;
  cfg.mode = ObstacleMode::kWithObstacles;
  const SweepResult one = run_sweep(cfg, t.domain, t.problem);
  cfg.threads = 4;
  const SweepResult four = run_sweep(cfg, t.domain, t.problem);
  CHECK(one == four);
  CHECK(format_csv(one) == format_csv(four));
  REQUIRE(one.rows.size() == cfg.sigma_list.size());
  for (const auto& row : one.rows) {
    CHECK(row.episodes == 40);
    CHECK(row.sr == static_cast<double>(row.successes) / 40.0);
    CHECK(row.sr >= 0.0);
    CHECK(row.sr <= 1.0);
    CHECK(row.push_frequency >= 0.0);
    CHECK(row.push_frequency <= 1.0);
    CHECK(row.mean_steps >= 1.0);
  }
}

TEST_CASE("sweep rejects invalid configs") {
  const Task t;
  ExperimentConfig cfg;
  cfg.sigma_list = {};
  CHECK_THROWS(run_sweep(cfg, t.domain, t.problem));
  cfg.sigma_list = {1.0, -1.0};
  CHECK_THROWS(run_sweep(cfg, t.domain, t.problem));
  cfg.sigma_list = {1.0};
  cfg.episodes_per_sigma = 0;
  CHECK_THROWS(run_sweep(cfg, t.domain, t.problem));
}

TEST_CASE("csv") {
  CHECK(format_csv({}) == "sigma,episodes,successes,sr,mean_steps,mean_replans,push_freq\n");
  SweepResult r;
  for (int i = 0; i < 6; ++i) {
    r.rows.push_back({0.5 + i, 200, 199, 0.995, 10.0 / 3.0, 1.0 / 7.0, 0.0});
  }
  const std::string csv = format_csv(r);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  CHECK(csv.find("0.5,200,199,0.995,3.33333,0.142857,0\n") != std::string::npos);

  const auto path = std::filesystem::temp_directory_path() / "boltdis_test.csv";
  emit_csv(r, path);
  CHECK(slurp(path) == csv);
  std::filesystem::remove(path);
  CHECK_THROWS(emit_csv(r, "/nonexistent-dir/x.csv"));
}

TEST_CASE("svg plots") {
  SweepResult a, b;
  for (double s : {0.5, 1.0, 5.0}) {
    a.rows.push_back({s, 10, 10, 1.0, 3.0, 0.0, 0.0});
    b.rows.push_back({s, 10, 5, 0.5, 2.5, 0.0, 0.0});
  }
  const std::string sr = render_plot(a, b, PlotKind::kSuccessRate);
  CHECK(well_formed_xml(sr));
  CHECK(sr.find("<svg") != std::string::npos);
  const std::regex polyline("<polyline");
  CHECK(std::distance(std::sregex_iterator(sr.begin(), sr.end(), polyline),
                      std::sregex_iterator()) == 2);
  CHECK(sr.find(">neurosymbolic<") != std::string::npos);
  CHECK(sr.find(">baseline<") != std::string::npos);
  // The x axis ends at max sigma and the y axis at 1.
  CHECK(sr.find(">5</text>") != std::string::npos);
  CHECK(sr.find(">1</text>") != std::string::npos);
  CHECK(render_plot(a, a, PlotKind::kSuccessRate).find("points") != std::string::npos);

  const std::string steps = render_plot(a, b, PlotKind::kMeanSteps);
  CHECK(well_formed_xml(steps));
  CHECK(steps.find("mean steps") != std::string::npos);

  SweepResult other = b;
  other.rows.pop_back();
  CHECK_THROWS_AS(render_plot(a, other, PlotKind::kSuccessRate), std::invalid_argument);
}

TEST_CASE("config round-trip and errors") {
  ExperimentConfig cfg;
  cfg.sigma_list = {0.25, 3.0};
  cfg.mode = ObstacleMode::kWithObstacles;
  cfg.method = Method::kBaseline;
  cfg.master_seed = 18446744073709551615ULL;
  cfg.episode.planner.prune_threshold = 0.4;
  cfg.episode.world.torque_cutoff_nm = 6.5;
  cfg.scene.obstacle_types = {{"block", 12.5}};
  const std::string text = format_config(cfg);
  const ExperimentConfig back = parse_config(text);
  CHECK(format_config(back) == text);
  CHECK(back.sigma_list == cfg.sigma_list);
  CHECK(back.master_seed == cfg.master_seed);
  CHECK(back.episode.world.torque_cutoff_nm == 6.5);
  CHECK(back.scene.obstacle_types.front().name == "block");

  CHECK_NOTHROW(parse_config("# only a comment\n\n[planner]\nmax_depth = 8\n"));
  CHECK(parse_config("[planner]\nmax_depth = 8 # inline\n").episode.planner.max_depth == 8);
  try {
    parse_config("[planner]\nmax_depht = 8\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_config("[nowhere]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("max_depth = 8\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[planner]\nmax_depth = eight\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[experiment]\nsigma_list = 1, 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[experiment]\nmode = sometimes\n"), ConfigError);
}

TEST_CASE("shipped configs parse") {
  for (const auto& entry : std::filesystem::directory_iterator(BOLTDIS_CONFIG_DIR)) {
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_config(entry.path()));
  }
}

TEST_CASE("calibration report") {
  const CalibrationReport r = calibrate(ExperimentConfig{}, 2000, 0.0, 5);
  CHECK(r.samples == 2000);
  CHECK(r.aim_accuracy > 0.9);
  CHECK(r.clear_accuracy > 0.9);
  const CalibrationReport again = calibrate(ExperimentConfig{}, 2000, 0.0, 5);
  CHECK(again.aim_accuracy == r.aim_accuracy);
  CHECK_THROWS(calibrate(ExperimentConfig{}, 0, 0.0, 5));
}
