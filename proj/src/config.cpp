#include "boltdis/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

namespace boltdis {

ConfigError::ConfigError(int line, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(const std::string& s) {
  double v = 0.0;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("expected a number, got '" + s + "'");
  }
  return v;
}

std::uint64_t to_uint(const std::string& s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("expected a non-negative integer, got '" + s + "'");
  }
  return v;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Key {
  std::string section;
  std::string name;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename Field>
Key real(std::string section, std::string name, Field field) {
  return {std::move(section), std::move(name),
          [field](ExperimentConfig& c, const std::string& v) { field(c) = to_double(v); },
          [field](const ExperimentConfig& c) {
            return num(field(const_cast<ExperimentConfig&>(c)));
          }};
}

template <typename Field>
Key count(std::string section, std::string name, Field field) {
  return {std::move(section), std::move(name),
          [field](ExperimentConfig& c, const std::string& v) {
            field(c) = static_cast<std::remove_reference_t<decltype(field(c))>>(to_uint(v));
          },
          [field](const ExperimentConfig& c) {
            return std::to_string(field(const_cast<ExperimentConfig&>(c)));
          }};
}

#define FIELD(expr) [](ExperimentConfig& c) -> auto& { return expr; }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back({"experiment", "sigma_list",
                 [](ExperimentConfig& c, const std::string& v) {
                   c.sigma_list.clear();
                   for (const auto& item : split(v, ',')) c.sigma_list.push_back(to_double(item));
                 },
                 [](const ExperimentConfig& c) {
                   std::string out;
                   for (double s : c.sigma_list) out += (out.empty() ? "" : ", ") + num(s);
                   return out;
                 }});
    k.push_back(count("experiment", "episodes_per_sigma", FIELD(c.episodes_per_sigma)));
    k.push_back({"experiment", "mode",
                 [](ExperimentConfig& c, const std::string& v) {
                   c.mode = obstacle_mode_from_string(v);
                 },
                 [](const ExperimentConfig& c) { return std::string(to_string(c.mode)); }});
    k.push_back({"experiment", "method",
                 [](ExperimentConfig& c, const std::string& v) {
                   c.method = method_from_string(v);
                 },
                 [](const ExperimentConfig& c) { return std::string(to_string(c.method)); }});
    k.push_back(count("experiment", "master_seed", FIELD(c.master_seed)));
    k.push_back(count("experiment", "threads", FIELD(c.threads)));

    k.push_back(real("scene", "workspace_mm", FIELD(c.scene.workspace_mm)));
    k.push_back(real("scene", "bolt_height_mm", FIELD(c.scene.bolt_height_mm)));
    k.push_back(real("scene", "thread_pitch_mm", FIELD(c.scene.thread_pitch_mm)));
    k.push_back(real("scene", "engaged_turns", FIELD(c.scene.engaged_turns)));
    k.push_back({"scene", "home",
                 [](ExperimentConfig& c, const std::string& v) {
                   const auto parts = split(v, ',');
                   if (parts.size() != 3) throw std::invalid_argument("home needs x, y, z");
                   c.scene.home = {to_double(parts[0]), to_double(parts[1]),
                                   to_double(parts[2])};
                 },
                 [](const ExperimentConfig& c) {
                   return num(c.scene.home.x) + ", " + num(c.scene.home.y) + ", " +
                          num(c.scene.home.z);
                 }});
    k.push_back({"scene", "obstacle_types",
                 [](ExperimentConfig& c, const std::string& v) {
                   c.scene.obstacle_types.clear();
                   for (const auto& item : split(v, ',')) {
                     const auto parts = split(item, ':');
                     if (parts.size() != 2 || parts[0].empty()) {
                       throw std::invalid_argument("obstacle type must be name:radius");
                     }
                     c.scene.obstacle_types.push_back({parts[0], to_double(parts[1])});
                   }
                 },
                 [](const ExperimentConfig& c) {
                   std::string out;
                   for (const auto& t : c.scene.obstacle_types) {
                     out += (out.empty() ? "" : ", ") + t.name + ":" + num(t.radius_mm);
                   }
                   return out;
                 }});
    k.push_back(real("scene", "obstacle_offset_scale", FIELD(c.scene.obstacle_offset_scale)));

    k.push_back(real("planner", "prune_threshold", FIELD(c.episode.planner.prune_threshold)));
    k.push_back(real("planner", "goal_threshold", FIELD(c.episode.planner.goal_threshold)));
    k.push_back(count("planner", "max_depth", FIELD(c.episode.planner.max_depth)));

    k.push_back(count("executor", "replan_budget", FIELD(c.episode.executor.replan_budget)));
    k.push_back(
        real("executor", "verify_threshold", FIELD(c.episode.executor.verify_threshold)));

    k.push_back(real("grounder", "aim_threshold_mm", FIELD(c.episode.grounder.aim_threshold_mm)));
    k.push_back(real("grounder", "aim_steepness_mm", FIELD(c.episode.grounder.aim_steepness_mm)));
    k.push_back(
        real("grounder", "clear_threshold_mm", FIELD(c.episode.grounder.clear_threshold_mm)));
    k.push_back(
        real("grounder", "clear_steepness_mm", FIELD(c.episode.grounder.clear_steepness_mm)));
    k.push_back(real("grounder", "aim_error_rate", FIELD(c.episode.grounder.aim_error_rate)));
    k.push_back(real("grounder", "clear_error_rate", FIELD(c.episode.grounder.clear_error_rate)));
    k.push_back(real("grounder", "observation_sigma_mm",
                     FIELD(c.episode.grounder.observation_sigma_mm)));
    k.push_back(count("grounder", "rng_seed", FIELD(c.episode.grounder.rng_seed)));

    auto w = [&](const char* name, auto field) { k.push_back(real("world", name, field)); };
    w("compliance_radius_mm", FIELD(c.episode.world.compliance_radius_mm));
    w("required_clearance_mm", FIELD(c.episode.world.required_clearance_mm));
    w("hover_height_mm", FIELD(c.episode.world.hover_height_mm));
    w("torque_cutoff_nm", FIELD(c.episode.world.torque_cutoff_nm));
    w("nominal_torque_nm", FIELD(c.episode.world.nominal_torque_nm));
    w("contact_depth_mm", FIELD(c.episode.world.contact_depth_mm));
    w("turn_rate", FIELD(c.episode.world.turn_rate));
    w("mate_sigma_mm", FIELD(c.episode.world.mate_sigma_mm));
    w("mate_blocked_failure", FIELD(c.episode.world.mate_blocked_failure));
    w("camera_radius_mm", FIELD(c.episode.world.camera_radius_mm));
    w("push_margin_mm", FIELD(c.episode.world.push_margin_mm));
    w("retraction_speed_scale", FIELD(c.episode.world.retraction_speed_scale));
    w("retraction_tolerance", FIELD(c.episode.world.retraction_tolerance));
    return k;
  }();
  return table;
}

#undef FIELD

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      bool known = false;
      for (const auto& k : keys()) known = known || k.section == section;
      if (!known) throw ConfigError(line_no, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, "expected key = value");
    if (section.empty()) throw ConfigError(line_no, "key outside of a section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const Key* found = nullptr;
    for (const auto& k : keys()) {
      if (k.section == section && k.name == key) found = &k;
    }
    if (found == nullptr) {
      throw ConfigError(line_no, "unknown key '" + key + "' in [" + section + "]");
    }
    try {
      found->set(cfg, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(line_no, key + ": " + e.what());
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(0, "cannot read config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string format_config(const ExperimentConfig& cfg) {
  std::string out, section;
  for (const auto& k : keys()) {
    if (k.section != section) {
      if (!section.empty()) out += '\n';
      section = k.section;
      out += "[" + section + "]\n";
    }
    out += k.name + " = " + k.get(cfg) + '\n';
  }
  return out;
}

}  // namespace boltdis
