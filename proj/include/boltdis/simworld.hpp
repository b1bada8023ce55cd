#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "boltdis/rng.hpp"

namespace boltdis::sim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Vec2&) const = default;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec2 xy() const { return {x, y}; }
  bool operator==(const Vec3&) const = default;
};

double distance(Vec2 a, Vec2 b);

/// Vertical cylinder, seen from above as a disc.
struct Obstacle {
  Vec2 center;
  double radius = 0.0;
  bool movable = true;

  bool operator==(const Obstacle&) const = default;
};

enum class Fault {
  kTorqueExceeded,
  kNotEngaged,
  kBlocked,
  /// The primitive was invoked from a pose it cannot start from, e.g. Mate
  /// before Approach or Approach while the socket is on the bolt.
  kNotPositioned,
};

std::string_view to_string(Fault fault);
std::optional<Fault> fault_from_string(std::string_view text);

/// Physical parameters of the cell. All lengths in mm.
struct WorldConfig {
  double compliance_radius_mm = 4.0;
  double required_clearance_mm = 10.0;
  double hover_height_mm = 30.0;
  double torque_cutoff_nm = 5.0;
  double nominal_torque_nm = 2.0;
  double contact_depth_mm = 1.0;
  double turn_rate = 2.0;  // turns per second while unscrewing
  double mate_sigma_mm = 0.2;
  double mate_blocked_failure = 0.2;
  double camera_radius_mm = 5.0;
  double push_margin_mm = 5.0;
  /// Actual retraction speed as a multiple of pitch * turn_rate. Anything
  /// other than 1 is a fault-injection setting.
  double retraction_speed_scale = 1.0;
  double retraction_tolerance = 0.1;

  void validate() const;
};

/// Ground truth of the cell. The bolt axis and the nutrunner axis are both
/// vertical; positions are the bolt head top and the socket tip.
struct WorldState {
  Vec3 bolt;
  double thread_pitch_mm = 1.5;
  double engaged_turns = 8.0;
  Vec3 nutrunner;
  /// Bolt position as estimated by the coarse global perception.
  Vec3 believed_bolt;
  std::vector<Obstacle> obstacles;

  bool hovering = false;
  bool inserted = false;
  bool disassembled = false;
  std::optional<Fault> fault;

  /// Horizontal distance between the nutrunner axis and the bolt axis.
  double alignment_error() const;
  /// Smallest obstacle surface distance to the bolt axis; +inf without
  /// obstacles, negative when an obstacle covers the axis.
  double clearance() const;
  /// The wrist camera sees the bolt once the nutrunner has approached it.
  bool observable() const { return hovering || inserted; }

  bool operator==(const WorldState&) const = default;
};

std::uint64_t hash(const WorldState& world);

struct ControllerOutcome {
  WorldState world;
  bool succeeded = false;
  std::optional<Fault> fault;
  /// Peak torque seen by the nutrunner during the primitive, in Nm.
  double peak_torque_nm = 0.0;
};

enum class Primitive { kApproach, kMate, kPush, kInsert, kDisassemble };

std::string_view to_string(Primitive primitive);
/// Case-insensitive lookup of a primitive by action name.
std::optional<Primitive> primitive_from_name(std::string_view name);

ControllerOutcome approach(const WorldState& world, const WorldConfig& cfg, Vec3 target);
ControllerOutcome mate(const WorldState& world, const WorldConfig& cfg, Rng& rng);
/// Moves every movable obstacle closer than required_clearance + push_margin
/// out to exactly that clearance. An immovable obstacle inside
/// required_clearance blocks the push.
ControllerOutcome push(const WorldState& world, const WorldConfig& cfg);
ControllerOutcome insert(const WorldState& world, const WorldConfig& cfg);
ControllerOutcome disassemble(const WorldState& world, const WorldConfig& cfg);

/// Torque the socket reports when descending with the given misalignment.
/// Within the compliance radius the socket seats and only the nominal
/// running torque appears; outside it the socket lands on the bolt head and
/// the torque climbs from three times nominal with the overlap.
double insertion_torque(double alignment_error, const WorldConfig& cfg);

struct UnscrewMotion {
  double duration_s = 0.0;
  double retraction_mm = 0.0;
  double retraction_speed_mm_s = 0.0;
  double thread_speed_mm_s = 0.0;  // pitch * turn rate
};

UnscrewMotion unscrew_motion(const WorldState& world, const WorldConfig& cfg);

struct Observation {
  double alignment_error = 0.0;
  double clearance = 0.0;
};

/// Alignment error and clearance with additive N(0, sigma^2) noise. An
/// infinite clearance stays infinite. Values are not clamped.
Observation observe(const WorldState& world, double sigma_mm, Rng& rng);

/// One line of an episode trace.
struct TraceRecord {
  std::size_t step = 0;
  Primitive action = Primitive::kApproach;
  std::optional<Fault> fault;
  double alignment_error = 0.0;
  double clearance = 0.0;
  bool hovering = false;
  bool inserted = false;
  bool disassembled = false;
  std::uint64_t pre_hash = 0;
  std::uint64_t post_hash = 0;

  bool operator==(const TraceRecord&) const = default;
};

std::string format_trace_record(const TraceRecord& record);
std::optional<TraceRecord> parse_trace_record(std::string_view line);
std::string trace_header(const WorldConfig& cfg);

/// Owns the world for one episode. Controllers are the only way to change
/// it, and every controller call is appended to the trace.
class Simulator {
 public:
  Simulator(WorldState world, WorldConfig cfg);

  const WorldState& world() const { return world_; }
  const WorldConfig& config() const { return cfg_; }
  const std::vector<TraceRecord>& trace() const { return trace_; }

  /// Approach targets the believed bolt position.
  ControllerOutcome execute(Primitive primitive, Rng& rng);

  void write_trace(std::ostream& out) const;

 private:
  WorldState world_;
  WorldConfig cfg_;
  std::vector<TraceRecord> trace_;
};

}  // namespace boltdis::sim
