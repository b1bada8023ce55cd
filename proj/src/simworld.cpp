#include "boltdis/simworld.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "sexpr.hpp"

namespace boltdis::sim {

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::string_view to_string(Fault fault) {
  switch (fault) {
    case Fault::kTorqueExceeded: return "torque_exceeded";
    case Fault::kNotEngaged: return "not_engaged";
    case Fault::kBlocked: return "blocked";
    case Fault::kNotPositioned: return "not_positioned";
  }
  return "unknown";
}

std::optional<Fault> fault_from_string(std::string_view text) {
  for (Fault f : {Fault::kTorqueExceeded, Fault::kNotEngaged, Fault::kBlocked,
                  Fault::kNotPositioned}) {
    if (to_string(f) == text) return f;
  }
  return std::nullopt;
}

void WorldConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be > 0");
  };
  positive(compliance_radius_mm, "compliance_radius_mm");
  positive(required_clearance_mm, "required_clearance_mm");
  positive(hover_height_mm, "hover_height_mm");
  positive(torque_cutoff_nm, "torque_cutoff_nm");
  positive(contact_depth_mm, "contact_depth_mm");
  positive(turn_rate, "turn_rate");
  positive(retraction_speed_scale, "retraction_speed_scale");
  if (nominal_torque_nm < 0.0 || nominal_torque_nm > torque_cutoff_nm) {
    throw std::invalid_argument("nominal_torque_nm must lie in [0, torque_cutoff_nm]");
  }
  if (mate_sigma_mm < 0.0 || camera_radius_mm < 0.0 || push_margin_mm < 0.0 ||
      retraction_tolerance < 0.0) {
    throw std::invalid_argument("world lengths and tolerances must be >= 0");
  }
  if (mate_blocked_failure < 0.0 || mate_blocked_failure > 1.0) {
    throw std::invalid_argument("mate_blocked_failure must be a probability");
  }
}

double WorldState::alignment_error() const {
  return distance(nutrunner.xy(), bolt.xy());
}

double WorldState::clearance() const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& o : obstacles) {
    best = std::min(best, distance(o.center, bolt.xy()) - o.radius);
  }
  return best;
}

namespace {

class Fnv1a {
 public:
  void add(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h_ ^= (v >> (8 * i)) & 0xffU;
      h_ *= 0x100000001b3ULL;
    }
  }
  void add(double v) { add(std::bit_cast<std::uint64_t>(v)); }
  void add(bool v) { add(static_cast<std::uint64_t>(v)); }
  void add(Vec3 v) {
    add(v.x);
    add(v.y);
    add(v.z);
  }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

ControllerOutcome fault_outcome(const WorldState& world, Fault fault, double torque = 0.0) {
  ControllerOutcome out{world, false, fault, torque};
  out.world.fault = fault;
  return out;
}

ControllerOutcome ok_outcome(WorldState world, double torque = 0.0) {
  world.fault.reset();
  return {std::move(world), true, std::nullopt, torque};
}

}  // namespace

std::uint64_t hash(const WorldState& world) {
  Fnv1a h;
  h.add(world.bolt);
  h.add(world.thread_pitch_mm);
  h.add(world.engaged_turns);
  h.add(world.nutrunner);
  h.add(world.believed_bolt);
  h.add(static_cast<std::uint64_t>(world.obstacles.size()));
  for (const auto& o : world.obstacles) {
    h.add(o.center.x);
    h.add(o.center.y);
    h.add(o.radius);
    h.add(o.movable);
  }
  h.add(world.hovering);
  h.add(world.inserted);
  h.add(world.disassembled);
  h.add(world.fault ? static_cast<std::uint64_t>(*world.fault) + 1 : 0);
  return h.value();
}

std::string_view to_string(Primitive primitive) {
  switch (primitive) {
    case Primitive::kApproach: return "Approach";
    case Primitive::kMate: return "Mate";
    case Primitive::kPush: return "Push";
    case Primitive::kInsert: return "Insert";
    case Primitive::kDisassemble: return "Disassemble";
  }
  return "unknown";
}

std::optional<Primitive> primitive_from_name(std::string_view name) {
  const std::string key = sexpr::lowercase(name);
  for (Primitive p : {Primitive::kApproach, Primitive::kMate, Primitive::kPush,
                      Primitive::kInsert, Primitive::kDisassemble}) {
    if (sexpr::lowercase(to_string(p)) == key) return p;
  }
  return std::nullopt;
}

ControllerOutcome approach(const WorldState& world, const WorldConfig& cfg, Vec3 target) {
  if (world.inserted) return fault_outcome(world, Fault::kNotPositioned);
  WorldState next = world;
  next.nutrunner = {target.x, target.y, target.z + cfg.hover_height_mm};
  next.hovering = true;
  return ok_outcome(std::move(next));
}

ControllerOutcome mate(const WorldState& world, const WorldConfig& cfg, Rng& rng) {
  if (!world.hovering) return fault_outcome(world, Fault::kNotPositioned);
  const bool view_blocked = world.clearance() < cfg.camera_radius_mm;
  if (view_blocked && rng.bernoulli(cfg.mate_blocked_failure)) {
    return fault_outcome(world, Fault::kBlocked);
  }
  // Visual servoing on the wrist camera leaves a small residual error.
  const double residual = std::abs(rng.normal(0.0, cfg.mate_sigma_mm));
  const double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
  WorldState next = world;
  next.nutrunner.x = world.bolt.x + residual * std::cos(heading);
  next.nutrunner.y = world.bolt.y + residual * std::sin(heading);
  return ok_outcome(std::move(next));
}

ControllerOutcome push(const WorldState& world, const WorldConfig& cfg) {
  if (!world.hovering) return fault_outcome(world, Fault::kNotPositioned);
  const Vec2 axis = world.bolt.xy();
  const double target_clearance = cfg.required_clearance_mm + cfg.push_margin_mm;
  auto surface = [&](const Obstacle& o) { return distance(o.center, axis) - o.radius; };
  for (const auto& o : world.obstacles) {
    if (!o.movable && surface(o) < cfg.required_clearance_mm) {
      return fault_outcome(world, Fault::kBlocked);
    }
  }
  // The sweep covers the margin band too, so obstacles just outside the
  // sleeve envelope end up at the same clearance as the rest.
  WorldState next = world;
  for (auto& o : next.obstacles) {
    if (!o.movable || surface(o) >= target_clearance) continue;
    Vec2 dir{o.center.x - axis.x, o.center.y - axis.y};
    double norm = std::hypot(dir.x, dir.y);
    if (norm < 1e-9) {
      // Centered on the axis: sweep away from the nutrunner side.
      dir = {axis.x - world.nutrunner.x, axis.y - world.nutrunner.y};
      norm = std::hypot(dir.x, dir.y);
      if (norm < 1e-9) dir = {1.0, 0.0}, norm = 1.0;
    }
    const double target = o.radius + target_clearance;
    o.center = {axis.x + dir.x / norm * target, axis.y + dir.y / norm * target};
  }
  return ok_outcome(std::move(next));
}

double insertion_torque(double alignment_error, const WorldConfig& cfg) {
  if (alignment_error <= cfg.compliance_radius_mm) return cfg.nominal_torque_nm;
  // Socket lands on the bolt head flank: torque climbs with the overlap.
  return cfg.nominal_torque_nm * (3.0 + (alignment_error - cfg.compliance_radius_mm));
}

ControllerOutcome insert(const WorldState& world, const WorldConfig& cfg) {
  if (!world.hovering) return fault_outcome(world, Fault::kNotPositioned);
  if (world.clearance() < cfg.required_clearance_mm) {
    return fault_outcome(world, Fault::kBlocked);
  }
  const double torque = insertion_torque(world.alignment_error(), cfg);
  if (torque > cfg.torque_cutoff_nm) {
    return fault_outcome(world, Fault::kTorqueExceeded, torque);
  }
  WorldState next = world;
  next.nutrunner.z = world.bolt.z - cfg.contact_depth_mm;
  next.hovering = false;
  next.inserted = true;
  return ok_outcome(std::move(next), torque);
}

UnscrewMotion unscrew_motion(const WorldState& world, const WorldConfig& cfg) {
  UnscrewMotion m;
  m.duration_s = world.engaged_turns / cfg.turn_rate;
  m.thread_speed_mm_s = world.thread_pitch_mm * cfg.turn_rate;
  m.retraction_speed_mm_s = m.thread_speed_mm_s * cfg.retraction_speed_scale;
  m.retraction_mm = m.retraction_speed_mm_s * m.duration_s;
  return m;
}

ControllerOutcome disassemble(const WorldState& world, const WorldConfig& cfg) {
  if (!world.inserted || world.disassembled) {
    return fault_outcome(world, Fault::kNotEngaged);
  }
  const UnscrewMotion m = unscrew_motion(world, cfg);
  if (std::abs(m.retraction_speed_mm_s - m.thread_speed_mm_s) >
      cfg.retraction_tolerance * m.thread_speed_mm_s) {
    // Retracting out of step with the thread binds it.
    return fault_outcome(world, Fault::kTorqueExceeded,
                         insertion_torque(cfg.compliance_radius_mm + 1.0, cfg));
  }
  WorldState next = world;
  next.nutrunner.z += m.retraction_mm;
  next.bolt.z += m.retraction_mm;
  next.engaged_turns = 0.0;
  next.disassembled = true;
  return ok_outcome(std::move(next), cfg.nominal_torque_nm);
}

Observation observe(const WorldState& world, double sigma_mm, Rng& rng) {
  Observation obs;
  obs.alignment_error = rng.normal(world.alignment_error(), sigma_mm);
  const double d = world.clearance();
  obs.clearance = std::isinf(d) ? d : rng.normal(d, sigma_mm);
  return obs;
}

namespace {

std::string format_length(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::optional<double> parse_length(std::string_view s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> parse_hex(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::string format_trace_record(const TraceRecord& r) {
  std::string flags;
  auto flag = [&](bool on, const char* name) {
    if (!on) return;
    if (!flags.empty()) flags += ',';
    flags += name;
  };
  flag(r.hovering, "hovering");
  flag(r.inserted, "inserted");
  flag(r.disassembled, "disassembled");
  if (flags.empty()) flags = "-";
  char pre[17];
  char post[17];
  std::snprintf(pre, sizeof pre, "%016llx", static_cast<unsigned long long>(r.pre_hash));
  std::snprintf(post, sizeof post, "%016llx", static_cast<unsigned long long>(r.post_hash));
  std::ostringstream out;
  out << "step=" << r.step << " action=" << to_string(r.action)
      << " outcome=" << (r.fault ? to_string(*r.fault) : "ok")
      << " e=" << format_length(r.alignment_error) << " d=" << format_length(r.clearance)
      << " flags=" << flags << " pre=" << pre << " post=" << post;
  return out.str();
}

std::optional<TraceRecord> parse_trace_record(std::string_view line) {
  TraceRecord r;
  int seen = 0;
  std::istringstream in{std::string(line)};
  std::string field;
  while (in >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) return std::nullopt;
    const std::string key = field.substr(0, eq);
    const std::string value = field.substr(eq + 1);
    if (key == "step") {
      std::size_t step = 0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), step);
      if (ec != std::errc{} || ptr != value.data() + value.size()) return std::nullopt;
      r.step = step;
    } else if (key == "action") {
      auto p = primitive_from_name(value);
      if (!p) return std::nullopt;
      r.action = *p;
    } else if (key == "outcome") {
      if (value != "ok") {
        r.fault = fault_from_string(value);
        if (!r.fault) return std::nullopt;
      }
    } else if (key == "e" || key == "d") {
      auto v = parse_length(value);
      if (!v) return std::nullopt;
      (key == "e" ? r.alignment_error : r.clearance) = *v;
    } else if (key == "flags") {
      if (value != "-") {
        std::istringstream parts(value);
        std::string f;
        while (std::getline(parts, f, ',')) {
          if (f == "hovering") r.hovering = true;
          else if (f == "inserted") r.inserted = true;
          else if (f == "disassembled") r.disassembled = true;
          else return std::nullopt;
        }
      }
    } else if (key == "pre" || key == "post") {
      auto v = parse_hex(value);
      if (!v) return std::nullopt;
      (key == "pre" ? r.pre_hash : r.post_hash) = *v;
    } else {
      return std::nullopt;
    }
    ++seen;
  }
  if (seen != 8) return std::nullopt;
  return r;
}

std::string trace_header(const WorldConfig& cfg) {
  std::ostringstream out;
  out << "# torque_cutoff_nm=" << cfg.torque_cutoff_nm
      << " contact_depth_mm=" << cfg.contact_depth_mm
      << " compliance_radius_mm=" << cfg.compliance_radius_mm
      << " required_clearance_mm=" << cfg.required_clearance_mm;
  return out.str();
}

Simulator::Simulator(WorldState world, WorldConfig cfg)
    : world_(std::move(world)), cfg_(cfg) {
  cfg_.validate();
}

ControllerOutcome Simulator::execute(Primitive primitive, Rng& rng) {
  const std::uint64_t pre = hash(world_);
  ControllerOutcome out;
  switch (primitive) {
    case Primitive::kApproach: out = approach(world_, cfg_, world_.believed_bolt); break;
    case Primitive::kMate: out = mate(world_, cfg_, rng); break;
    case Primitive::kPush: out = push(world_, cfg_); break;
    case Primitive::kInsert: out = insert(world_, cfg_); break;
    case Primitive::kDisassemble: out = disassemble(world_, cfg_); break;
  }
  world_ = out.world;
  trace_.push_back({trace_.size(), primitive, out.fault, world_.alignment_error(),
                    world_.clearance(), world_.hovering, world_.inserted,
                    world_.disassembled, pre, hash(world_)});
  return out;
}

void Simulator::write_trace(std::ostream& out) const {
  out << trace_header(cfg_) << '\n';
  for (const auto& r : trace_) out << format_trace_record(r) << '\n';
}

}  // namespace boltdis::sim
