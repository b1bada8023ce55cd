#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "boltdis/belief.hpp"
#include "boltdis/pddl.hpp"
#include "boltdis/planner.hpp"
#include "boltdis/simworld.hpp"

namespace boltdis {

struct ExecutorConfig {
  std::size_t replan_budget = 10;
  double verify_threshold = 0.5;

  void validate() const;
};

/// Configuration of every module one episode touches.
struct EpisodeConfig {
  PlannerConfig planner;
  ExecutorConfig executor;
  GrounderConfig grounder;
  sim::WorldConfig world;
};

enum class FailureReason { kNoPlan, kReplanBudgetExhausted, kControllerFaultUnrecoverable };

std::string_view to_string(FailureReason reason);

struct StepRecord {
  std::string action;
  /// Precondition satisfaction in the belief the action was chosen from.
  double precondition_satisfaction = 1.0;
  std::optional<sim::Fault> fault;
  bool verified = false;
};

struct EpisodeResult {
  bool success = false;
  std::size_t steps_executed = 0;
  std::size_t replans = 0;
  std::vector<std::string> actions;
  std::optional<FailureReason> failure_reason;

  std::vector<StepRecord> steps;
  std::vector<sim::TraceRecord> trace;

  bool executed(std::string_view action) const;
  std::size_t count(std::string_view action) const;
};

/// `success=true steps=3 replans=0 actions=Approach,Insert,Disassemble failure=none`
std::string format_episode(const EpisodeResult& result);

/// Closed-loop execution: plan on the belief, run the first unexecuted
/// primitive, re-ground the neural predicates, verify the primitive's
/// effects and replan from the refreshed belief whenever the controller
/// faults or verification fails. Neural atoms become pinned once they have
/// been grounded from an observation. The same (world, seed) always yields
/// the same result.
EpisodeResult run_episode(const Domain& domain, const Problem& problem,
                          const sim::WorldState& world, const EpisodeConfig& cfg,
                          std::uint64_t seed);

inline constexpr sim::Primitive kBaselineSequence[] = {
    sim::Primitive::kApproach, sim::Primitive::kInsert, sim::Primitive::kDisassemble};

/// Open-loop execution of a fixed primitive sequence against the believed
/// bolt pose: no perception, no verification, no replanning. Stops at the
/// first controller fault.
EpisodeResult run_baseline_episode(std::span<const sim::Primitive> sequence,
                                   const sim::WorldState& world,
                                   const sim::WorldConfig& cfg, std::uint64_t seed);

}  // namespace boltdis
