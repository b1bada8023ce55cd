#include "boltdis/executor.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "boltdis/rng.hpp"

namespace boltdis {

void ExecutorConfig::validate() const {
  if (!(verify_threshold >= 0.0 && verify_threshold <= 1.0)) {
    throw std::invalid_argument("verify_threshold must lie in [0, 1]");
  }
}

std::string_view to_string(FailureReason reason) {
  switch (reason) {
    case FailureReason::kNoPlan: return "no_plan";
    case FailureReason::kReplanBudgetExhausted: return "replan_budget_exhausted";
    case FailureReason::kControllerFaultUnrecoverable: return "controller_fault_unrecoverable";
  }
  return "unknown";
}

bool EpisodeResult::executed(std::string_view action) const { return count(action) > 0; }

std::size_t EpisodeResult::count(std::string_view action) const {
  return static_cast<std::size_t>(std::count(actions.begin(), actions.end(), action));
}

std::string format_episode(const EpisodeResult& result) {
  std::ostringstream out;
  out << "success=" << (result.success ? "true" : "false")
      << " steps=" << result.steps_executed << " replans=" << result.replans
      << " actions=";
  for (std::size_t i = 0; i < result.actions.size(); ++i) {
    out << (i == 0 ? "" : ",") << result.actions[i];
  }
  if (result.actions.empty()) out << '-';
  out << " failure="
      << (result.failure_reason ? to_string(*result.failure_reason) : "none");
  return out.str();
}

namespace {

bool verified(const BeliefState& belief, const std::vector<Literal>& effects,
              double threshold) {
  return std::all_of(effects.begin(), effects.end(), [&](const Literal& l) {
    const double p = belief.probability(l.atom);
    return l.negated ? p <= 1.0 - threshold : p >= threshold;
  });
}

}  // namespace

EpisodeResult run_episode(const Domain& domain, const Problem& problem,
                          const sim::WorldState& world, const EpisodeConfig& cfg,
                          std::uint64_t seed) {
  cfg.planner.validate();
  cfg.executor.validate();
  cfg.grounder.validate();

  const std::vector<GroundAction> actions = ground_actions(domain);
  std::vector<sim::Primitive> controllers;
  for (const auto& a : actions) {
    auto p = sim::primitive_from_name(a.name);
    if (!p) throw std::invalid_argument("no controller for action '" + a.name + "'");
    controllers.push_back(*p);
  }
  const std::vector<Atom> neural = neural_atoms(domain);

  Rng control(derive_seed(seed, {1}));
  Rng perception(derive_seed(seed, {2}));
  sim::Simulator sim(world, cfg.world);

  BeliefState belief = belief_from_literals(problem.init);
  AtomSet pinned;
  auto perceive = [&] {
    if (!sim.world().observable()) return;
    belief = refresh(belief, sim.world(), neural, cfg.grounder, perception);
    pinned.insert(neural.begin(), neural.end());
  };

  EpisodeResult result;
  // Each plan executes at least one step, so this bounds the episode even
  // when verification keeps passing without reaching the goal.
  const std::size_t max_steps = (cfg.executor.replan_budget + 1) * cfg.planner.max_depth;
  std::vector<std::size_t> pending;  // indices into `actions`
  std::size_t cursor = 0;

  auto spend_replan = [&](FailureReason if_exhausted) {
    if (result.replans >= cfg.executor.replan_budget) {
      result.failure_reason = if_exhausted;
      return false;
    }
    ++result.replans;
    pending.clear();
    cursor = 0;
    return true;
  };

  perceive();
  for (;;) {
    if (satisfaction(belief, problem.goal) >= cfg.planner.goal_threshold) {
      result.success = true;
      break;
    }
    if (result.steps.size() >= max_steps) {
      result.failure_reason = FailureReason::kReplanBudgetExhausted;
      break;
    }
    if (cursor >= pending.size()) {
      try {
        Plan p = plan(actions, belief, problem.goal, cfg.planner, pinned);
        pending.clear();
        for (const auto& step : p.steps) {
          auto it = std::find(actions.begin(), actions.end(), step);
          pending.push_back(static_cast<std::size_t>(it - actions.begin()));
        }
        cursor = 0;
      } catch (const NoPlanFound&) {
        // Grounder outputs near 0.5 can leave every action pruned; look again.
        if (!sim.world().observable()) {
          result.failure_reason = FailureReason::kNoPlan;
          break;
        }
        if (!spend_replan(FailureReason::kNoPlan)) break;
        perceive();
        continue;
      }
    }

    const std::size_t index = pending[cursor];
    const GroundAction& action = actions[index];
    const double pre = satisfaction(belief, action.pre);
    if (pre < cfg.planner.prune_threshold) {
      // Perception after the previous step invalidated the rest of the plan.
      if (!spend_replan(FailureReason::kReplanBudgetExhausted)) break;
      continue;
    }
    ++cursor;

    const sim::ControllerOutcome outcome = sim.execute(controllers[index], control);
    if (outcome.succeeded) {
      for (const auto& literal : action.eff) belief = belief.assert_literal(literal);
    }
    perceive();

    StepRecord step{action.name, pre, outcome.fault, false};
    step.verified = outcome.succeeded &&
                    verified(belief, action.eff, cfg.executor.verify_threshold);
    result.steps.push_back(step);
    result.actions.push_back(action.name);
    if (!step.verified) {
      const FailureReason reason = outcome.succeeded
                                       ? FailureReason::kReplanBudgetExhausted
                                       : FailureReason::kControllerFaultUnrecoverable;
      if (!spend_replan(reason)) break;
    }
  }

  result.steps_executed = result.actions.size();
  result.trace = sim.trace();
  return result;
}

EpisodeResult run_baseline_episode(std::span<const sim::Primitive> sequence,
                                   const sim::WorldState& world,
                                   const sim::WorldConfig& cfg, std::uint64_t seed) {
  Rng control(derive_seed(seed, {1}));
  sim::Simulator sim(world, cfg);
  EpisodeResult result;
  result.success = true;
  for (sim::Primitive p : sequence) {
    const sim::ControllerOutcome outcome = sim.execute(p, control);
    result.actions.emplace_back(sim::to_string(p));
    result.steps.push_back({std::string(sim::to_string(p)), 1.0, outcome.fault,
                            outcome.succeeded});
    if (!outcome.succeeded) {
      result.success = false;
      result.failure_reason = FailureReason::kControllerFaultUnrecoverable;
      break;
    }
  }
  result.steps_executed = result.actions.size();
  result.trace = sim.trace();
  return result;
}

}  // namespace boltdis
