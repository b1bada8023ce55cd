#include "boltdis/planner.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>

namespace boltdis {

std::string GroundAction::label() const {
  std::string out = "(" + name;
  for (const auto& a : args) out += " " + a;
  return out + ")";
}

namespace {

Literal substitute(const Literal& literal, const std::vector<std::string>& params,
                   const std::vector<std::string>& binding) {
  Literal out = literal;
  for (auto& arg : out.atom.args) {
    auto it = std::find(params.begin(), params.end(), arg);
    if (it != params.end()) arg = binding[static_cast<std::size_t>(it - params.begin())];
  }
  return out;
}

}  // namespace

std::vector<GroundAction> ground_actions(const Domain& domain) {
  const std::vector<std::string> objects = domain.objects();
  std::vector<GroundAction> out;
  for (const auto& schema : domain.actions) {
    std::vector<std::size_t> variables;
    for (std::size_t i = 0; i < schema.params.size(); ++i) {
      if (is_variable(schema.params[i])) variables.push_back(i);
    }
    if (!variables.empty() && objects.empty()) continue;
    std::vector<std::size_t> choice(variables.size(), 0);
    for (;;) {
      std::vector<std::string> binding = schema.params;
      for (std::size_t v = 0; v < variables.size(); ++v) {
        binding[variables[v]] = objects[choice[v]];
      }
      GroundAction ga{schema.name, binding, {}, {}};
      for (const auto& l : schema.pre) ga.pre.push_back(substitute(l, schema.params, binding));
      for (const auto& l : schema.eff) ga.eff.push_back(substitute(l, schema.params, binding));
      out.push_back(std::move(ga));

      std::size_t k = choice.size();
      while (k > 0 && ++choice[k - 1] == objects.size()) choice[--k] = 0;
      if (k == 0) break;
    }
  }
  return out;
}

std::vector<Atom> neural_atoms(const Domain& domain) {
  std::vector<Atom> out;
  for (const auto& action : ground_actions(domain)) {
    for (const auto* list : {&action.pre, &action.eff}) {
      for (const auto& literal : *list) {
        if (domain.is_neural(literal.atom.predicate) &&
            std::find(out.begin(), out.end(), literal.atom) == out.end()) {
          out.push_back(literal.atom);
        }
      }
    }
  }
  return out;
}

void PlannerConfig::validate() const {
  for (double t : {prune_threshold, goal_threshold}) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw std::invalid_argument("planner thresholds must lie in [0, 1]");
    }
  }
}

double satisfaction(const BeliefState& belief, std::span<const Literal> literals) {
  double p = 1.0;
  for (const auto& literal : literals) {
    const double q = belief.probability(literal.atom);
    p *= literal.negated ? 1.0 - q : q;
  }
  return p;
}

namespace {

bool mentions(const std::vector<Literal>& literals, const Atom& atom) {
  return std::any_of(literals.begin(), literals.end(),
                     [&](const Literal& l) { return l.atom == atom; });
}

BeliefState apply_effects(const BeliefState& belief, const GroundAction& action,
                          const AtomSet& pinned) {
  BeliefState next = belief;
  for (const auto& literal : action.eff) {
    if (pinned.contains(literal.atom) && !mentions(action.pre, literal.atom)) continue;
    next = next.assert_literal(literal);
  }
  return next;
}

struct Node {
  BeliefState belief;
  std::vector<std::size_t> ops;
  double likelihood;
};

}  // namespace

BeliefState apply(const BeliefState& belief, const GroundAction& action,
                  double prune_threshold, const AtomSet& pinned) {
  const double s = satisfaction(belief, action.pre);
  if (s < prune_threshold) {
    throw PreconditionBelowThreshold("precondition of " + action.label() +
                                     " holds with probability " + std::to_string(s) +
                                     ", below " + std::to_string(prune_threshold));
  }
  return apply_effects(belief, action, pinned);
}

Plan plan(std::span<const GroundAction> actions, const BeliefState& s0,
          std::span<const Literal> goal, const PlannerConfig& cfg,
          const AtomSet& pinned, SearchTrace* trace) {
  cfg.validate();
  std::deque<Node> queue;
  std::set<BeliefState> visited{s0};
  queue.push_back({s0, {}, 1.0});

  for (std::size_t depth = 0; !queue.empty(); ++depth) {
    if (depth >= cfg.max_depth) {
      throw NoPlanFound("no plan within " + std::to_string(cfg.max_depth) + " steps");
    }
    std::vector<Node> next_layer;
    std::map<BeliefState, std::size_t> layer_index;
    std::optional<Node> best_goal;

    const std::size_t layer_size = queue.size();
    for (std::size_t n = 0; n < layer_size; ++n) {
      Node node = std::move(queue.front());
      queue.pop_front();
      if (trace != nullptr) trace->expanded.push_back({depth, node.belief});

      std::vector<Node> successors;
      for (std::size_t a = 0; a < actions.size(); ++a) {
        const double s = satisfaction(node.belief, actions[a].pre);
        if (s < cfg.prune_threshold) continue;
        Node child{apply_effects(node.belief, actions[a], pinned), node.ops,
                   node.likelihood * s};
        child.ops.push_back(a);
        if (trace != nullptr) ++trace->generated;
        if (satisfaction(child.belief, goal) >= cfg.goal_threshold) {
          if (!best_goal || child.likelihood > best_goal->likelihood) {
            best_goal = std::move(child);
          }
          continue;
        }
        successors.push_back(std::move(child));
      }

      // sort_and_filter: most likely first, declaration order among ties.
      std::stable_sort(successors.begin(), successors.end(),
                       [](const Node& x, const Node& y) { return x.likelihood > y.likelihood; });
      for (auto& child : successors) {
        if (visited.contains(child.belief)) continue;
        auto [it, inserted] = layer_index.emplace(child.belief, next_layer.size());
        if (inserted) {
          next_layer.push_back(std::move(child));
        } else if (child.likelihood > next_layer[it->second].likelihood) {
          next_layer[it->second] = std::move(child);
        }
      }
    }

    if (best_goal) {
      Plan result;
      result.likelihood = best_goal->likelihood;
      for (std::size_t a : best_goal->ops) result.steps.push_back(actions[a]);
      return result;
    }
    for (auto& node : next_layer) {
      visited.insert(node.belief);
      queue.push_back(std::move(node));
    }
  }
  throw NoPlanFound("search space exhausted without reaching the goal");
}

Plan plan(const Domain& domain, const BeliefState& s0, std::span<const Literal> goal,
          const PlannerConfig& cfg, const AtomSet& pinned, SearchTrace* trace) {
  const std::vector<GroundAction> actions = ground_actions(domain);
  return plan(std::span<const GroundAction>(actions), s0, goal, cfg, pinned, trace);
}

}  // namespace boltdis
