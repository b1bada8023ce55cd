#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "boltdis/belief.hpp"
#include "boltdis/pddl.hpp"

namespace boltdis {

/// An action schema with every parameter bound to an object.
struct GroundAction {
  std::string name;
  std::vector<std::string> args;
  std::vector<Literal> pre;
  std::vector<Literal> eff;

  /// `(Name arg1 arg2)`
  std::string label() const;

  bool operator==(const GroundAction&) const = default;
};

/// Instantiates each schema in declaration order. Constant parameters bind
/// to themselves; `?variables` range over Domain::objects().
std::vector<GroundAction> ground_actions(const Domain& domain);

/// Ground atoms of neural predicates mentioned by any ground action, in
/// order of first mention.
std::vector<Atom> neural_atoms(const Domain& domain);

struct PlannerConfig {
  double prune_threshold = 0.5;
  double goal_threshold = 0.5;
  std::size_t max_depth = 12;

  void validate() const;
};

struct Plan {
  std::vector<GroundAction> steps;
  double likelihood = 1.0;
};

class NoPlanFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PreconditionBelowThreshold : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Product over literals of p(atom), or 1 - p(atom) for negated literals.
/// Literals are treated as independent.
double satisfaction(const BeliefState& belief, std::span<const Literal> literals);

/// Asserts every effect literal. Effects on a pinned atom are skipped
/// unless the action's precondition mentions that atom: once perception
/// has reported a neural atom, only actions that condition on it are
/// trusted to change it.
BeliefState apply(const BeliefState& belief, const GroundAction& action,
                  double prune_threshold, const AtomSet& pinned = {});

/// Search statistics, filled in when a trace is passed to plan().
struct SearchTrace {
  struct Expansion {
    std::size_t depth;
    BeliefState belief;
  };
  std::vector<Expansion> expanded;
  std::size_t generated = 0;
};

/// Breadth-first probabilistic forward search.
///
/// The frontier is a FIFO queue seeded with (s0, {}). Expanding a node tries
/// every ground action in declaration order and keeps a successor when the
/// action's precondition satisfaction reaches prune_threshold; its
/// likelihood is the parent's times that satisfaction. The successors of
/// one expansion are stably sorted by likelihood (highest first) before
/// they are enqueued. A successor whose goal satisfaction reaches
/// goal_threshold ends the search once its depth layer is complete: the
/// most likely goal successor of the shallowest goal layer is returned.
/// Beliefs already queued at a shallower depth are skipped, and within one
/// layer only the most likely node per belief is kept.
///
/// Throws NoPlanFound when the queue empties or max_depth is reached.
Plan plan(std::span<const GroundAction> actions, const BeliefState& s0,
          std::span<const Literal> goal, const PlannerConfig& cfg,
          const AtomSet& pinned = {}, SearchTrace* trace = nullptr);

Plan plan(const Domain& domain, const BeliefState& s0, std::span<const Literal> goal,
          const PlannerConfig& cfg, const AtomSet& pinned = {},
          SearchTrace* trace = nullptr);

}  // namespace boltdis
