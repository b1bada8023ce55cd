#pragma once

// Exhaustive reference for the planner: enumerates every action sequence up
// to a length bound and keeps the shortest goal-reaching ones. Written
// against the literal semantics only (no queue, no visited set, no sorting).

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "boltdis/pddl.hpp"

namespace oracle {

using Belief = std::map<boltdis::Atom, double>;

struct Action {
  std::vector<boltdis::Literal> pre;
  std::vector<boltdis::Literal> eff;
};

inline double prob(const Belief& b, const boltdis::Atom& a) {
  auto it = b.find(a);
  return it == b.end() ? 0.0 : it->second;
}

inline double holds(const Belief& b, const std::vector<boltdis::Literal>& literals) {
  double p = 1.0;
  for (const auto& l : literals) {
    const double q = prob(b, l.atom);
    p *= l.negated ? 1.0 - q : q;
  }
  return p;
}

inline Belief successor(const Belief& b, const Action& a, const std::set<boltdis::Atom>& pinned) {
  Belief next = b;
  for (const auto& l : a.eff) {
    bool conditioned = false;
    for (const auto& p : a.pre) conditioned = conditioned || p.atom == l.atom;
    if (pinned.count(l.atom) != 0 && !conditioned) continue;
    if (l.negated) {
      next.erase(l.atom);
    } else {
      next[l.atom] = 1.0;
    }
  }
  return next;
}

struct Result {
  std::size_t length = 0;
  double likelihood = 0.0;
};

/// Shortest length L <= max_length at which some sequence reaches the goal,
/// where every prefix of that sequence misses the goal and every action's
/// precondition holds with at least prune_threshold; among those, the
/// highest product of precondition probabilities.
inline std::optional<Result> solve(const std::vector<Action>& actions, const Belief& s0,
                                   const std::vector<boltdis::Literal>& goal,
                                   const std::set<boltdis::Atom>& pinned,
                                   double prune_threshold, double goal_threshold,
                                   std::size_t max_length) {
  struct Path {
    Belief belief;
    double likelihood;
  };
  std::vector<Path> frontier{{s0, 1.0}};
  for (std::size_t length = 1; length <= max_length && !frontier.empty(); ++length) {
    std::vector<Path> next;
    std::optional<double> best;
    for (const auto& path : frontier) {
      for (const auto& a : actions) {
        const double s = holds(path.belief, a.pre);
        if (s < prune_threshold) continue;
        Path child{successor(path.belief, a, pinned), path.likelihood * s};
        if (holds(child.belief, goal) >= goal_threshold) {
          if (!best || child.likelihood > *best) best = child.likelihood;
        } else {
          next.push_back(std::move(child));
        }
      }
    }
    if (best) return Result{length, *best};
    frontier = std::move(next);
  }
  return std::nullopt;
}

}  // namespace oracle
