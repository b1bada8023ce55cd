#include "boltdis/belief.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace boltdis {

double BeliefState::probability(const Atom& atom) const {
  auto it = probs_.find(atom);
  return it == probs_.end() ? 0.0 : it->second;
}

BeliefState BeliefState::with(const Atom& atom, double p) const {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("probability of " + to_string(atom) +
                                " must lie in [0, 1], got " + std::to_string(p));
  }
  BeliefState next = *this;
  next.probs_[atom] = p;
  return next;
}

BeliefState BeliefState::assert_literal(const Literal& literal) const {
  return with(literal.atom, literal.negated ? 0.0 : 1.0);
}

AtomSet BeliefState::argmax_true() const {
  AtomSet out;
  for (const auto& [atom, p] : probs_) {
    if (p >= 0.5) out.insert(atom);
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const BeliefState& belief) {
  os << '{';
  bool first = true;
  for (const auto& [atom, p] : belief.entries()) {
    os << (first ? "" : ", ") << atom << '=' << p;
    first = false;
  }
  return os << '}';
}

BeliefState belief_from_literals(std::span<const Literal> literals) {
  BeliefState belief;
  for (const auto& literal : literals) belief = belief.assert_literal(literal);
  return belief;
}

BeliefState assert_literal(const BeliefState& belief, const Literal& literal) {
  return belief.assert_literal(literal);
}

void GrounderConfig::validate() const {
  if (!(aim_steepness_mm > 0.0) || !(clear_steepness_mm > 0.0)) {
    throw std::invalid_argument("grounder steepness must be > 0");
  }
  for (double rate : {aim_error_rate, clear_error_rate}) {
    if (!(rate >= 0.0 && rate < 0.5)) {
      throw std::invalid_argument("grounder error rates must lie in [0, 0.5)");
    }
  }
  if (observation_sigma_mm < 0.0) {
    throw std::invalid_argument("observation_sigma_mm must be >= 0");
  }
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double z = std::exp(x);
  return z / (1.0 + z);
}

namespace {

GrounderOutput binary(const Atom& atom, double p_true, bool swap) {
  if (swap) p_true = 1.0 - p_true;
  return {atom, {p_true, 1.0 - p_true}};
}

}  // namespace

GrounderOutput ground_target_aim(double alignment_error_mm, const GrounderConfig& cfg,
                                 Rng& rng, const Atom& atom) {
  if (!(alignment_error_mm >= 0.0)) {
    throw std::invalid_argument("alignment error must be >= 0");
  }
  const double p =
      logistic((cfg.aim_threshold_mm - alignment_error_mm) / cfg.aim_steepness_mm);
  return binary(atom, p, rng.bernoulli(cfg.aim_error_rate));
}

GrounderOutput ground_target_clear(double clearance_mm, const GrounderConfig& cfg,
                                   Rng& rng, const Atom& atom) {
  if (!(clearance_mm >= 0.0)) throw std::invalid_argument("clearance must be >= 0");
  if (std::isinf(clearance_mm)) return binary(atom, 1.0 - cfg.clear_error_rate, false);
  const double p =
      logistic((clearance_mm - cfg.clear_threshold_mm) / cfg.clear_steepness_mm);
  return binary(atom, p, rng.bernoulli(cfg.clear_error_rate));
}

BeliefState refresh(const BeliefState& belief, const sim::WorldState& world,
                    std::span<const Atom> atoms, const GrounderConfig& cfg, Rng& rng) {
  if (atoms.empty()) return belief;
  const sim::Observation obs = sim::observe(world, cfg.observation_sigma_mm, rng);
  const double e = std::max(0.0, obs.alignment_error);
  const double d = std::max(0.0, obs.clearance);
  BeliefState next = belief;
  for (const auto& atom : atoms) {
    GrounderOutput out;
    if (atom.predicate == kTargetAim.predicate) {
      out = ground_target_aim(e, cfg, rng, atom);
    } else if (atom.predicate == kTargetClear.predicate) {
      out = ground_target_clear(d, cfg, rng, atom);
    } else {
      throw std::invalid_argument("no grounder for neural predicate '" + atom.predicate + "'");
    }
    next = next.with(atom, out.p_true());
  }
  return next;
}

}  // namespace boltdis
