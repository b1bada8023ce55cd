#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "boltdis/pddl.hpp"
#include "boltdis/rng.hpp"
#include "boltdis/simworld.hpp"

namespace boltdis {

using AtomSet = std::set<Atom>;

/// Probability that each ground atom is true. Atoms that are not stored
/// are false (closed world). Immutable: every update returns a new state.
class BeliefState {
 public:
  BeliefState() = default;

  double probability(const Atom& atom) const;
  /// Throws std::invalid_argument unless p is in [0, 1].
  BeliefState with(const Atom& atom, double p) const;
  BeliefState assert_literal(const Literal& literal) const;

  const std::map<Atom, double>& entries() const { return probs_; }

  /// Atoms whose probability is at least 0.5.
  AtomSet argmax_true() const;

  auto operator<=>(const BeliefState&) const = default;
  bool operator==(const BeliefState&) const = default;

 private:
  std::map<Atom, double> probs_;
};

std::ostream& operator<<(std::ostream& os, const BeliefState& belief);

/// Belief with every listed literal asserted.
BeliefState belief_from_literals(std::span<const Literal> literals);

BeliefState assert_literal(const BeliefState& belief, const Literal& literal);

struct GrounderConfig {
  double aim_threshold_mm = 2.0;
  double aim_steepness_mm = 0.5;
  double clear_threshold_mm = 12.0;
  double clear_steepness_mm = 2.0;
  double aim_error_rate = 0.02;
  double clear_error_rate = 0.04;
  /// Additive Gaussian noise on the geometric observations.
  double observation_sigma_mm = 0.3;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// Binary softmax-style output: distribution[0] = P(true), [1] = P(false).
struct GrounderOutput {
  Atom atom;
  std::vector<double> distribution;

  double p_true() const { return distribution.at(0); }
  bool argmax_true() const { return distribution.at(0) >= distribution.at(1); }
};

double logistic(double x);

inline const Atom kTargetAim{"target_aim", {"sensor"}};
inline const Atom kTargetClear{"target_clear", {"sensor"}};

/// Alignment grounder. `alignment_error_mm` must be >= 0. The logistic
/// output is swapped with probability aim_error_rate to emulate the
/// classifier getting the image wrong.
GrounderOutput ground_target_aim(double alignment_error_mm, const GrounderConfig& cfg,
                                 Rng& rng, const Atom& atom = kTargetAim);

/// Clearance grounder. `clearance_mm` must be >= 0 or +inf. An infinite
/// clearance yields P(true) = 1 - clear_error_rate without a swap draw.
GrounderOutput ground_target_clear(double clearance_mm, const GrounderConfig& cfg,
                                   Rng& rng, const Atom& atom = kTargetClear);

/// Overwrites each listed neural atom from its grounder, using one noisy
/// observation of `world`. Negative observed lengths are clamped to 0.
/// Symbolic atoms are left as they are.
BeliefState refresh(const BeliefState& belief, const sim::WorldState& world,
                    std::span<const Atom> atoms, const GrounderConfig& cfg, Rng& rng);

}  // namespace boltdis
