#pragma once

#include <optional>

#include "radarq/topology.h"
#include "radarq/types.h"

namespace radarq {

inline constexpr double kWernerFloor = 0.25;

struct EntangledPair {
  NodeId a = 0;
  NodeId b = 0;
  double fidelity_at_creation = 1.0;
  SimTime created_at{0};
  int swap_count = 0;
};

struct NoiseParams {
  double gen_prob = 0.8;        // p
  double bsm_prob = 0.9;        // q
  double init_fidelity = 0.95;  // F0
  CoherenceTime coherence_time;  // T_co; absent = infinite
  double tau_ratio = 1.0;        // tau = tau_ratio * T_co

  // Decay time constant; absent when T_co is infinite.
  CoherenceTime decay_tau() const;
};

// One RNG draw, success with probability link.gen_prob.
std::optional<EntangledPair> attempt_link_generation(const LinkSpec& link,
                                                     SimTime now, Rng& rng);

// 1/4 + (F0 - 1/4) exp(-(now - created_at) / tau). Infinite tau means no
// decay.
double decayed_fidelity(const EntangledPair& pair, SimTime now,
                        CoherenceTime tau);

// Werner-state composition of two segments joined by a Bell measurement.
double compose_swap_fidelity(double f1, double f2);

// Swaps `left` and `right` at their shared node `at_node`. Both segments are
// decayed to `now` first and then composed. One RNG draw. On failure both
// inputs are gone regardless; the caller drops them.
std::optional<EntangledPair> attempt_swap(const EntangledPair& left,
                                          const EntangledPair& right,
                                          NodeId at_node, SimTime now,
                                          const NoiseParams& params, Rng& rng);

bool is_expired(const EntangledPair& pair, SimTime now,
                CoherenceTime coherence_time);

}  // namespace radarq
