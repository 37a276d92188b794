#include "radarq/physics.h"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace radarq {

CoherenceTime NoiseParams::decay_tau() const {
  if (!coherence_time) return std::nullopt;
  return Duration(static_cast<Duration::rep>(
      std::llround(static_cast<double>(coherence_time->count()) * tau_ratio)));
}

std::optional<EntangledPair> attempt_link_generation(const LinkSpec& link,
                                                     SimTime now, Rng& rng) {
  if (!bernoulli(rng, link.gen_prob)) return std::nullopt;
  return EntangledPair{link.u, link.v, link.init_fidelity, now, 0};
}

double decayed_fidelity(const EntangledPair& pair, SimTime now,
                        CoherenceTime tau) {
  if (!tau) return pair.fidelity_at_creation;
  const double age = static_cast<double>((now - pair.created_at).count());
  const double scale = static_cast<double>(tau->count());
  return kWernerFloor +
         (pair.fidelity_at_creation - kWernerFloor) * std::exp(-age / scale);
}

double compose_swap_fidelity(double f1, double f2) {
  const double f = f1 * f2 + (1.0 - f1) * (1.0 - f2) / 3.0;
  return std::clamp(f, kWernerFloor, 1.0);
}

std::optional<EntangledPair> attempt_swap(const EntangledPair& left,
                                          const EntangledPair& right,
                                          NodeId at_node, SimTime now,
                                          const NoiseParams& params,
                                          Rng& rng) {
  const bool left_ok = left.a == at_node || left.b == at_node;
  const bool right_ok = right.a == at_node || right.b == at_node;
  if (!left_ok || !right_ok) {
    throw std::logic_error("swap segments do not meet at the swapping node");
  }
  const NodeId outer_left = left.a == at_node ? left.b : left.a;
  const NodeId outer_right = right.a == at_node ? right.b : right.a;

  if (!bernoulli(rng, params.bsm_prob)) return std::nullopt;

  const CoherenceTime tau = params.decay_tau();
  const double f = compose_swap_fidelity(decayed_fidelity(left, now, tau),
                                         decayed_fidelity(right, now, tau));
  return EntangledPair{outer_left, outer_right, f, now,
                       left.swap_count + right.swap_count + 1};
}

bool is_expired(const EntangledPair& pair, SimTime now,
                CoherenceTime coherence_time) {
  return coherence_time && (now - pair.created_at) > *coherence_time;
}

}  // namespace radarq
