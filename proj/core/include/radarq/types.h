#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>

namespace radarq {

using NodeId = std::uint32_t;
using RequestId = std::uint32_t;

// Simulation time is integral nanoseconds since the start of a run. Integral
// time keeps event ordering and expiry comparisons exact.
using Duration = std::chrono::nanoseconds;
using SimTime = std::chrono::nanoseconds;

// Absent coherence time means qubits never expire or decay.
using CoherenceTime = std::optional<Duration>;

inline Duration from_seconds(double seconds) {
  return Duration(static_cast<std::int64_t>(std::llround(seconds * 1e9)));
}

inline double to_seconds(Duration d) {
  return static_cast<double>(d.count()) * 1e-9;
}

// One RNG stream per run, owned by the engine.
using Rng = std::mt19937_64;

// Consumes exactly one draw from `rng`.
inline bool bernoulli(Rng& rng, double p) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

}  // namespace radarq
