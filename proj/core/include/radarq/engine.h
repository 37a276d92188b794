#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "radarq/dodag.h"
#include "radarq/metrics.h"
#include "radarq/physics.h"
#include "radarq/protocols.h"
#include "radarq/topology.h"
#include "radarq/types.h"

namespace radarq {

using namespace std::chrono_literals;

enum class TopologyKind { kGrid, kRandom };

struct TopologySpec {
  TopologyKind kind = TopologyKind::kGrid;
  int rows = 10;
  int cols = 10;
  int n = 100;
  double avg_degree = 4.0;
  // Random graphs only; the run seed is used when absent.
  std::optional<std::uint64_t> seed;
  int memory_capacity = 4;
  // Per-link p and F0 that replace the uniform noise defaults.
  std::vector<LinkSpec> link_overrides;
};

enum class WorkloadKind {
  kRandom,  // closed loop, fresh uniform S-D pair whenever a demand completes
  kFixed,   // the listed pairs, re-submitted unchanged
};

struct WorkloadSpec {
  WorkloadKind kind = WorkloadKind::kRandom;
  std::vector<std::pair<NodeId, NodeId>> pairs;
};

struct SimConfig {
  TopologySpec topology;
  StrategyKind strategy = StrategyKind::kRadarQ;
  NoiseParams noise;
  RankWeights weights;
  int concurrency = 10;  // N
  WorkloadSpec workload;
  Duration attempt_period = 1ms;
  Duration classical_latency = 100us;  // per hop
  Duration duration = 60s;             // measured window
  Duration warmup = 5s;                // excluded from metrics
  std::uint64_t seed = 1;
  std::optional<NodeId> root;  // default: graph center
  int max_retries = 10;
  // asynch-root: a demand blocked on memory this long drops what it holds.
  Duration block_timeout = 1s;
  // synch-nca: per-slot coordination latency; default diameter * latency.
  std::optional<Duration> slot_overhead;
  // Verify occupancy bookkeeping after every event (slow).
  bool check_invariants = false;
};

// Field-named problems; empty when the config can run.
std::vector<std::string> validate_config(const SimConfig& config);

NetworkGraph build_topology(const SimConfig& config);
ConfigEcho echo_config(const SimConfig& config);

struct RunDiagnostics {
  std::uint64_t events = 0;
  std::uint64_t generation_attempts = 0;
  std::uint64_t swaps = 0;
  std::uint64_t failed_swaps = 0;
  std::uint64_t expirations = 0;
  std::uint64_t blocked_aborts = 0;
  std::uint64_t slot_discards = 0;
  std::uint64_t localized_updates = 0;
  std::uint64_t scheduled_paths = 0;
  // Scheduled paths longer than the root walk of the same request.
  std::uint64_t path_excess = 0;
  // Scheduled paths that touched a saturated link.
  std::uint64_t saturated_schedules = 0;
  // Memory bookkeeping or event-order violations (check_invariants only).
  std::uint64_t invariant_violations = 0;
  std::uint64_t invariant_checks = 0;
  std::string first_violation;
};

struct RunResult {
  MetricsRecord metrics;
  RunDiagnostics diagnostics;
  std::vector<DeliveryRecord> deliveries;
  std::vector<FailureRecord> failures;
};

struct RunOptions {
  std::ostream* event_log = nullptr;  // JSON lines, one per event
};

// Builds the topology, converges the DODAG and simulates the configured
// window. Throws std::invalid_argument for an invalid config. Identical config
// and seed give identical results.
RunResult simulate(const SimConfig& config, const RunOptions& options = {});
// Same, on a caller-supplied graph (the topology block is only echoed).
RunResult simulate(const SimConfig& config, const NetworkGraph& graph,
                   const RunOptions& options = {});

inline MetricsRecord run(const SimConfig& config) {
  return simulate(config).metrics;
}

// Slot length and coordination overhead used by synch-nca for `graph`.
struct SlotTiming {
  Duration overhead{0};
  Duration length{0};
};
SlotTiming synch_slot_timing(const SimConfig& config, const NetworkGraph& graph,
                             const Dodag& dodag);

}  // namespace radarq
