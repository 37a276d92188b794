#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "radarq/engine.h"
#include "radarq/metrics.h"

namespace radarq {

// One block of a sweep: the Cartesian product of its axes applied on top of
// `base`. Cells expand in the order strategy, topology, T_co, N, seed.
struct ExperimentSpec {
  std::string name;
  SimConfig base;
  std::vector<StrategyKind> strategies;
  std::vector<TopologySpec> topologies;
  std::vector<CoherenceTime> coherence_times;
  std::vector<int> concurrency;
  int seeds = 5;
  std::uint64_t first_seed = 1;
};

struct SweepSpec {
  std::vector<ExperimentSpec> experiments;
  std::string output;  // CSV path; may be empty
};

// Restricts a sweep; empty sets keep everything.
struct SweepFilter {
  std::set<StrategyKind> strategies;
  std::set<std::string> topologies;  // "grid", "random"
  std::set<int> concurrency;
  std::vector<CoherenceTime> coherence_times;
  std::optional<std::uint64_t> seed;  // replaces every cell's seed range

  bool keeps(const SimConfig& cell) const;
};

// JSON sweep file, either {"experiments": [...], "output": ...} or a single
// experiment object. Throws ConfigError with the failing field. Every cell is
// validated.
SweepSpec parse_sweep(const std::string& json_text);
SweepSpec load_sweep(const std::string& path);

std::vector<SimConfig> expand(const ExperimentSpec& spec);
std::vector<SimConfig> expand(const SweepSpec& spec,
                              const SweepFilter& filter = {});

// Runs every cell, at most `parallelism` at a time. Results come back in cell
// order whatever the scheduling. `progress` is called once per finished cell
// from the calling thread's perspective serialized by a mutex.
std::vector<MetricsRecord> run_cells(
    const std::vector<SimConfig>& cells, int parallelism,
    const std::function<void(std::size_t done, std::size_t total)>& progress =
        nullptr);

void write_csv(std::ostream& out, const std::vector<MetricsRecord>& records);

}  // namespace radarq
