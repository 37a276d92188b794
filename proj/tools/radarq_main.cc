// radarq: single runs, sweeps and config inspection.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime fault.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "radarq/config.h"
#include "radarq/engine.h"
#include "radarq/experiment.h"
#include "radarq/metrics.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct RuntimeFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flags shared by run and describe; they override the file's values.
struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> strategy;
  std::optional<std::string> topology;
  std::optional<int> concurrency;
  std::optional<std::string> coherence;
  std::optional<double> duration;
  std::optional<double> warmup;
  bool check_invariants = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path, "JSON run configuration");
    cmd->add_option("--seed", seed, "RNG seed");
    cmd->add_option("--strategy", strategy, "radar-q | synch-nca | asynch-root");
    cmd->add_option("--topology", topology, "grid | random");
    cmd->add_option("-N,--concurrency", concurrency, "concurrent demands");
    cmd->add_option("--tco", coherence, "coherence time in seconds, or inf");
    cmd->add_option("--duration", duration, "measured window, seconds");
    cmd->add_option("--warmup", warmup, "warm-up excluded from metrics, seconds");
    cmd->add_flag("--check-invariants", check_invariants,
                  "verify memory bookkeeping after every event");
  }

  radarq::SimConfig resolve() const {
    radarq::SimConfig c =
        config_path.empty() ? radarq::SimConfig{} : radarq::load_config(config_path);
    if (seed) c.seed = *seed;
    if (strategy) {
      try {
        c.strategy = radarq::parse_strategy(*strategy);
      } catch (const std::invalid_argument& e) {
        throw radarq::ConfigError(std::string("strategy: ") + e.what());
      }
    }
    if (topology) {
      if (*topology == "grid") {
        c.topology.kind = radarq::TopologyKind::kGrid;
      } else if (*topology == "random") {
        c.topology.kind = radarq::TopologyKind::kRandom;
      } else {
        throw radarq::ConfigError("topology: unknown kind '" + *topology +
                                  "'; valid: grid, random");
      }
    }
    if (concurrency) c.concurrency = *concurrency;
    if (coherence) c.noise.coherence_time = radarq::parse_coherence(*coherence);
    if (duration) c.duration = radarq::from_seconds(*duration);
    if (warmup) c.warmup = radarq::from_seconds(*warmup);
    if (check_invariants) c.check_invariants = true;
    return c;
  }
};

void require_valid(const radarq::SimConfig& c) {
  const std::vector<std::string> problems = radarq::validate_config(c);
  if (problems.empty()) return;
  std::string msg;
  for (const std::string& p : problems) msg += (msg.empty() ? "" : "\n") + p;
  throw radarq::ConfigError(msg);
}

std::ofstream open_output(const std::string& path) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path);
  if (!out) throw RuntimeFault("cannot write " + path);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw radarq::ConfigError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct RunArgs {
  Overrides overrides;
  std::string out;
  std::string graph_in;
  std::string graph_out;
  std::string dodag_out;
  std::string events_out;
  bool summary = false;
};

int do_run(const RunArgs& args) {
  const radarq::SimConfig config = args.overrides.resolve();
  require_valid(config);

  radarq::NetworkGraph graph;
  if (!args.graph_in.empty()) {
    try {
      graph = radarq::graph_from_json(read_file(args.graph_in));
    } catch (const std::exception& e) {
      throw radarq::ConfigError(std::string("graph: ") + e.what());
    }
    const std::vector<std::string> problems = radarq::validate(graph);
    if (!problems.empty()) throw radarq::ConfigError("graph: " + problems.front());
  } else {
    graph = radarq::build_topology(config);
  }
  if (!args.graph_out.empty()) {
    open_output(args.graph_out) << radarq::to_json(graph) << '\n';
  }
  if (!args.dodag_out.empty()) {
    const radarq::Dodag dodag = radarq::Dodag::converge(
        graph, config.root.value_or(graph.center()), config.weights);
    std::ofstream out = open_output(args.dodag_out);
    dodag.dump(out);
  }

  std::ofstream events;
  radarq::RunOptions options;
  if (!args.events_out.empty()) {
    events = open_output(args.events_out);
    options.event_log = &events;
  }
  radarq::RunResult result;
  try {
    result = radarq::simulate(config, graph, options);
  } catch (const std::invalid_argument& e) {
    throw radarq::ConfigError(e.what());
  }

  if (args.out.empty()) {
    std::cout << radarq::csv_header() << '\n'
              << radarq::csv_row(result.metrics) << '\n';
  } else {
    std::ofstream out = open_output(args.out);
    radarq::write_csv(out, {result.metrics});
  }
  if (args.summary) {
    const auto& d = result.diagnostics;
    std::cerr << "events " << d.events << ", generation attempts "
              << d.generation_attempts << ", swaps " << d.swaps << " ("
              << d.failed_swaps << " failed), expirations " << d.expirations
              << ", blocked aborts " << d.blocked_aborts << ", slot discards "
              << d.slot_discards << ", paths " << d.scheduled_paths
              << ", path excess " << d.path_excess << "\n";
    if (config.check_invariants) {
      std::cerr << "invariant checks " << d.invariant_checks << ", violations "
                << d.invariant_violations << "\n";
    }
    for (const radarq::RequestTally& t : result.metrics.per_request) {
      std::cerr << "  request " << t.id << ": served " << t.served
                << ", failed " << t.failed << ", mean fidelity "
                << (t.mean_fidelity ? radarq::format_number(*t.mean_fidelity)
                                    : std::string("NA"))
                << "\n";
    }
  }
  if (config.check_invariants && result.diagnostics.invariant_violations > 0) {
    throw RuntimeFault("invariant violated: " +
                       result.diagnostics.first_violation);
  }
  return kExitOk;
}

struct SweepArgs {
  std::string spec_path;
  std::string out;
  int jobs = 0;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> strategies;
  std::vector<std::string> topologies;
  std::vector<int> concurrency;
  std::vector<std::string> coherence;
  bool quiet = false;
};

int do_sweep(const SweepArgs& args) {
  const radarq::SweepSpec spec = radarq::load_sweep(args.spec_path);
  radarq::SweepFilter filter;
  filter.seed = args.seed;
  for (const std::string& s : args.strategies) {
    try {
      filter.strategies.insert(radarq::parse_strategy(s));
    } catch (const std::invalid_argument& e) {
      throw radarq::ConfigError(std::string("strategy: ") + e.what());
    }
  }
  for (const std::string& t : args.topologies) {
    if (t != "grid" && t != "random") {
      throw radarq::ConfigError("topology: unknown kind '" + t +
                                "'; valid: grid, random");
    }
    filter.topologies.insert(t);
  }
  filter.concurrency.insert(args.concurrency.begin(), args.concurrency.end());
  for (const std::string& t : args.coherence) {
    filter.coherence_times.push_back(radarq::parse_coherence(t));
  }

  const std::vector<radarq::SimConfig> cells = radarq::expand(spec, filter);
  if (cells.empty()) throw radarq::ConfigError("sweep: filters select no cells");

  // "-" sends the CSV to stdout even when the sweep file names one.
  std::string out_path = args.out.empty() ? spec.output : args.out;
  if (out_path == "-") out_path.clear();
  std::ofstream file;
  if (!out_path.empty()) file = open_output(out_path);

  const int jobs = args.jobs > 0
                       ? args.jobs
                       : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const bool quiet = args.quiet;
  const std::vector<radarq::MetricsRecord> records = radarq::run_cells(
      cells, jobs, [quiet](std::size_t done, std::size_t total) {
        if (!quiet) std::fprintf(stderr, "\r%zu/%zu cells", done, total);
      });
  if (!quiet) std::fprintf(stderr, "\n");

  if (out_path.empty()) {
    radarq::write_csv(std::cout, records);
  } else {
    radarq::write_csv(file, records);
    if (!file) throw RuntimeFault("write failed: " + out_path);
  }
  return kExitOk;
}

int do_validate(const std::string& path) {
  const radarq::SimConfig config = radarq::load_config(path);
  require_valid(config);
  std::cout << "ok\n";
  return kExitOk;
}

int do_describe(const Overrides& overrides) {
  const radarq::SimConfig config = overrides.resolve();
  require_valid(config);
  std::cout << radarq::describe_config(config) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RADAR-Q quantum network entanglement routing simulator"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "simulate one configuration");
  run_args.overrides.add_to(run);
  run->add_option("-o,--out", run_args.out, "CSV output (default stdout)");
  run->add_option("--graph", run_args.graph_in, "use this graph snapshot");
  run->add_option("--graph-out", run_args.graph_out, "write the graph snapshot");
  run->add_option("--dodag-out", run_args.dodag_out,
                  "write the converged DODAG, one node per line");
  run->add_option("--events", run_args.events_out, "write the JSONL event log");
  run->add_flag("--summary", run_args.summary, "print diagnostics to stderr");

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep", "run an experiment sweep");
  sweep->add_option("spec", sweep_args.spec_path, "sweep JSON")->required();
  sweep->add_option("-o,--out", sweep_args.out, "CSV output, - for stdout (overrides the sweep file)");
  sweep->add_option("-j,--jobs", sweep_args.jobs, "cells run in parallel");
  sweep->add_option("--seed", sweep_args.seed, "run only this seed per cell");
  sweep->add_option("--strategy", sweep_args.strategies, "keep these strategies");
  sweep->add_option("--topology", sweep_args.topologies, "keep these topologies");
  sweep->add_option("-N,--concurrency", sweep_args.concurrency, "keep these N");
  sweep->add_option("--tco", sweep_args.coherence, "keep these coherence times");
  sweep->add_flag("-q,--quiet", sweep_args.quiet, "no progress output");

  std::string validate_path;
  CLI::App* validate =
      app.add_subcommand("validate-config", "check a run configuration");
  validate->add_option("config", validate_path, "JSON run configuration")
      ->required();

  Overrides describe_overrides;
  CLI::App* describe =
      app.add_subcommand("describe", "print the resolved configuration");
  describe_overrides.add_to(describe);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run) return do_run(run_args);
    if (*sweep) return do_sweep(sweep_args);
    if (*validate) return do_validate(validate_path);
    if (*describe) return do_describe(describe_overrides);
  } catch (const radarq::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
