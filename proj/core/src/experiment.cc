#include "radarq/experiment.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "radarq/config.h"

namespace radarq {

namespace {

using nlohmann::json;

std::string topology_label(const TopologySpec& t) {
  return t.kind == TopologyKind::kGrid ? "grid" : "random";
}

ExperimentSpec parse_experiment(const json& j, std::size_t index) {
  const std::string where = "experiments[" + std::to_string(index) + "]";
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : j.items()) {
    static const std::set<std::string> known = {
        "name", "base", "strategies", "topologies", "coherence_times",
        "N", "seeds", "first_seed"};
    if (!known.count(item.key())) {
      throw ConfigError(where + "." + item.key() + ": unknown field");
    }
  }

  ExperimentSpec spec;
  spec.name = j.value("name", "");
  if (auto it = j.find("base"); it != j.end()) {
    try {
      spec.base = parse_config(it->dump());
    } catch (const ConfigError& e) {
      throw ConfigError(where + ".base." + e.what());
    }
  }

  auto array = [&](const char* key) -> const json* {
    auto it = j.find(key);
    if (it == j.end()) return nullptr;
    if (!it->is_array() || it->empty()) {
      throw ConfigError(where + "." + key + ": expected a non-empty array");
    }
    return &*it;
  };

  if (const json* a = array("strategies")) {
    for (const json& s : *a) {
      try {
        spec.strategies.push_back(parse_strategy(s.get<std::string>()));
      } catch (const std::exception& e) {
        throw ConfigError(where + ".strategies: " + e.what());
      }
    }
  } else {
    spec.strategies.push_back(spec.base.strategy);
  }

  if (const json* a = array("topologies")) {
    for (const json& t : *a) {
      try {
        spec.topologies.push_back(
            parse_config(json{{"topology", t}}.dump()).topology);
      } catch (const ConfigError& e) {
        throw ConfigError(where + ".topologies: " + e.what());
      }
    }
  } else {
    spec.topologies.push_back(spec.base.topology);
  }

  if (const json* a = array("coherence_times")) {
    for (const json& t : *a) {
      if (t.is_null()) {
        spec.coherence_times.push_back(std::nullopt);
      } else if (t.is_string()) {
        spec.coherence_times.push_back(parse_coherence(t.get<std::string>()));
      } else if (t.is_number()) {
        spec.coherence_times.push_back(from_seconds(t.get<double>()));
      } else {
        throw ConfigError(where + ".coherence_times: expected seconds or \"inf\"");
      }
    }
  } else {
    spec.coherence_times.push_back(spec.base.noise.coherence_time);
  }

  if (const json* a = array("N")) {
    for (const json& n : *a) {
      if (!n.is_number_integer()) {
        throw ConfigError(where + ".N: expected integers");
      }
      spec.concurrency.push_back(n.get<int>());
    }
  } else {
    spec.concurrency.push_back(spec.base.concurrency);
  }

  if (auto it = j.find("seeds"); it != j.end()) {
    if (!it->is_number_integer() || it->get<int>() < 1) {
      throw ConfigError(where + ".seeds: must be an integer >= 1");
    }
    spec.seeds = it->get<int>();
  }
  if (auto it = j.find("first_seed"); it != j.end()) {
    if (!it->is_number_unsigned()) {
      throw ConfigError(where + ".first_seed: expected a non-negative integer");
    }
    spec.first_seed = it->get<std::uint64_t>();
  }

  for (const SimConfig& cell : expand(spec)) {
    const std::vector<std::string> problems = validate_config(cell);
    if (!problems.empty()) throw ConfigError(where + ": " + problems.front());
  }
  return spec;
}

}  // namespace

bool SweepFilter::keeps(const SimConfig& cell) const {
  if (!strategies.empty() && !strategies.count(cell.strategy)) return false;
  if (!topologies.empty() && !topologies.count(topology_label(cell.topology))) {
    return false;
  }
  if (!concurrency.empty() && !concurrency.count(cell.concurrency)) {
    return false;
  }
  if (!coherence_times.empty() &&
      std::find(coherence_times.begin(), coherence_times.end(),
                cell.noise.coherence_time) == coherence_times.end()) {
    return false;
  }
  return true;
}

SweepSpec parse_sweep(const std::string& text) {
  json j;
  try {
    j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("sweep: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("sweep: expected an object");
  SweepSpec sweep;
  if (auto it = j.find("experiments"); it != j.end()) {
    for (const auto& item : j.items()) {
      if (item.key() != "experiments" && item.key() != "output") {
        throw ConfigError(item.key() + ": unknown field");
      }
    }
    if (!it->is_array() || it->empty()) {
      throw ConfigError("experiments: expected a non-empty array");
    }
    for (std::size_t i = 0; i < it->size(); ++i) {
      sweep.experiments.push_back(parse_experiment((*it)[i], i));
    }
  } else {
    json single = j;
    single.erase("output");
    sweep.experiments.push_back(parse_experiment(single, 0));
  }
  if (auto it = j.find("output"); it != j.end()) {
    if (!it->is_string()) throw ConfigError("output: expected a path");
    sweep.output = it->get<std::string>();
  }
  return sweep;
}

SweepSpec load_sweep(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("sweep: cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_sweep(buf.str());
}

std::vector<SimConfig> expand(const ExperimentSpec& spec) {
  std::vector<SimConfig> cells;
  for (StrategyKind strategy : spec.strategies) {
    for (const TopologySpec& topology : spec.topologies) {
      for (const CoherenceTime& tco : spec.coherence_times) {
        for (int n : spec.concurrency) {
          for (int k = 0; k < spec.seeds; ++k) {
            SimConfig c = spec.base;
            c.strategy = strategy;
            c.topology = topology;
            c.noise.coherence_time = tco;
            c.concurrency = n;
            c.seed = spec.first_seed + static_cast<std::uint64_t>(k);
            cells.push_back(std::move(c));
          }
        }
      }
    }
  }
  return cells;
}

std::vector<SimConfig> expand(const SweepSpec& spec, const SweepFilter& filter) {
  std::vector<SimConfig> cells;
  for (const ExperimentSpec& e : spec.experiments) {
    ExperimentSpec copy = e;
    if (filter.seed) {
      copy.first_seed = *filter.seed;
      copy.seeds = 1;
    }
    for (SimConfig& c : expand(copy)) {
      if (filter.keeps(c)) cells.push_back(std::move(c));
    }
  }
  return cells;
}

std::vector<MetricsRecord> run_cells(
    const std::vector<SimConfig>& cells, int parallelism,
    const std::function<void(std::size_t, std::size_t)>& progress) {
  std::vector<MetricsRecord> out(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::size_t done = 0;
  std::exception_ptr error;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        out[i] = run(cells[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
        next = cells.size();
        return;
      }
      std::lock_guard<std::mutex> lock(mu);
      ++done;
      if (progress) progress(done, cells.size());
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(
      parallelism > 0 ? static_cast<std::size_t>(parallelism) : 1, 1,
      std::max<std::size_t>(cells.size(), 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

void write_csv(std::ostream& out, const std::vector<MetricsRecord>& records) {
  out << csv_header() << '\n';
  for (const MetricsRecord& r : records) out << csv_row(r) << '\n';
}

}  // namespace radarq
