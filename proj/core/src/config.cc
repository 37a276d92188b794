#include "radarq/config.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace radarq {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : obj.items()) {
    if (!ok.count(item.key())) {
      const std::string field =
          where.empty() ? item.key() : where + "." + item.key();
      throw ConfigError(field + ": unknown field");
    }
  }
}

std::string field_name(const std::string& where, const char* key) {
  return where.empty() ? key : where + "." + key;
}

template <typename T>
void read(const json& obj, const std::string& where, const char* key, T& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(field_name(where, key) + ": wrong type");
  }
}

void read_int(const json& obj, const std::string& where, const char* key,
              int& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_number_integer()) {
    throw ConfigError(field_name(where, key) + ": expected an integer");
  }
  out = it->get<int>();
}

void read_seconds(const json& obj, const std::string& where, const char* key,
                  Duration& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_number()) {
    throw ConfigError(field_name(where, key) + ": expected seconds");
  }
  const double s = it->get<double>();
  if (!std::isfinite(s)) {
    throw ConfigError(field_name(where, key) + ": must be finite");
  }
  out = from_seconds(s);
}

NodeId read_node(const json& v, const std::string& field) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(field + ": expected a node id");
  }
  return v.get<NodeId>();
}

TopologySpec parse_topology(const json& j) {
  check_keys(j, "topology",
             {"kind", "rows", "cols", "n", "avg_degree", "seed",
              "memory_capacity", "link_overrides"});
  TopologySpec t;
  std::string kind = "grid";
  read(j, "topology", "kind", kind);
  if (kind == "grid") {
    t.kind = TopologyKind::kGrid;
  } else if (kind == "random") {
    t.kind = TopologyKind::kRandom;
  } else {
    throw ConfigError("topology.kind: unknown kind '" + kind +
                      "'; valid: grid, random");
  }
  read_int(j, "topology", "rows", t.rows);
  read_int(j, "topology", "cols", t.cols);
  read_int(j, "topology", "n", t.n);
  read(j, "topology", "avg_degree", t.avg_degree);
  read_int(j, "topology", "memory_capacity", t.memory_capacity);
  if (auto it = j.find("seed"); it != j.end() && !it->is_null()) {
    if (!it->is_number_unsigned()) {
      throw ConfigError("topology.seed: expected a non-negative integer");
    }
    t.seed = it->get<std::uint64_t>();
  }
  if (auto it = j.find("link_overrides"); it != j.end()) {
    if (!it->is_array()) {
      throw ConfigError("topology.link_overrides: expected an array");
    }
    for (const json& o : *it) {
      check_keys(o, "topology.link_overrides",
                 {"u", "v", "gen_prob", "init_fidelity"});
      LinkSpec link;
      if (!o.contains("u") || !o.contains("v")) {
        throw ConfigError("topology.link_overrides: u and v are required");
      }
      link.u = read_node(o["u"], "topology.link_overrides.u");
      link.v = read_node(o["v"], "topology.link_overrides.v");
      link.gen_prob = -1.0;
      link.init_fidelity = -1.0;
      read(o, "topology.link_overrides", "gen_prob", link.gen_prob);
      read(o, "topology.link_overrides", "init_fidelity", link.init_fidelity);
      t.link_overrides.push_back(link);
    }
  }
  return t;
}

NoiseParams parse_noise(const json& j) {
  check_keys(j, "noise",
             {"gen_prob", "bsm_prob", "init_fidelity", "coherence_time",
              "tau_ratio"});
  NoiseParams n;
  read(j, "noise", "gen_prob", n.gen_prob);
  read(j, "noise", "bsm_prob", n.bsm_prob);
  read(j, "noise", "init_fidelity", n.init_fidelity);
  read(j, "noise", "tau_ratio", n.tau_ratio);
  if (auto it = j.find("coherence_time"); it != j.end()) {
    if (it->is_null()) {
      n.coherence_time.reset();
    } else if (it->is_string()) {
      try {
        n.coherence_time = parse_coherence(it->get<std::string>());
      } catch (const ConfigError&) {
        throw ConfigError("noise.coherence_time: expected seconds or \"inf\"");
      }
    } else if (it->is_number()) {
      const double s = it->get<double>();
      if (std::isinf(s) && s > 0) {
        n.coherence_time.reset();
      } else {
        n.coherence_time = from_seconds(s);
      }
    } else {
      throw ConfigError("noise.coherence_time: expected seconds or \"inf\"");
    }
  }
  return n;
}

WorkloadSpec parse_workload(const json& j) {
  check_keys(j, "workload", {"kind", "pairs"});
  WorkloadSpec w;
  std::string kind = "random";
  read(j, "workload", "kind", kind);
  if (kind == "random") {
    w.kind = WorkloadKind::kRandom;
  } else if (kind == "fixed") {
    w.kind = WorkloadKind::kFixed;
  } else {
    throw ConfigError("workload.kind: unknown kind '" + kind +
                      "'; valid: random, fixed");
  }
  if (auto it = j.find("pairs"); it != j.end()) {
    if (!it->is_array()) throw ConfigError("workload.pairs: expected an array");
    for (const json& p : *it) {
      if (!p.is_array() || p.size() != 2) {
        throw ConfigError("workload.pairs: each pair is [source, destination]");
      }
      w.pairs.emplace_back(read_node(p[0], "workload.pairs"),
                           read_node(p[1], "workload.pairs"));
    }
  }
  return w;
}

json seconds(Duration d) { return to_seconds(d); }

}  // namespace

CoherenceTime parse_coherence(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf") return std::nullopt;
  std::size_t used = 0;
  double s = 0.0;
  try {
    s = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("coherence_time: cannot parse '" + text + "'");
  }
  if (used != text.size()) {
    throw ConfigError("coherence_time: cannot parse '" + text + "'");
  }
  if (std::isinf(s) && s > 0) return std::nullopt;
  return from_seconds(s);
}

SimConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  check_keys(j, "",
             {"strategy", "topology", "noise", "weights", "concurrency",
              "workload", "attempt_period", "classical_latency", "duration",
              "warmup", "seed", "root", "max_retries", "block_timeout",
              "slot_overhead", "check_invariants"});
  SimConfig c;
  if (auto it = j.find("strategy"); it != j.end()) {
    if (!it->is_string()) throw ConfigError("strategy: expected a name");
    try {
      c.strategy = parse_strategy(it->get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("strategy: ") + e.what());
    }
  }
  if (auto it = j.find("topology"); it != j.end()) {
    c.topology = parse_topology(*it);
  }
  if (auto it = j.find("noise"); it != j.end()) c.noise = parse_noise(*it);
  if (auto it = j.find("weights"); it != j.end()) {
    check_keys(*it, "weights", {"alpha", "beta"});
    read(*it, "weights", "alpha", c.weights.alpha);
    read(*it, "weights", "beta", c.weights.beta);
  }
  read_int(j, "", "concurrency", c.concurrency);
  if (auto it = j.find("workload"); it != j.end()) {
    c.workload = parse_workload(*it);
  }
  read_seconds(j, "", "attempt_period", c.attempt_period);
  read_seconds(j, "", "classical_latency", c.classical_latency);
  read_seconds(j, "", "duration", c.duration);
  read_seconds(j, "", "warmup", c.warmup);
  read_seconds(j, "", "block_timeout", c.block_timeout);
  if (auto it = j.find("slot_overhead"); it != j.end() && !it->is_null()) {
    Duration d{0};
    read_seconds(j, "", "slot_overhead", d);
    c.slot_overhead = d;
  }
  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_unsigned()) {
      throw ConfigError("seed: expected a non-negative integer");
    }
    c.seed = it->get<std::uint64_t>();
  }
  if (auto it = j.find("root"); it != j.end() && !it->is_null()) {
    c.root = read_node(*it, "root");
  }
  read_int(j, "", "max_retries", c.max_retries);
  read(j, "", "check_invariants", c.check_invariants);

  // Overrides without an explicit p or F0 inherit the uniform noise values.
  for (LinkSpec& o : c.topology.link_overrides) {
    if (o.gen_prob < 0.0) o.gen_prob = c.noise.gen_prob;
    if (o.init_fidelity < 0.0) o.init_fidelity = c.noise.init_fidelity;
  }
  return c;
}

SimConfig parse_and_validate(const std::string& text) {
  SimConfig c = parse_config(text);
  const std::vector<std::string> problems = validate_config(c);
  if (!problems.empty()) {
    std::string msg;
    for (const std::string& p : problems) {
      if (!msg.empty()) msg += '\n';
      msg += p;
    }
    throw ConfigError(msg);
  }
  return c;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string describe_config(const SimConfig& c) {
  json topo;
  if (c.topology.kind == TopologyKind::kGrid) {
    topo = {{"kind", "grid"}, {"rows", c.topology.rows}, {"cols", c.topology.cols}};
  } else {
    topo = {{"kind", "random"},
            {"n", c.topology.n},
            {"avg_degree", c.topology.avg_degree}};
    topo["seed"] = c.topology.seed ? json(*c.topology.seed) : json(nullptr);
  }
  topo["memory_capacity"] = c.topology.memory_capacity;
  if (!c.topology.link_overrides.empty()) {
    json overrides = json::array();
    for (const LinkSpec& o : c.topology.link_overrides) {
      overrides.push_back({{"u", o.u},
                           {"v", o.v},
                           {"gen_prob", o.gen_prob},
                           {"init_fidelity", o.init_fidelity}});
    }
    topo["link_overrides"] = overrides;
  }

  json workload = {{"kind", c.workload.kind == WorkloadKind::kFixed ? "fixed"
                                                                   : "random"}};
  if (c.workload.kind == WorkloadKind::kFixed) {
    json pairs = json::array();
    for (const auto& [s, d] : c.workload.pairs) pairs.push_back({s, d});
    workload["pairs"] = pairs;
  }

  json j;
  j["strategy"] = std::string(strategy_name(c.strategy));
  j["topology"] = topo;
  j["noise"] = {
      {"gen_prob", c.noise.gen_prob},
      {"bsm_prob", c.noise.bsm_prob},
      {"init_fidelity", c.noise.init_fidelity},
      {"coherence_time", c.noise.coherence_time
                             ? json(to_seconds(*c.noise.coherence_time))
                             : json("inf")},
      {"tau_ratio", c.noise.tau_ratio},
  };
  j["weights"] = {{"alpha", c.weights.alpha}, {"beta", c.weights.beta}};
  j["concurrency"] = c.concurrency;
  j["workload"] = workload;
  j["attempt_period"] = seconds(c.attempt_period);
  j["classical_latency"] = seconds(c.classical_latency);
  j["duration"] = seconds(c.duration);
  j["warmup"] = seconds(c.warmup);
  j["seed"] = c.seed;
  j["root"] = c.root ? json(*c.root) : json(nullptr);
  j["max_retries"] = c.max_retries;
  j["block_timeout"] = seconds(c.block_timeout);
  j["slot_overhead"] = c.slot_overhead ? seconds(*c.slot_overhead) : json(nullptr);
  j["check_invariants"] = c.check_invariants;
  return j.dump(2);
}

}  // namespace radarq
