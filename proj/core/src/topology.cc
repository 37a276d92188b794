#include "radarq/topology.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <utility>

#include "json.hpp"

namespace radarq {
namespace {

using nlohmann::ordered_json;

std::pair<NodeId, NodeId> ordered(NodeId a, NodeId b) {
  return a < b ? std::pair{a, b} : std::pair{b, a};
}

std::string pair_name(NodeId a, NodeId b) {
  return "(" + std::to_string(a) + ", " + std::to_string(b) + ")";
}

const char* role_name(NodeRole role) {
  return role == NodeRole::kUser ? "user" : "repeater";
}

}  // namespace

NetworkGraph::NetworkGraph(std::vector<NodeSpec> nodes,
                           std::vector<LinkSpec> links)
    : nodes_(std::move(nodes)), links_(std::move(links)) {
  adjacency_.resize(nodes_.size());
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const LinkSpec& l = links_[i];
    if (l.u >= nodes_.size() || l.v >= nodes_.size() || l.u == l.v) continue;
    adjacency_[l.u].push_back({l.v, i});
    adjacency_[l.v].push_back({l.u, i});
  }
  for (auto& adj : adjacency_) {
    std::stable_sort(adj.begin(), adj.end(),
                     [](const Adjacency& a, const Adjacency& b) {
                       return a.neighbor < b.neighbor;
                     });
  }
}

std::span<const Adjacency> NetworkGraph::neighbors(NodeId v) const {
  return adjacency_[v];
}

std::optional<std::size_t> NetworkGraph::find_link(NodeId u, NodeId v) const {
  if (u >= adjacency_.size()) return std::nullopt;
  for (const Adjacency& a : adjacency_[u]) {
    if (a.neighbor == v) return a.link;
  }
  return std::nullopt;
}

std::vector<int> NetworkGraph::bfs_hops(NodeId from) const {
  std::vector<int> hops(nodes_.size(), -1);
  if (from >= nodes_.size()) return hops;
  std::deque<NodeId> frontier{from};
  hops[from] = 0;
  while (!frontier.empty()) {
    NodeId v = frontier.front();
    frontier.pop_front();
    for (const Adjacency& a : adjacency_[v]) {
      if (hops[a.neighbor] < 0) {
        hops[a.neighbor] = hops[v] + 1;
        frontier.push_back(a.neighbor);
      }
    }
  }
  return hops;
}

std::size_t NetworkGraph::component_count() const {
  std::vector<bool> seen(nodes_.size(), false);
  std::size_t components = 0;
  for (NodeId start = 0; start < nodes_.size(); ++start) {
    if (seen[start]) continue;
    ++components;
    std::vector<NodeId> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      for (const Adjacency& a : adjacency_[v]) {
        if (!seen[a.neighbor]) {
          seen[a.neighbor] = true;
          stack.push_back(a.neighbor);
        }
      }
    }
  }
  return components;
}

int NetworkGraph::eccentricity(NodeId v) const {
  auto hops = bfs_hops(v);
  int worst = 0;
  for (int h : hops) {
    if (h < 0) return std::numeric_limits<int>::max();
    worst = std::max(worst, h);
  }
  return worst;
}

int NetworkGraph::diameter() const {
  int d = 0;
  for (NodeId v = 0; v < nodes_.size(); ++v) d = std::max(d, eccentricity(v));
  return d;
}

NodeId NetworkGraph::center() const {
  NodeId best = 0;
  int best_ecc = std::numeric_limits<int>::max();
  for (NodeId v = 0; v < nodes_.size(); ++v) {
    int e = eccentricity(v);
    if (e < best_ecc) {
      best_ecc = e;
      best = v;
    }
  }
  return best;
}

NetworkGraph build_grid(int rows, int cols, const LinkDefaults& defaults) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("grid dimensions must be positive");
  }
  std::vector<NodeSpec> nodes;
  nodes.reserve(static_cast<std::size_t>(rows) * cols);
  for (int i = 0; i < rows * cols; ++i) {
    nodes.push_back({static_cast<NodeId>(i), defaults.memory_capacity,
                     NodeRole::kRepeater});
  }
  std::vector<LinkSpec> links;
  auto id = [cols](int r, int c) { return static_cast<NodeId>(r * cols + c); };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) {
        links.push_back({id(r, c), id(r, c + 1), defaults.gen_prob,
                         defaults.init_fidelity});
      }
      if (r + 1 < rows) {
        links.push_back({id(r, c), id(r + 1, c), defaults.gen_prob,
                         defaults.init_fidelity});
      }
    }
  }
  return NetworkGraph(std::move(nodes), std::move(links));
}

NetworkGraph build_random(int n, double avg_degree, std::uint64_t seed,
                          const LinkDefaults& defaults) {
  if (n < 2) throw std::invalid_argument("random graph needs n >= 2");
  if (!(avg_degree > 0.0)) {
    throw std::invalid_argument("average degree must be positive");
  }
  const auto max_edges = static_cast<std::int64_t>(n) * (n - 1) / 2;
  const auto target = static_cast<std::int64_t>(std::llround(n * avg_degree / 2.0));
  if (target > max_edges) {
    throw std::invalid_argument("average degree exceeds complete graph");
  }
  if (target < n - 1) {
    throw std::invalid_argument("edge budget " + std::to_string(target) +
                                " cannot connect " + std::to_string(n) +
                                " nodes");
  }

  Rng rng(seed);
  std::set<std::pair<NodeId, NodeId>> edges;

  // Uniform labelled tree from a random Pruefer sequence.
  if (n == 2) {
    edges.insert({0, 1});
  } else {
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::vector<int> code(n - 2);
    for (int& c : code) c = pick(rng);
    std::vector<int> degree(n, 1);
    for (int c : code) ++degree[c];
    std::set<int> leaves;
    for (int v = 0; v < n; ++v) {
      if (degree[v] == 1) leaves.insert(v);
    }
    for (int c : code) {
      int leaf = *leaves.begin();
      leaves.erase(leaves.begin());
      edges.insert(ordered(leaf, c));
      if (--degree[c] == 1) leaves.insert(c);
    }
    int a = *leaves.begin();
    int b = *std::next(leaves.begin());
    edges.insert(ordered(a, b));
  }

  // Extra edges sampled uniformly without replacement among unused pairs.
  std::vector<std::pair<NodeId, NodeId>> unused;
  unused.reserve(static_cast<std::size_t>(max_edges));
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      std::pair<NodeId, NodeId> e{u, v};
      if (!edges.contains(e)) unused.push_back(e);
    }
  }
  const auto extra = static_cast<std::size_t>(target - (n - 1));
  for (std::size_t i = 0; i < extra; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, unused.size() - 1);
    std::swap(unused[i], unused[pick(rng)]);
    edges.insert(unused[i]);
  }

  std::vector<NodeSpec> nodes;
  for (int i = 0; i < n; ++i) {
    nodes.push_back({static_cast<NodeId>(i), defaults.memory_capacity,
                     NodeRole::kRepeater});
  }
  std::vector<LinkSpec> links;
  links.reserve(edges.size());
  for (const auto& [u, v] : edges) {
    links.push_back({u, v, defaults.gen_prob, defaults.init_fidelity});
  }
  return NetworkGraph(std::move(nodes), std::move(links));
}

std::vector<std::string> validate(const NetworkGraph& graph) {
  std::vector<std::string> out;
  const auto& nodes = graph.nodes();
  if (nodes.empty()) {
    out.push_back("graph has no nodes");
    return out;
  }

  std::set<NodeId> ids;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const NodeSpec& n = nodes[i];
    if (!ids.insert(n.id).second) {
      out.push_back("duplicate node id " + std::to_string(n.id));
    } else if (n.id != i) {
      out.push_back("node at position " + std::to_string(i) + " has id " +
                    std::to_string(n.id) + "; ids must be dense 0..n-1");
    }
    if (n.memory_capacity < 1) {
      out.push_back("node " + std::to_string(n.id) + ": memory capacity " +
                    std::to_string(n.memory_capacity) + " < 1");
    }
  }

  std::set<std::pair<NodeId, NodeId>> seen;
  for (const LinkSpec& l : graph.links()) {
    const std::string name = "link " + pair_name(l.u, l.v);
    if (l.u == l.v) {
      out.push_back(name + ": endpoints must be distinct");
      continue;
    }
    if (!graph.contains(l.u) || !graph.contains(l.v)) {
      out.push_back(name + ": unknown endpoint");
      continue;
    }
    auto key = ordered(l.u, l.v);
    if (!seen.insert(key).second) {
      out.push_back("duplicate link " + pair_name(key.first, key.second));
    }
    if (!(l.gen_prob >= 0.0 && l.gen_prob <= 1.0)) {
      out.push_back(name + ": generation probability outside [0, 1]");
    }
    if (!(l.init_fidelity >= 0.25 && l.init_fidelity <= 1.0)) {
      out.push_back(name + ": initial fidelity outside [0.25, 1]");
    }
  }

  const std::size_t components = graph.component_count();
  if (components != 1) {
    out.push_back("graph is not connected (" + std::to_string(components) +
                  " components)");
  }
  return out;
}

std::string to_json(const NetworkGraph& graph) {
  ordered_json doc;
  doc["format"] = "radarq-graph/1";
  ordered_json nodes = ordered_json::array();
  for (const NodeSpec& n : graph.nodes()) {
    nodes.push_back({{"id", n.id},
                     {"memory", n.memory_capacity},
                     {"role", role_name(n.role)}});
  }
  ordered_json links = ordered_json::array();
  for (const LinkSpec& l : graph.links()) {
    links.push_back({{"u", l.u},
                     {"v", l.v},
                     {"p", l.gen_prob},
                     {"fidelity", l.init_fidelity}});
  }
  doc["nodes"] = std::move(nodes);
  doc["links"] = std::move(links);
  return doc.dump(2) + "\n";
}

NetworkGraph graph_from_json(const std::string& text) {
  const auto doc = ordered_json::parse(text);
  if (doc.value("format", "") != "radarq-graph/1") {
    throw std::invalid_argument("not a radarq-graph/1 document");
  }
  std::vector<NodeSpec> nodes;
  for (const auto& n : doc.at("nodes")) {
    const std::string role = n.value("role", "repeater");
    nodes.push_back({n.at("id").get<NodeId>(), n.at("memory").get<int>(),
                     role == "user" ? NodeRole::kUser : NodeRole::kRepeater});
  }
  std::vector<LinkSpec> links;
  for (const auto& l : doc.at("links")) {
    links.push_back({l.at("u").get<NodeId>(), l.at("v").get<NodeId>(),
                     l.at("p").get<double>(), l.at("fidelity").get<double>()});
  }
  return NetworkGraph(std::move(nodes), std::move(links));
}

}  // namespace radarq
