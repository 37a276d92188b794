#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radarq/types.h"

namespace radarq {

enum class NodeRole { kUser, kRepeater };

struct NodeSpec {
  NodeId id = 0;
  int memory_capacity = 4;  // M_v, qubit slots
  NodeRole role = NodeRole::kRepeater;

  friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

// Undirected link. `u` and `v` are stored in the order given; lookups treat
// the pair as unordered.
struct LinkSpec {
  NodeId u = 0;
  NodeId v = 0;
  double gen_prob = 0.8;        // p_uv, per attempt
  double init_fidelity = 0.95;  // F_uv

  friend bool operator==(const LinkSpec&, const LinkSpec&) = default;
};

struct LinkDefaults {
  double gen_prob = 0.8;
  double init_fidelity = 0.95;
  int memory_capacity = 4;
};

struct Adjacency {
  NodeId neighbor;
  std::size_t link;  // index into NetworkGraph::links()
};

// Immutable physical topology. Node ids are dense: node i has id i. Graphs
// constructed from arbitrary specs may violate that (or any other invariant);
// validate() reports such problems instead of the constructor throwing.
class NetworkGraph {
 public:
  NetworkGraph() = default;
  NetworkGraph(std::vector<NodeSpec> nodes, std::vector<LinkSpec> links);

  const std::vector<NodeSpec>& nodes() const { return nodes_; }
  const std::vector<LinkSpec>& links() const { return links_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t link_count() const { return links_.size(); }

  const NodeSpec& node(NodeId v) const { return nodes_[v]; }
  const LinkSpec& link(std::size_t index) const { return links_[index]; }
  int memory_capacity(NodeId v) const { return nodes_[v].memory_capacity; }
  bool contains(NodeId v) const { return v < nodes_.size(); }

  std::span<const Adjacency> neighbors(NodeId v) const;
  std::optional<std::size_t> find_link(NodeId u, NodeId v) const;
  bool adjacent(NodeId u, NodeId v) const { return find_link(u, v).has_value(); }

  // Hop distances from `from`; -1 marks unreachable nodes.
  std::vector<int> bfs_hops(NodeId from) const;
  std::size_t component_count() const;
  bool is_connected() const { return component_count() == 1; }
  int eccentricity(NodeId v) const;
  int diameter() const;
  // Node of minimum eccentricity, lowest id on ties.
  NodeId center() const;

  friend bool operator==(const NetworkGraph& a, const NetworkGraph& b) {
    return a.nodes_ == b.nodes_ && a.links_ == b.links_;
  }

 private:
  std::vector<NodeSpec> nodes_;
  std::vector<LinkSpec> links_;
  std::vector<std::vector<Adjacency>> adjacency_;
};

// 4-neighbour lattice; node (r, c) has id r * cols + c.
NetworkGraph build_grid(int rows, int cols, const LinkDefaults& defaults = {});

// round(n * avg_degree / 2) links: a uniform random spanning tree (Pruefer
// code) plus uniformly sampled extra pairs. Throws std::invalid_argument if
// the edge budget cannot be met or cannot connect n nodes.
NetworkGraph build_random(int n, double avg_degree, std::uint64_t seed,
                          const LinkDefaults& defaults = {});

// Empty iff every node/link invariant holds and the graph is connected.
std::vector<std::string> validate(const NetworkGraph& graph);

// Snapshot format ("radarq-graph/1"), see README.
std::string to_json(const NetworkGraph& graph);
NetworkGraph graph_from_json(const std::string& text);

}  // namespace radarq
