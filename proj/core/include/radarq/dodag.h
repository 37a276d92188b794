#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "radarq/topology.h"
#include "radarq/types.h"

namespace radarq {

struct RankWeights {
  double alpha = 1.0;  // weight of fidelity loss
  double beta = 1.0;   // weight of memory load
};

// d_hop + (alpha (1 - F) + beta * ratio) / (alpha + beta). The fractional
// term lies in [0, 1) except for F = 0 with a full memory, which is rejected.
// Throws std::invalid_argument for out-of-range inputs.
double compute_rank(int d_hop, double avg_parent_fidelity,
                    double occupancy_ratio, RankWeights weights = {});

// Last DIO heard from a neighbour, plus the fidelity of the connecting link.
struct NeighborAdvert {
  double rank = 0.0;
  double fidelity = 1.0;         // advertised F_v of the neighbour
  double occupancy_ratio = 0.0;  // advertised Q/M of the neighbour
  double link_fidelity = 1.0;    // F of the link to that neighbour
};

struct DodagNodeState {
  NodeId node = 0;
  double rank = 0.0;
  int d_hop = 0;
  std::optional<NodeId> preferred_parent;
  double avg_parent_fidelity = 1.0;  // F_v
  int occupancy = 0;                 // Q_v
  int memory_capacity = 1;           // M_v
  bool joined = false;
  std::map<NodeId, NeighborAdvert> neighbor_table;
  std::vector<NodeId> descendant_routes;  // sorted, unique

  double occupancy_ratio() const {
    return static_cast<double>(occupancy) / memory_capacity;
  }
};

enum class MessageKind { kDio, kDis, kDao };

struct DioPayload {
  double rank = 0.0;
  int dodag_version = 0;
  double fidelity = 1.0;
  double occupancy_ratio = 0.0;
};

struct DaoPayload {
  std::vector<NodeId> descendants;  // sorted; includes the sender
  bool no_path = false;          // withdraw the sender's subtree
};

struct ControlMessage {
  MessageKind kind = MessageKind::kDis;
  NodeId origin = 0;
  NodeId target = 0;
  std::variant<std::monostate, DioPayload, DaoPayload> payload;
};

// Minimum advertised rank wins; ties go to the lowest node id.
std::optional<NodeId> select_parent(const DodagNodeState& state);

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-node DODAG state for a whole graph. Construction simulates synchronous
// DIS/DIO/DAO rounds; afterwards the tree is maintained through
// localized_update().
class Dodag {
 public:
  // `occupancy` may be empty (all memories free). Throws ConvergenceError if
  // the round bound is exceeded and std::invalid_argument for a bad root.
  static Dodag converge(const NetworkGraph& graph, NodeId root,
                        RankWeights weights = {},
                        std::span<const int> occupancy = {});

  NodeId root() const { return root_; }
  std::size_t size() const { return states_.size(); }
  const DodagNodeState& state(NodeId v) const { return states_[v]; }
  std::span<const DodagNodeState> states() const { return states_; }
  int rounds() const { return rounds_; }
  RankWeights weights() const { return weights_; }

  int depth(NodeId v) const { return states_[v].d_hop; }
  std::optional<NodeId> parent(NodeId v) const {
    return states_[v].preferred_parent;
  }

  // v, parent(v), ..., root. Throws ConvergenceError on a cycle.
  std::vector<NodeId> root_path(NodeId v) const;

  // Nodes on both root paths, deepest first; front() is the NCA and back()
  // is the root.
  std::vector<NodeId> find_common_ancestors(NodeId s, NodeId d) const;
  NodeId nca(NodeId s, NodeId d) const;

  // Parent chain from v up to `ancestor`, both inclusive. Throws
  // std::invalid_argument if `ancestor` is not on v's root path.
  std::vector<NodeId> upward_path(NodeId v, NodeId ancestor) const;

  // Nodes of `failed_path` and their one-hop neighbours refresh Q_v, swap
  // DIOs among themselves and reselect parents. Nothing outside that set is
  // modified. Returns the nodes whose rank or parent changed.
  std::vector<NodeId> localized_update(std::span<const NodeId> failed_path,
                                       const NetworkGraph& graph,
                                       std::span<const int> occupancy);

  // One line per node: "<node> <rank> <parent|-> <d_hop>".
  void dump(std::ostream& out) const;

  int version() const { return version_; }

 private:
  Dodag() = default;

  DioPayload make_dio(NodeId v) const;
  void receive(const ControlMessage& msg, const NetworkGraph& graph);
  void receive_dao(const ControlMessage& msg);
  DaoPayload make_dao(NodeId v) const;
  // Reselects the parent and recomputes d_hop, F_v and rank from the table.
  void recompute(NodeId v);
  void rebuild_descendants(std::span<const NodeId> nodes);

  NodeId root_ = 0;
  RankWeights weights_;
  int version_ = 0;
  int rounds_ = 0;
  std::vector<DodagNodeState> states_;
};

}  // namespace radarq
