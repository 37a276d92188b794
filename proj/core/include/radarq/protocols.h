#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "radarq/dodag.h"
#include "radarq/topology.h"
#include "radarq/types.h"

namespace radarq {

enum class StrategyKind { kRadarQ, kSynchNca, kAsynchRoot };

std::string_view strategy_name(StrategyKind kind);
// Throws std::invalid_argument listing the valid names.
StrategyKind parse_strategy(std::string_view name);
std::vector<std::string> strategy_names();

enum class RequestStatus { kPending, kServed, kFailed };

// A tenant's standing demand. `id` names the tenant slot and is stable for
// the whole run; the endpoints change each time the demand is replaced.
struct Request {
  RequestId id = 0;
  NodeId source = 0;
  NodeId destination = 0;
  SimTime submitted_at{0};
  RequestStatus status = RequestStatus::kPending;
};

// A walk s ... anchor ... d made of two upward DODAG segments. Nodes below a
// non-nearest anchor appear twice; every occurrence is a separate memory
// position.
struct RoutePath {
  RequestId request_id = 0;
  NodeId anchor = 0;
  std::vector<NodeId> node_sequence;
  double score = 0.0;

  std::size_t link_count() const {
    return node_sequence.empty() ? 0 : node_sequence.size() - 1;
  }
  // Intermediate Bell measurements, |node_sequence| - 2.
  int bsm_depth() const {
    return node_sequence.size() < 2
               ? 0
               : static_cast<int>(node_sequence.size()) - 2;
  }
  std::vector<std::pair<NodeId, NodeId>> link_sequence() const;
};

// Snapshot of what a scheduler may look at. `occupancy` is Q_v per node
// (stored qubits plus reservations).
struct NetworkView {
  const NetworkGraph& graph;
  const Dodag& dodag;
  std::span<const int> occupancy;
};

// Memory slots a path occupies per node: one per endpoint occurrence, two per
// intermediate occurrence. Sorted by node id.
std::vector<std::pair<NodeId, int>> slot_demand(const RoutePath& path);
bool fits(const RoutePath& path, const NetworkGraph& graph,
          std::span<const int> occupancy);
void reserve(const RoutePath& path, std::vector<int>& occupancy);

// min over the two endpoints of free / M_v, clamped to [0, 1]. Zero means the
// link is saturated.
double link_availability(const LinkSpec& link, const NetworkGraph& graph,
                         std::span<const int> occupancy);
double link_availability(NodeId u, NodeId v, const NetworkGraph& graph,
                         std::span<const int> occupancy);

RoutePath path_via(NodeId source, NodeId destination, NodeId anchor,
                   const Dodag& dodag, RequestId request_id = 0);

// (d_hop(anchor) + 1) / (1 + max_e (1 - avail(e))).
double score_path(const RoutePath& path, const NetworkView& view);

// One candidate per common ancestor, deepest anchor first. Candidates with a
// saturated link or without enough free memory along the walk are dropped.
std::vector<RoutePath> generate_candidate_paths(const Request& request,
                                                const NetworkView& view);

// Higher score wins, then fewer BSMs, then lexicographic node sequence.
bool better_path(const RoutePath& a, const RoutePath& b);

struct Assignment {
  Request request;
  RoutePath path;
};

// Locality-first: NCA depth descending, request id ascending. Each choice
// reserves its memory in a scratch copy of the occupancy so later requests see
// the contention it creates. Unroutable requests are skipped.
std::vector<Assignment> radar_q_schedule(std::span<const Request> requests,
                                         const NetworkView& view);

// Every request on its s -> root -> d walk, in request id order, with no
// regard for contention.
std::vector<Assignment> asynch_root_schedule(std::span<const Request> requests,
                                             const NetworkView& view);

struct SlotPlan {
  std::vector<Assignment> assigned;
  std::vector<RequestId> deferred;
};

// Central slot scheduler: NCA paths assigned greedily in NCA-depth order;
// requests that would exceed any node's memory wait for a later slot.
SlotPlan synch_nca_schedule(std::span<const Request> requests,
                            const NetworkView& view);

}  // namespace radarq
