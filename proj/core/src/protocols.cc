#include "radarq/protocols.h"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace radarq {

namespace {

constexpr std::pair<StrategyKind, std::string_view> kStrategies[] = {
    {StrategyKind::kRadarQ, "radar-q"},
    {StrategyKind::kSynchNca, "synch-nca"},
    {StrategyKind::kAsynchRoot, "asynch-root"},
};

std::vector<std::size_t> locality_order(std::span<const Request> requests,
                                        const Dodag& dodag) {
  std::vector<std::pair<int, std::size_t>> keyed;
  keyed.reserve(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const Request& r = requests[i];
    keyed.push_back({dodag.depth(dodag.nca(r.source, r.destination)), i});
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [&](const auto& a, const auto& b) {
                     if (a.first != b.first) return a.first > b.first;
                     return requests[a.second].id < requests[b.second].id;
                   });
  std::vector<std::size_t> order;
  order.reserve(keyed.size());
  for (const auto& k : keyed) order.push_back(k.second);
  return order;
}

}  // namespace

std::string_view strategy_name(StrategyKind kind) {
  for (const auto& [k, name] : kStrategies) {
    if (k == kind) return name;
  }
  return "unknown";
}

StrategyKind parse_strategy(std::string_view name) {
  for (const auto& [k, n] : kStrategies) {
    if (n == name) return k;
  }
  std::string msg = "unknown strategy '" + std::string(name) + "'; valid: ";
  for (std::size_t i = 0; i < std::size(kStrategies); ++i) {
    if (i) msg += ", ";
    msg += kStrategies[i].second;
  }
  throw std::invalid_argument(msg);
}

std::vector<std::string> strategy_names() {
  std::vector<std::string> out;
  for (const auto& s : kStrategies) out.emplace_back(s.second);
  return out;
}

std::vector<std::pair<NodeId, NodeId>> RoutePath::link_sequence() const {
  std::vector<std::pair<NodeId, NodeId>> links;
  for (std::size_t i = 0; i + 1 < node_sequence.size(); ++i) {
    links.emplace_back(node_sequence[i], node_sequence[i + 1]);
  }
  return links;
}

std::vector<std::pair<NodeId, int>> slot_demand(const RoutePath& path) {
  std::map<NodeId, int> demand;
  const auto& seq = path.node_sequence;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const bool endpoint = i == 0 || i + 1 == seq.size();
    demand[seq[i]] += endpoint ? 1 : 2;
  }
  return {demand.begin(), demand.end()};
}

bool fits(const RoutePath& path, const NetworkGraph& graph,
          std::span<const int> occupancy) {
  for (const auto& [node, need] : slot_demand(path)) {
    if (graph.memory_capacity(node) - occupancy[node] < need) return false;
  }
  return true;
}

void reserve(const RoutePath& path, std::vector<int>& occupancy) {
  for (const auto& [node, need] : slot_demand(path)) occupancy[node] += need;
}

double link_availability(NodeId u, NodeId v, const NetworkGraph& graph,
                         std::span<const int> occupancy) {
  auto free_ratio = [&](NodeId n) {
    const int m = graph.memory_capacity(n);
    return static_cast<double>(m - occupancy[n]) / m;
  };
  return std::clamp(std::min(free_ratio(u), free_ratio(v)), 0.0, 1.0);
}

double link_availability(const LinkSpec& link, const NetworkGraph& graph,
                         std::span<const int> occupancy) {
  return link_availability(link.u, link.v, graph, occupancy);
}

RoutePath path_via(NodeId source, NodeId destination, NodeId anchor,
                   const Dodag& dodag, RequestId request_id) {
  RoutePath path;
  path.request_id = request_id;
  path.anchor = anchor;
  path.node_sequence = dodag.upward_path(source, anchor);
  std::vector<NodeId> down = dodag.upward_path(destination, anchor);
  path.node_sequence.reserve(path.node_sequence.size() + down.size());
  path.node_sequence.insert(path.node_sequence.end(), down.rbegin() + 1,
                            down.rend());
  return path;
}

double score_path(const RoutePath& path, const NetworkView& view) {
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < path.node_sequence.size(); ++i) {
    const double avail =
        link_availability(path.node_sequence[i], path.node_sequence[i + 1],
                          view.graph, view.occupancy);
    worst = std::max(worst, 1.0 - avail);
  }
  return (view.dodag.depth(path.anchor) + 1.0) / (1.0 + worst);
}

std::vector<RoutePath> generate_candidate_paths(const Request& request,
                                                const NetworkView& view) {
  std::vector<RoutePath> out;
  for (NodeId anchor : view.dodag.find_common_ancestors(request.source,
                                                        request.destination)) {
    RoutePath path = path_via(request.source, request.destination, anchor,
                              view.dodag, request.id);
    bool saturated = false;
    for (std::size_t i = 0; i + 1 < path.node_sequence.size(); ++i) {
      if (link_availability(path.node_sequence[i], path.node_sequence[i + 1],
                            view.graph, view.occupancy) <= 0.0) {
        saturated = true;
        break;
      }
    }
    if (saturated || !fits(path, view.graph, view.occupancy)) continue;
    path.score = score_path(path, view);
    out.push_back(std::move(path));
  }
  return out;
}

bool better_path(const RoutePath& a, const RoutePath& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.bsm_depth() != b.bsm_depth()) return a.bsm_depth() < b.bsm_depth();
  return a.node_sequence < b.node_sequence;
}

std::vector<Assignment> radar_q_schedule(std::span<const Request> requests,
                                         const NetworkView& view) {
  std::vector<int> scratch(view.occupancy.begin(), view.occupancy.end());
  const NetworkView local{view.graph, view.dodag, scratch};
  std::vector<Assignment> out;
  for (std::size_t i : locality_order(requests, view.dodag)) {
    const Request& r = requests[i];
    std::vector<RoutePath> candidates = generate_candidate_paths(r, local);
    if (candidates.empty()) continue;
    auto best = std::min_element(candidates.begin(), candidates.end(),
                                 better_path);
    reserve(*best, scratch);
    out.push_back({r, std::move(*best)});
  }
  return out;
}

std::vector<Assignment> asynch_root_schedule(std::span<const Request> requests,
                                             const NetworkView& view) {
  std::vector<Assignment> out;
  out.reserve(requests.size());
  for (const Request& r : requests) {
    RoutePath path = path_via(r.source, r.destination, view.dodag.root(),
                              view.dodag, r.id);
    path.score = score_path(path, view);
    out.push_back({r, std::move(path)});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Assignment& a, const Assignment& b) {
                     return a.request.id < b.request.id;
                   });
  return out;
}

SlotPlan synch_nca_schedule(std::span<const Request> requests,
                            const NetworkView& view) {
  std::vector<int> scratch(view.occupancy.begin(), view.occupancy.end());
  SlotPlan plan;
  for (std::size_t i : locality_order(requests, view.dodag)) {
    const Request& r = requests[i];
    RoutePath path = path_via(r.source, r.destination,
                              view.dodag.nca(r.source, r.destination),
                              view.dodag, r.id);
    if (!fits(path, view.graph, scratch)) {
      plan.deferred.push_back(r.id);
      continue;
    }
    reserve(path, scratch);
    path.score = score_path(path, {view.graph, view.dodag, scratch});
    plan.assigned.push_back({r, std::move(path)});
  }
  return plan;
}

}  // namespace radarq
