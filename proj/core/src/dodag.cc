#include "radarq/dodag.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <string>

namespace radarq {

double compute_rank(int d_hop, double avg_parent_fidelity,
                    double occupancy_ratio, RankWeights weights) {
  if (d_hop < 0) throw std::invalid_argument("d_hop must be non-negative");
  if (!(weights.alpha > 0.0) || !(weights.beta > 0.0)) {
    throw std::invalid_argument("rank weights must be positive");
  }
  if (!(avg_parent_fidelity >= 0.0 && avg_parent_fidelity <= 1.0)) {
    throw std::invalid_argument("fidelity outside [0, 1]");
  }
  if (!(occupancy_ratio >= 0.0 && occupancy_ratio <= 1.0)) {
    throw std::invalid_argument("occupancy ratio outside [0, 1]");
  }
  const double penalty = (weights.alpha * (1.0 - avg_parent_fidelity) +
                          weights.beta * occupancy_ratio) /
                         (weights.alpha + weights.beta);
  if (!(penalty < 1.0)) {
    throw std::invalid_argument(
        "zero fidelity with full memory leaves no fractional headroom");
  }
  return d_hop + penalty;
}

std::optional<NodeId> select_parent(const DodagNodeState& state) {
  std::optional<NodeId> best;
  double best_rank = 0.0;
  // std::map iterates in ascending id order, so strict < keeps the lowest id.
  for (const auto& [id, advert] : state.neighbor_table) {
    if (!best || advert.rank < best_rank) {
      best = id;
      best_rank = advert.rank;
    }
  }
  return best;
}

Dodag Dodag::converge(const NetworkGraph& graph, NodeId root,
                      RankWeights weights, std::span<const int> occupancy) {
  if (!graph.contains(root)) {
    throw std::invalid_argument("DODAG root " + std::to_string(root) +
                                " is not a node of the graph");
  }
  if (!occupancy.empty() && occupancy.size() != graph.node_count()) {
    throw std::invalid_argument("occupancy vector does not match graph");
  }

  Dodag dag;
  dag.root_ = root;
  dag.weights_ = weights;
  dag.states_.resize(graph.node_count());
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    DodagNodeState& s = dag.states_[v];
    s.node = v;
    s.memory_capacity = graph.memory_capacity(v);
    s.occupancy = occupancy.empty() ? 0 : occupancy[v];
  }
  DodagNodeState& r = dag.states_[root];
  r.joined = true;
  r.d_hop = 0;
  r.avg_parent_fidelity = 1.0;
  r.rank = compute_rank(0, 1.0, r.occupancy_ratio(), weights);

  const int bound =
      (graph.is_connected() ? graph.diameter()
                            : static_cast<int>(graph.node_count())) +
      4;

  // DIO phase: a node advertises when its state changed or a DIS asked it to.
  std::vector<bool> dirty(graph.node_count(), false);
  std::vector<bool> solicited(graph.node_count(), false);
  dirty[root] = true;
  bool settled = false;
  while (!settled) {
    if (dag.rounds_ >= bound) {
      throw ConvergenceError("DODAG did not converge within " +
                             std::to_string(bound) + " rounds");
    }
    ++dag.rounds_;

    std::vector<ControlMessage> wire;
    for (NodeId v = 0; v < graph.node_count(); ++v) {
      const DodagNodeState& s = dag.states_[v];
      for (const Adjacency& a : graph.neighbors(v)) {
        if (!s.joined) {
          wire.push_back({MessageKind::kDis, v, a.neighbor, {}});
        } else if (dirty[v] || solicited[v]) {
          wire.push_back({MessageKind::kDio, v, a.neighbor, dag.make_dio(v)});
        }
      }
    }
    std::fill(dirty.begin(), dirty.end(), false);
    std::fill(solicited.begin(), solicited.end(), false);

    std::vector<bool> heard(graph.node_count(), false);
    for (const ControlMessage& msg : wire) {
      if (msg.kind == MessageKind::kDis) {
        if (dag.states_[msg.target].joined) solicited[msg.target] = true;
      } else {
        dag.receive(msg, graph);
        heard[msg.target] = true;
      }
    }

    bool changed = false;
    for (NodeId v = 0; v < graph.node_count(); ++v) {
      if (v == root || !heard[v]) continue;
      const DodagNodeState before = dag.states_[v];
      dag.recompute(v);
      const DodagNodeState& after = dag.states_[v];
      if (after.joined != before.joined || after.rank != before.rank ||
          after.preferred_parent != before.preferred_parent) {
        dirty[v] = true;
        changed = true;
      }
    }
    bool all_joined = std::all_of(dag.states_.begin(), dag.states_.end(),
                                  [](const DodagNodeState& s) { return s.joined; });
    bool pending = std::any_of(solicited.begin(), solicited.end(),
                               [](bool b) { return b; });
    settled = !changed && all_joined && !pending;
  }

  // DAO phase: each node reports its subtree to its parent until stable.
  std::vector<NodeId> everyone(graph.node_count());
  for (NodeId v = 0; v < graph.node_count(); ++v) everyone[v] = v;
  dag.rebuild_descendants(everyone);
  return dag;
}

DioPayload Dodag::make_dio(NodeId v) const {
  const DodagNodeState& s = states_[v];
  return {s.rank, version_, s.avg_parent_fidelity, s.occupancy_ratio()};
}

void Dodag::receive(const ControlMessage& msg, const NetworkGraph& graph) {
  DodagNodeState& s = states_[msg.target];
  if (const auto* dio = std::get_if<DioPayload>(&msg.payload)) {
    auto link = graph.find_link(msg.target, msg.origin);
    NeighborAdvert advert;
    advert.rank = dio->rank;
    advert.fidelity = dio->fidelity;
    advert.occupancy_ratio = dio->occupancy_ratio;
    advert.link_fidelity = link ? graph.link(*link).init_fidelity : 0.0;
    s.neighbor_table[msg.origin] = advert;
  } else {
    receive_dao(msg);
  }
}

void Dodag::receive_dao(const ControlMessage& msg) {
  DodagNodeState& s = states_[msg.target];
  if (const auto* dao = std::get_if<DaoPayload>(&msg.payload)) {
    std::vector<NodeId> merged;
    merged.reserve(s.descendant_routes.size() + dao->descendants.size());
    if (dao->no_path) {
      std::set_difference(s.descendant_routes.begin(), s.descendant_routes.end(),
                          dao->descendants.begin(), dao->descendants.end(),
                          std::back_inserter(merged));
    } else {
      std::set_union(s.descendant_routes.begin(), s.descendant_routes.end(),
                     dao->descendants.begin(), dao->descendants.end(),
                     std::back_inserter(merged));
    }
    s.descendant_routes = std::move(merged);
  }
}

void Dodag::recompute(NodeId v) {
  DodagNodeState& s = states_[v];
  if (v == root_) {
    s.rank = compute_rank(0, 1.0, s.occupancy_ratio(), weights_);
    return;
  }
  auto parent = select_parent(s);
  if (!parent) {
    s.joined = false;
    s.preferred_parent.reset();
    return;
  }
  const int parent_level =
      static_cast<int>(std::floor(s.neighbor_table.at(*parent).rank));
  double sum = 0.0;
  int count = 0;
  for (const auto& [id, advert] : s.neighbor_table) {
    if (static_cast<int>(std::floor(advert.rank)) == parent_level) {
      sum += advert.link_fidelity;
      ++count;
    }
  }
  s.joined = true;
  s.preferred_parent = parent;
  s.d_hop = parent_level + 1;
  s.avg_parent_fidelity = sum / count;
  s.rank = compute_rank(s.d_hop, s.avg_parent_fidelity, s.occupancy_ratio(),
                        weights_);
}

void Dodag::rebuild_descendants(std::span<const NodeId> nodes) {
  std::vector<NodeId> order(nodes.begin(), nodes.end());
  std::stable_sort(order.begin(), order.end(), [this](NodeId a, NodeId b) {
    return states_[a].d_hop > states_[b].d_hop;
  });
  std::vector<bool> in_scope(states_.size(), false);
  for (NodeId v : order) {
    in_scope[v] = true;
    states_[v].descendant_routes.clear();
  }
  // Children outside the rebuilt set keep reporting their cached subtree.
  for (NodeId c = 0; c < states_.size(); ++c) {
    const DodagNodeState& s = states_[c];
    if (in_scope[c] || !s.preferred_parent || !in_scope[*s.preferred_parent]) {
      continue;
    }
    receive_dao({MessageKind::kDao, c, *s.preferred_parent, make_dao(c)});
  }
  // Deepest first, so every child's set is final before its DAO is sent.
  for (NodeId v : order) {
    const DodagNodeState& s = states_[v];
    if (!s.preferred_parent || !in_scope[*s.preferred_parent]) continue;
    receive_dao({MessageKind::kDao, v, *s.preferred_parent, make_dao(v)});
  }
}

DaoPayload Dodag::make_dao(NodeId v) const {
  const std::vector<NodeId>& below = states_[v].descendant_routes;
  DaoPayload dao;
  dao.descendants.reserve(below.size() + 1);
  auto it = std::lower_bound(below.begin(), below.end(), v);
  dao.descendants.insert(dao.descendants.end(), below.begin(), it);
  dao.descendants.push_back(v);
  dao.descendants.insert(dao.descendants.end(), it, below.end());
  return dao;
}

std::vector<NodeId> Dodag::root_path(NodeId v) const {
  std::vector<NodeId> path{v};
  NodeId cur = v;
  while (cur != root_) {
    const auto& parent = states_[cur].preferred_parent;
    if (!parent) {
      throw ConvergenceError("node " + std::to_string(cur) +
                             " has no route to the root");
    }
    cur = *parent;
    path.push_back(cur);
    if (path.size() > states_.size()) {
      throw ConvergenceError("parent pointers form a cycle");
    }
  }
  return path;
}

std::vector<NodeId> Dodag::find_common_ancestors(NodeId s, NodeId d) const {
  const std::vector<NodeId> up_s = root_path(s);
  const std::vector<NodeId> up_d = root_path(d);
  std::vector<NodeId> common;
  for (NodeId v : up_d) {
    if (std::find(up_s.begin(), up_s.end(), v) != up_s.end()) {
      common.push_back(v);
    }
  }
  return common;
}

NodeId Dodag::nca(NodeId s, NodeId d) const {
  return find_common_ancestors(s, d).front();
}

std::vector<NodeId> Dodag::upward_path(NodeId v, NodeId ancestor) const {
  std::vector<NodeId> path{v};
  path.reserve(16);
  NodeId cur = v;
  while (cur != ancestor) {
    const auto& parent = states_[cur].preferred_parent;
    if (!parent || path.size() > states_.size()) {
      throw std::invalid_argument("node " + std::to_string(ancestor) +
                                  " is not an ancestor of " +
                                  std::to_string(v));
    }
    cur = *parent;
    path.push_back(cur);
  }
  return path;
}

std::vector<NodeId> Dodag::localized_update(
    std::span<const NodeId> failed_path, const NetworkGraph& graph,
    std::span<const int> occupancy) {
  std::vector<NodeId> affected;
  for (NodeId v : failed_path) {
    affected.push_back(v);
    for (const Adjacency& a : graph.neighbors(v)) affected.push_back(a.neighbor);
  }
  std::sort(affected.begin(), affected.end());
  affected.erase(std::unique(affected.begin(), affected.end()), affected.end());
  std::vector<bool> in_scope(states_.size(), false);
  for (NodeId v : affected) in_scope[v] = true;

  std::vector<std::pair<double, std::optional<NodeId>>> before;
  before.reserve(affected.size());
  for (NodeId v : affected) {
    before.emplace_back(states_[v].rank, states_[v].preferred_parent);
  }
  // A moved subtree must leave its old ancestors and reach its new ones, so
  // route state is rebuilt along both parent chains.
  std::vector<bool> reroute = in_scope;
  auto mark_ancestors = [&] {
    for (NodeId v : affected) {
      for (auto p = states_[v].preferred_parent; p && !reroute[*p];
           p = states_[*p].preferred_parent) {
        reroute[*p] = true;
      }
    }
  };
  mark_ancestors();

  // Refresh local metrics. d_hop and F_v depend only on the level of the
  // candidate parents, so the refreshed rank is final for this exchange.
  for (NodeId v : affected) {
    DodagNodeState& s = states_[v];
    if (!occupancy.empty()) s.occupancy = occupancy[v];
    if (v == root_) {
      s.rank = compute_rank(0, 1.0, s.occupancy_ratio(), weights_);
    } else if (s.joined) {
      s.rank = compute_rank(s.d_hop, s.avg_parent_fidelity,
                            s.occupancy_ratio(), weights_);
    }
  }
  for (NodeId v : affected) {
    for (const Adjacency& a : graph.neighbors(v)) {
      if (!in_scope[a.neighbor]) continue;
      receive({MessageKind::kDio, v, a.neighbor, make_dio(v)}, graph);
    }
  }
  for (NodeId v : affected) {
    if (v != root_) recompute(v);
  }
  mark_ancestors();
  std::vector<NodeId> rebuilt;
  for (NodeId v = 0; v < reroute.size(); ++v) {
    if (reroute[v]) rebuilt.push_back(v);
  }
  rebuild_descendants(rebuilt);

  std::vector<NodeId> changed;
  for (std::size_t i = 0; i < affected.size(); ++i) {
    const DodagNodeState& now = states_[affected[i]];
    if (now.rank != before[i].first ||
        now.preferred_parent != before[i].second) {
      changed.push_back(affected[i]);
    }
  }
  return changed;
}

void Dodag::dump(std::ostream& out) const {
  char buf[96];
  for (const DodagNodeState& s : states_) {
    std::string parent =
        s.preferred_parent ? std::to_string(*s.preferred_parent) : "-";
    std::snprintf(buf, sizeof(buf), "%u %.6f %s %d\n", s.node, s.rank,
                  parent.c_str(), s.d_hop);
    out << buf;
  }
}

}  // namespace radarq
