#include "radarq/engine.h"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <queue>
#include <stdexcept>
#include <string>

namespace radarq {

namespace {

std::size_t topology_nodes(const TopologySpec& t) {
  if (t.kind == TopologyKind::kGrid) {
    return t.rows > 0 && t.cols > 0 ? static_cast<std::size_t>(t.rows) * t.cols
                                    : 0;
  }
  return t.n > 0 ? static_cast<std::size_t>(t.n) : 0;
}

void check_workload(const SimConfig& c, std::size_t nodes,
                    std::vector<std::string>& errors) {
  if (c.concurrency < 1) return;
  if (c.root && *c.root >= nodes) {
    errors.push_back("root: node " + std::to_string(*c.root) +
                     " is not in the topology");
  }
  if (c.workload.kind == WorkloadKind::kRandom) {
    if (2 * static_cast<std::size_t>(c.concurrency) > nodes) {
      errors.push_back("concurrency: " + std::to_string(c.concurrency) +
                       " demands need " + std::to_string(2 * c.concurrency) +
                       " distinct endpoints but the topology has " +
                       std::to_string(nodes) + " nodes");
    }
    return;
  }
  if (c.workload.pairs.size() != static_cast<std::size_t>(c.concurrency)) {
    errors.push_back("workload.pairs: expected " +
                     std::to_string(c.concurrency) + " pairs, got " +
                     std::to_string(c.workload.pairs.size()));
  }
  for (const auto& [s, d] : c.workload.pairs) {
    if (s >= nodes || d >= nodes) {
      errors.push_back("workload.pairs: pair (" + std::to_string(s) + ", " +
                       std::to_string(d) + ") names a node outside the topology");
    } else if (s == d) {
      errors.push_back("workload.pairs: source and destination are both " +
                       std::to_string(s));
    }
  }
}

enum class EventKind : std::uint8_t {
  kTick,
  kSchedule,
  kSwap,
  kDeliver,
  kExpire,
  kSlotStart,
  kSlotGenerate,
};

struct Event {
  SimTime time{0};
  std::uint64_t seq = 0;
  EventKind kind = EventKind::kTick;
  std::uint32_t tenant = 0;
  std::uint64_t epoch = 0;
  int pos = 0;
  std::uint64_t aux = 0;
};

struct LaterFirst {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

// A live pair between path positions lo < hi.
struct Segment {
  int lo = 0;
  int hi = 0;
  EntangledPair pair;
  std::uint64_t id = 0;
};

struct Attempt {
  bool active = false;
  bool reserved = false;
  bool doomed = false;  // synch-nca: a link missed its single try
  RoutePath path;
  std::vector<std::size_t> link_ids;
  std::vector<std::uint8_t> link_done;
  std::vector<SimTime> herald;
  // Memory slots counted in Q for each path position.
  std::vector<std::uint8_t> held_left;
  std::vector<std::uint8_t> held_right;
  std::vector<Segment> segments;
  int swaps_done = 0;
  SimTime notify_at{0};
  std::optional<SimTime> blocked_since;

  int links() const { return static_cast<int>(path.link_count()); }
};

struct Tenant {
  Request request;
  SimTime waiting_since{0};  // when the demand last became pending
  int retries = 0;
  std::uint64_t epoch = 0;
  Attempt attempt;
};

class Engine {
 public:
  Engine(const SimConfig& config, const NetworkGraph& graph,
         const RunOptions& options)
      : config_(config),
        graph_(graph),
        options_(options),
        rng_(config.seed),
        dodag_(Dodag::converge(graph, config.root.value_or(graph.center()),
                               config.weights)),
        occupancy_(graph.node_count(), 0),
        tau_(config.noise.decay_tau()),
        end_(config.warmup + config.duration) {
    if (config.strategy == StrategyKind::kSynchNca) {
      slot_ = synch_slot_timing(config, graph, dodag_);
    }
  }

  RunResult run() {
    tenants_.resize(static_cast<std::size_t>(config_.concurrency));
    for (std::uint32_t i = 0; i < tenants_.size(); ++i) {
      tenants_[i].request.id = i;
      assign_demand(i, SimTime{0});
    }
    if (config_.strategy == StrategyKind::kSynchNca) {
      push(SimTime{0}, EventKind::kSlotStart);
    } else {
      trigger_schedule(SimTime{0});
    }

    SimTime last{0};
    while (!queue_.empty() && queue_.top().time < end_) {
      const Event ev = queue_.top();
      queue_.pop();
      if (config_.check_invariants && ev.time < last) {
        violation("event at " + std::to_string(ev.time.count()) +
                  "ns processed after " + std::to_string(last.count()) + "ns");
      }
      last = ev.time;
      ++diag_.events;
      dispatch(ev);
      if (config_.check_invariants) check_memory();
    }

    RunResult result;
    result.metrics =
        aggregate(echo_config(config_), config_.concurrency, deliveries_,
                  failures_, config_.warmup, end_);
    result.diagnostics = diag_;
    result.deliveries = std::move(deliveries_);
    result.failures = std::move(failures_);
    return result;
  }

 private:
  bool synch() const { return config_.strategy == StrategyKind::kSynchNca; }
  bool radar() const { return config_.strategy == StrategyKind::kRadarQ; }

  void push(SimTime t, EventKind kind, std::uint32_t tenant = 0,
            std::uint64_t epoch = 0, int pos = 0, std::uint64_t aux = 0) {
    queue_.push(Event{t, next_seq_++, kind, tenant, epoch, pos, aux});
  }

  void push_for(SimTime t, EventKind kind, std::uint32_t tenant, int pos = 0,
                std::uint64_t aux = 0) {
    push(t, kind, tenant, tenants_[tenant].epoch, pos, aux);
  }

  void dispatch(const Event& ev) {
    switch (ev.kind) {
      case EventKind::kTick:
        on_tick(ev.time);
        return;
      case EventKind::kSchedule:
        on_schedule(ev.time);
        return;
      case EventKind::kSlotStart:
        on_slot_start(ev.time);
        return;
      case EventKind::kSlotGenerate:
        on_slot_generate(ev.time);
        return;
      default:
        break;
    }
    Tenant& t = tenants_[ev.tenant];
    if (t.epoch != ev.epoch || !t.attempt.active) return;  // stale
    switch (ev.kind) {
      case EventKind::kSwap:
        on_swap(ev.tenant, ev.pos, ev.time);
        break;
      case EventKind::kDeliver:
        on_deliver(ev.tenant, ev.time);
        break;
      case EventKind::kExpire:
        on_expire(ev.tenant, ev.aux, ev.time);
        break;
      default:
        break;
    }
  }

  // ---- demands -----------------------------------------------------------

  void assign_demand(std::uint32_t i, SimTime now) {
    Request& r = tenants_[i].request;
    r.submitted_at = now;
    tenants_[i].waiting_since = now;
    r.status = RequestStatus::kPending;
    if (config_.workload.kind == WorkloadKind::kFixed) {
      r.source = config_.workload.pairs[i].first;
      r.destination = config_.workload.pairs[i].second;
      return;
    }
    // Endpoints of other tenants' demands are off limits.
    std::vector<std::uint8_t> busy(graph_.node_count(), 0);
    for (std::uint32_t j = 0; j < tenants_.size(); ++j) {
      if (j == i || j >= assigned_) continue;
      busy[tenants_[j].request.source] = 1;
      busy[tenants_[j].request.destination] = 1;
    }
    std::vector<NodeId> free;
    for (NodeId v = 0; v < graph_.node_count(); ++v) {
      if (!busy[v]) free.push_back(v);
    }
    auto pick = [&](std::size_t n) {
      return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
    };
    const std::size_t a = pick(free.size());
    std::size_t b = pick(free.size() - 1);
    if (b >= a) ++b;
    r.source = free[a];
    r.destination = free[b];
    assigned_ = std::max<std::uint32_t>(assigned_, i + 1);
  }

  std::vector<Request> pending_requests() const {
    std::vector<Request> out;
    for (const Tenant& t : tenants_) {
      if (!t.attempt.active) out.push_back(t.request);
    }
    return out;
  }

  // ---- scheduling --------------------------------------------------------

  void trigger_schedule(SimTime now) {
    if (synch() || schedule_queued_) return;
    schedule_queued_ = true;
    push(now, EventKind::kSchedule);
  }

  void on_schedule(SimTime now) {
    schedule_queued_ = false;
    std::vector<Request> pending = pending_requests();
    if (pending.empty()) return;
    bool started = false;
    if (radar()) {
      // Every source node runs path selection for its own demand against the
      // memory state it sees at that moment; the longest waiter acts first.
      std::stable_sort(pending.begin(), pending.end(),
                       [&](const Request& a, const Request& b) {
                         return tenants_[a.id].waiting_since <
                                tenants_[b.id].waiting_since;
                       });
      for (const Request& r : pending) {
        std::vector<Assignment> plan = radar_q_schedule(
            std::span<const Request>(&r, 1), {graph_, dodag_, occupancy_});
        if (plan.empty()) continue;
        start_attempt(r.id, std::move(plan.front().path), now);
        started = true;
      }
    } else {
      for (Assignment& a :
           asynch_root_schedule(pending, {graph_, dodag_, occupancy_})) {
        start_attempt(a.request.id, std::move(a.path), now);
        started = true;
      }
    }
    if (started) ensure_tick(now);
  }

  void start_attempt(std::uint32_t i, RoutePath path, SimTime now) {
    Tenant& t = tenants_[i];
    const bool reserved = config_.strategy != StrategyKind::kAsynchRoot;
    ++diag_.scheduled_paths;
    audit_path(t.request, path);
    if (reserved && !fits(path, graph_, occupancy_)) {
      throw std::logic_error("scheduler assigned a path that does not fit");
    }

    ++t.epoch;
    Attempt& a = t.attempt;
    a = Attempt{};
    a.active = true;
    a.reserved = reserved;
    a.path = std::move(path);
    const int links = a.links();
    const auto& seq = a.path.node_sequence;
    a.link_ids.reserve(static_cast<std::size_t>(links));
    for (int j = 0; j < links; ++j) {
      auto id = graph_.find_link(seq[j], seq[j + 1]);
      if (!id) throw std::logic_error("path uses a missing link");
      a.link_ids.push_back(*id);
    }
    a.link_done.assign(static_cast<std::size_t>(links), 0);
    a.herald.assign(static_cast<std::size_t>(links), SimTime{0});
    a.held_left.assign(seq.size(), 0);
    a.held_right.assign(seq.size(), 0);
    a.notify_at = now;
    if (reserved) {
      for (int p = 0; p <= links; ++p) {
        if (p > 0) hold(a, p, /*left=*/true);
        if (p < links) hold(a, p, /*left=*/false);
      }
    }
    if (log_enabled()) {
      std::string nodes;
      for (std::size_t k = 0; k < seq.size(); ++k) {
        if (k) nodes += ',';
        nodes += std::to_string(seq[k]);
      }
      log("{\"t\":%" PRId64 ",\"ev\":\"start\",\"req\":%u,\"epoch\":%" PRIu64
          ",\"s\":%u,\"d\":%u,\"anchor\":%u,\"path\":[%s]}",
          now.count(), i, t.epoch, t.request.source, t.request.destination,
          a.path.anchor, nodes.c_str());
    }
  }

  void audit_path(const Request& r, const RoutePath& path) {
    const auto& seq = path.node_sequence;
    const std::size_t root_walk = dodag_.root_path(r.source).size() +
                                  dodag_.root_path(r.destination).size() - 2;
    if (path.link_count() > root_walk) ++diag_.path_excess;
    for (std::size_t j = 0; j + 1 < seq.size(); ++j) {
      if (link_availability(seq[j], seq[j + 1], graph_, occupancy_) <= 0.0) {
        if (config_.strategy == StrategyKind::kRadarQ) ++diag_.saturated_schedules;
        break;
      }
    }
  }

  // ---- memory ------------------------------------------------------------

  void hold(Attempt& a, int pos, bool left) {
    auto& slot = left ? a.held_left[pos] : a.held_right[pos];
    if (slot) return;
    slot = 1;
    ++occupancy_[a.path.node_sequence[pos]];
  }

  void release(Attempt& a, int pos, bool left) {
    auto& slot = left ? a.held_left[pos] : a.held_right[pos];
    if (!slot) return;
    slot = 0;
    --occupancy_[a.path.node_sequence[pos]];
  }

  void release_all(Attempt& a) {
    for (int p = 0; p < static_cast<int>(a.held_left.size()); ++p) {
      release(a, p, true);
      release(a, p, false);
    }
    a.segments.clear();
  }

  bool slot_free(NodeId v) const {
    return occupancy_[v] < graph_.memory_capacity(v);
  }

  // ---- generation --------------------------------------------------------

  void ensure_tick(SimTime now) {
    if (tick_queued_ || synch()) return;
    const auto period = config_.attempt_period.count();
    std::int64_t k = (now.count() + period - 1) / period;
    if (ticked_ && k * period <= last_tick_.count()) {
      k = last_tick_.count() / period + 1;
    }
    tick_queued_ = true;
    push(SimTime{k * period}, EventKind::kTick);
  }

  void on_tick(SimTime now) {
    tick_queued_ = false;
    ticked_ = true;
    last_tick_ = now;
    bool waiting = false;
    for (std::uint32_t i = 0; i < tenants_.size(); ++i) {
      Attempt& a = tenants_[i].attempt;
      if (!a.active) continue;
      bool blocked = false;
      bool missing = false;
      for (int j = 0; j < a.links(); ++j) {
        if (a.link_done[j]) continue;
        missing = true;
        if (!a.reserved) {
          const NodeId u = a.path.node_sequence[j];
          const NodeId v = a.path.node_sequence[j + 1];
          if (!slot_free(u) || !slot_free(v)) {
            blocked = true;
            continue;
          }
        }
        try_generate(i, j, now);
      }
      if (!a.reserved && missing) {
        if (!blocked) {
          a.blocked_since.reset();
        } else if (!a.blocked_since) {
          a.blocked_since = now;
        } else if (now - *a.blocked_since >= config_.block_timeout) {
          ++diag_.blocked_aborts;
          fail_attempt(i, "blocked", now);
          continue;
        }
      }
      if (a.active && missing) waiting = true;
    }
    if (waiting) ensure_tick(now);
  }

  // One draw for link j of tenant i's path; returns success.
  bool try_generate(std::uint32_t i, int j, SimTime now) {
    Attempt& a = tenants_[i].attempt;
    ++diag_.generation_attempts;
    const LinkSpec& link = graph_.link(a.link_ids[j]);
    std::optional<EntangledPair> pair = attempt_link_generation(link, now, rng_);
    if (!pair) return false;

    const auto& seq = a.path.node_sequence;
    const int links = a.links();
    a.link_done[j] = 1;
    a.herald[j] = now + config_.classical_latency;
    if (!a.reserved) {
      hold(a, j, false);
      hold(a, j + 1, true);
    }
    pair->a = seq[j];
    pair->b = seq[j + 1];
    const std::uint64_t id = next_segment_++;
    a.segments.push_back(Segment{j, j + 1, *pair, id});
    if (config_.noise.coherence_time) {
      push_for(now + *config_.noise.coherence_time + Duration(1),
               EventKind::kExpire, i, 0, id);
    }
    if (log_enabled()) {
      log("{\"t\":%" PRId64 ",\"ev\":\"gen\",\"req\":%u,\"epoch\":%" PRIu64
          ",\"pos\":%d,\"f\":%.17g}",
          now.count(), i, tenants_[i].epoch, j, pair->fidelity_at_creation);
    }
    for (int p : {j, j + 1}) {
      if (p > 0 && p < links && a.link_done[p - 1] && a.link_done[p]) {
        push_for(std::max(a.herald[p - 1], a.herald[p]), EventKind::kSwap, i, p);
      }
    }
    if (links == 1) push_for(a.herald[0], EventKind::kDeliver, i);
    return true;
  }

  // ---- swapping, delivery, expiry ----------------------------------------

  int find_segment(const Attempt& a, bool by_hi, int pos) const {
    for (std::size_t k = 0; k < a.segments.size(); ++k) {
      if ((by_hi ? a.segments[k].hi : a.segments[k].lo) == pos) {
        return static_cast<int>(k);
      }
    }
    return -1;
  }

  void on_swap(std::uint32_t i, int pos, SimTime now) {
    Attempt& a = tenants_[i].attempt;
    const int l = find_segment(a, true, pos);
    const int r = find_segment(a, false, pos);
    if (l < 0 || r < 0) throw std::logic_error("swap without both segments");
    const Segment left = a.segments[l];
    const Segment right = a.segments[r];
    ++diag_.swaps;
    std::optional<EntangledPair> joined =
        attempt_swap(left.pair, right.pair, a.path.node_sequence[pos], now,
                     config_.noise, rng_);
    if (log_enabled()) {
      log("{\"t\":%" PRId64 ",\"ev\":\"swap\",\"req\":%u,\"epoch\":%" PRIu64
          ",\"pos\":%d,\"ok\":%s}",
          now.count(), i, tenants_[i].epoch, pos, joined ? "true" : "false");
    }
    if (!joined) {
      ++diag_.failed_swaps;
      fail_attempt(i, "bsm", now);
      return;
    }
    release(a, pos, true);
    release(a, pos, false);
    std::erase_if(a.segments, [&](const Segment& s) {
      return s.id == left.id || s.id == right.id;
    });
    joined->a = a.path.node_sequence[left.lo];
    joined->b = a.path.node_sequence[right.hi];
    const std::uint64_t id = next_segment_++;
    a.segments.push_back(Segment{left.lo, right.hi, *joined, id});
    if (config_.noise.coherence_time) {
      push_for(now + *config_.noise.coherence_time + Duration(1),
               EventKind::kExpire, i, 0, id);
    }
    const int links = a.links();
    a.notify_at = std::max(a.notify_at,
                           now + config_.classical_latency * std::max(pos, links - pos));
    if (++a.swaps_done == links - 1) push_for(a.notify_at, EventKind::kDeliver, i);
    // Freed memory may let a waiting demand fit.
    if (radar() && has_pending()) trigger_schedule(now);
  }

  void on_deliver(std::uint32_t i, SimTime now) {
    Tenant& t = tenants_[i];
    Attempt& a = t.attempt;
    if (a.segments.size() != 1 || a.segments[0].lo != 0 ||
        a.segments[0].hi != a.links()) {
      throw std::logic_error("delivery without an end-to-end pair");
    }
    const double f = decayed_fidelity(a.segments[0].pair, now, tau_);
    deliveries_.push_back(DeliveryRecord{now, i, f});
    if (log_enabled()) {
      log("{\"t\":%" PRId64 ",\"ev\":\"deliver\",\"req\":%u,\"epoch\":%" PRIu64
          ",\"f\":%.17g}",
          now.count(), i, t.epoch, f);
    }
    release_all(a);
    a.active = false;
    ++t.epoch;
    t.retries = 0;
    t.request.status = RequestStatus::kServed;
    assign_demand(i, now);
    trigger_schedule(now);
  }

  void on_expire(std::uint32_t i, std::uint64_t segment, SimTime now) {
    Attempt& a = tenants_[i].attempt;
    auto it = std::find_if(a.segments.begin(), a.segments.end(),
                           [&](const Segment& s) { return s.id == segment; });
    if (it == a.segments.end()) return;  // consumed by a swap
    ++diag_.expirations;
    if (log_enabled()) {
      log("{\"t\":%" PRId64 ",\"ev\":\"expire\",\"req\":%u,\"epoch\":%" PRIu64
          ",\"lo\":%d,\"hi\":%d}",
          now.count(), i, tenants_[i].epoch, it->lo, it->hi);
    }
    fail_attempt(i, "expired", now);
  }

  void fail_attempt(std::uint32_t i, const char* reason, SimTime now) {
    Tenant& t = tenants_[i];
    Attempt& a = t.attempt;
    const std::vector<NodeId> path = a.path.node_sequence;
    release_all(a);
    a.active = false;
    ++t.epoch;
    ++t.retries;
    t.waiting_since = now;
    const bool final = t.retries > config_.max_retries;
    if (log_enabled()) {
      log("{\"t\":%" PRId64 ",\"ev\":\"fail\",\"req\":%u,\"epoch\":%" PRIu64
          ",\"reason\":\"%s\",\"final\":%s}",
          now.count(), i, t.epoch - 1, reason, final ? "true" : "false");
    }
    if (final) {
      failures_.push_back(FailureRecord{now, i});
      t.request.status = RequestStatus::kFailed;
      t.retries = 0;
      assign_demand(i, now);
    }
    if (radar()) {
      ++diag_.localized_updates;
      const std::vector<NodeId> changed =
          dodag_.localized_update(path, graph_, occupancy_);
      if (log_enabled()) {
        log("{\"t\":%" PRId64 ",\"ev\":\"update\",\"req\":%u,\"changed\":%zu}",
            now.count(), i, changed.size());
      }
    }
    trigger_schedule(now);
  }

  bool has_pending() const {
    return std::any_of(tenants_.begin(), tenants_.end(),
                       [](const Tenant& t) { return !t.attempt.active; });
  }

  // ---- synch-nca slots ---------------------------------------------------

  void on_slot_start(SimTime now) {
    if (log_enabled()) {
      log("{\"t\":%" PRId64 ",\"ev\":\"slot\"}", now.count());
    }
    for (std::uint32_t i = 0; i < tenants_.size(); ++i) {
      if (!tenants_[i].attempt.active) continue;
      ++diag_.slot_discards;
      fail_attempt(i, "slot", now);
    }
    const SlotPlan plan =
        synch_nca_schedule(pending_requests(), {graph_, dodag_, occupancy_});
    for (const Assignment& a : plan.assigned) {
      start_attempt(a.request.id, a.path, now);
    }
    push(now + slot_.overhead, EventKind::kSlotGenerate);
    push(now + slot_.length, EventKind::kSlotStart);
  }

  void on_slot_generate(SimTime now) {
    for (std::uint32_t i = 0; i < tenants_.size(); ++i) {
      Attempt& a = tenants_[i].attempt;
      if (!a.active) continue;
      const std::uint64_t epoch = tenants_[i].epoch;
      for (int j = 0; j < a.links(); ++j) {
        if (!try_generate(i, j, now)) a.doomed = true;
        if (tenants_[i].epoch != epoch) break;
      }
    }
  }

  // ---- diagnostics -------------------------------------------------------

  void violation(std::string what) {
    ++diag_.invariant_violations;
    if (diag_.first_violation.empty()) diag_.first_violation = std::move(what);
  }

  // Q_v must equal the slots held by live attempts at v, every live pair must
  // sit in held slots, and no memory may overflow.
  void check_memory() {
    ++diag_.invariant_checks;
    std::vector<int> expected(graph_.node_count(), 0);
    for (const Tenant& t : tenants_) {
      const Attempt& a = t.attempt;
      if (!a.active) continue;
      const auto& seq = a.path.node_sequence;
      for (std::size_t p = 0; p < seq.size(); ++p) {
        expected[seq[p]] += a.held_left[p] + a.held_right[p];
      }
      for (const Segment& s : a.segments) {
        if (!a.held_right[s.lo] || !a.held_left[s.hi]) {
          violation("live pair outside held memory");
        }
      }
    }
    for (NodeId v = 0; v < graph_.node_count(); ++v) {
      if (expected[v] != occupancy_[v]) {
        violation("occupancy of node " + std::to_string(v) + " is " +
                  std::to_string(occupancy_[v]) + ", held slots " +
                  std::to_string(expected[v]));
      }
      if (occupancy_[v] > graph_.memory_capacity(v) || occupancy_[v] < 0) {
        violation("node " + std::to_string(v) + " memory out of range");
      }
    }
  }

  bool log_enabled() const { return options_.event_log != nullptr; }

  template <typename... Args>
  void log(const char* format, Args... args) {
    char buf[512];
    const int n = std::snprintf(buf, sizeof(buf), format, args...);
    if (n < 0) return;
    if (static_cast<std::size_t>(n) < sizeof(buf)) {
      options_.event_log->write(buf, n);
    } else {
      std::string big(static_cast<std::size_t>(n) + 1, '\0');
      std::snprintf(big.data(), big.size(), format, args...);
      options_.event_log->write(big.data(), n);
    }
    options_.event_log->put('\n');
  }

  const SimConfig& config_;
  const NetworkGraph& graph_;
  const RunOptions& options_;
  Rng rng_;
  Dodag dodag_;
  std::vector<int> occupancy_;
  CoherenceTime tau_;
  SimTime end_;
  SlotTiming slot_;

  std::vector<Tenant> tenants_;
  std::uint32_t assigned_ = 0;
  std::priority_queue<Event, std::vector<Event>, LaterFirst> queue_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t next_segment_ = 0;
  bool schedule_queued_ = false;
  bool tick_queued_ = false;
  bool ticked_ = false;
  SimTime last_tick_{0};

  std::vector<DeliveryRecord> deliveries_;
  std::vector<FailureRecord> failures_;
  RunDiagnostics diag_;
};

}  // namespace

std::vector<std::string> validate_config(const SimConfig& c) {
  std::vector<std::string> errors;
  const TopologySpec& t = c.topology;
  if (t.kind == TopologyKind::kGrid) {
    if (t.rows < 1) errors.push_back("topology.rows: must be >= 1");
    if (t.cols < 1) errors.push_back("topology.cols: must be >= 1");
    if (t.rows >= 1 && t.cols >= 1 && t.rows * t.cols < 2) {
      errors.push_back("topology: a grid needs at least 2 nodes");
    }
  } else {
    if (t.n < 2) {
      errors.push_back("topology.n: must be >= 2");
    } else {
      const double links = std::round(t.n * t.avg_degree / 2.0);
      const double max_links = t.n * (t.n - 1.0) / 2.0;
      if (!(t.avg_degree > 0.0) || links < t.n - 1.0) {
        errors.push_back("topology.avg_degree: too low to connect " +
                         std::to_string(t.n) + " nodes");
      } else if (links > max_links) {
        errors.push_back("topology.avg_degree: exceeds a complete graph");
      }
    }
  }
  for (const LinkSpec& o : t.link_overrides) {
    if (!(o.gen_prob >= 0.0 && o.gen_prob <= 1.0) ||
        !(o.init_fidelity >= kWernerFloor && o.init_fidelity <= 1.0)) {
      errors.push_back("topology.link_overrides: link " + std::to_string(o.u) +
                       "-" + std::to_string(o.v) + " has out-of-range p or F0");
    }
  }
  if (t.memory_capacity < 1) {
    errors.push_back("topology.memory_capacity: must be >= 1");
  }
  if (c.concurrency < 1) errors.push_back("concurrency: must be >= 1");

  const NoiseParams& n = c.noise;
  auto prob = [&](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
      errors.push_back(std::string(name) + ": must lie in [0, 1]");
    }
  };
  prob(n.gen_prob, "noise.gen_prob");
  prob(n.bsm_prob, "noise.bsm_prob");
  if (!(n.init_fidelity >= kWernerFloor && n.init_fidelity <= 1.0)) {
    errors.push_back("noise.init_fidelity: must lie in [0.25, 1]");
  }
  if (n.coherence_time && n.coherence_time->count() <= 0) {
    errors.push_back("noise.coherence_time: must be positive");
  }
  if (!(n.tau_ratio > 0.0)) errors.push_back("noise.tau_ratio: must be positive");
  if (!(c.weights.alpha > 0.0)) errors.push_back("weights.alpha: must be positive");
  if (!(c.weights.beta > 0.0)) errors.push_back("weights.beta: must be positive");
  if (c.attempt_period.count() <= 0) {
    errors.push_back("attempt_period: must be positive");
  }
  if (c.classical_latency.count() < 0) {
    errors.push_back("classical_latency: must be >= 0");
  }
  if (c.duration.count() <= 0) errors.push_back("duration: must be positive");
  if (c.warmup.count() < 0) errors.push_back("warmup: must be >= 0");
  if (c.max_retries < 0) errors.push_back("max_retries: must be >= 0");
  if (c.block_timeout.count() <= 0) {
    errors.push_back("block_timeout: must be positive");
  }
  if (c.slot_overhead && c.slot_overhead->count() < 0) {
    errors.push_back("slot_overhead: must be >= 0");
  }
  check_workload(c, topology_nodes(t), errors);
  return errors;
}

NetworkGraph build_topology(const SimConfig& c) {
  const LinkDefaults defaults{c.noise.gen_prob, c.noise.init_fidelity,
                              c.topology.memory_capacity};
  NetworkGraph graph =
      c.topology.kind == TopologyKind::kGrid
          ? build_grid(c.topology.rows, c.topology.cols, defaults)
          : build_random(c.topology.n, c.topology.avg_degree,
                         c.topology.seed.value_or(c.seed), defaults);
  if (c.topology.link_overrides.empty()) return graph;
  std::vector<LinkSpec> links = graph.links();
  for (const LinkSpec& o : c.topology.link_overrides) {
    auto id = graph.find_link(o.u, o.v);
    if (!id) {
      throw std::invalid_argument("topology.link_overrides: no link " +
                                  std::to_string(o.u) + "-" +
                                  std::to_string(o.v));
    }
    links[*id].gen_prob = o.gen_prob;
    links[*id].init_fidelity = o.init_fidelity;
  }
  return NetworkGraph(graph.nodes(), std::move(links));
}

ConfigEcho echo_config(const SimConfig& c) {
  ConfigEcho e;
  e.strategy = std::string(strategy_name(c.strategy));
  if (c.topology.kind == TopologyKind::kGrid) {
    e.topology = "grid";
    e.shape_a = c.topology.rows;
    e.shape_b = c.topology.cols;
  } else {
    e.topology = "random";
    e.shape_a = c.topology.n;
    e.shape_b = c.topology.avg_degree;
  }
  e.concurrency = c.concurrency;
  e.coherence_time = c.noise.coherence_time;
  e.seed = c.seed;
  return e;
}

SlotTiming synch_slot_timing(const SimConfig& config, const NetworkGraph& graph,
                             const Dodag& dodag) {
  int max_depth = 0;
  for (const DodagNodeState& s : dodag.states()) {
    max_depth = std::max(max_depth, s.d_hop);
  }
  SlotTiming t;
  t.overhead = config.slot_overhead.value_or(config.classical_latency *
                                             graph.diameter());
  // Coordination, one generation round, then swaps and the end-to-end
  // notification over the longest NCA walk.
  t.length = t.overhead + config.attempt_period +
             config.classical_latency * (1 + 2 * max_depth);
  return t;
}

RunResult simulate(const SimConfig& config, const RunOptions& options) {
  std::vector<std::string> errors = validate_config(config);
  if (!errors.empty()) throw std::invalid_argument(errors.front());
  const NetworkGraph graph = build_topology(config);
  return simulate(config, graph, options);
}

RunResult simulate(const SimConfig& config, const NetworkGraph& graph,
                   const RunOptions& options) {
  std::vector<std::string> errors;
  check_workload(config, graph.node_count(), errors);
  if (!errors.empty()) throw std::invalid_argument(errors.front());
  if (!graph.is_connected()) {
    throw std::invalid_argument("topology: graph is not connected");
  }
  Engine engine(config, graph, options);
  return engine.run();
}

}  // namespace radarq
