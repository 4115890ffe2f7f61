#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <ostream>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "linar/agent.hpp"
#include "linar/connectivity.hpp"
#include "linar/geometry.hpp"
#include "linar/messages.hpp"
#include "linar/topology.hpp"

namespace linar {

/// Sent bytes and message counts per node and kind. Beacons are counted but
/// kept out of the byte and message totals.
class ByteLedger {
 public:
  using Counters = std::array<std::uint64_t, kMessageKinds>;

  explicit ByteLedger(std::size_t nodes = 0) { resize(nodes); }

  void resize(std::size_t nodes) {
    bytes_.resize(nodes, Counters{});
    counts_.resize(nodes, Counters{});
  }

  void record(NodeId node, MessageKind kind, std::size_t bytes) {
    if (node >= static_cast<NodeId>(bytes_.size())) resize(static_cast<std::size_t>(node) + 1);
    const auto k = static_cast<std::size_t>(kind);
    bytes_[node][k] += bytes;
    counts_[node][k] += 1;
  }

  std::uint64_t bytes(MessageKind kind) const { return column(bytes_, kind); }
  std::uint64_t count(MessageKind kind) const { return column(counts_, kind); }

  std::uint64_t node_bytes(NodeId node) const {
    std::uint64_t s = 0;
    for (std::size_t k = 0; k < kMessageKinds; ++k)
      if (k != static_cast<std::size_t>(MessageKind::Beacon)) s += bytes_[node][k];
    return s;
  }

  std::uint64_t total_bytes() const {
    std::uint64_t s = 0;
    for (std::size_t k = 0; k < kMessageKinds; ++k)
      if (k != static_cast<std::size_t>(MessageKind::Beacon)) s += bytes(static_cast<MessageKind>(k));
    return s;
  }

  std::uint64_t total_messages() const {
    std::uint64_t s = 0;
    for (std::size_t k = 0; k < kMessageKinds; ++k)
      if (k != static_cast<std::size_t>(MessageKind::Beacon)) s += count(static_cast<MessageKind>(k));
    return s;
  }

  std::size_t nodes() const { return bytes_.size(); }

  Counters bytes_by_kind() const {
    Counters c{};
    for (std::size_t k = 0; k < kMessageKinds; ++k) c[k] = bytes(static_cast<MessageKind>(k));
    return c;
  }

  Counters counts_by_kind() const {
    Counters c{};
    for (std::size_t k = 0; k < kMessageKinds; ++k) c[k] = count(static_cast<MessageKind>(k));
    return c;
  }

 private:
  static std::uint64_t column(const std::vector<Counters>& v, MessageKind kind) {
    std::uint64_t s = 0;
    for (const auto& c : v) s += c[static_cast<std::size_t>(kind)];
    return s;
  }

  std::vector<Counters> bytes_;
  std::vector<Counters> counts_;
};

struct SimConfig {
  double latency = 0.01;  // per hop, seconds
  double ts = 0.5;
  double beacon_period = 2.0;
  double beacon_timeout = 10.0;
  double quiet_factor = 10.0;  // refresh after quiet_factor * ts without protocol traffic
  double search_timeout_factor = 4.0;
  std::uint64_t seed = 1;
  std::uint64_t event_budget = 50'000'000;
  AugmentOptions augment{0};  // greedy only; the Trusted shortcut stays sound either way
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Transmission counts of one global path search round.
struct SearchStats {
  int discover_tx = 0;
  int explore_tx = 0;
  int max_degree = 0;  // Δ of the live graph when the round started
  int live_nodes = 0;
};

/// Outcome of one injected failure.
struct EpisodeResult {
  NodeId failed = -1;
  NodeStatus failed_status = NodeStatus::Joint;
  double movement = 0.0;
  int moves = 0;
  std::vector<NodeId> movers;
  double start_time = 0.0;
  double end_time = 0.0;  // last protocol event
};

class Simulator : private AgentContext {
 public:
  Simulator(const Topology& topo, int k, double beta, SimConfig cfg = {})
      : topo_(topo), cfg_(cfg), k_(k), beta_(beta), rng_(cfg.seed) {
    const std::size_t n = topo.nodes.size();
    pos_ = topo.nodes;
    alive_.assign(n, 1);
    graph_ = unit_disk_graph(pos_, topo.range);
    ledger_.resize(n);
    AgentConfig ac;
    ac.k = k;
    ac.beta = beta;
    ac.ts = cfg.ts;
    ac.search_timeout_factor = cfg.search_timeout_factor;
    ac.beacon_timeout = cfg.beacon_timeout;
    ac.range = topo.range;
    ac.augment = cfg.augment;
    agents_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) agents_.emplace_back(static_cast<NodeId>(i), pos_[i], ac);
  }

  /// Phase 1: Start/Ngb exchange, status detection and all searches, to quiescence.
  void run_phase1() {
    for (auto& a : agents_) a.start(*this);
    for (NodeId v = 0; v < static_cast<NodeId>(agents_.size()); ++v) {
      Event e;
      e.time = unit_uniform(rng_) * cfg_.beacon_period;
      e.kind = EventKind::Beacon;
      e.target = v;
      push(std::move(e));
    }
    run_to_quiescence(0.0);
  }

  /// Stops node w, lets its neighbours detect the silence, runs restoration
  /// to quiescence, then the local refresh round.
  EpisodeResult fail_node(NodeId w) {
    if (w < 0 || w >= static_cast<NodeId>(alive_.size()) || !alive_[w]) throw std::domain_error("fail_node: not a live node");
    ++episode_;
    for (auto& a : agents_) a.begin_episode(episode_);
    EpisodeResult res;
    res.failed = w;
    res.failed_status = agents_[w].status();
    res.start_time = now_;
    movers_.clear();
    touched_.clear();
    movement_episode_ = 0.0;
    for (NodeId u : graph_.neighbors(w)) touched_.insert(u);
    alive_[w] = 0;
    isolate(w);
    last_protocol_ = now_;
    run_to_quiescence(now_ + cfg_.beacon_timeout + cfg_.beacon_period + 2 * cfg_.latency);
    run_to_quiescence(std::max(now_, last_protocol_) + cfg_.quiet_factor * cfg_.ts);
    refresh();
    run_to_quiescence(now_);
    res.movement = movement_episode_;
    res.movers = movers_;
    res.moves = static_cast<int>(movers_.size());
    res.end_time = last_protocol_;
    return res;
  }

  const ByteLedger& ledger() const { return ledger_; }
  const std::vector<Position>& positions() const { return pos_; }
  bool alive(NodeId v) const { return alive_[v] != 0; }
  const NodeAgent& agent(NodeId v) const { return agents_[v]; }
  NodeAgent& agent(NodeId v) { return agents_[v]; }
  std::size_t size() const { return agents_.size(); }
  double time() const { return now_; }
  double last_protocol_time() const { return last_protocol_; }
  double total_movement() const { return movement_total_; }
  const std::map<SearchKey, SearchStats>& searches() const { return searches_; }
  const std::map<std::string, long, std::less<>>& notes() const { return notes_; }
  std::uint64_t events_processed() const { return processed_; }

  /// Positions of live nodes.
  std::vector<Position> live_positions() const {
    std::vector<Position> out;
    for (std::size_t i = 0; i < pos_.size(); ++i)
      if (alive_[i]) out.push_back(pos_[i]);
    return out;
  }

  /// Current geometry graph restricted to live nodes.
  Subgraph live_graph() const {
    std::vector<NodeId> ids;
    for (NodeId i = 0; i < static_cast<NodeId>(alive_.size()); ++i)
      if (alive_[i]) ids.push_back(i);
    return induced_subgraph(graph_, ids);
  }

  void set_trace(std::ostream* os) { trace_ = os; }

 private:
  enum class EventKind { Deliver, Timer, Beacon };

  struct Event {
    double time = 0.0;
    std::uint64_t ordinal = 0;
    EventKind kind = EventKind::Deliver;
    NodeId target = 0;
    std::shared_ptr<const Message> msg;
    Timer timer{};
  };

  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.ordinal > b.ordinal;
    }
  };

  Topology topo_;
  SimConfig cfg_;
  int k_;
  double beta_;
  std::mt19937_64 rng_;
  std::vector<Position> pos_;
  std::vector<char> alive_;
  Graph graph_;
  std::vector<NodeAgent> agents_;
  ByteLedger ledger_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t next_ordinal_ = 0;
  std::uint64_t processed_ = 0;
  long protocol_pending_ = 0;
  double now_ = 0.0;
  double last_protocol_ = 0.0;
  int episode_ = 0;
  std::vector<NodeId> movers_;
  std::set<NodeId> touched_;
  double movement_episode_ = 0.0;
  double movement_total_ = 0.0;
  std::map<SearchKey, SearchStats> searches_;
  std::map<std::string, long, std::less<>> notes_;
  std::ostream* trace_ = nullptr;

  void push(Event e) {
    e.ordinal = next_ordinal_++;
    if (e.kind != EventKind::Beacon) ++protocol_pending_;
    queue_.push(std::move(e));
  }

  /// Processes every event up to `horizon`, then keeps going while protocol
  /// events remain. Beacons alone never keep the run alive.
  void run_to_quiescence(double horizon) {
    while (!queue_.empty() && (queue_.top().time <= horizon || protocol_pending_ > 0)) {
      if (++processed_ > cfg_.event_budget) {
        const Event& e = queue_.top();
        throw SimulationError("simulation did not quiesce within " + std::to_string(cfg_.event_budget) +
                              " events; oldest pending event at t=" + std::to_string(e.time) + " for node " +
                              std::to_string(e.target));
      }
      Event e = queue_.top();
      queue_.pop();
      now_ = e.time;
      if (e.kind != EventKind::Beacon) {
        --protocol_pending_;
        last_protocol_ = now_;
      }
      dispatch(e);
    }
    if (now_ < horizon) now_ = horizon;
  }

  void dispatch(const Event& e) {
    if (!alive_[e.target]) return;
    NodeAgent& a = agents_[e.target];
    switch (e.kind) {
      case EventKind::Deliver:
        if (trace_) *trace_ << format_coord(now_) << " deliver " << to_string(e.msg->kind) << ' ' << e.msg->sender << "->" << e.target << '\n';
        a.on_message(*this, *e.msg);
        break;
      case EventKind::Timer:
        if (trace_) *trace_ << format_coord(now_) << " timer " << static_cast<int>(e.timer.kind) << ' ' << e.target << '\n';
        a.on_timer(*this, e.timer);
        break;
      case EventKind::Beacon: {
        beacon(e.target);
        for (NodeId w : a.detect_failures(now_)) a.on_failure(*this, w);
        Event next;
        next.time = now_ + cfg_.beacon_period;
        next.kind = EventKind::Beacon;
        next.target = e.target;
        push(std::move(next));
        break;
      }
    }
  }

  void beacon(NodeId from) {
    ledger_.record(from, MessageKind::Beacon, wire::header);
    for (NodeId v : graph_.neighbors(from))
      if (alive_[v]) agents_[v].on_beacon(from, now_ + cfg_.latency);
  }

  void isolate(NodeId v) {
    std::vector<NodeId> nb(graph_.neighbors(v).begin(), graph_.neighbors(v).end());
    for (NodeId u : nb) graph_.remove_edge(u, v);
  }

  void note(std::string_view counter) override {
    auto it = notes_.find(counter);
    if (it == notes_.end())
      notes_.emplace(std::string(counter), 1);
    else
      ++it->second;
  }

  double now() const override { return now_; }

  void track(const Message& m) {
    if (m.kind != MessageKind::Discover && m.kind != MessageKind::Explore) return;
    auto [it, fresh] = searches_.try_emplace(m.key);
    if (fresh) {
      it->second.max_degree = static_cast<int>(graph_.max_degree());
      for (char c : alive_) it->second.live_nodes += c;
    }
    if (m.kind == MessageKind::Discover)
      ++it->second.discover_tx;
    else
      ++it->second.explore_tx;
  }

  void broadcast(NodeId from, Message m) override {
    if (!alive_[from]) return;
    m.sender = from;
    m.next_hop = -1;
    ledger_.record(from, m.kind, m.wire_size());
    track(m);
    auto shared = std::make_shared<const Message>(std::move(m));
    for (NodeId v : graph_.neighbors(from)) {
      if (!alive_[v]) continue;
      Event e;
      e.time = now_ + cfg_.latency;
      e.kind = EventKind::Deliver;
      e.target = v;
      e.msg = shared;
      push(std::move(e));
    }
  }

  void send_to(NodeId from, NodeId to, Message m) override {
    if (!alive_[from]) return;
    m.sender = from;
    m.next_hop = to;
    ledger_.record(from, m.kind, m.wire_size());
    if (to < 0 || to >= static_cast<NodeId>(alive_.size()) || !alive_[to] || !graph_.has_edge(from, to)) {
      note("unicast_dropped");
      return;
    }
    Event e;
    e.time = now_ + cfg_.latency;
    e.kind = EventKind::Deliver;
    e.target = to;
    e.msg = std::make_shared<const Message>(std::move(m));
    push(std::move(e));
  }

  void schedule(NodeId node, double delay, Timer t) override {
    Event e;
    e.time = now_ + delay;
    e.kind = EventKind::Timer;
    e.target = node;
    e.timer = t;
    push(std::move(e));
  }

  void move(NodeId node, Position to) override {
    const double d = euclidean_cost(pos_[node], to);
    movement_episode_ += d;
    movement_total_ += d;
    movers_.push_back(node);
    touched_.insert(node);
    for (NodeId u : graph_.neighbors(node)) touched_.insert(u);
    isolate(node);
    pos_[node] = to;
    for (NodeId u = 0; u < static_cast<NodeId>(pos_.size()); ++u)
      if (u != node && alive_[u] && in_range(pos_[u], to, topo_.range)) graph_.add_edge(u, node);
    for (NodeId u : graph_.neighbors(node)) touched_.insert(u);
  }

  /// Nodes within two hops of anything whose adjacency changed re-run
  /// status detection; they and their neighbours resend Ngb first.
  void refresh() {
    std::set<NodeId> region;
    for (NodeId t : touched_) {
      if (!alive_[t]) continue;
      for (const auto& [v, h] : hop_ball(t, 2)) region.insert(v);
    }
    std::set<NodeId> senders = region;
    for (NodeId v : region)
      for (NodeId u : graph_.neighbors(v))
        if (alive_[u]) senders.insert(u);
    for (NodeId v : region) agents_[v].request_detect(*this);
    for (NodeId v : senders) agents_[v].send_ngb(*this);
  }

  std::vector<std::pair<NodeId, int>> hop_ball(NodeId src, int limit) const {
    std::vector<std::pair<NodeId, int>> out;
    auto hops = bfs_hops(graph_, src, limit);
    for (NodeId v = 0; v < static_cast<NodeId>(hops.size()); ++v)
      if (hops[v] >= 0 && alive_[v]) out.emplace_back(v, hops[v]);
    return out;
  }
};

}  // namespace linar
