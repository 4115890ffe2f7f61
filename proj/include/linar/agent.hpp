#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <utility>
#include <vector>

#include "linar/coverage.hpp"
#include "linar/geometry.hpp"
#include "linar/imaginary.hpp"
#include "linar/messages.hpp"

namespace linar {

enum class TimerKind { SendNgb, ExploreStart, SearchTimeout };

struct Timer {
  TimerKind kind = TimerKind::SendNgb;
  SearchKey key{};
};

/// Everything an agent may do to the outside world. The simulator implements
/// it; tests can record calls instead.
class AgentContext {
 public:
  virtual ~AgentContext() = default;
  virtual double now() const = 0;
  virtual void broadcast(NodeId from, Message m) = 0;
  /// One-hop transmission to a specific neighbour.
  virtual void send_to(NodeId from, NodeId to, Message m) = 0;
  virtual void schedule(NodeId node, double delay, Timer t) = 0;
  /// Instantaneous relocation of `node`.
  virtual void move(NodeId node, Position to) = 0;
  virtual void note(std::string_view /*counter*/) {}
};

struct NeighborInfo {
  Position pos{};
  std::optional<NodeStatus> stat;
  std::optional<double> sup;
};

struct AgentConfig {
  int k = 1;
  double beta = 0.0;
  double ts = 0.5;                    // seconds
  double search_timeout_factor = 4.0;  // timeout per search round, in units of ts
  double beacon_timeout = 10.0;       // seconds
  double range = 20.0;                // radio range, to tell whether a moved neighbour is still adjacent
  AugmentOptions augment{0};  // greedy only; the Trusted shortcut stays sound either way
};

/// Open path search towards one deficient neighbour pair.
struct PendingSearch {
  SearchKey current{};
  int rounds_left = 0;
  std::vector<NodeId> avoid;
  bool unrestricted = false;  // retrying from scratch without A
};

/// This node's share of the path set a search has built so far: its
/// neighbours on the path through it (pred towards the source).
struct PathFlow {
  NodeId pred = -1;
  NodeId succ = -1;
  bool used = false;
  bool excluded = false;           // member of A: never takes part
  std::set<NodeId> target_preds;  // at the target: last hops of found paths
};

/// Explore flood bookkeeping of one round. The flood runs on the residual
/// graph of the node-split network: each node has an entry side and an exit
/// side, and a path node can be left backwards towards its predecessor.
struct FloodState {
  bool in = false, out = false;
  NodeId in_parent = -1, out_parent = -1;
};

/// Per-node protocol state (the "Initially" block plus bookkeeping).
struct AgentState {
  NodeId me = 0;
  Position pos{};
  NodeStatus status = NodeStatus::Joint;
  double sup_me = 0.0;
  std::set<NodeId> gamma;                            // Γ_u
  std::map<NodeId, std::vector<NodeId>> nbr_lists;  // E_u as Γ_w for w in Γ_u
  std::map<NodeId, NeighborInfo> info;               // I_u
  std::map<std::pair<NodeId, NodeId>, PendingSearch> targets;  // T_u
  std::set<SearchKey> seen;                                    // R_u (Discover fingerprints)
  std::map<SearchKey, PathFlow> flow;     // keyed by SearchKey::base()
  std::map<SearchKey, FloodState> flood;  // keyed by the round's key
  std::map<SearchKey, NodeId> discover_parent;
  std::map<NodeId, int> stat_seq_seen;
  std::map<NodeId, double> last_beacon;
  std::set<NodeId> awaiting_ngb;
  std::set<NodeId> failed;  // neighbours this node declared failed
  bool detect_pending = false;
  bool search_failed = false;
  int search_instance = 0;
  int stat_seq = 0;
  int episode = 0;
  int moved_in_episode = -1;
  std::set<NodeId> settled;  // failed or already relocated this episode: never candidates
};

class NodeAgent {
 public:
  NodeAgent(NodeId me, Position pos, AgentConfig cfg) : cfg_(cfg) {
    s_.me = me;
    s_.pos = pos;
  }

  const AgentState& state() const { return s_; }
  AgentState& state() { return s_; }
  const AgentConfig& config() const { return cfg_; }
  NodeId id() const { return s_.me; }
  NodeStatus status() const { return s_.status; }

  /// Phase 1 entry: announce position, exchange neighbour lists after ts.
  void start(AgentContext& ctx) {
    Message m;
    m.kind = MessageKind::Start;
    m.origin = s_.me;
    m.pos = s_.pos;
    ctx.broadcast(s_.me, std::move(m));
    s_.detect_pending = true;
    ctx.schedule(s_.me, cfg_.ts, Timer{TimerKind::SendNgb, {}});
  }

  void begin_episode(int episode) {
    s_.episode = episode;
    s_.settled.clear();
  }

  /// Re-run status detection once every current neighbour has resent Ngb.
  void request_detect(AgentContext& ctx) {
    s_.detect_pending = true;
    s_.awaiting_ngb = s_.gamma;
    maybe_detect(ctx);
  }

  void send_ngb(AgentContext& ctx) {
    Message m;
    m.kind = MessageKind::Ngb;
    m.origin = s_.me;
    for (NodeId w : s_.gamma) {
      m.gamma.push_back(w);
      m.gamma_pos.push_back(s_.info[w].pos);
      const auto& inf = s_.info[w];
      if (inf.stat) m.info.push_back({w, *inf.stat, inf.sup.value_or(0.0)});
    }
    ctx.broadcast(s_.me, std::move(m));
  }

  void on_timer(AgentContext& ctx, const Timer& t) {
    switch (t.kind) {
      case TimerKind::SendNgb:
        s_.awaiting_ngb = s_.gamma;
        send_ngb(ctx);
        maybe_detect(ctx);
        break;
      case TimerKind::ExploreStart:
        if (s_.flow[t.key.base()].pred != t.key.source) arrive_in(ctx, t.key, t.key.source);
        break;
      case TimerKind::SearchTimeout: on_search_timeout(ctx, t.key); break;
    }
  }

  void on_message(AgentContext& ctx, const Message& m) {
    switch (m.kind) {
      case MessageKind::Start: on_start(ctx, m); break;
      case MessageKind::Ngb: on_ngb(ctx, m); break;
      case MessageKind::Discover: on_discover(ctx, m); break;
      case MessageKind::Explore: on_explore(ctx, m); break;
      case MessageKind::Confirm: on_confirm(ctx, m); break;
      case MessageKind::Stat: on_stat(ctx, m); break;
      case MessageKind::Beacon: on_beacon(m.sender, ctx.now()); break;
      case MessageKind::Moved: on_moved(ctx, m); break;
      case MessageKind::Report:
      case MessageKind::Command: break;
    }
  }

  void on_beacon(NodeId from, double when) {
    if (s_.gamma.count(from)) s_.last_beacon[from] = when;
  }

  /// Neighbours silent for longer than the timeout; each is reported once
  /// and dropped from Γ_u.
  std::vector<NodeId> detect_failures(double now) {
    std::vector<NodeId> out;
    for (NodeId w : s_.gamma) {
      auto it = s_.last_beacon.find(w);
      const double last = it == s_.last_beacon.end() ? now : it->second;
      if (now - last > cfg_.beacon_timeout) out.push_back(w);
    }
    for (NodeId w : out) {
      s_.gamma.erase(w);
      s_.last_beacon.erase(w);
      s_.failed.insert(w);
    }
    return out;
  }

  /// Failure of neighbour w: only a Joint node's loss needs restoration.
  void on_failure(AgentContext& ctx, NodeId w) {
    std::vector<NodeId> cands = known_neighbors_of(w);
    const NodeStatus ws = s_.info.count(w) && s_.info[w].stat ? *s_.info[w].stat : NodeStatus::Joint;
    const Position vacancy = s_.info[w].pos;
    s_.nbr_lists.erase(w);
    if (ws == NodeStatus::Joint) update(ctx, w, vacancy, cands);
  }

  /// Coverage-aware comparison: does candidate v reach `target` more cheaply
  /// than this node?
  bool lower_cost(NodeId v, Position target) const {
    auto cost = [&](Position from, double sup) { return euclidean_cost(from, target) / (1.0 + sup * cfg_.beta); };
    auto it = s_.info.find(v);
    const Position pv = it == s_.info.end() ? Position{} : it->second.pos;
    const double sv = it == s_.info.end() ? 0.0 : it->second.sup.value_or(0.0);
    const double cv = cost(pv, sv);
    const double cu = cost(s_.pos, s_.sup_me);
    return cv < cu || (cv == cu && v < s_.me);
  }

  /// Decides whether this node fills the vacancy left by w at `vacancy`,
  /// given the other nodes that were adjacent to w.
  bool should_move(NodeId w, Position vacancy, const std::vector<NodeId>& candidates) const {
    bool any_trusted = false, better_trusted = false, better_joint = false;
    for (NodeId v : candidates) {
      if (v == s_.me || v == w || s_.failed.count(v) || s_.settled.count(v)) continue;
      auto it = s_.info.find(v);
      const bool trusted = it != s_.info.end() && it->second.stat == NodeStatus::Trusted;
      if (trusted) {
        any_trusted = true;
        if (lower_cost(v, vacancy)) better_trusted = true;
      } else if (lower_cost(v, vacancy)) {
        better_joint = true;
      }
    }
    if (s_.status == NodeStatus::Trusted) return !better_trusted;
    return !any_trusted && !better_joint;
  }

  /// β-gated reaction to a Trusted neighbour leaving: true when the mover's
  /// support exceeds ours by more than 1/β.
  bool should_follow_move(double mover_sup) const { return (mover_sup - s_.sup_me) * cfg_.beta > 1.0; }

 private:
  AgentConfig cfg_;
  AgentState s_;
  std::optional<std::pair<LocalView, DetectionPlan>> last_plan_;

  std::vector<NodeId> known_neighbors_of(NodeId w) const {
    auto it = s_.nbr_lists.find(w);
    if (it == s_.nbr_lists.end()) return {s_.me};
    return it->second;
  }

  void maybe_detect(AgentContext& ctx) {
    if (s_.detect_pending && s_.awaiting_ngb.empty()) {
      s_.detect_pending = false;
      detect_state(ctx);
    }
  }

  void broadcast_stat(AgentContext& ctx) {
    Message m;
    m.kind = MessageKind::Stat;
    m.origin = s_.me;
    m.stat = s_.status;
    m.sup = s_.sup_me;
    m.seq = ++s_.stat_seq;
    ctx.broadcast(s_.me, std::move(m));
  }

  void detect_state(AgentContext& ctx) {
    LocalView view;
    view.me = s_.me;
    view.neighbors.assign(s_.gamma.begin(), s_.gamma.end());
    for (NodeId w : s_.gamma)
      if (auto it = s_.nbr_lists.find(w); it != s_.nbr_lists.end()) view.neighbor_lists[w] = it->second;
    // the plan is a pure function of the view; refresh rounds often repeat it
    if (!last_plan_ || last_plan_->first != view) last_plan_.emplace(view, plan_detection(view, cfg_.k, cfg_.augment));
    DetectionPlan plan = last_plan_->second;
    s_.sup_me = plan.support;
    s_.targets.clear();
    s_.search_failed = false;
    if (plan.searches.empty()) {
      s_.status = plan.status;
      broadcast_stat(ctx);
      return;
    }
    s_.status = NodeStatus::Joint;
    for (auto& req : plan.searches) {
      PendingSearch ps;
      ps.rounds_left = req.rounds;
      ps.avoid = std::move(req.avoid);
      ps.current = {s_.me, req.source, req.target, ++s_.search_instance, 0};
      auto& slot = s_.targets[{req.source, req.target}];
      slot = std::move(ps);
      launch_round(ctx, slot);
    }
  }

  void launch_round(AgentContext& ctx, PendingSearch& ps) {
    const SearchKey key = ps.current;
    s_.seen.insert(key);
    Message m;
    m.kind = MessageKind::Discover;
    m.origin = s_.me;
    m.key = key;
    m.avoid = ps.avoid;
    ctx.broadcast(s_.me, std::move(m));
    ctx.schedule(s_.me, cfg_.search_timeout_factor * cfg_.ts, Timer{TimerKind::SearchTimeout, key});
  }

  PendingSearch* find_target(const SearchKey& key) {
    auto it = s_.targets.find({key.source, key.target});
    if (it == s_.targets.end() || it->second.current != key) return nullptr;
    return &it->second;
  }

  void on_search_timeout(AgentContext& ctx, const SearchKey& key) {
    PendingSearch* ps = find_target(key);
    if (!ps) return;
    // Fixed local paths can block the only augmenting route; retry once
    // building all k paths globally.
    if (!ps->unrestricted && !ps->avoid.empty()) {
      ctx.note("search_retry");
      ps->unrestricted = true;
      ps->avoid.clear();
      ps->rounds_left = cfg_.k;
      ps->current = {s_.me, key.source, key.target, ++s_.search_instance, 0};
      launch_round(ctx, *ps);
      return;
    }
    ctx.note("search_timeout");
    s_.targets.clear();
    s_.search_failed = true;
    s_.status = NodeStatus::Joint;
    broadcast_stat(ctx);
  }

  void on_start(AgentContext& ctx, const Message& m) {
    const NodeId w = m.origin;
    if (w == s_.me) return;
    s_.gamma.insert(w);
    s_.failed.erase(w);
    s_.info[w].pos = m.pos;
    s_.last_beacon[w] = ctx.now();
    // A node arriving after phase 1 learns its new neighbours from replies.
    if (m.next_hop < 0 && ctx.now() > cfg_.ts) {
      Message r;
      r.kind = MessageKind::Start;
      r.origin = s_.me;
      r.pos = s_.pos;
      ctx.send_to(s_.me, w, std::move(r));
    }
  }

  void on_ngb(AgentContext& ctx, const Message& m) {
    const NodeId w = m.origin;
    if (!s_.gamma.count(w)) return;
    s_.nbr_lists[w] = m.gamma;
    for (std::size_t i = 0; i < m.gamma.size(); ++i)
      if (m.gamma[i] != s_.me) s_.info[m.gamma[i]].pos = m.gamma_pos[i];
    for (const auto& e : m.info) {
      if (e.id == s_.me) continue;
      auto& inf = s_.info[e.id];
      if (!inf.stat) {
        inf.stat = e.stat;
        inf.sup = e.sup;
      }
    }
    s_.awaiting_ngb.erase(w);
    maybe_detect(ctx);
  }

  void on_discover(AgentContext& ctx, const Message& m) {
    const SearchKey& key = m.key;
    if (!s_.seen.insert(key).second) return;
    s_.discover_parent[key] = m.sender;
    auto fit = s_.flow.try_emplace(key.base()).first;
    fit->second.excluded = std::binary_search(m.avoid.begin(), m.avoid.end(), s_.me);
    if (s_.me == key.target) return;
    if (m.sender == key.initiator) {
      Message fwd = m;
      fwd.sender = s_.me;
      ctx.broadcast(s_.me, std::move(fwd));
    }
    if (fit->second.excluded || s_.me == key.source) return;
    if (s_.gamma.count(key.source)) ctx.schedule(s_.me, cfg_.ts, Timer{TimerKind::ExploreStart, key});
  }

  void send_explore(AgentContext& ctx, const SearchKey& key, bool back, NodeId to) {
    Message m;
    m.kind = MessageKind::Explore;
    m.origin = s_.me;
    m.key = key;
    m.back = back;
    if (back)
      ctx.send_to(s_.me, to, std::move(m));
    else
      ctx.broadcast(s_.me, std::move(m));
  }

  /// Flood reaches this node's entry side from `from`'s exit side.
  void arrive_in(AgentContext& ctx, const SearchKey& key, NodeId from) {
    FloodState& fs = s_.flood[key];
    if (fs.in) return;
    fs.in = true;
    fs.in_parent = from;
    PathFlow& pf = s_.flow[key.base()];
    if (s_.me == key.target) {
      send_confirm(ctx, key, from, true, Side::Out);
      pf.target_preds.insert(from);
      return;
    }
    if (!pf.used)
      arrive_out(ctx, key, s_.me);
    else if (pf.pred >= 0 && pf.pred != key.source)
      send_explore(ctx, key, true, pf.pred);
  }

  /// Flood reaches this node's exit side: internally (from == me) or
  /// backwards from its successor's entry side.
  void arrive_out(AgentContext& ctx, const SearchKey& key, NodeId from) {
    FloodState& fs = s_.flood[key];
    if (fs.out) return;
    fs.out = true;
    fs.out_parent = from;
    send_explore(ctx, key, false, -1);
    PathFlow& pf = s_.flow[key.base()];
    if (from != s_.me && !fs.in) {
      fs.in = true;
      fs.in_parent = s_.me;
      if (pf.pred >= 0 && pf.pred != key.source) send_explore(ctx, key, true, pf.pred);
    }
  }

  void on_explore(AgentContext& ctx, const Message& m) {
    const SearchKey& key = m.key;
    if (s_.me == key.initiator || s_.me == key.source) return;
    PathFlow& pf = s_.flow[key.base()];
    if (pf.excluded) return;
    if (m.back) {
      if (m.next_hop == s_.me) arrive_out(ctx, key, m.sender);
      return;
    }
    // the arc sender -> me is saturated when it already carries a found path
    if (pf.pred == m.sender || pf.target_preds.count(m.sender)) return;
    arrive_in(ctx, key, m.sender);
  }

  enum class Side { In, Out };

  void send_confirm(AgentContext& ctx, const SearchKey& key, NodeId to, bool chain, Side side) {
    Message c;
    c.kind = MessageKind::Confirm;
    c.origin = s_.me;
    c.key = key;
    c.chain = chain;
    c.back = side == Side::In;
    ctx.send_to(s_.me, to, std::move(c));
  }

  /// Walks the augmenting path back towards the source, updating this
  /// node's path neighbours for every arc it touches.
  void on_confirm(AgentContext& ctx, const Message& m) {
    const SearchKey& key = m.key;
    if (s_.me == key.initiator) {
      handle_confirm(ctx, key);
      return;
    }
    if (!m.chain) {
      auto dp = s_.discover_parent.find(key);
      if (dp == s_.discover_parent.end()) {
        ctx.note("confirm_dropped");
        return;
      }
      send_confirm(ctx, key, dp->second, false, Side::Out);
      return;
    }
    auto fit = s_.flood.find(key);
    if (fit == s_.flood.end()) {
      ctx.note("confirm_dropped");
      return;
    }
    const FloodState& fs = fit->second;
    PathFlow& pf = s_.flow[key.base()];
    Side side = m.back ? Side::In : Side::Out;
    const NodeId child = m.sender;
    // arc from this state to the child's state
    if (side == Side::Out)
      pf.succ = child;
    else if (pf.pred == child)
      pf.pred = -1;
    while (true) {
      if (side == Side::In) {
        if (fs.in_parent == s_.me) {  // exit -> entry: this node leaves the path set
          pf.used = false;
          side = Side::Out;
          continue;
        }
        pf.pred = fs.in_parent;
        if (fs.in_parent == key.source) {
          auto dp = s_.discover_parent.find(key);
          if (dp == s_.discover_parent.end()) {
            ctx.note("confirm_dropped");
            return;
          }
          send_confirm(ctx, key, dp->second, false, Side::Out);
        } else {
          send_confirm(ctx, key, fs.in_parent, true, Side::Out);
        }
        return;
      }
      if (fs.out_parent == s_.me) {  // entry -> exit: this node joins the path set
        pf.used = true;
        side = Side::In;
        continue;
      }
      if (pf.succ == fs.out_parent) pf.succ = -1;
      send_confirm(ctx, key, fs.out_parent, true, Side::In);
      return;
    }
  }

  void handle_confirm(AgentContext& ctx, const SearchKey& key) {
    PendingSearch* ps = find_target(key);
    if (!ps) {
      ctx.note("confirm_unknown_target");
      return;
    }
    if (--ps->rounds_left > 0) {
      ps->current.round += 1;
      launch_round(ctx, *ps);
      return;
    }
    s_.targets.erase({key.source, key.target});
    if (s_.targets.empty() && !s_.search_failed) {
      s_.status = NodeStatus::Trusted;
      broadcast_stat(ctx);
    }
  }

  void on_stat(AgentContext& ctx, const Message& m) {
    const NodeId o = m.origin;
    if (o == s_.me) return;
    auto [it, fresh] = s_.stat_seq_seen.try_emplace(o, m.seq);
    if (!fresh) {
      if (it->second >= m.seq) return;
      it->second = m.seq;
    }
    auto& inf = s_.info[o];
    inf.stat = m.stat;
    inf.sup = m.sup;
    if (m.sender == o) {
      Message fwd = m;
      fwd.sender = s_.me;
      ctx.broadcast(s_.me, std::move(fwd));
    }
  }

  void on_moved(AgentContext& ctx, const Message& m) {
    const NodeId u = m.origin;
    if (u == s_.me) return;
    std::vector<NodeId> cands = known_neighbors_of(u);
    const auto& inf = s_.info[u];
    const NodeStatus us = inf.stat.value_or(NodeStatus::Joint);
    const double usup = inf.sup.value_or(0.0);
    s_.settled.insert(u);
    if (m.replaced >= 0) s_.settled.insert(m.replaced);
    s_.info[u].pos = m.new_pos;
    if (!in_range(s_.pos, m.new_pos, cfg_.range)) {
      s_.gamma.erase(u);
      s_.last_beacon.erase(u);
      s_.nbr_lists.erase(u);
    }
    if (us == NodeStatus::Joint || should_follow_move(usup)) update(ctx, u, m.pos, cands);
  }

  void update(AgentContext& ctx, NodeId w, Position vacancy, const std::vector<NodeId>& candidates) {
    if (std::find(candidates.begin(), candidates.end(), s_.me) == candidates.end()) return;
    for (NodeId x : s_.gamma)
      if (x != w && s_.info[x].pos == vacancy) return;  // someone already arrived
    if (!should_move(w, vacancy, candidates)) return;
    if (s_.moved_in_episode == s_.episode) {
      ctx.note("second_move_refused");
      return;
    }
    s_.moved_in_episode = s_.episode;
    Message mv;
    mv.kind = MessageKind::Moved;
    mv.origin = s_.me;
    mv.pos = s_.pos;
    mv.new_pos = vacancy;
    mv.replaced = w;
    ctx.broadcast(s_.me, std::move(mv));
    ctx.move(s_.me, vacancy);
    s_.pos = vacancy;
    s_.gamma.clear();
    s_.nbr_lists.clear();
    s_.last_beacon.clear();
    Message st;
    st.kind = MessageKind::Start;
    st.origin = s_.me;
    st.pos = s_.pos;
    ctx.broadcast(s_.me, std::move(st));
  }
};

}  // namespace linar
