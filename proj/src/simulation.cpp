#include "toposim/simulation.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace toposim {

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

double unit_double(std::uint64_t x) {
  return static_cast<double>(x >> 11) * (1.0 / 9007199254740992.0);  // 53-bit mantissa
}

std::uint64_t link_key(NodeId from, NodeId to) {
  return (static_cast<std::uint64_t>(from) << 32) | to;
}

const char* kind_name(MsgKind k) {
  switch (k) {
    case MsgKind::kDeliverTx: return "deliver";
    case MsgKind::kAnnounce: return "announce";
    case MsgKind::kAnnounceRequest: return "announce_req";
    case MsgKind::kTimer: return "timer";
  }
  return "?";
}

}  // namespace

LatencyModel LatencyModel::fixed(double seconds, std::uint64_t seed) {
  LatencyModel m;
  m.kind = Kind::kFixed;
  m.lo = m.hi = seconds;
  m.seed = seed;
  return m;
}

LatencyModel LatencyModel::uniform(double lo, double hi, std::uint64_t seed) {
  if (lo <= 0 || hi < lo) throw std::invalid_argument("latency bounds must satisfy 0 < lo <= hi");
  LatencyModel m;
  m.kind = Kind::kUniform;
  m.lo = lo;
  m.hi = hi;
  m.seed = seed;
  return m;
}

double LatencyModel::sample(NodeId from, NodeId to, std::uint64_t seq) const {
  if (kind == Kind::kFixed) return lo;
  std::uint64_t h = mix64(seed ^ mix64(link_key(from, to)) ^ mix64(seq * 0x632be59bd9b4e019ull));
  return lo + (hi - lo) * unit_double(h);
}

Simulation::Simulation(SimConfig config) : config_(std::move(config)) {}

NodeId Simulation::add_node(std::string label, PolicyProfile profile) {
  Node node;
  node.label = std::move(label);
  node.pool = std::make_unique<Mempool>(std::move(profile), &accounts_);
  nodes_.push_back(std::move(node));
  return static_cast<NodeId>(nodes_.size() - 1);
}

void Simulation::add_edge(NodeId a, NodeId b) {
  if (a == b) throw std::invalid_argument("self-loops are not allowed");
  if (a >= nodes_.size() || b >= nodes_.size()) throw std::out_of_range("unknown node id");
  if (has_edge(a, b)) return;
  auto insert_sorted = [](std::vector<NodeId>& v, NodeId x) {
    v.insert(std::lower_bound(v.begin(), v.end(), x), x);
  };
  insert_sorted(nodes_[a].neighbors, b);
  insert_sorted(nodes_[b].neighbors, a);
}

bool Simulation::has_edge(NodeId a, NodeId b) const {
  const auto& v = nodes_.at(a).neighbors;
  return std::binary_search(v.begin(), v.end(), b);
}

void Simulation::remove_node(NodeId n) {
  Node& node = nodes_.at(n);
  for (NodeId peer : node.neighbors) {
    auto& v = nodes_[peer].neighbors;
    v.erase(std::remove(v.begin(), v.end(), n), v.end());
  }
  node.neighbors.clear();
  node.alive = false;
  node.announce_windows.clear();
}

std::optional<NodeId> Simulation::find_label(const std::string& label) const {
  for (NodeId i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].label == label) return i;
  return std::nullopt;
}

void Simulation::set_announce_fraction(NodeId n, double fraction) {
  if (fraction < 0 || fraction > 1) throw std::invalid_argument("fraction must be in [0,1]");
  nodes_.at(n).announce_fraction = fraction;
}

void Simulation::set_relay_disabled(NodeId n, bool disabled) {
  nodes_.at(n).relay_disabled = disabled;
}

Transaction Simulation::make_tx(AccountId sender, Nonce nonce, Rational gas_price,
                                std::optional<Rational> max_fee) {
  if (!gas_price.is_positive()) throw std::invalid_argument("gas price must be positive");
  if (max_fee && *max_fee < gas_price) throw std::invalid_argument("max fee below gas price");
  Transaction tx;
  tx.id = next_tx_id_++;
  tx.sender = sender;
  tx.nonce = nonce;
  tx.gas_price = gas_price;
  tx.max_fee = max_fee;
  tx.submit_time = now_;
  tx_store_[tx.id] = tx;
  return tx;
}

AdmitOutcome Simulation::inject_tx(NodeId at, const Transaction& tx) {
  if (at >= nodes_.size() || !nodes_[at].alive) throw std::out_of_range("unknown node id");
  tx_store_.emplace(tx.id, tx);
  AdmitOutcome out = nodes_[at].pool->submit(tx);
  if (out.stored()) {
    if (on_store) on_store(at, tx, out);
    bool gossip = out.tx_class == TxClass::kPending || profile(at).forwards_futures;
    if (gossip && !nodes_[at].relay_disabled) propagate(at, tx, kNoNode);
  }
  return out;
}

void Simulation::send_direct(NodeId from, NodeId to, const Transaction& tx) {
  if (from >= nodes_.size() || to >= nodes_.size()) throw std::out_of_range("unknown node id");
  if (!has_edge(from, to)) throw std::logic_error("send_direct requires an active link");
  tx_store_.emplace(tx.id, tx);
  schedule_msg(MsgKind::kDeliverTx, from, to, tx.id);
}

void Simulation::schedule_timer(double at, std::function<void()> callback) {
  if (at < now_) throw std::invalid_argument("timer in the past");
  std::uint64_t id = next_timer_id_++;
  timers_[id] = std::move(callback);
  queue_.push(Event{at, next_event_seq_++, MsgKind::kTimer, kNoNode, kNoNode, 0, id});
}

void Simulation::run_until(double t) {
  if (t < now_) throw std::invalid_argument("cannot run backwards");
  while (!queue_.empty()) {
    const Event& top = queue_.top();
    if (top.at > t) break;
    Event ev = top;
    queue_.pop();
    now_ = ev.at;
    ++events_processed_;
    process(ev);
  }
  now_ = t;
}

std::vector<PoolEntry> Simulation::snapshot_mempool(NodeId n) const {
  if (n >= nodes_.size()) throw std::out_of_range("unknown node id");
  return nodes_[n].pool->snapshot();
}

void Simulation::schedule_msg(MsgKind kind, NodeId from, NodeId to, TxId tx) {
  std::uint64_t key = link_key(from, to);
  std::uint64_t seq = link_seq_[key]++;
  double delay = config_.latency.sample(from, to, seq);
  double at = now_ + delay;
  // links deliver in order
  auto it = link_last_arrival_.find(key);
  if (it != link_last_arrival_.end() && at <= it->second) at = it->second + config_.fifo_epsilon;
  link_last_arrival_[key] = at;
  queue_.push(Event{at, next_event_seq_++, kind, to, from, tx, 0});
}

bool Simulation::announce_mode(NodeId from, NodeId to) const {
  double f = nodes_[from].announce_fraction;
  if (f <= 0) return false;
  if (f >= 1) return true;
  std::uint64_t h = mix64(config_.latency.seed ^ 0xa5a5a5a5u ^ mix64(link_key(from, to)));
  return unit_double(h) < f;
}

void Simulation::propagate(NodeId from, const Transaction& tx, NodeId exclude) {
  for (NodeId peer : nodes_[from].neighbors) {
    if (peer == exclude) continue;
    schedule_msg(announce_mode(from, peer) ? MsgKind::kAnnounce : MsgKind::kDeliverTx, from, peer,
                 tx.id);
  }
}

void Simulation::process(const Event& ev) {
  if (ev.kind == MsgKind::kTimer) {
    record({ev.at, ev.kind, kNoNode, kNoNode, 0});
    auto it = timers_.find(ev.timer_id);
    if (it != timers_.end()) {
      auto fn = std::move(it->second);
      timers_.erase(it);
      fn();
    }
    return;
  }
  if (ev.to >= nodes_.size() || !nodes_[ev.to].alive) return;
  record({ev.at, ev.kind, ev.via, ev.to, ev.tx});
  switch (ev.kind) {
    case MsgKind::kDeliverTx: handle_deliver(ev); break;
    case MsgKind::kAnnounce: handle_announce(ev); break;
    case MsgKind::kAnnounceRequest: handle_announce_request(ev); break;
    case MsgKind::kTimer: break;
  }
}

void Simulation::handle_deliver(const Event& ev) {
  Node& node = nodes_[ev.to];
  const Transaction& tx = tx_store_.at(ev.tx);
  AdmitOutcome out = node.pool->submit(tx);
  if (out.stored()) {
    if (on_store) on_store(ev.to, tx, out);
    bool gossip = out.tx_class == TxClass::kPending || node.pool->profile().forwards_futures;
    if (gossip && !node.relay_disabled) propagate(ev.to, tx, ev.via);
    return;
  }
  if (out.status == AdmitStatus::kRejectedReplacement) {
    // Held a better transaction in the same (sender, nonce) slot: push it
    // back so the peer can upgrade.
    const PoolEntry* held = node.pool->find(tx.sender, tx.nonce);
    bool fee_cap = node.pool->profile().eip1559;
    if (held && tx.effective_price(fee_cap) < held->tx.effective_price(fee_cap) &&
        !node.relay_disabled && ev.via != kNoNode && nodes_[ev.via].alive &&
        has_edge(ev.to, ev.via)) {
      schedule_msg(MsgKind::kDeliverTx, ev.to, ev.via, held->tx.id);
    }
  }
}

void Simulation::handle_announce(const Event& ev) {
  Node& node = nodes_[ev.to];
  if (node.pool->contains(ev.tx)) return;
  auto it = node.announce_windows.find(ev.tx);
  if (it != node.announce_windows.end() && now_ < it->second) return;
  node.announce_windows[ev.tx] = now_ + config_.announce_window;
  schedule_msg(MsgKind::kAnnounceRequest, ev.to, ev.via, ev.tx);
}

void Simulation::handle_announce_request(const Event& ev) {
  // ev.to is the original announcer; respond with the body.
  schedule_msg(MsgKind::kDeliverTx, ev.to, ev.via, ev.tx);
}

void Simulation::record(const MsgRecord& rec) {
  if (on_message) on_message(rec);
  if (config_.record_trace) {
    char buf[160];
    const char* from = rec.from == kNoNode ? "-" : nodes_[rec.from].label.c_str();
    const char* to = rec.to == kNoNode ? "-" : nodes_[rec.to].label.c_str();
    std::snprintf(buf, sizeof buf, "%.6f,%s,%s,%s,%llu", rec.time, kind_name(rec.kind), from, to,
                  static_cast<unsigned long long>(rec.tx));
    trace_.emplace_back(buf);
  }
}

}  // namespace toposim
