#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include "toposim/mempool.hpp"
#include "toposim/types.hpp"

namespace toposim {

// Per-link delivery delay: fixed seconds or uniform [lo, hi] seconds. A
// sample is a pure function of (seed, link, sequence number).
struct LatencyModel {
  enum class Kind { kFixed, kUniform };
  Kind kind = Kind::kFixed;
  double lo = 0.05;
  double hi = 0.05;
  std::uint64_t seed = 0;

  static LatencyModel fixed(double seconds, std::uint64_t seed = 0);
  static LatencyModel uniform(double lo, double hi, std::uint64_t seed);
  double sample(NodeId from, NodeId to, std::uint64_t seq) const;
  double max_delay() const { return hi; }
};

enum class MsgKind { kDeliverTx, kAnnounce, kAnnounceRequest, kTimer };

struct MsgRecord {
  double time = 0;
  MsgKind kind = MsgKind::kDeliverTx;
  NodeId from = kNoNode;
  NodeId to = kNoNode;
  TxId tx = 0;
};

struct SimConfig {
  LatencyModel latency = LatencyModel::fixed(0.05);
  double announce_window = 5.0;
  double fifo_epsilon = 1e-6;
  bool record_trace = false;
};

// Deterministic discrete-event simulation of an Ethereum-style overlay:
// ground-truth topology, per-node mempools and push/announcement gossip of
// pending transactions. Identical configuration and seed give identical
// event traces and final states.
class Simulation {
 public:
  explicit Simulation(SimConfig config = {});

  NodeId add_node(std::string label, PolicyProfile profile);
  void add_edge(NodeId a, NodeId b);
  bool has_edge(NodeId a, NodeId b) const;
  void remove_node(NodeId n);
  bool alive(NodeId n) const { return nodes_.at(n).alive; }
  const std::vector<NodeId>& neighbors(NodeId n) const { return nodes_.at(n).neighbors; }
  std::size_t node_count() const { return nodes_.size(); }
  const std::string& label(NodeId n) const { return nodes_.at(n).label; }
  std::optional<NodeId> find_label(const std::string& label) const;

  void set_announce_fraction(NodeId n, double fraction);
  void set_relay_disabled(NodeId n, bool disabled);

  AccountTable& accounts() { return accounts_; }
  AccountId new_account() { return accounts_.create(); }

  // Builds a transaction stamped with a fresh id and the current sim time.
  Transaction make_tx(AccountId sender, Nonce nonce, Rational gas_price,
                      std::optional<Rational> max_fee = std::nullopt);

  // Local submission at a node, with gossip on pending admission.
  AdmitOutcome inject_tx(NodeId at, const Transaction& tx);

  // Link-level push, bypassing the sender's own mempool. Requires an edge.
  void send_direct(NodeId from, NodeId to, const Transaction& tx);

  void schedule_timer(double at, std::function<void()> callback);

  void run_until(double t);
  double now() const { return now_; }
  std::uint64_t events_processed() const { return events_processed_; }
  const SimConfig& config() const { return config_; }

  std::vector<PoolEntry> snapshot_mempool(NodeId n) const;
  Mempool& pool(NodeId n) { return *nodes_.at(n).pool; }
  const Mempool& pool(NodeId n) const { return *nodes_.at(n).pool; }
  const PolicyProfile& profile(NodeId n) const { return nodes_.at(n).pool->profile(); }
  const Transaction& tx(TxId id) const { return tx_store_.at(id); }

  // Observation hooks. on_store fires for every stored (admitted, evicted
  // into, or replaced) transaction; on_message for every processed event.
  std::function<void(NodeId, const Transaction&, const AdmitOutcome&)> on_store;
  std::function<void(const MsgRecord&)> on_message;

  const std::vector<std::string>& trace() const { return trace_; }
  void clear_trace() { trace_.clear(); }

 private:
  struct Node {
    std::string label;
    std::unique_ptr<Mempool> pool;
    std::vector<NodeId> neighbors;  // sorted
    double announce_fraction = 0.0;
    bool relay_disabled = false;
    bool alive = true;
    std::unordered_map<TxId, double> announce_windows;  // hash -> window end
  };

  struct Event {
    double at;
    std::uint64_t seq;
    MsgKind kind;
    NodeId to;
    NodeId via;
    TxId tx;
    std::uint64_t timer_id;
  };
  struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
      if (a.at != b.at) return a.at > b.at;
      return a.seq > b.seq;
    }
  };

  void schedule_msg(MsgKind kind, NodeId from, NodeId to, TxId tx);
  bool announce_mode(NodeId from, NodeId to) const;
  void propagate(NodeId from, const Transaction& tx, NodeId exclude);
  void process(const Event& ev);
  void handle_deliver(const Event& ev);
  void handle_announce(const Event& ev);
  void handle_announce_request(const Event& ev);
  void record(const MsgRecord& rec);

  SimConfig config_;
  AccountTable accounts_;
  std::vector<Node> nodes_;
  std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
  std::unordered_map<TxId, Transaction> tx_store_;
  std::unordered_map<std::uint64_t, double> link_last_arrival_;
  std::unordered_map<std::uint64_t, std::uint64_t> link_seq_;
  std::unordered_map<std::uint64_t, std::function<void()>> timers_;
  std::vector<std::string> trace_;
  double now_ = 0.0;
  std::uint64_t next_event_seq_ = 0;
  std::uint64_t next_timer_id_ = 0;
  TxId next_tx_id_ = 1;
  std::uint64_t events_processed_ = 0;
};

}  // namespace toposim
