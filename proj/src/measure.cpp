#include "toposim/measure.hpp"

#include <algorithm>
#include <cmath>

namespace toposim {

CostLedger account_cost(std::uint64_t pairs_measured, const Rational& unit_pair_cost) {
  if (unit_pair_cost < Rational(0)) throw std::invalid_argument("unit cost must be >= 0");
  CostLedger ledger;
  ledger.pairs_measured = pairs_measured;
  ledger.unit_pair_cost = unit_pair_cost;
  ledger.ether_cost = Rational(static_cast<std::int64_t>(pairs_measured)) * unit_pair_cost;
  return ledger;
}

const char* exclusion_code(ExclusionReason reason) {
  switch (reason) {
    case ExclusionReason::kForwardsFutures: return "FWD_FUTURE";
    case ExclusionReason::kUnresponsive: return "UNRESPONSIVE";
    case ExclusionReason::kUnsupportedClient: return "UNSUPPORTED_CLIENT";
  }
  return "?";
}

double calibrate_wait(Simulation& sim, NodeId probe_node, int probe_count, double confidence) {
  if (probe_count < 1) throw std::invalid_argument("probe count must be >= 1");
  if (confidence <= 0 || confidence > 1) throw std::invalid_argument("confidence in (0, 1]");

  std::vector<NodeId> others;
  for (NodeId v = 0; v < sim.node_count(); ++v)
    if (v != probe_node && sim.alive(v)) others.push_back(v);
  if (others.empty()) return 0.0;

  std::vector<double> durations;
  durations.reserve(probe_count);
  for (int i = 0; i < probe_count; ++i) {
    AccountId acct = sim.new_account();
    auto tx = sim.make_tx(acct, 0, Rational(1000 + i));
    double injected_at = sim.now();
    double settled = injected_at;
    std::size_t holding = 0;
    auto prev = sim.on_store;
    sim.on_store = [&](NodeId node, const Transaction& stored, const AdmitOutcome& out) {
      if (stored.id == tx.id && node != probe_node) {
        ++holding;
        settled = sim.now();
      }
      if (prev) prev(node, stored, out);
    };
    sim.inject_tx(probe_node, tx);
    double deadline = injected_at + 3600.0;
    while (holding < others.size() && sim.now() < deadline)
      sim.run_until(sim.now() + 1.0);
    sim.on_store = prev;
    if (holding < others.size())
      throw CalibrationError("flood probe never reached every node (disconnected network?)");
    durations.push_back(settled - injected_at);
  }
  std::sort(durations.begin(), durations.end());
  std::size_t rank = static_cast<std::size_t>(std::ceil(confidence * probe_count));
  if (rank == 0) rank = 1;
  return durations[rank - 1];
}

MeasureEngine::MeasureEngine(Simulation& sim, NodeId measurement_node, MeasureConfig config)
    : sim_(sim), m_(measurement_node), config_(std::move(config)) {
  if (m_ >= sim_.node_count()) throw std::invalid_argument("unknown measurement node");
  chained_store_ = sim_.on_store;
  sim_.on_store = [this](NodeId node, const Transaction& tx, const AdmitOutcome& out) {
    auto it = probe_allowance_.find(tx.id);
    if (it != probe_allowance_.end() && node != it->second.first && node != it->second.second) {
      violations_.push_back("probe tx " + std::to_string(tx.id) + " stored on " +
                            sim_.label(node));
      violated_probes_.insert(tx.id);
    }
    if (chained_store_) chained_store_(node, tx, out);
  };
  chained_msg_ = sim_.on_message;
  sim_.on_message = [this](const MsgRecord& rec) {
    if (rec.to == m_ && (rec.kind == MsgKind::kDeliverTx || rec.kind == MsgKind::kAnnounce)) {
      for (auto& watch : watches_)
        if (watch.probe == rec.tx && watch.expected_via == rec.from) watch.seen = true;
    }
    if (chained_msg_) chained_msg_(rec);
  };
}

MeasureEngine::~MeasureEngine() {
  sim_.on_store = chained_store_;
  sim_.on_message = chained_msg_;
}

Rational MeasureEngine::estimate_base_price() const {
  std::vector<Rational> prices;
  for (const auto& entry : sim_.pool(m_).snapshot())
    if (entry.tx_class == TxClass::kPending) prices.push_back(entry.tx.gas_price);
  if (prices.empty())
    throw EstimationError("measurement node has no pending transactions to estimate from");
  std::sort(prices.begin(), prices.end());
  std::size_t n = prices.size();
  if (n % 2 == 1) return prices[n / 2];
  return (prices[n / 2 - 1] + prices[n / 2]) / Rational(2);
}

Rational MeasureEngine::base_price() {
  if (!base_price_) base_price_ = config_.price_y ? *config_.price_y : estimate_base_price();
  return *base_price_;
}

// Marker prices climb a gentle ladder so residue from earlier passes never
// blocks a fresh marker or its flood.
Rational MeasureEngine::next_marker_price() {
  Rational y = base_price();
  std::uint64_t step = marker_counter_++;
  return y * Rational(static_cast<std::int64_t>(1000 + step), 1000);
}

double MeasureEngine::settle_time() const {
  if (config_.settle > 0) return config_.settle;
  // enough for a flood delivery plus a push/answer/re-push exchange
  return std::max(1.0, 4.0 * sim_.config().latency.max_delay() + 0.1);
}

double MeasureEngine::probe_timeout() const {
  return config_.timeout > 0 ? config_.timeout : 2 * config_.wait_x;
}

std::uint64_t MeasureEngine::flood_size(NodeId target) const {
  auto it = config_.flood_override.find(target);
  return it == config_.flood_override.end() ? config_.flood_z : it->second;
}

Rational MeasureEngine::bump_of(NodeId target) const {
  return sim_.profile(target).replace_bump;
}

void MeasureEngine::require_adjacent(NodeId target) const {
  if (!sim_.has_edge(m_, target))
    throw std::logic_error("measurement node is not connected to " + sim_.label(target));
}

std::vector<Transaction> MeasureEngine::flood_target(NodeId target, std::uint64_t z,
                                                     const Rational& price) {
  const PolicyProfile& prof = sim_.profile(target);
  std::uint64_t per_account = prof.future_quota ? *prof.future_quota : z;
  if (per_account == 0) per_account = 1;
  std::vector<Transaction> futures;
  futures.reserve(z);
  std::uint64_t remaining = z;
  while (remaining > 0) {
    AccountId acct = sim_.new_account();
    std::uint64_t batch = std::min(per_account, remaining);
    for (std::uint64_t j = 0; j < batch; ++j)
      futures.push_back(sim_.make_tx(acct, 2 + j, price));  // nonce gap keeps them future
    remaining -= batch;
  }
  for (const auto& tx : futures) sim_.send_direct(m_, target, tx);
  ledger_.futures_sent += futures.size();
  return futures;
}

void MeasureEngine::allow_probe(TxId probe, NodeId source, NodeId sink) {
  probe_allowance_[probe] = {source, sink};
}

EdgeVerdict MeasureEngine::measure_once(NodeId source, NodeId sink,
                                        const std::string& iteration_tag) {
  require_adjacent(source);
  require_adjacent(sink);
  Rational bump = bump_of(source);
  if (bump.is_zero() || bump_of(sink).is_zero())
    throw UnsupportedClientError("zero replacement bump cannot be measured");

  EdgeVerdict out;
  out.source = source;
  out.sink = sink;
  out.iteration = iteration_tag;

  Rational y = next_marker_price();
  Rational half = bump / Rational(2);
  Rational flood_price = (Rational(1) + bump) * y;
  double settle = settle_time();

  // step 1: marker tx through the source, then wait out the flood
  AccountId shared = sim_.new_account();
  Transaction marker = sim_.make_tx(shared, 0, y);
  sim_.send_direct(m_, source, marker);
  ledger_.pending_txs_sent += 1;
  sim_.run_until(sim_.now() + config_.wait_x);
  for (NodeId v = 0; v < sim_.node_count(); ++v) {
    if (!sim_.alive(v)) continue;
    if (!sim_.pool(v).contains(marker.id)) {
      out.checks.note = "marker not seeded network-wide";
      return out;
    }
  }

  // step 2: future flood on the sink, then the low-priced decoy
  flood_target(sink, flood_size(sink), flood_price);
  Transaction decoy = sim_.make_tx(shared, 0, (Rational(1) - half) * y);
  sim_.send_direct(m_, sink, decoy);
  ledger_.pending_txs_sent += 1;
  sim_.run_until(sim_.now() + settle);

  // step 3: the matching flood on the source, then the high-priced probe
  flood_target(source, flood_size(source), flood_price);
  Transaction probe = sim_.make_tx(shared, 0, (Rational(1) + half) * y);
  allow_probe(probe.id, source, sink);
  watches_.push_back({probe.id, sink, false});
  std::size_t watch_index = watches_.size() - 1;
  sim_.send_direct(m_, source, probe);
  ledger_.pending_txs_sent += 1;
  ledger_.assumed_inclusions += 2;  // marker and probe may end up mined
  sim_.run_until(sim_.now() + settle);

  out.checks.pools_full = sim_.pool(source).full() && sim_.pool(sink).full();
  out.checks.marker_evicted_on_source = !sim_.pool(source).contains(marker.id);
  out.checks.marker_evicted_on_sink = !sim_.pool(sink).contains(marker.id);
  out.checks.probe_stored_on_source = sim_.pool(source).contains(probe.id);

  // step 4: wait for the probe to come back from the sink
  sim_.run_until(sim_.now() + probe_timeout());
  bool seen = watches_[watch_index].seen;
  if (seen && violated_probes_.count(probe.id)) {
    out.checks.note = "probe isolation violated";
    seen = false;
  }
  out.verdict = seen ? Verdict::kConnected : Verdict::kNotDetected;
  out.conclusive = out.checks.conclusive() || out.verdict == Verdict::kConnected;

  ledger_.pairs_measured += 1;
  ledger_.unit_pair_cost = config_.unit_pair_cost;
  ledger_.ether_cost += config_.unit_pair_cost;
  watches_.erase(watches_.begin() + static_cast<std::ptrdiff_t>(watch_index));
  return out;
}

EdgeVerdict MeasureEngine::measure_one_link(NodeId source, NodeId sink) {
  EdgeVerdict last;
  for (int attempt = 0; attempt < std::max(1, config_.attempts); ++attempt) {
    std::string tag = "serial#" + std::to_string(iterations_run_) + "." + std::to_string(attempt);
    EdgeVerdict v = measure_once(source, sink, tag);
    if (attempt == 0 || v.connected() || (!last.conclusive && v.conclusive)) last = v;
    if (v.connected()) break;
  }
  ++iterations_run_;
  return last;
}

std::vector<EdgeVerdict> MeasureEngine::measure_par(
    const std::vector<NodeId>& sources, const std::vector<NodeId>& sinks,
    const std::vector<std::pair<NodeId, NodeId>>& edges) {
  std::string tag = "par#" + std::to_string(iterations_run_);
  ++iterations_run_;

  std::vector<EdgeVerdict> out(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    out[i].source = edges[i].first;
    out[i].sink = edges[i].second;
    out[i].iteration = tag;
  }
  if (edges.empty()) return out;

  for (NodeId s : sources) require_adjacent(s);
  for (NodeId s : sinks) require_adjacent(s);
  for (const auto& [src, snk] : edges) {
    if (std::find(sources.begin(), sources.end(), src) == sources.end() ||
        std::find(sinks.begin(), sinks.end(), snk) == sinks.end())
      throw std::invalid_argument("edge endpoints must come from the source and sink lists");
    if (bump_of(src).is_zero() || bump_of(snk).is_zero())
      throw UnsupportedClientError("zero replacement bump cannot be measured");
  }

  Rational bump = bump_of(edges.front().first);
  Rational y = next_marker_price();
  Rational half = bump / Rational(2);
  Rational flood_price = (Rational(1) + bump) * y;
  double settle = settle_time();

  // Every participant must be able to hold the whole working set: after its
  // flood, one slot per tested edge (re-seeds plus decoys or probes). A group
  // that overflows this budget cannot keep the shields intact, so the whole
  // pass is unmeasurable rather than risking false positives.
  {
    std::uint64_t needed = edges.size();
    std::vector<NodeId> participants = sources;
    participants.insert(participants.end(), sinks.begin(), sinks.end());
    for (NodeId v : participants) {
      const Mempool& pool = sim_.pool(v);
      std::uint64_t avail = pool.profile().capacity - pool.size() + pool.count_below(flood_price);
      std::uint64_t z = flood_size(v);
      if (avail < needed || z < needed) {
        for (auto& verdict : out) {
          verdict.checks.note = "group exceeds the mempool slot budget on " + sim_.label(v);
          ledger_.pairs_measured += 1;
          ledger_.ether_cost += config_.unit_pair_cost;
        }
        ledger_.unit_pair_cost = config_.unit_pair_cost;
        return out;
      }
    }
  }

  // p1: one marker per tested edge, each from its own account, gossiped wide
  std::vector<Transaction> markers;
  markers.reserve(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    AccountId acct = sim_.new_account();
    markers.push_back(sim_.make_tx(acct, 0, y));
    sim_.inject_tx(m_, markers[i]);
    ledger_.pending_txs_sent += 1;
  }
  sim_.run_until(sim_.now() + config_.wait_x);

  // Isolation rests on every node shielding against the probe with the
  // matching marker. A marker that did not take hold everywhere (the group
  // overflowed the usable mempool slots) makes its edge unmeasurable in this
  // pass; its probe is withheld.
  std::vector<bool> seeded(edges.size(), true);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    for (NodeId v = 0; v < sim_.node_count() && seeded[i]; ++v) {
      if (!sim_.alive(v)) continue;
      if (!sim_.pool(v).contains(markers[i].id)) seeded[i] = false;
    }
    if (!seeded[i]) out[i].checks.note = "marker not seeded network-wide";
  }

  // p2: per source, flood, re-seed other sources' markers, send own probes
  std::vector<Transaction> probes(edges.size());
  std::vector<std::size_t> watch_index(edges.size(), SIZE_MAX);
  for (NodeId src : sources) {
    flood_target(src, flood_size(src), flood_price);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (edges[i].first != src && seeded[i]) {
        sim_.send_direct(m_, src, markers[i]);
        ledger_.pending_txs_sent += 1;
      }
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (edges[i].first != src || !seeded[i]) continue;
      probes[i] = sim_.make_tx(markers[i].sender, 0, (Rational(1) + half) * y);
      allow_probe(probes[i].id, src, edges[i].second);
      watches_.push_back({probes[i].id, edges[i].second, false});
      watch_index[i] = watches_.size() - 1;
      sim_.send_direct(m_, src, probes[i]);
      ledger_.pending_txs_sent += 1;
      ledger_.assumed_inclusions += 2;
    }
    sim_.run_until(sim_.now() + settle);

    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (edges[i].first != src || !seeded[i]) continue;
      if (!sim_.pool(src).contains(probes[i].id)) {
        for (auto& v : out) v.checks.note = "probe storage check failed on " + sim_.label(src);
        watches_.clear();
        return out;
      }
      out[i].checks.probe_stored_on_source = true;
      out[i].checks.marker_evicted_on_source = !sim_.pool(src).contains(markers[i].id);
      out[i].checks.pools_full = sim_.pool(src).full();
    }
  }

  // p3: per sink, flood, then decoys for its own edges and markers for the rest
  for (NodeId snk : sinks) {
    flood_target(snk, flood_size(snk), flood_price);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (edges[i].second == snk && seeded[i]) {
        Transaction decoy = sim_.make_tx(markers[i].sender, 0, (Rational(1) - half) * y);
        sim_.send_direct(m_, snk, decoy);
      } else {
        sim_.send_direct(m_, snk, markers[i]);
      }
      ledger_.pending_txs_sent += 1;
    }
    sim_.run_until(sim_.now() + settle);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (edges[i].second != snk || !seeded[i]) continue;
      out[i].checks.marker_evicted_on_sink = !sim_.pool(snk).contains(markers[i].id);
      out[i].checks.pools_full = out[i].checks.pools_full && sim_.pool(snk).full();
    }
  }

  // p4: wait, then read the probe observations
  sim_.run_until(sim_.now() + probe_timeout());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    bool seen = watch_index[i] != SIZE_MAX && watches_[watch_index[i]].seen;
    if (seen && violated_probes_.count(probes[i].id)) {
      // the probe escaped its shield, so the sighting proves nothing
      out[i].checks.note = "probe isolation violated";
      seen = false;
    }
    out[i].verdict = seen ? Verdict::kConnected : Verdict::kNotDetected;
    out[i].conclusive = (seeded[i] && out[i].checks.conclusive()) || out[i].connected();
    ledger_.pairs_measured += 1;
    ledger_.ether_cost += config_.unit_pair_cost;
  }
  ledger_.unit_pair_cost = config_.unit_pair_cost;
  watches_.clear();
  return out;
}

MeasurementReport MeasureEngine::run_schedule(const std::vector<NodeId>& nodes, std::uint32_t k) {
  MeasurementReport report;
  double start = sim_.now();
  auto sched = make_schedule(static_cast<std::uint32_t>(nodes.size()), k);
  for (const auto& it : sched) {
    std::vector<NodeId> sources, sinks;
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (auto idx : it.sources) sources.push_back(nodes[idx]);
    for (auto idx : it.sinks) sinks.push_back(nodes[idx]);
    for (auto [s, t] : it.edges) edges.push_back({nodes[s], nodes[t]});
    auto verdicts = measure_par(sources, sinks, edges);
    report.edges.insert(report.edges.end(), verdicts.begin(), verdicts.end());
  }
  report.iterations = sched.size();
  report.cost = ledger_;
  report.sim_seconds = sim_.now() - start;
  report.isolation_violations = violations_;
  return report;
}

MeasurementReport MeasureEngine::run_serial(const std::vector<NodeId>& nodes) {
  MeasurementReport report;
  double start = sim_.now();
  std::uint64_t iterations = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      report.edges.push_back(measure_one_link(nodes[i], nodes[j]));
      ++iterations;
    }
  }
  report.iterations = iterations;
  report.cost = ledger_;
  report.sim_seconds = sim_.now() - start;
  report.isolation_violations = violations_;
  return report;
}

PreprocessResult MeasureEngine::preprocess_targets(const std::vector<NodeId>& nodes) {
  PreprocessResult result;
  for (NodeId target : nodes) {
    if (target == m_) continue;
    require_adjacent(target);
    if (bump_of(target).is_zero()) {
      result.exclusions.push_back({target, ExclusionReason::kUnsupportedClient});
      continue;
    }

    Rational probe_price = base_price() * Rational(100);

    // watch the target through a dedicated monitor node
    NodeId monitor = sim_.add_node("monitor." + sim_.label(target), sim_.profile(m_));
    sim_.add_edge(monitor, target);

    Transaction future_probe = sim_.make_tx(sim_.new_account(), 2, probe_price);
    sim_.send_direct(m_, target, future_probe);
    sim_.run_until(sim_.now() + settle_time());
    bool forwards = sim_.pool(monitor).contains(future_probe.id);

    Transaction pending_probe = sim_.make_tx(sim_.new_account(), 0, probe_price);
    sim_.send_direct(m_, target, pending_probe);
    sim_.run_until(sim_.now() + settle_time());
    bool responsive = sim_.pool(monitor).contains(pending_probe.id);
    sim_.remove_node(monitor);

    if (forwards) {
      result.exclusions.push_back({target, ExclusionReason::kForwardsFutures});
      continue;
    }
    if (!responsive) {
      result.exclusions.push_back({target, ExclusionReason::kUnresponsive});
      continue;
    }

    // recall probe against a helper sink with known ground truth; on a false
    // negative, escalate the flood size until the link is recovered
    NodeId helper = sim_.add_node("helper." + sim_.label(target), sim_.profile(m_));
    sim_.add_edge(helper, target);
    sim_.add_edge(helper, m_);
    std::uint64_t z = flood_size(target);
    const std::uint64_t step = config_.flood_escalation_step;
    const int escalations = config_.flood_escalations;
    bool recovered = false;
    for (int e = 0; e <= escalations; ++e) {
      config_.flood_override[target] = z;
      config_.flood_override[helper] = sim_.profile(helper).capacity;
      EdgeVerdict v = measure_once(target, helper, "preprocess." + sim_.label(target));
      if (v.connected()) {
        recovered = true;
        break;
      }
      z += step;
      // let the failed attempt's flood expire so the next probe sees a
      // clean pool, the way a live node ages out unmined transactions
      sim_.run_until(sim_.now() + config_.preprocess_expiry + 1.0);
      for (NodeId v2 = 0; v2 < sim_.node_count(); ++v2)
        if (sim_.alive(v2))
          sim_.pool(v2).drop_expired(sim_.now(), config_.preprocess_expiry);
    }
    if (recovered) {
      result.flood_override[target] = z;
    } else {
      config_.flood_override.erase(target);
      result.notes.push_back("recall probe failed for " + sim_.label(target) +
                             " up to flood size " + std::to_string(z - step));
    }
    config_.flood_override.erase(helper);
    sim_.remove_node(helper);
  }
  return result;
}

}  // namespace toposim
