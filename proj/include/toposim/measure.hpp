#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "toposim/rational.hpp"
#include "toposim/schedule.hpp"
#include "toposim/simulation.hpp"

namespace toposim {

struct MeasureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedClientError : MeasureError {
  using MeasureError::MeasureError;
};
struct EstimationError : MeasureError {
  using MeasureError::MeasureError;
};
struct CalibrationError : MeasureError {
  using MeasureError::MeasureError;
};

struct MeasureConfig {
  double wait_x = 10.0;              // settle time after seeding the marker tx
  std::optional<Rational> price_y;   // marker price; estimated at M when unset
  std::uint64_t flood_z = 5120;      // future txs per target flood
  double timeout = 0;                // probe wait; 0 -> 2 * wait_x
  double settle = 0;                 // inter-step wait; 0 -> derived from latency
  int attempts = 1;                  // per-pair tries, positives unioned
  Rational unit_pair_cost{71, 100000};  // Ether per measured pair
  std::map<NodeId, std::uint64_t> flood_override;  // per-target flood size
  std::uint64_t flood_escalation_step = 1000;      // preprocessing recall-probe ladder
  int flood_escalations = 4;
  double preprocess_expiry = 10800.0;  // residue expiry between recall probes
};

struct EdgeChecks {
  bool pools_full = false;
  bool marker_evicted_on_source = false;
  bool marker_evicted_on_sink = false;
  bool probe_stored_on_source = false;
  std::string note;

  bool conclusive() const {
    return pools_full && marker_evicted_on_source && marker_evicted_on_sink &&
           probe_stored_on_source && note.empty();
  }
};

enum class Verdict { kConnected, kNotDetected };

struct EdgeVerdict {
  NodeId source = kNoNode;
  NodeId sink = kNoNode;
  Verdict verdict = Verdict::kNotDetected;
  bool conclusive = false;
  std::string iteration;
  EdgeChecks checks;

  bool connected() const { return verdict == Verdict::kConnected; }
};

struct CostLedger {
  std::uint64_t pending_txs_sent = 0;
  std::uint64_t futures_sent = 0;
  std::uint64_t assumed_inclusions = 0;
  std::uint64_t pairs_measured = 0;
  Rational unit_pair_cost;
  Rational ether_cost;
};

// Recomputes the ledger total for a pair count at a given unit cost; future
// transactions never contribute.
CostLedger account_cost(std::uint64_t pairs_measured, const Rational& unit_pair_cost);

struct MeasurementReport {
  std::vector<EdgeVerdict> edges;
  std::uint64_t iterations = 0;
  CostLedger cost;
  double sim_seconds = 0;
  std::vector<std::string> isolation_violations;
};

enum class ExclusionReason { kForwardsFutures, kUnresponsive, kUnsupportedClient };

const char* exclusion_code(ExclusionReason reason);

struct PreprocessResult {
  std::vector<std::pair<NodeId, ExclusionReason>> exclusions;
  std::map<NodeId, std::uint64_t> flood_override;  // discovered working flood sizes
  std::vector<std::string> notes;
};

// Wait-time calibration: repeated flood probes from one node, returning the
// given quantile of the full-coverage times.
double calibrate_wait(Simulation& sim, NodeId probe_node, int probe_count, double confidence);

// Drives the link-measurement protocol from a measurement node that must be
// adjacent to every target it measures.
class MeasureEngine {
 public:
  MeasureEngine(Simulation& sim, NodeId measurement_node, MeasureConfig config);
  ~MeasureEngine();

  // Median pending gas price in the measurement node's pool.
  Rational estimate_base_price() const;

  EdgeVerdict measure_one_link(NodeId source, NodeId sink);

  std::vector<EdgeVerdict> measure_par(const std::vector<NodeId>& sources,
                                       const std::vector<NodeId>& sinks,
                                       const std::vector<std::pair<NodeId, NodeId>>& edges);

  // Full-network measurement: round-based schedule with group size k over
  // `nodes` (measurement node excluded).
  MeasurementReport run_schedule(const std::vector<NodeId>& nodes, std::uint32_t k);

  // All-pairs serial measurement over `nodes`.
  MeasurementReport run_serial(const std::vector<NodeId>& nodes);

  PreprocessResult preprocess_targets(const std::vector<NodeId>& nodes);

  const CostLedger& cost() const { return ledger_; }
  void set_flood_override(NodeId target, std::uint64_t z) { config_.flood_override[target] = z; }
  const std::vector<std::string>& isolation_violations() const { return violations_; }
  std::uint64_t iterations_run() const { return iterations_run_; }
  NodeId measurement_node() const { return m_; }
  const MeasureConfig& config() const { return config_; }

 private:
  struct ProbeWatch {
    TxId probe;
    NodeId expected_via;
    bool seen = false;
  };

  Rational base_price();
  Rational next_marker_price();
  double settle_time() const;
  double probe_timeout() const;
  std::uint64_t flood_size(NodeId target) const;
  Rational bump_of(NodeId target) const;
  void require_adjacent(NodeId target) const;
  // Z futures priced at (1+R)*Y pushed straight at the target.
  std::vector<Transaction> flood_target(NodeId target, std::uint64_t z, const Rational& price);
  void allow_probe(TxId probe, NodeId source, NodeId sink);
  EdgeVerdict measure_once(NodeId source, NodeId sink, const std::string& iteration_tag);

  Simulation& sim_;
  NodeId m_;
  MeasureConfig config_;
  std::optional<Rational> base_price_;
  std::uint64_t marker_counter_ = 0;
  CostLedger ledger_;
  std::uint64_t iterations_run_ = 0;

  // isolation tracking
  std::function<void(NodeId, const Transaction&, const AdmitOutcome&)> chained_store_;
  std::map<TxId, std::pair<NodeId, NodeId>> probe_allowance_;
  std::set<TxId> violated_probes_;
  std::vector<std::string> violations_;
  std::vector<ProbeWatch> watches_;
  std::function<void(const MsgRecord&)> chained_msg_;
};

}  // namespace toposim
