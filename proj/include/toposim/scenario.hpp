#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "toposim/graph.hpp"
#include "toposim/measure.hpp"
#include "toposim/simulation.hpp"

namespace toposim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key/value scenario description with dotted sections. Fully
// serializable; identical content and seed reproduce identical artifacts.
struct Scenario {
  std::map<std::string, std::string> raw;  // parsed key -> value, as written

  std::uint64_t seed = 1;

  // topology: a file or a generator
  std::string topology_file;
  std::string topology_model;  // er | cm | ba
  std::uint32_t nodes = 0;
  std::uint64_t edges = 0;
  std::string degree_seq_file;
  std::uint32_t attachment = 0;

  double latency_lo_ms = 10, latency_hi_ms = 200;
  double announce_fraction = 0;
  std::string default_profile = "geth";
  std::map<std::string, PolicyProfile> custom_profiles;
  std::map<std::string, std::string> node_profile;  // label -> profile name
  std::map<std::string, bool> node_relay_disabled;
  std::map<std::string, double> node_announce_fraction;

  double background_rate = 0;      // txs per simulated second
  double background_duration = 0;  // seconds of background injection
  std::optional<Rational> background_price_lo, background_price_hi;  // Gwei

  std::string mode = "serial";  // serial | parallel
  std::uint32_t group_size = 1;
  std::string pairs = "all";  // all | edges (validation against known candidates)
  MeasureConfig measure;
  bool preprocess = false;

  int analysis_runs = 10;
  std::vector<std::string> baselines;  // subset of {er, cm, ba}

  std::map<std::string, std::string> outputs;  // report/metrics/edges/dot/trace/exclusions

  PolicyProfile profile_by_name(const std::string& name) const;
};

Scenario parse_scenario(std::istream& in);
Scenario load_scenario(const std::string& path);

// Measured-edge record with stable string labels for reports and scoring.
struct LabeledVerdict {
  std::string node_a, node_b;
  bool connected = false;
  bool conclusive = true;
  std::string iteration;
  EdgeChecks checks;
};

struct ValidationScore {
  std::uint64_t true_positives = 0;
  std::uint64_t false_positives = 0;
  std::uint64_t false_negatives = 0;
  std::uint64_t inconclusive = 0;  // excluded from both denominators
  double precision = 1.0;
  double recall = 1.0;
};

ValidationScore score(const std::vector<LabeledVerdict>& verdicts, const Graph& truth);

// Fraction of true edges detected, counting inconclusive outcomes as misses.
double detected_fraction(const std::vector<LabeledVerdict>& verdicts, const Graph& truth);

// Background load: pending txs from dedicated accounts at the configured
// cadence, prices drawn uniformly from [lo, hi] on a per-mille grid.
void inject_background(Simulation& sim, NodeId at, double rate, const Rational& price_lo,
                       const Rational& price_hi, double duration, std::uint64_t seed);

struct ScenarioRun {
  Graph truth;                      // ground-truth topology (measured nodes only)
  Graph measured;                   // detected edges
  std::vector<LabeledVerdict> verdicts;
  ValidationScore validation;
  MeasurementReport report;
  std::vector<std::pair<std::string, std::string>> exclusions;  // label, reason code
  std::string report_json;          // serialized artifacts
  std::string metrics_json;
  std::vector<std::string> trace;
};

ScenarioRun run_scenario(const Scenario& scenario);
// Convenience wrapper: load, run, write the configured outputs.
ScenarioRun run_scenario_file(const std::string& path);
void write_outputs(const Scenario& scenario, const ScenarioRun& run);

struct CurvePoint {
  std::uint64_t x = 0;  // flood size or group size
  double precision = 1.0;
  double recall = 1.0;           // score() semantics
  double detected_fraction = 1.0;  // inconclusive counted as misses
};

std::vector<CurvePoint> sweep_recall_vs_futures(const Scenario& base,
                                                const std::vector<std::uint64_t>& flood_sizes);
std::vector<CurvePoint> sweep_recall_vs_group(const Scenario& base,
                                              const std::vector<std::uint32_t>& group_sizes);

struct BenchRow {
  std::uint32_t group_size = 0;
  std::uint64_t iterations = 0;
  double sim_seconds = 0;
  double host_seconds = 0;
};

std::vector<BenchRow> bench_speedup(const Scenario& base,
                                    const std::vector<std::uint32_t>& group_sizes);

// Community table as CSV: community,size,intra_edges,intra_density,inter_edges
void write_community_csv(std::ostream& out, const Graph& g, std::uint64_t seed);

// Table-style metrics document for a graph and its matched baselines.
std::string metrics_json_for(const Graph& g, int runs, std::uint64_t seed,
                             const std::vector<std::string>& baselines);

}  // namespace toposim
