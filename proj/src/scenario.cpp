#include "toposim/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "toposim/louvain.hpp"
#include "toposim/metrics.hpp"

namespace toposim {

namespace {

using nlohmann::json;

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v, std::size_t line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("line " + std::to_string(line) + ": expected a boolean, got '" + v + "'");
}

double parse_double(const std::string& v, std::size_t line) {
  try {
    std::size_t pos = 0;
    double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line) + ": expected a number, got '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& v, std::size_t line) {
  try {
    std::size_t pos = 0;
    unsigned long long out = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line) + ": expected an integer, got '" + v + "'");
  }
}

Rational parse_rational(const std::string& v, std::size_t line) {
  auto r = Rational::parse(v);
  if (!r) throw ConfigError("line " + std::to_string(line) + ": expected a rational, got '" + v + "'");
  return *r;
}

}  // namespace

PolicyProfile Scenario::profile_by_name(const std::string& name) const {
  auto it = custom_profiles.find(name);
  if (it != custom_profiles.end()) return it->second;
  auto builtin = builtin_profile(name);
  if (!builtin) throw ConfigError("unknown profile '" + name + "'");
  return *builtin;
}

Scenario parse_scenario(std::istream& in) {
  Scenario sc;
  std::map<std::string, std::size_t> line_of;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    auto eq = text.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(text.substr(0, eq));
    std::string value = trim(text.substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (sc.raw.count(key))
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    sc.raw[key] = value;
    line_of[key] = line_no;
  }

  std::set<std::string> consumed;
  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = sc.raw.find(key);
    if (it == sc.raw.end()) return std::nullopt;
    consumed.insert(key);
    return it->second;
  };
  auto at = [&](const std::string& key) { return line_of[key]; };

  if (auto v = take("seed")) sc.seed = parse_u64(*v, at("seed"));
  if (auto v = take("topology.file")) sc.topology_file = *v;
  if (auto v = take("topology.model")) sc.topology_model = *v;
  if (auto v = take("topology.nodes"))
    sc.nodes = static_cast<std::uint32_t>(parse_u64(*v, at("topology.nodes")));
  if (auto v = take("topology.edges")) sc.edges = parse_u64(*v, at("topology.edges"));
  if (auto v = take("topology.degree_seq")) sc.degree_seq_file = *v;
  if (auto v = take("topology.attachment"))
    sc.attachment = static_cast<std::uint32_t>(parse_u64(*v, at("topology.attachment")));
  if (auto v = take("latency.lo_ms")) sc.latency_lo_ms = parse_double(*v, at("latency.lo_ms"));
  if (auto v = take("latency.hi_ms")) sc.latency_hi_ms = parse_double(*v, at("latency.hi_ms"));
  if (auto v = take("announce_fraction"))
    sc.announce_fraction = parse_double(*v, at("announce_fraction"));
  if (auto v = take("default_profile")) sc.default_profile = *v;
  if (auto v = take("background.rate")) sc.background_rate = parse_double(*v, at("background.rate"));
  if (auto v = take("background.duration"))
    sc.background_duration = parse_double(*v, at("background.duration"));
  if (auto v = take("background.price_lo"))
    sc.background_price_lo = parse_rational(*v, at("background.price_lo"));
  if (auto v = take("background.price_hi"))
    sc.background_price_hi = parse_rational(*v, at("background.price_hi"));
  if (auto v = take("measurement.mode")) {
    if (*v != "serial" && *v != "parallel")
      throw ConfigError("line " + std::to_string(at("measurement.mode")) +
                        ": mode must be serial or parallel");
    sc.mode = *v;
  }
  if (auto v = take("measurement.group_size"))
    sc.group_size = static_cast<std::uint32_t>(parse_u64(*v, at("measurement.group_size")));
  if (auto v = take("measurement.pairs")) {
    if (*v != "all" && *v != "edges")
      throw ConfigError("line " + std::to_string(at("measurement.pairs")) +
                        ": pairs must be all or edges");
    sc.pairs = *v;
  }
  if (auto v = take("measurement.x_wait_s"))
    sc.measure.wait_x = parse_double(*v, at("measurement.x_wait_s"));
  if (auto v = take("measurement.y_gwei"))
    sc.measure.price_y = parse_rational(*v, at("measurement.y_gwei"));
  if (auto v = take("measurement.z_futures"))
    sc.measure.flood_z = parse_u64(*v, at("measurement.z_futures"));
  if (auto v = take("measurement.timeout_s"))
    sc.measure.timeout = parse_double(*v, at("measurement.timeout_s"));
  if (auto v = take("measurement.settle_s"))
    sc.measure.settle = parse_double(*v, at("measurement.settle_s"));
  if (auto v = take("measurement.attempts"))
    sc.measure.attempts = static_cast<int>(parse_u64(*v, at("measurement.attempts")));
  if (auto v = take("measurement.unit_pair_cost"))
    sc.measure.unit_pair_cost = parse_rational(*v, at("measurement.unit_pair_cost"));
  if (auto v = take("measurement.preprocess"))
    sc.preprocess = parse_bool(*v, at("measurement.preprocess"));
  if (auto v = take("measurement.escalation_step"))
    sc.measure.flood_escalation_step = parse_u64(*v, at("measurement.escalation_step"));
  if (auto v = take("analysis.runs"))
    sc.analysis_runs = static_cast<int>(parse_u64(*v, at("analysis.runs")));
  if (auto v = take("analysis.baselines")) {
    std::stringstream ss(*v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      if (tok != "er" && tok != "cm" && tok != "ba")
        throw ConfigError("line " + std::to_string(at("analysis.baselines")) +
                          ": unknown baseline '" + tok + "'");
      sc.baselines.push_back(tok);
    }
  }

  // profile.<name>.<field> and node.<label>.<field> sections
  for (const auto& [key, value] : sc.raw) {
    if (consumed.count(key)) continue;
    std::size_t line_no2 = line_of[key];
    if (key.rfind("profile.", 0) == 0) {
      std::string rest = key.substr(8);
      auto dot = rest.rfind('.');
      if (dot == std::string::npos)
        throw ConfigError("line " + std::to_string(line_no2) + ": expected profile.<name>.<field>");
      std::string name = rest.substr(0, dot);
      std::string field = rest.substr(dot + 1);
      PolicyProfile& p = sc.custom_profiles[name];
      p.client_name = name;
      if (field == "R") {
        p.replace_bump = parse_rational(value, line_no2);
      } else if (field == "U") {
        if (value == "unbounded")
          p.future_quota = std::nullopt;
        else
          p.future_quota = parse_u64(value, line_no2);
      } else if (field == "P") {
        p.pending_floor = parse_u64(value, line_no2);
      } else if (field == "L") {
        p.capacity = parse_u64(value, line_no2);
      } else if (field == "forwards_futures") {
        p.forwards_futures = parse_bool(value, line_no2);
      } else if (field == "eip1559") {
        p.eip1559 = parse_bool(value, line_no2);
      } else {
        throw ConfigError("line " + std::to_string(line_no2) + ": unknown profile field '" +
                          field + "'");
      }
      continue;
    }
    if (key.rfind("node.", 0) == 0) {
      std::string rest = key.substr(5);
      auto dot = rest.rfind('.');
      if (dot == std::string::npos)
        throw ConfigError("line " + std::to_string(line_no2) + ": expected node.<id>.<field>");
      std::string label = rest.substr(0, dot);
      std::string field = rest.substr(dot + 1);
      if (field == "profile") {
        sc.node_profile[label] = value;
      } else if (field == "relay_disabled") {
        sc.node_relay_disabled[label] = parse_bool(value, line_no2);
      } else if (field == "announce_fraction") {
        sc.node_announce_fraction[label] = parse_double(value, line_no2);
      } else {
        throw ConfigError("line " + std::to_string(line_no2) + ": unknown node field '" + field +
                          "'");
      }
      continue;
    }
    if (key.rfind("output.", 0) == 0) {
      sc.outputs[key.substr(7)] = value;
      continue;
    }
    throw ConfigError("line " + std::to_string(line_no2) + ": unknown key '" + key + "'");
  }

  for (const auto& [name, prof] : sc.custom_profiles) {
    (void)name;
    prof.validate();
  }
  if (sc.topology_file.empty() && sc.topology_model.empty())
    throw ConfigError("a topology.file or topology.model is required");
  if (const char* env = std::getenv("TOPOSIM_SEED")) {
    sc.seed = std::stoull(env);
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  return parse_scenario(in);
}

namespace {

Graph topology_of(const Scenario& sc) {
  Graph g;
  if (!sc.topology_file.empty()) {
    std::ifstream in(sc.topology_file);
    if (!in) throw ConfigError("cannot open topology file: " + sc.topology_file);
    g = load_edge_csv(in);
  } else if (sc.topology_model == "er") {
    g = gen_er(sc.nodes, sc.edges, sc.seed);
  } else if (sc.topology_model == "ba") {
    g = gen_ba(sc.nodes, sc.attachment, sc.seed);
  } else if (sc.topology_model == "cm") {
    std::ifstream in(sc.degree_seq_file);
    if (!in) throw ConfigError("cannot open degree sequence file: " + sc.degree_seq_file);
    std::vector<std::uint32_t> degs;
    std::uint64_t d;
    while (in >> d) degs.push_back(static_cast<std::uint32_t>(d));
    g = gen_cm(degs, sc.seed);
  } else {
    throw ConfigError("unknown topology model '" + sc.topology_model + "'");
  }
  if (g.labels.empty()) {
    for (std::uint32_t v = 0; v < g.n; ++v) g.labels.push_back("n" + std::to_string(v));
  }
  return g;
}

struct BuiltSim {
  std::unique_ptr<Simulation> sim;
  std::vector<NodeId> nodes;  // graph order
  NodeId m = kNoNode;
};

BuiltSim build_sim(const Scenario& sc, const Graph& truth, bool with_trace) {
  SimConfig cfg;
  double lo = sc.latency_lo_ms / 1000.0, hi = sc.latency_hi_ms / 1000.0;
  cfg.latency = (lo == hi) ? LatencyModel::fixed(lo, sc.seed)
                           : LatencyModel::uniform(lo, hi, sc.seed);
  cfg.record_trace = with_trace;

  BuiltSim built;
  built.sim = std::make_unique<Simulation>(cfg);
  Simulation& sim = *built.sim;
  PolicyProfile default_prof = sc.profile_by_name(sc.default_profile);
  for (std::uint32_t v = 0; v < truth.n; ++v) {
    const std::string& label = truth.label_of(v);
    PolicyProfile prof = default_prof;
    auto it = sc.node_profile.find(label);
    if (it != sc.node_profile.end()) prof = sc.profile_by_name(it->second);
    NodeId id = sim.add_node(label, prof);
    built.nodes.push_back(id);
    double announce = sc.announce_fraction;
    auto ait = sc.node_announce_fraction.find(label);
    if (ait != sc.node_announce_fraction.end()) announce = ait->second;
    if (announce > 0) sim.set_announce_fraction(id, announce);
    auto rit = sc.node_relay_disabled.find(label);
    if (rit != sc.node_relay_disabled.end()) sim.set_relay_disabled(id, rit->second);
  }
  for (auto [a, b] : truth.edges) sim.add_edge(built.nodes[a], built.nodes[b]);

  std::string m_label = "measurer";
  while (sim.find_label(m_label)) m_label += "_";
  built.m = sim.add_node(m_label, default_prof);
  for (NodeId v : built.nodes) sim.add_edge(built.m, v);
  return built;
}

}  // namespace

void inject_background(Simulation& sim, NodeId at, double rate, const Rational& price_lo,
                       const Rational& price_hi, double duration, std::uint64_t seed) {
  if (rate < 0) throw std::invalid_argument("background rate must be >= 0");
  if (rate == 0 || duration <= 0) return;
  if (price_hi < price_lo) throw std::invalid_argument("background price bounds are inverted");
  std::uint64_t count = static_cast<std::uint64_t>(rate * duration);
  double start = sim.now();
  Rational span = price_hi - price_lo;
  std::uint64_t state = seed ? seed : 1;
  for (std::uint64_t i = 0; i < count; ++i) {
    state = mix64(state);
    Rational price = price_lo + span * Rational(static_cast<std::int64_t>(state % 1001), 1000);
    double when = start + static_cast<double>(i) / rate;
    sim.run_until(when);
    sim.inject_tx(at, sim.make_tx(sim.new_account(), 0, price));
  }
  sim.run_until(start + duration);
}

ValidationScore score(const std::vector<LabeledVerdict>& verdicts, const Graph& truth) {
  std::set<std::string> universe;
  for (std::uint32_t v = 0; v < truth.n; ++v) universe.insert(truth.label_of(v));
  std::set<std::pair<std::string, std::string>> truth_edges;
  for (auto [a, b] : truth.edges) {
    std::string la = truth.label_of(a), lb = truth.label_of(b);
    truth_edges.insert({std::min(la, lb), std::max(la, lb)});
  }

  ValidationScore s;
  std::uint64_t inconclusive_true = 0;
  std::set<std::pair<std::string, std::string>> detected;
  for (const auto& v : verdicts) {
    if (!universe.count(v.node_a) || !universe.count(v.node_b))
      throw std::invalid_argument("measured pair outside the truth universe: " + v.node_a + "," +
                                  v.node_b);
    auto key = std::make_pair(std::min(v.node_a, v.node_b), std::max(v.node_a, v.node_b));
    bool is_true = truth_edges.count(key) != 0;
    if (v.connected) {
      if (is_true) {
        if (detected.insert(key).second) ++s.true_positives;
      } else {
        ++s.false_positives;
      }
    } else if (!v.conclusive) {
      ++s.inconclusive;
      if (is_true) ++inconclusive_true;
    }
  }
  s.false_negatives = truth_edges.size() - s.true_positives - inconclusive_true;
  std::uint64_t pdenom = s.true_positives + s.false_positives;
  std::uint64_t rdenom = s.true_positives + s.false_negatives;
  s.precision = pdenom == 0 ? 1.0 : static_cast<double>(s.true_positives) / pdenom;
  s.recall = rdenom == 0 ? 1.0 : static_cast<double>(s.true_positives) / rdenom;
  return s;
}

double detected_fraction(const std::vector<LabeledVerdict>& verdicts, const Graph& truth) {
  std::set<std::pair<std::string, std::string>> truth_edges;
  for (auto [a, b] : truth.edges) {
    std::string la = truth.label_of(a), lb = truth.label_of(b);
    truth_edges.insert({std::min(la, lb), std::max(la, lb)});
  }
  std::uint64_t measured_true = 0, detected = 0;
  for (const auto& v : verdicts) {
    auto key = std::make_pair(std::min(v.node_a, v.node_b), std::max(v.node_a, v.node_b));
    if (!truth_edges.count(key)) continue;
    ++measured_true;
    if (v.connected) ++detected;
  }
  return measured_true == 0 ? 1.0 : static_cast<double>(detected) / measured_true;
}

namespace {

json checks_json(const EdgeChecks& c) {
  json j;
  j["pools_full"] = c.pools_full;
  j["marker_evicted_on_source"] = c.marker_evicted_on_source;
  j["marker_evicted_on_sink"] = c.marker_evicted_on_sink;
  j["probe_stored_on_source"] = c.probe_stored_on_source;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

json cost_json(const CostLedger& cost) {
  json j;
  j["pending_txs_sent"] = cost.pending_txs_sent;
  j["futures_sent"] = cost.futures_sent;
  j["assumed_inclusions"] = cost.assumed_inclusions;
  j["pairs_measured"] = cost.pairs_measured;
  j["unit_pair_cost"] = cost.unit_pair_cost.to_string();
  j["ether_cost"] = cost.ether_cost.to_string();
  j["ether_cost_decimal"] = cost.ether_cost.to_double();
  return j;
}

json metrics_entry(const GraphMetrics& m) {
  json j;
  j["diameter"] = m.diameter;
  j["periphery_size"] = m.periphery_size;
  j["radius"] = m.radius;
  j["center_size"] = m.center_size;
  j["eccentricity"] = m.mean_eccentricity;
  j["clustering_coefficient"] = m.clustering;
  j["transitivity"] = m.transitivity;
  if (m.assortativity)
    j["degree_assortativity"] = *m.assortativity;
  else
    j["degree_assortativity"] = nullptr;
  j["clique_number"] = m.maximal_clique_count;
  if (m.clique_count_aborted) j["clique_number_aborted"] = true;
  j["modularity"] = m.modularity;
  j["component_coverage"] = m.component_coverage;
  return j;
}

}  // namespace

std::string metrics_json_for(const Graph& g, int runs, std::uint64_t seed,
                             const std::vector<std::string>& baselines) {
  json doc;
  doc["n"] = g.n;
  doc["m"] = g.edge_count();
  doc["runs"] = runs;
  doc["clique_number_definition"] = "mean count of maximal cliques over runs";

  bool want_er = false, want_cm = false, want_ba = false;
  for (const auto& b : baselines) {
    want_er |= b == "er";
    want_cm |= b == "cm";
    want_ba |= b == "ba";
  }
  if (want_er || want_cm || want_ba) {
    BaselineTable table = compare_baselines(g, runs, seed);
    doc["measured"] = metrics_entry(table.measured);
    json base;
    if (want_er) base["er"] = metrics_entry(table.er);
    if (want_cm) base["cm"] = metrics_entry(table.cm);
    if (want_ba) base["ba"] = metrics_entry(table.ba);
    doc["baselines"] = base;
  } else {
    MetricsOptions opt;
    opt.runs = runs;
    opt.seed = seed;
    doc["measured"] = metrics_entry(compute_metrics(g, opt));
  }

  json hist;
  std::map<std::uint32_t, std::uint32_t> histogram;
  for (auto d : g.degrees()) ++histogram[d];
  for (const auto& [deg, count] : histogram) hist[std::to_string(deg)] = count;
  doc["degree_histogram"] = hist;
  return doc.dump(2) + "\n";
}

void write_community_csv(std::ostream& out, const Graph& g, std::uint64_t seed) {
  auto part = louvain(g, seed);
  out << "community,size,intra_edges,intra_density,inter_edges\n";
  for (std::size_t c = 0; c < part.communities.size(); ++c) {
    const auto& stats = part.communities[c];
    out << c + 1 << "," << stats.size << "," << stats.intra_edges << "," << stats.intra_density
        << "," << stats.inter_edges << "\n";
  }
}

namespace {

struct PipelineResult {
  std::vector<LabeledVerdict> verdicts;
  MeasurementReport report;
  std::vector<std::pair<std::string, std::string>> exclusions;
  Graph truth_measured;  // truth restricted to the measured node set
  std::vector<std::string> trace;
};

PipelineResult run_pipeline(const Scenario& sc, const Graph& truth, bool with_trace,
                            std::optional<std::uint64_t> flood_z_override = std::nullopt,
                            std::optional<std::uint32_t> group_override = std::nullopt) {
  BuiltSim built = build_sim(sc, truth, with_trace);
  Simulation& sim = *built.sim;

  MeasureConfig mcfg = sc.measure;
  if (flood_z_override) mcfg.flood_z = *flood_z_override;
  MeasureEngine engine(sim, built.m, mcfg);

  if (sc.background_rate > 0 && sc.background_duration > 0) {
    Rational lo = sc.background_price_lo.value_or(
        sc.measure.price_y ? *sc.measure.price_y * Rational(1, 2) : Rational(1, 2));
    Rational hi = sc.background_price_hi.value_or(
        sc.measure.price_y ? *sc.measure.price_y * Rational(5) : Rational(5));
    inject_background(sim, built.m, sc.background_rate, lo, hi, sc.background_duration,
                      mix64(sc.seed ^ 0xb6ull));
    if (sc.measure.price_y && !(lo < *sc.measure.price_y))
      std::cerr << "warning: background prices sit entirely above the marker price; the marker "
                   "becomes the pool minimum\n";
  }

  PipelineResult out;
  std::vector<NodeId> measured_nodes = built.nodes;
  if (sc.preprocess) {
    PreprocessResult pre = engine.preprocess_targets(built.nodes);
    std::set<NodeId> dropped;
    for (auto [node, reason] : pre.exclusions) {
      out.exclusions.push_back({sim.label(node), exclusion_code(reason)});
      dropped.insert(node);
    }
    for (auto [node, z] : pre.flood_override) engine.set_flood_override(node, z);
    measured_nodes.clear();
    for (NodeId v : built.nodes)
      if (!dropped.count(v)) measured_nodes.push_back(v);
  }

  std::uint32_t k = group_override.value_or(sc.group_size);
  bool parallel = sc.mode == "parallel" || group_override.has_value();
  if (sc.pairs == "edges") {
    // validation plan: probe only the known candidate links
    std::map<std::string, NodeId> by_label;
    for (NodeId v : measured_nodes) by_label[sim.label(v)] = v;
    std::vector<std::pair<NodeId, NodeId>> candidates;
    for (auto [a, b] : truth.edges) {
      auto ia = by_label.find(truth.label_of(a));
      auto ib = by_label.find(truth.label_of(b));
      if (ia != by_label.end() && ib != by_label.end())
        candidates.push_back({ia->second, ib->second});
    }
    if (parallel) {
      // run the usual schedule but only test the candidate pairs
      std::set<std::pair<NodeId, NodeId>> wanted;
      for (auto [a, b] : candidates) wanted.insert({std::min(a, b), std::max(a, b)});
      auto sched = make_schedule(static_cast<std::uint32_t>(measured_nodes.size()),
                                 std::max<std::uint32_t>(1, k));
      for (const auto& it : sched) {
        std::vector<NodeId> sources, sinks;
        std::vector<std::pair<NodeId, NodeId>> edges;
        for (auto idx : it.sources) sources.push_back(measured_nodes[idx]);
        for (auto idx : it.sinks) sinks.push_back(measured_nodes[idx]);
        for (auto [s, t] : it.edges) {
          NodeId a = measured_nodes[s], b = measured_nodes[t];
          if (wanted.count({std::min(a, b), std::max(a, b)})) edges.push_back({a, b});
        }
        auto verdicts = engine.measure_par(sources, sinks, edges);
        out.report.edges.insert(out.report.edges.end(), verdicts.begin(), verdicts.end());
        ++out.report.iterations;
      }
    } else {
      for (auto [a, b] : candidates) {
        out.report.edges.push_back(engine.measure_one_link(a, b));
        ++out.report.iterations;
      }
    }
    out.report.cost = engine.cost();
    out.report.isolation_violations = engine.isolation_violations();
  } else if (parallel) {
    out.report = engine.run_schedule(measured_nodes, std::max<std::uint32_t>(1, k));
  } else {
    out.report = engine.run_serial(measured_nodes);
  }

  for (const auto& v : out.report.edges) {
    LabeledVerdict lv;
    lv.node_a = sim.label(v.source);
    lv.node_b = sim.label(v.sink);
    lv.connected = v.connected();
    lv.conclusive = v.conclusive;
    lv.iteration = v.iteration;
    lv.checks = v.checks;
    out.verdicts.push_back(std::move(lv));
  }

  // truth restricted to measured nodes
  std::set<std::string> kept;
  for (NodeId v : measured_nodes) kept.insert(sim.label(v));
  Graph sub;
  std::map<std::string, std::uint32_t> index;
  for (std::uint32_t v = 0; v < truth.n; ++v) {
    const std::string& label = truth.label_of(v);
    if (!kept.count(label)) continue;
    index[label] = sub.n++;
    sub.labels.push_back(label);
  }
  for (auto [a, b] : truth.edges) {
    auto ia = index.find(truth.label_of(a));
    auto ib = index.find(truth.label_of(b));
    if (ia != index.end() && ib != index.end()) sub.edges.push_back({ia->second, ib->second});
  }
  out.truth_measured = sub;
  if (with_trace) out.trace = sim.trace();
  return out;
}

json report_json_of(const Scenario& sc, const PipelineResult& pipe, const ValidationScore& val) {
  json doc;
  json echo;
  for (const auto& [k, v] : sc.raw) echo[k] = v;
  doc["config_echo"] = echo;
  json edges = json::array();
  for (const auto& v : pipe.verdicts) {
    json e;
    e["pair"] = {v.node_a, v.node_b};
    e["verdict"] = v.connected ? "connected" : "not_detected";
    e["conclusive"] = v.conclusive;
    e["iteration"] = v.iteration;
    e["checks"] = checks_json(v.checks);
    edges.push_back(std::move(e));
  }
  doc["edges"] = edges;
  doc["precision"] = val.precision;
  doc["recall"] = val.recall;
  doc["true_positives"] = val.true_positives;
  doc["false_positives"] = val.false_positives;
  doc["false_negatives"] = val.false_negatives;
  doc["inconclusive"] = val.inconclusive;
  doc["iterations"] = pipe.report.iterations;
  doc["cost"] = cost_json(pipe.report.cost);
  doc["sim_seconds"] = pipe.report.sim_seconds;
  json excl = json::array();
  for (const auto& [label, code] : pipe.exclusions) excl.push_back({label, code});
  doc["exclusions"] = excl;
  doc["isolation_violations"] = pipe.report.isolation_violations;
  return doc;
}

}  // namespace

ScenarioRun run_scenario(const Scenario& sc) {
  Graph truth = topology_of(sc);
  bool with_trace = sc.outputs.count("trace") != 0;
  PipelineResult pipe = run_pipeline(sc, truth, with_trace);
  ScenarioRun run;
  run.truth = pipe.truth_measured;
  run.verdicts = pipe.verdicts;
  run.report = pipe.report;
  run.exclusions = pipe.exclusions;
  run.validation = score(run.verdicts, run.truth);
  run.trace = pipe.trace;

  // measured graph over the measured node set
  Graph measured;
  measured.n = run.truth.n;
  measured.labels = run.truth.labels;
  std::map<std::string, std::uint32_t> index;
  for (std::uint32_t v = 0; v < measured.n; ++v) index[measured.labels[v]] = v;
  for (const auto& v : run.verdicts) {
    if (!v.connected) continue;
    auto a = index.at(v.node_a), b = index.at(v.node_b);
    measured.edges.push_back({std::min(a, b), std::max(a, b)});
  }
  std::sort(measured.edges.begin(), measured.edges.end());
  measured.edges.erase(std::unique(measured.edges.begin(), measured.edges.end()),
                       measured.edges.end());
  run.measured = measured;

  run.report_json = report_json_of(sc, pipe, run.validation).dump(2) + "\n";
  if (sc.outputs.count("metrics") && measured.n > 0) {
    run.metrics_json =
        metrics_json_for(measured, sc.analysis_runs, mix64(sc.seed ^ 0xa11ull), sc.baselines);
  }
  return run;
}

ScenarioRun run_scenario_file(const std::string& path) {
  Scenario sc = load_scenario(path);
  ScenarioRun run = run_scenario(sc);
  write_outputs(sc, run);
  return run;
}

void write_outputs(const Scenario& sc, const ScenarioRun& run) {
  auto open = [](const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write output file: " + path);
    return out;
  };
  if (auto it = sc.outputs.find("report"); it != sc.outputs.end())
    open(it->second) << run.report_json;
  if (auto it = sc.outputs.find("metrics"); it != sc.outputs.end() && !run.metrics_json.empty())
    open(it->second) << run.metrics_json;
  if (auto it = sc.outputs.find("edges"); it != sc.outputs.end()) {
    auto out = open(it->second);
    save_edge_csv(out, run.measured);
  }
  if (auto it = sc.outputs.find("dot"); it != sc.outputs.end()) {
    auto out = open(it->second);
    save_dot(out, run.measured);
  }
  if (auto it = sc.outputs.find("trace"); it != sc.outputs.end()) {
    auto out = open(it->second);
    for (const auto& line : run.trace) out << line << "\n";
  }
  if (auto it = sc.outputs.find("exclusions"); it != sc.outputs.end()) {
    auto out = open(it->second);
    for (const auto& [label, code] : run.exclusions) out << label << " " << code << "\n";
  }
  if (auto it = sc.outputs.find("communities"); it != sc.outputs.end() && run.measured.n > 0) {
    auto out = open(it->second);
    write_community_csv(out, run.measured, mix64(sc.seed ^ 0xc0ull));
  }
}

std::vector<CurvePoint> sweep_recall_vs_futures(const Scenario& base,
                                                const std::vector<std::uint64_t>& flood_sizes) {
  Graph truth = topology_of(base);
  std::vector<CurvePoint> curve;
  for (std::uint64_t z : flood_sizes) {
    PipelineResult pipe = run_pipeline(base, truth, false, z);
    ValidationScore val = score(pipe.verdicts, pipe.truth_measured);
    CurvePoint p;
    p.x = z;
    p.precision = val.precision;
    p.recall = val.recall;
    p.detected_fraction = detected_fraction(pipe.verdicts, pipe.truth_measured);
    curve.push_back(p);
  }
  return curve;
}

std::vector<CurvePoint> sweep_recall_vs_group(const Scenario& base,
                                              const std::vector<std::uint32_t>& group_sizes) {
  Graph truth = topology_of(base);
  std::vector<CurvePoint> curve;
  for (std::uint32_t k : group_sizes) {
    PipelineResult pipe = run_pipeline(base, truth, false, std::nullopt, k);
    ValidationScore val = score(pipe.verdicts, pipe.truth_measured);
    CurvePoint p;
    p.x = k;
    p.precision = val.precision;
    p.recall = val.recall;
    p.detected_fraction = detected_fraction(pipe.verdicts, pipe.truth_measured);
    curve.push_back(p);
  }
  return curve;
}

std::vector<BenchRow> bench_speedup(const Scenario& base,
                                    const std::vector<std::uint32_t>& group_sizes) {
  Graph truth = topology_of(base);
  std::vector<BenchRow> rows;
  for (std::uint32_t k : group_sizes) {
    auto start = std::chrono::steady_clock::now();
    PipelineResult pipe = run_pipeline(base, truth, false, std::nullopt, k);
    auto stop = std::chrono::steady_clock::now();
    BenchRow row;
    row.group_size = k;
    row.iterations = pipe.report.iterations;
    row.sim_seconds = pipe.report.sim_seconds;
    row.host_seconds = std::chrono::duration<double>(stop - start).count();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace toposim
