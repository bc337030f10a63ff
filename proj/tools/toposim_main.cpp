#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "toposim/blocks.hpp"
#include "toposim/louvain.hpp"
#include "toposim/metrics.hpp"
#include "toposim/scenario.hpp"

namespace {

using namespace toposim;

constexpr int kExitConfig = 2;
constexpr int kExitPrecondition = 3;
constexpr int kExitInvariant = 4;

std::uint64_t effective_seed(std::uint64_t from_flag) {
  if (const char* env = std::getenv("TOPOSIM_SEED")) return std::stoull(env);
  return from_flag;
}

std::vector<std::uint32_t> parse_u32_list(const std::string& text) {
  std::vector<std::uint32_t> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(static_cast<std::uint32_t>(std::stoul(tok)));
  }
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

int cmd_generate(const std::string& model, std::uint32_t nodes, std::uint64_t edges,
                 const std::string& degree_seq, std::uint32_t avg_degree, std::uint64_t seed,
                 const std::string& out_path, const std::string& dot_path) {
  Graph g;
  if (model == "er") {
    g = gen_er(nodes, edges, seed);
  } else if (model == "ba") {
    g = gen_ba(nodes, avg_degree, seed);
  } else if (model == "cm") {
    std::ifstream in(degree_seq);
    if (!in) throw ConfigError("cannot open degree sequence file: " + degree_seq);
    std::vector<std::uint32_t> degs;
    std::uint64_t d;
    while (in >> d) degs.push_back(static_cast<std::uint32_t>(d));
    g = gen_cm(degs, seed);
  } else {
    throw ConfigError("unknown model '" + model + "'");
  }
  auto out = open_out(out_path);
  save_edge_csv(out, g);
  if (!dot_path.empty()) {
    auto dot = open_out(dot_path);
    save_dot(dot, g);
  }
  std::cerr << "generated " << g.n << " nodes, " << g.edge_count() << " edges\n";
  return 0;
}

int cmd_measure(const std::string& topology, const std::string& mode, std::uint32_t group_size,
                const std::string& config_path, const std::string& out_path) {
  Scenario sc;
  if (!config_path.empty()) sc = load_scenario(config_path);
  if (!topology.empty()) sc.topology_file = topology;
  if (!mode.empty()) {
    if (mode != "serial" && mode != "parallel") throw ConfigError("mode must be serial or parallel");
    sc.mode = mode;
  }
  if (group_size > 0) sc.group_size = group_size;
  if (!out_path.empty()) sc.outputs["report"] = out_path;
  if (sc.topology_file.empty() && sc.topology_model.empty())
    throw ConfigError("measure needs --topology or a config with a topology section");

  ScenarioRun run = run_scenario(sc);
  write_outputs(sc, run);
  std::cerr << "precision " << run.validation.precision << ", recall " << run.validation.recall
            << ", " << run.report.iterations << " iterations\n";
  if (!sc.outputs.count("report")) std::cout << run.report_json;
  return 0;
}

int cmd_analyze(const std::string& graph_path, const std::string& baselines, int runs,
                std::uint64_t seed, const std::string& out_path,
                const std::string& communities_path) {
  std::ifstream in(graph_path);
  if (!in) throw ConfigError("cannot open graph file: " + graph_path);
  Graph g = load_edge_csv(in);
  std::vector<std::string> wanted;
  std::stringstream ss(baselines);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok != "er" && tok != "cm" && tok != "ba" && !tok.empty())
      throw ConfigError("unknown baseline '" + tok + "'");
    if (!tok.empty()) wanted.push_back(tok);
  }
  std::string doc = metrics_json_for(g, runs, effective_seed(seed), wanted);
  if (out_path.empty()) {
    std::cout << doc;
  } else {
    open_out(out_path) << doc;
  }
  if (!communities_path.empty()) {
    auto out = open_out(communities_path);
    write_community_csv(out, g, effective_seed(seed));
  }
  return 0;
}

int cmd_validate(const std::string& scenario_path, const std::string& sweep,
                 const std::string& values, const std::string& out_path) {
  Scenario sc = load_scenario(scenario_path);
  std::ostringstream csv;
  if (sweep == "futures") {
    std::vector<std::uint64_t> zs;
    for (auto v : parse_u32_list(values)) zs.push_back(v);
    if (zs.empty()) throw ConfigError("--values is required for the futures sweep");
    auto curve = sweep_recall_vs_futures(sc, zs);
    csv << "flood_size,precision,recall,detected_fraction\n";
    for (const auto& p : curve)
      csv << p.x << "," << p.precision << "," << p.recall << "," << p.detected_fraction << "\n";
  } else if (sweep == "group") {
    auto ks = parse_u32_list(values);
    if (ks.empty()) throw ConfigError("--values is required for the group sweep");
    auto curve = sweep_recall_vs_group(sc, ks);
    csv << "group_size,precision,recall,detected_fraction\n";
    for (const auto& p : curve)
      csv << p.x << "," << p.precision << "," << p.recall << "," << p.detected_fraction << "\n";
  } else {
    throw ConfigError("sweep must be 'futures' or 'group'");
  }
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    open_out(out_path) << csv.str();
  }
  return 0;
}

int cmd_bench(const std::string& scenario_path, const std::string& group_sizes,
              const std::string& out_path) {
  Scenario sc = load_scenario(scenario_path);
  auto ks = parse_u32_list(group_sizes);
  if (ks.empty()) throw ConfigError("--group-sizes is required");
  auto rows = bench_speedup(sc, ks);
  std::ostringstream csv;
  csv << "group_size,iterations,sim_seconds,host_seconds\n";
  for (const auto& r : rows)
    csv << r.group_size << "," << r.iterations << "," << r.sim_seconds << "," << r.host_seconds
        << "\n";
  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    open_out(out_path) << csv.str();
  }
  return 0;
}

int cmd_verify_blocks(const std::string& stream_path, double t1, double t2, double expiry,
                      const std::string& y0_text) {
  std::ifstream in(stream_path);
  if (!in) throw ConfigError("cannot open block stream: " + stream_path);
  auto blocks = read_block_stream(in);
  NonInterferenceWindow window;
  window.t1 = t1;
  window.t2 = t2;
  window.expiry = expiry;
  auto y0 = Rational::parse(y0_text);
  if (!y0) throw ConfigError("bad --y0 value '" + y0_text + "'");
  window.y0 = *y0;
  auto result = verify_noninterference(blocks, window);
  switch (result.status) {
    case VerifyStatus::kPass:
      std::cout << "pass\n";
      return 0;
    case VerifyStatus::kFail: {
      std::cout << "fail\n";
      for (auto h : result.non_full_heights) std::cout << "V1 height " << h << " not full\n";
      for (auto h : result.underpriced_heights)
        std::cout << "V2 height " << h << " includes a price at or below y0\n";
      return 1;
    }
    case VerifyStatus::kInconclusive:
      std::cout << "inconclusive: " << result.note << "\n";
      return kExitPrecondition;
  }
  return kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic mempool-based topology measurement simulator"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "generate a random topology");
  std::string gen_model, gen_degseq, gen_out, gen_dot;
  std::uint32_t gen_nodes = 0, gen_avg = 0;
  std::uint64_t gen_edges = 0, gen_seed = 1;
  gen->add_option("--model", gen_model, "er|cm|ba")->required();
  gen->add_option("--nodes", gen_nodes, "node count");
  gen->add_option("--edges", gen_edges, "edge count (er)");
  gen->add_option("--degree-seq", gen_degseq, "degree sequence file (cm)");
  gen->add_option("--avg-degree", gen_avg, "attachment parameter l' (ba)");
  gen->add_option("--seed", gen_seed, "rng seed");
  gen->add_option("--out", gen_out, "edge list output")->required();
  gen->add_option("--dot", gen_dot, "DOT output");

  // measure
  auto* meas = app.add_subcommand("measure", "measure a topology end to end");
  std::string meas_topology, meas_mode, meas_config, meas_out;
  std::uint32_t meas_k = 0;
  meas->add_option("--topology", meas_topology, "edge list file");
  meas->add_option("--mode", meas_mode, "serial|parallel");
  meas->add_option("--group-size", meas_k, "parallel group size");
  meas->add_option("--config", meas_config, "scenario config file");
  meas->add_option("--out", meas_out, "report JSON output");

  // analyze
  auto* ana = app.add_subcommand("analyze", "graph statistics with random baselines");
  std::string ana_graph, ana_baselines = "er,cm,ba", ana_out, ana_comm;
  int ana_runs = 10;
  std::uint64_t ana_seed = 1;
  ana->add_option("--graph", ana_graph, "edge list file")->required();
  ana->add_option("--baselines", ana_baselines, "comma list of er,cm,ba");
  ana->add_option("--runs", ana_runs, "baseline generation runs");
  ana->add_option("--seed", ana_seed, "rng seed");
  ana->add_option("--out", ana_out, "metrics JSON output");
  ana->add_option("--communities", ana_comm, "community table CSV output");

  // validate
  auto* val = app.add_subcommand("validate", "recall sweeps against ground truth");
  std::string val_scenario, val_sweep, val_values, val_out;
  val->add_option("--scenario", val_scenario, "scenario config file")->required();
  val->add_option("--sweep", val_sweep, "futures|group")->required();
  val->add_option("--values", val_values, "comma list of sweep values")->required();
  val->add_option("--out", val_out, "curve CSV output");

  // bench
  auto* ben = app.add_subcommand("bench", "iteration/speedup table over group sizes");
  std::string ben_scenario, ben_sizes, ben_out;
  ben->add_option("--scenario", ben_scenario, "scenario config file")->required();
  ben->add_option("--group-sizes", ben_sizes, "comma list of group sizes")->required();
  ben->add_option("--out", ben_out, "table CSV output");

  // verify-blocks
  auto* ver = app.add_subcommand("verify-blocks", "non-interference check over a block stream");
  std::string ver_stream, ver_y0;
  double ver_t1 = 0, ver_t2 = 0, ver_e = 3 * 3600.0;
  ver->add_option("--stream", ver_stream, "block stream JSONL file")->required();
  ver->add_option("--t1", ver_t1, "measurement start (seconds)")->required();
  ver->add_option("--t2", ver_t2, "measurement end (seconds)")->required();
  ver->add_option("--expiry", ver_e, "unconfirmed tx expiry (seconds)");
  ver->add_option("--y0", ver_y0, "measurement price floor (Gwei)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return cmd_generate(gen_model, gen_nodes, gen_edges, gen_degseq, gen_avg,
                          effective_seed(gen_seed), gen_out, gen_dot);
    if (meas->parsed()) return cmd_measure(meas_topology, meas_mode, meas_k, meas_config, meas_out);
    if (ana->parsed())
      return cmd_analyze(ana_graph, ana_baselines, ana_runs, ana_seed, ana_out, ana_comm);
    if (val->parsed()) return cmd_validate(val_scenario, val_sweep, val_values, val_out);
    if (ben->parsed()) return cmd_bench(ben_scenario, ben_sizes, ben_out);
    if (ver->parsed()) return cmd_verify_blocks(ver_stream, ver_t1, ver_t2, ver_e, ver_y0);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const MeasureError& e) {
    std::cerr << "precondition failure: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const std::invalid_argument& e) {
    std::cerr << "precondition failure: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInvariant;
  }
  return kExitConfig;
}
