#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "toposim/blocks.hpp"
#include "toposim/louvain.hpp"
#include "toposim/metrics.hpp"
#include "toposim/profiler.hpp"
#include "toposim/scenario.hpp"

namespace py = pybind11;
using namespace toposim;

namespace {

using EdgeList = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

Graph graph_from(std::uint32_t n, const EdgeList& edges) {
  Graph g;
  g.n = n;
  g.edges = edges;
  return g;
}

PolicyProfile profile_from(const py::dict& spec) {
  PolicyProfile p;
  p.client_name = spec.contains("name") ? spec["name"].cast<std::string>() : "custom";
  if (spec.contains("R")) {
    auto r = Rational::parse(py::str(spec["R"]).cast<std::string>());
    if (!r) throw py::value_error("bad R value");
    p.replace_bump = *r;
  }
  if (spec.contains("U")) {
    if (spec["U"].is_none())
      p.future_quota = std::nullopt;
    else
      p.future_quota = spec["U"].cast<std::uint64_t>();
  }
  if (spec.contains("P")) p.pending_floor = spec["P"].cast<std::uint64_t>();
  if (spec.contains("L")) p.capacity = spec["L"].cast<std::uint64_t>();
  if (spec.contains("forwards_futures")) p.forwards_futures = spec["forwards_futures"].cast<bool>();
  if (spec.contains("eip1559")) p.eip1559 = spec["eip1559"].cast<bool>();
  p.validate();
  return p;
}

py::dict profile_to_dict(const std::string& name, const Rational& r,
                         std::optional<std::uint64_t> u, std::uint64_t p, std::uint64_t l) {
  py::dict d;
  d["name"] = name;
  d["R"] = r.to_string();
  d["R_float"] = r.to_double();
  if (u)
    d["U"] = *u;
  else
    d["U"] = py::none();
  d["P"] = p;
  d["L"] = l;
  return d;
}

py::dict metrics_to_dict(const GraphMetrics& m) {
  py::dict d;
  d["n"] = m.n;
  d["m"] = m.m;
  d["diameter"] = m.diameter;
  d["radius"] = m.radius;
  d["periphery_size"] = m.periphery_size;
  d["center_size"] = m.center_size;
  d["eccentricity"] = m.mean_eccentricity;
  d["clustering_coefficient"] = m.clustering;
  d["transitivity"] = m.transitivity;
  if (m.assortativity)
    d["degree_assortativity"] = *m.assortativity;
  else
    d["degree_assortativity"] = py::none();
  d["clique_number"] = m.maximal_clique_count;
  d["modularity"] = m.modularity;
  d["component_coverage"] = m.component_coverage;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "deterministic mempool-based topology measurement simulator";

  m.def("builtin_profiles", []() {
    py::dict out;
    for (const auto& p : builtin_profiles())
      out[p.client_name.c_str()] =
          profile_to_dict(p.client_name, p.replace_bump, p.future_quota, p.pending_floor,
                          p.capacity);
    return out;
  });

  m.def(
      "profile_policy",
      [](const py::dict& spec) {
        LocalMempoolTarget target(profile_from(spec));
        MeasuredPolicy got = profile_policy(target);
        return profile_to_dict("measured", got.replace_bump, got.future_quota, got.pending_floor,
                               got.capacity);
      },
      py::arg("profile"),
      "run the replacement/eviction battery against a synthetic client");

  m.def(
      "gen_er",
      [](std::uint32_t n, std::uint64_t m_edges, std::uint64_t seed) {
        return gen_er(n, m_edges, seed).edges;
      },
      py::arg("n"), py::arg("m"), py::arg("seed") = 1);
  m.def(
      "gen_cm",
      [](const std::vector<std::uint32_t>& degrees, std::uint64_t seed) {
        return gen_cm(degrees, seed).edges;
      },
      py::arg("degrees"), py::arg("seed") = 1);
  m.def(
      "gen_ba",
      [](std::uint32_t n, std::uint32_t attachment, std::uint64_t seed) {
        return gen_ba(n, attachment, seed).edges;
      },
      py::arg("n"), py::arg("attachment"), py::arg("seed") = 1);

  m.def(
      "graph_metrics",
      [](std::uint32_t n, const EdgeList& edges, int runs, std::uint64_t seed) {
        MetricsOptions opt;
        opt.runs = runs;
        opt.seed = seed;
        return metrics_to_dict(compute_metrics(graph_from(n, edges), opt));
      },
      py::arg("n"), py::arg("edges"), py::arg("runs") = 1, py::arg("seed") = 1);

  m.def(
      "compare_baselines",
      [](std::uint32_t n, const EdgeList& edges, int runs, std::uint64_t seed) {
        BaselineTable t = compare_baselines(graph_from(n, edges), runs, seed);
        py::dict out;
        out["measured"] = metrics_to_dict(t.measured);
        out["er"] = metrics_to_dict(t.er);
        out["cm"] = metrics_to_dict(t.cm);
        out["ba"] = metrics_to_dict(t.ba);
        out["runs"] = t.runs;
        return out;
      },
      py::arg("n"), py::arg("edges"), py::arg("runs") = 10, py::arg("seed") = 1);

  m.def(
      "louvain",
      [](std::uint32_t n, const EdgeList& edges, std::uint64_t seed) {
        auto part = louvain(graph_from(n, edges), seed);
        py::dict out;
        out["assignment"] = part.assignment;
        out["modularity"] = part.modularity;
        py::list comms;
        for (const auto& c : part.communities) {
          py::dict d;
          d["size"] = c.size;
          d["intra_edges"] = c.intra_edges;
          d["inter_edges"] = c.inter_edges;
          d["intra_density"] = c.intra_density;
          comms.append(d);
        }
        out["communities"] = comms;
        return out;
      },
      py::arg("n"), py::arg("edges"), py::arg("seed") = 1);

  m.def(
      "schedule_iterations",
      [](std::uint32_t n, std::uint32_t k) {
        auto sched = make_schedule(n, k);
        py::list out;
        for (const auto& it : sched) {
          py::dict d;
          d["round"] = it.round;
          d["sources"] = it.sources;
          d["sinks"] = it.sinks;
          d["edges"] = it.edges;
          out.append(d);
        }
        return out;
      },
      py::arg("n"), py::arg("k"));

  m.def(
      "account_cost",
      [](std::uint64_t pairs, const std::string& unit) {
        auto r = Rational::parse(unit);
        if (!r) throw py::value_error("bad unit cost");
        auto ledger = account_cost(pairs, *r);
        py::dict out;
        out["pairs_measured"] = ledger.pairs_measured;
        out["ether_cost"] = ledger.ether_cost.to_string();
        out["ether_cost_float"] = ledger.ether_cost.to_double();
        return out;
      },
      py::arg("pairs"), py::arg("unit_pair_cost") = "71/100000");

  m.def(
      "verify_blocks",
      [](const py::list& records, double t1, double t2, double expiry, const std::string& y0) {
        std::vector<BlockRecord> blocks;
        for (const auto& item : records) {
          py::dict d = item.cast<py::dict>();
          BlockRecord b;
          b.height = d["height"].cast<std::uint64_t>();
          b.produce_time = d["time"].cast<double>();
          auto frac = Rational::parse(py::str(d["gas_used_fraction"]).cast<std::string>());
          if (!frac) throw py::value_error("bad gas_used_fraction");
          b.gas_used_fraction = *frac;
          for (const auto& p : d["prices"].cast<py::list>()) {
            auto price = Rational::parse(py::str(p).cast<std::string>());
            if (!price) throw py::value_error("bad price");
            b.included_tx_prices.push_back(*price);
          }
          blocks.push_back(std::move(b));
        }
        NonInterferenceWindow w;
        w.t1 = t1;
        w.t2 = t2;
        w.expiry = expiry;
        auto y = Rational::parse(y0);
        if (!y) throw py::value_error("bad y0");
        w.y0 = *y;
        auto result = verify_noninterference(blocks, w);
        py::dict out;
        out["status"] = result.status == VerifyStatus::kPass   ? "pass"
                        : result.status == VerifyStatus::kFail ? "fail"
                                                               : "inconclusive";
        out["non_full_heights"] = result.non_full_heights;
        out["underpriced_heights"] = result.underpriced_heights;
        out["note"] = result.note;
        return out;
      },
      py::arg("blocks"), py::arg("t1"), py::arg("t2"), py::arg("expiry"), py::arg("y0"));

  m.def(
      "run_scenario_text",
      [](const std::string& config_text) {
        std::stringstream in(config_text);
        Scenario sc = parse_scenario(in);
        ScenarioRun run = run_scenario(sc);
        py::dict out;
        out["precision"] = run.validation.precision;
        out["recall"] = run.validation.recall;
        out["true_positives"] = run.validation.true_positives;
        out["false_positives"] = run.validation.false_positives;
        out["false_negatives"] = run.validation.false_negatives;
        out["inconclusive"] = run.validation.inconclusive;
        out["iterations"] = run.report.iterations;
        out["isolation_violations"] = run.report.isolation_violations;
        out["report_json"] = run.report_json;
        py::list measured;
        for (auto [a, b] : run.measured.edges)
          measured.append(py::make_tuple(run.measured.label_of(a), run.measured.label_of(b)));
        out["measured_edges"] = measured;
        return out;
      },
      py::arg("config_text"), "parse and run a scenario given as config text");

  m.def(
      "run_scenario_file",
      [](const std::string& path) {
        ScenarioRun run = run_scenario_file(path);
        py::dict out;
        out["precision"] = run.validation.precision;
        out["recall"] = run.validation.recall;
        out["iterations"] = run.report.iterations;
        out["report_json"] = run.report_json;
        return out;
      },
      py::arg("path"), "run a scenario config file and write its outputs");
}
