#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "toposim/graph.hpp"

namespace toposim {

// Every statistic reported in the comparison tables. Distance metrics are
// computed on the largest connected component; component_coverage tells how
// much of the graph that covered.
struct GraphMetrics {
  std::uint32_t n = 0;
  std::uint64_t m = 0;
  double component_coverage = 1.0;
  double diameter = 0;
  double radius = 0;
  double periphery_size = 0;
  double center_size = 0;
  double mean_eccentricity = 0;
  double clustering = 0;
  double transitivity = 0;
  std::optional<double> assortativity;  // undefined on degree-regular graphs
  double maximal_clique_count = 0;      // mean count of maximal cliques
  bool clique_count_aborted = false;
  double modularity = 0;
  std::map<std::uint32_t, std::uint32_t> degree_histogram;
};

struct MetricsOptions {
  int runs = 1;                              // louvain restarts averaged into modularity
  std::uint64_t seed = 0;
  std::uint64_t clique_step_guard = 10'000'000;  // recursion budget for clique counting
};

GraphMetrics compute_metrics(const Graph& g, const MetricsOptions& options = {});

// Count of maximal cliques (Bron-Kerbosch with pivoting). Sets *aborted when
// the step guard is exceeded.
std::uint64_t count_maximal_cliques(const Graph& g, std::uint64_t step_guard, bool* aborted);

struct BaselineTable {
  GraphMetrics measured;
  GraphMetrics er;
  GraphMetrics cm;
  GraphMetrics ba;
  int runs = 0;
};

// Matched random baselines: ER with the same n and m, CM with the same degree
// sequence, BA with the same n and average degree; metrics averaged over runs.
BaselineTable compare_baselines(const Graph& g, int runs, std::uint64_t seed);

}  // namespace toposim
