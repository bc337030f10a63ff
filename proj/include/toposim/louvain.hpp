#pragma once

#include <cstdint>
#include <vector>

#include "toposim/graph.hpp"

namespace toposim {

struct CommunityStats {
  std::uint32_t size = 0;
  std::uint64_t intra_edges = 0;
  std::uint64_t inter_edges = 0;
  double intra_density = 0;  // intra_edges / C(size, 2)
};

struct CommunityPartition {
  std::vector<std::uint32_t> assignment;  // node -> community index
  std::vector<CommunityStats> communities;
  double modularity = 0;
};

double modularity(const Graph& g, const std::vector<std::uint32_t>& assignment);

// Louvain community detection; deterministic for a fixed seed.
CommunityPartition louvain(const Graph& g, std::uint64_t seed);

}  // namespace toposim
