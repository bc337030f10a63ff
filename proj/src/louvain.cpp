#include "toposim/louvain.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace toposim {

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

struct WeightedGraph {
  std::uint32_t n = 0;
  // adjacency rows of (neighbor, weight), no self entries
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;
  std::vector<double> self_weight;  // intra weight folded into a node
  std::vector<double> degree;      // sum of incident weights + 2 * self
  double total_weight = 0;         // m (sum of edge weights + selfs)
};

WeightedGraph lift(const Graph& g) {
  WeightedGraph w;
  w.n = g.n;
  w.adj.resize(g.n);
  w.self_weight.assign(g.n, 0.0);
  w.degree.assign(g.n, 0.0);
  for (auto [a, b] : g.edges) {
    w.adj[a].push_back({b, 1.0});
    w.adj[b].push_back({a, 1.0});
    w.degree[a] += 1.0;
    w.degree[b] += 1.0;
    w.total_weight += 1.0;
  }
  return w;
}

// One local-move phase; returns the node->community map and whether any node
// moved at all.
bool one_level(const WeightedGraph& g, std::uint64_t seed, std::vector<std::uint32_t>* out) {
  std::vector<std::uint32_t> community(g.n);
  std::vector<double> sigma_tot(g.n, 0.0);
  for (std::uint32_t v = 0; v < g.n; ++v) {
    community[v] = v;
    sigma_tot[v] = g.degree[v];
  }

  std::vector<std::uint32_t> order(g.n);
  for (std::uint32_t v = 0; v < g.n; ++v) order[v] = v;
  std::uint64_t state = seed ? seed : 1;
  for (std::size_t i = g.n; i > 1; --i) {
    state = mix64(state);
    std::swap(order[i - 1], order[state % i]);
  }

  const double m2 = 2.0 * g.total_weight;
  bool any_move = false;
  bool moved = true;
  int passes = 0;
  while (moved && passes < 100) {
    moved = false;
    ++passes;
    for (std::uint32_t u : order) {
      std::uint32_t c_old = community[u];
      // weights from u into each adjacent community (ordered for determinism)
      std::map<std::uint32_t, double> links;
      for (const auto& [v, w] : g.adj[u]) links[community[v]] += w;

      sigma_tot[c_old] -= g.degree[u];
      double base = links.count(c_old) ? links[c_old] : 0.0;
      double best_gain = base - sigma_tot[c_old] * g.degree[u] / m2;
      std::uint32_t best_c = c_old;
      for (const auto& [c, w_in] : links) {
        if (c == c_old) continue;
        double gain = w_in - sigma_tot[c] * g.degree[u] / m2;
        if (gain > best_gain + 1e-12) {
          best_gain = gain;
          best_c = c;
        }
      }
      sigma_tot[best_c] += g.degree[u];
      if (best_c != c_old) {
        community[u] = best_c;
        moved = true;
        any_move = true;
      }
    }
  }

  // renumber communities by first appearance
  std::vector<std::uint32_t> rename(g.n, UINT32_MAX);
  std::uint32_t next = 0;
  for (std::uint32_t v = 0; v < g.n; ++v) {
    if (rename[community[v]] == UINT32_MAX) rename[community[v]] = next++;
    community[v] = rename[community[v]];
  }
  *out = std::move(community);
  return any_move;
}

WeightedGraph aggregate(const WeightedGraph& g, const std::vector<std::uint32_t>& community) {
  std::uint32_t nc = 0;
  for (std::uint32_t c : community) nc = std::max(nc, c + 1);
  WeightedGraph out;
  out.n = nc;
  out.adj.resize(nc);
  out.self_weight.assign(nc, 0.0);
  out.degree.assign(nc, 0.0);
  out.total_weight = g.total_weight;

  std::map<std::pair<std::uint32_t, std::uint32_t>, double> acc;
  for (std::uint32_t u = 0; u < g.n; ++u) {
    std::uint32_t cu = community[u];
    out.self_weight[cu] += g.self_weight[u];
    for (const auto& [v, w] : g.adj[u]) {
      std::uint32_t cv = community[v];
      if (cu == cv) {
        out.self_weight[cu] += w / 2.0;  // each intra edge visited twice
      } else if (cu < cv) {
        acc[{cu, cv}] += w;
      }
    }
  }
  for (const auto& [key, w] : acc) {
    out.adj[key.first].push_back({key.second, w});
    out.adj[key.second].push_back({key.first, w});
    out.degree[key.first] += w;
    out.degree[key.second] += w;
  }
  for (std::uint32_t c = 0; c < nc; ++c) out.degree[c] += 2.0 * out.self_weight[c];
  return out;
}

}  // namespace

double modularity(const Graph& g, const std::vector<std::uint32_t>& assignment) {
  if (g.edges.empty()) return 0.0;
  std::uint32_t nc = 0;
  for (std::uint32_t c : assignment) nc = std::max(nc, c + 1);
  std::vector<double> intra(nc, 0.0), deg(nc, 0.0);
  for (auto [a, b] : g.edges) {
    deg[assignment[a]] += 1.0;
    deg[assignment[b]] += 1.0;
    if (assignment[a] == assignment[b]) intra[assignment[a]] += 1.0;
  }
  double m = static_cast<double>(g.edges.size());
  double q = 0.0;
  for (std::uint32_t c = 0; c < nc; ++c) {
    double frac = deg[c] / (2.0 * m);
    q += intra[c] / m - frac * frac;
  }
  return q;
}

CommunityPartition louvain(const Graph& g, std::uint64_t seed) {
  if (g.n == 0) throw std::invalid_argument("louvain needs a non-empty graph");

  std::vector<std::uint32_t> assignment(g.n);
  for (std::uint32_t v = 0; v < g.n; ++v) assignment[v] = v;

  WeightedGraph level = lift(g);
  double best_q = modularity(g, assignment);
  for (int depth = 0; depth < 64; ++depth) {
    std::vector<std::uint32_t> local;
    bool improved = one_level(level, mix64(seed + depth + 1), &local);
    if (!improved) break;
    std::vector<std::uint32_t> next(g.n);
    for (std::uint32_t v = 0; v < g.n; ++v) next[v] = local[assignment[v]];
    double q = modularity(g, next);
    if (q <= best_q + 1e-12 && depth > 0) break;
    assignment = std::move(next);
    best_q = q;
    level = aggregate(level, local);
    if (level.n <= 1) break;
  }

  CommunityPartition part;
  // renumber final communities by first appearance
  std::uint32_t nc = 0;
  std::vector<std::uint32_t> rename;
  rename.assign(g.n, UINT32_MAX);
  for (std::uint32_t v = 0; v < g.n; ++v) {
    if (rename[assignment[v]] == UINT32_MAX) rename[assignment[v]] = nc++;
    assignment[v] = rename[assignment[v]];
  }
  part.assignment = assignment;
  part.communities.resize(nc);
  for (std::uint32_t v = 0; v < g.n; ++v) ++part.communities[assignment[v]].size;
  for (auto [a, b] : g.edges) {
    if (assignment[a] == assignment[b]) {
      ++part.communities[assignment[a]].intra_edges;
    } else {
      ++part.communities[assignment[a]].inter_edges;
      ++part.communities[assignment[b]].inter_edges;
    }
  }
  for (auto& c : part.communities) {
    double pairs = static_cast<double>(c.size) * (c.size - 1) / 2.0;
    c.intra_density = pairs > 0 ? static_cast<double>(c.intra_edges) / pairs : 0.0;
  }
  part.modularity = modularity(g, assignment);
  return part;
}

}  // namespace toposim
