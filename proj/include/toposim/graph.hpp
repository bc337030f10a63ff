#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace toposim {

// Simple undirected graph: no self-loops, no multi-edges.
struct Graph {
  std::uint32_t n = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::vector<std::string> labels;  // optional, size n when present

  std::uint64_t edge_count() const { return edges.size(); }
  std::vector<std::vector<std::uint32_t>> adjacency() const;  // sorted rows
  std::vector<std::uint32_t> degrees() const;
  std::string label_of(std::uint32_t v) const {
    return labels.empty() ? "n" + std::to_string(v) : labels[v];
  }
};

// Uniform random graph with exactly n nodes and m edges.
Graph gen_er(std::uint32_t n, std::uint64_t m, std::uint64_t seed);

// Configuration model for the given degree sequence, simplified to a simple
// graph; the realized degrees can fall short of the input by the removed
// self-loops and multi-edges.
Graph gen_cm(const std::vector<std::uint32_t>& degree_sequence, std::uint64_t seed);

// Preferential attachment. The parameter is the per-node attachment count,
// the l' figure quoted in the comparison tables.
Graph gen_ba(std::uint32_t n, std::uint32_t attachment, std::uint64_t seed);

bool is_connected(const Graph& g);

// Edge-list CSV: one "a,b" pair per line, ids as ASCII tokens.
Graph load_edge_csv(std::istream& in);
void save_edge_csv(std::ostream& out, const Graph& g);
void save_dot(std::ostream& out, const Graph& g);

}  // namespace toposim
