#include "toposim/graph.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace toposim {

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x6a09e667f3bcc909ull) {}
  std::uint64_t next() { return state_ = mix64(state_); }
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }

 private:
  std::uint64_t state_;
};

std::uint64_t pack(std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

std::vector<std::vector<std::uint32_t>> Graph::adjacency() const {
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

std::vector<std::uint32_t> Graph::degrees() const {
  std::vector<std::uint32_t> deg(n, 0);
  for (auto [a, b] : edges) {
    ++deg[a];
    ++deg[b];
  }
  return deg;
}

Graph gen_er(std::uint32_t n, std::uint64_t m, std::uint64_t seed) {
  std::uint64_t max_edges = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  if (m > max_edges) throw std::invalid_argument("edge count exceeds the complete graph");
  Graph g;
  g.n = n;
  Rng rng(seed);
  if (m == max_edges) {
    for (std::uint32_t a = 0; a < n; ++a)
      for (std::uint32_t b = a + 1; b < n; ++b) g.edges.push_back({a, b});
    return g;
  }
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(m * 2);
  while (g.edges.size() < m) {
    auto a = static_cast<std::uint32_t>(rng.below(n));
    auto b = static_cast<std::uint32_t>(rng.below(n));
    if (a == b) continue;
    std::uint64_t key = pack(a, b);
    if (!seen.insert(key).second) continue;
    g.edges.push_back({std::min(a, b), std::max(a, b)});
  }
  return g;
}

Graph gen_cm(const std::vector<std::uint32_t>& degree_sequence, std::uint64_t seed) {
  std::uint64_t total = std::accumulate(degree_sequence.begin(), degree_sequence.end(), 0ull);
  if (total % 2 != 0) throw std::invalid_argument("degree sum must be even");
  std::vector<std::uint32_t> stubs;
  stubs.reserve(total);
  for (std::uint32_t v = 0; v < degree_sequence.size(); ++v)
    for (std::uint32_t k = 0; k < degree_sequence[v]; ++k) stubs.push_back(v);

  Rng rng(seed);
  Graph g;
  g.n = static_cast<std::uint32_t>(degree_sequence.size());
  std::unordered_set<std::uint64_t> seen;

  // Pair stubs; self-loops and repeats go back into the pool for a bounded
  // number of re-matching rounds, which keeps the realized degrees close.
  for (int round = 0; round < 16 && stubs.size() > 1; ++round) {
    for (std::size_t i = stubs.size(); i > 1; --i)
      std::swap(stubs[i - 1], stubs[rng.below(i)]);
    std::vector<std::uint32_t> leftover;
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
      std::uint32_t a = stubs[i], b = stubs[i + 1];
      if (a != b && seen.insert(pack(a, b)).second) {
        g.edges.push_back({std::min(a, b), std::max(a, b)});
      } else {
        leftover.push_back(a);
        leftover.push_back(b);
      }
    }
    if (stubs.size() % 2 == 1) leftover.push_back(stubs.back());
    if (leftover.size() == stubs.size()) break;  // no progress
    stubs = std::move(leftover);
  }
  return g;
}

Graph gen_ba(std::uint32_t n, std::uint32_t attachment, std::uint64_t seed) {
  std::uint32_t attach = attachment;
  if (attach == 0) throw std::invalid_argument("attachment count must be positive");
  if (n <= attach) throw std::invalid_argument("node count must exceed the attachment count");

  Graph g;
  g.n = n;
  Rng rng(seed);
  // endpoints repeated by degree drive the preferential choice
  std::vector<std::uint32_t> repeated;
  std::vector<std::uint32_t> targets(attach);
  for (std::uint32_t i = 0; i < attach; ++i) targets[i] = i;
  for (std::uint32_t v = attach; v < n; ++v) {
    std::set<std::uint32_t> chosen(targets.begin(), targets.end());
    for (std::uint32_t t : chosen) {
      g.edges.push_back({std::min(v, t), std::max(v, t)});
      repeated.push_back(t);
      repeated.push_back(v);
    }
    // next target set: distinct picks weighted by degree
    std::set<std::uint32_t> next;
    while (next.size() < attach) next.insert(repeated[rng.below(repeated.size())]);
    targets.assign(next.begin(), next.end());
  }
  return g;
}

bool is_connected(const Graph& g) {
  if (g.n == 0) return false;
  auto adj = g.adjacency();
  std::vector<bool> seen(g.n, false);
  std::vector<std::uint32_t> stack{0};
  seen[0] = true;
  std::uint32_t count = 1;
  while (!stack.empty()) {
    std::uint32_t u = stack.back();
    stack.pop_back();
    for (std::uint32_t v : adj[u])
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        stack.push_back(v);
      }
  }
  return count == g.n;
}

Graph load_edge_csv(std::istream& in) {
  Graph g;
  std::map<std::string, std::uint32_t> ids;
  std::set<std::uint64_t> seen;
  std::string line;
  std::size_t line_no = 0;
  auto intern = [&](const std::string& token) {
    auto it = ids.find(token);
    if (it != ids.end()) return it->second;
    std::uint32_t id = static_cast<std::uint32_t>(g.labels.size());
    ids.emplace(token, id);
    g.labels.push_back(token);
    return id;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("edge list: missing comma on line " + std::to_string(line_no));
    std::string a = line.substr(0, comma);
    std::string b = line.substr(comma + 1);
    while (!b.empty() && (b.back() == '\r' || b.back() == ' ')) b.pop_back();
    if (a.empty() || b.empty() || a == b)
      throw std::runtime_error("edge list: bad pair on line " + std::to_string(line_no));
    std::uint32_t u = intern(a), v = intern(b);
    if (seen.insert(pack(u, v)).second) g.edges.push_back({std::min(u, v), std::max(u, v)});
  }
  g.n = static_cast<std::uint32_t>(g.labels.size());
  return g;
}

void save_edge_csv(std::ostream& out, const Graph& g) {
  for (auto [a, b] : g.edges) out << g.label_of(a) << "," << g.label_of(b) << "\n";
}

void save_dot(std::ostream& out, const Graph& g) {
  out << "graph topology {\n";
  for (std::uint32_t v = 0; v < g.n; ++v) out << "  \"" << g.label_of(v) << "\";\n";
  for (auto [a, b] : g.edges)
    out << "  \"" << g.label_of(a) << "\" -- \"" << g.label_of(b) << "\";\n";
  out << "}\n";
}

}  // namespace toposim
