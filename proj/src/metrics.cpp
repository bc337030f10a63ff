#include "toposim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <unordered_set>

#include "toposim/louvain.hpp"

namespace toposim {

namespace {

std::vector<std::uint32_t> largest_component(const std::vector<std::vector<std::uint32_t>>& adj) {
  std::uint32_t n = static_cast<std::uint32_t>(adj.size());
  std::vector<int> comp(n, -1);
  int comps = 0;
  for (std::uint32_t s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = comps;
    std::vector<std::uint32_t> stack{s};
    while (!stack.empty()) {
      std::uint32_t u = stack.back();
      stack.pop_back();
      for (std::uint32_t v : adj[u])
        if (comp[v] < 0) {
          comp[v] = comps;
          stack.push_back(v);
        }
    }
    ++comps;
  }
  std::vector<std::uint32_t> count(comps, 0);
  for (std::uint32_t v = 0; v < n; ++v) ++count[comp[v]];
  int best = static_cast<int>(std::max_element(count.begin(), count.end()) - count.begin());
  std::vector<std::uint32_t> members;
  for (std::uint32_t v = 0; v < n; ++v)
    if (comp[v] == best) members.push_back(v);
  return members;
}

// Bron-Kerbosch with pivoting over dynamic bitsets.
class CliqueCounter {
 public:
  CliqueCounter(const Graph& g, std::uint64_t guard) : n_(g.n), words_((g.n + 63) / 64), guard_(guard) {
    rows_.assign(static_cast<std::size_t>(n_) * words_, 0);
    for (auto [a, b] : g.edges) {
      set_bit(a, b);
      set_bit(b, a);
    }
  }

  std::uint64_t count(bool* aborted) {
    std::vector<std::uint64_t> r(words_, 0), p(words_, 0), x(words_, 0);
    for (std::uint32_t v = 0; v < n_; ++v) p[v / 64] |= 1ull << (v % 64);
    count_ = 0;
    steps_ = 0;
    aborted_ = false;
    expand(r, p, x);
    if (aborted) *aborted = aborted_;
    return count_;
  }

 private:
  void set_bit(std::uint32_t u, std::uint32_t v) {
    rows_[static_cast<std::size_t>(u) * words_ + v / 64] |= 1ull << (v % 64);
  }
  const std::uint64_t* row(std::uint32_t v) const {
    return &rows_[static_cast<std::size_t>(v) * words_];
  }
  static int popcount(const std::vector<std::uint64_t>& s) {
    int c = 0;
    for (auto w : s) c += __builtin_popcountll(w);
    return c;
  }

  void expand(std::vector<std::uint64_t>& r, std::vector<std::uint64_t>& p,
              std::vector<std::uint64_t>& x) {
    if (aborted_) return;
    if (++steps_ > guard_) {
      aborted_ = true;
      return;
    }
    bool p_empty = true, x_empty = true;
    for (auto w : p) p_empty &= (w == 0);
    for (auto w : x) x_empty &= (w == 0);
    if (p_empty && x_empty) {
      ++count_;
      return;
    }
    if (p_empty) return;

    // pivot: vertex of P|X with most neighbors in P
    std::uint32_t pivot = UINT32_MAX;
    int best = -1;
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t both = p[w] | x[w];
      while (both) {
        std::uint32_t v = static_cast<std::uint32_t>(w * 64 + __builtin_ctzll(both));
        both &= both - 1;
        int c = 0;
        const std::uint64_t* rv = row(v);
        for (std::size_t k = 0; k < words_; ++k) c += __builtin_popcountll(rv[k] & p[k]);
        if (c > best) {
          best = c;
          pivot = v;
        }
      }
    }

    std::vector<std::uint64_t> candidates(words_);
    const std::uint64_t* rp = row(pivot);
    for (std::size_t w = 0; w < words_; ++w) candidates[w] = p[w] & ~rp[w];

    std::vector<std::uint64_t> np(words_), nx(words_);
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t cand = candidates[w];
      while (cand) {
        std::uint32_t v = static_cast<std::uint32_t>(w * 64 + __builtin_ctzll(cand));
        cand &= cand - 1;
        const std::uint64_t* rv = row(v);
        for (std::size_t k = 0; k < words_; ++k) {
          np[k] = p[k] & rv[k];
          nx[k] = x[k] & rv[k];
        }
        r[v / 64] |= 1ull << (v % 64);
        expand(r, np, nx);
        r[v / 64] &= ~(1ull << (v % 64));
        p[w] &= ~(1ull << (v % 64));
        x[w] |= 1ull << (v % 64);
        if (aborted_) return;
      }
    }
  }

  std::uint32_t n_;
  std::size_t words_;
  std::uint64_t guard_;
  std::vector<std::uint64_t> rows_;
  std::uint64_t count_ = 0;
  std::uint64_t steps_ = 0;
  bool aborted_ = false;
};

}  // namespace

std::uint64_t count_maximal_cliques(const Graph& g, std::uint64_t step_guard, bool* aborted) {
  if (g.n == 0) {
    if (aborted) *aborted = false;
    return 0;
  }
  CliqueCounter counter(g, step_guard);
  return counter.count(aborted);
}

GraphMetrics compute_metrics(const Graph& g, const MetricsOptions& options) {
  if (g.n == 0) throw std::invalid_argument("metrics need a non-empty graph");
  GraphMetrics out;
  out.n = g.n;
  out.m = g.edge_count();

  auto adj = g.adjacency();
  auto deg = g.degrees();
  for (std::uint32_t v = 0; v < g.n; ++v) ++out.degree_histogram[deg[v]];

  // distances on the largest component
  auto members = largest_component(adj);
  out.component_coverage = static_cast<double>(members.size()) / g.n;
  std::vector<std::uint32_t> ecc;
  ecc.reserve(members.size());
  {
    std::vector<int> dist(g.n);
    for (std::uint32_t s : members) {
      std::fill(dist.begin(), dist.end(), -1);
      std::deque<std::uint32_t> q{s};
      dist[s] = 0;
      std::uint32_t far = 0;
      while (!q.empty()) {
        std::uint32_t u = q.front();
        q.pop_front();
        far = std::max(far, static_cast<std::uint32_t>(dist[u]));
        for (std::uint32_t v : adj[u])
          if (dist[v] < 0) {
            dist[v] = dist[u] + 1;
            q.push_back(v);
          }
      }
      ecc.push_back(far);
    }
  }
  std::uint32_t dia = *std::max_element(ecc.begin(), ecc.end());
  std::uint32_t rad = *std::min_element(ecc.begin(), ecc.end());
  out.diameter = dia;
  out.radius = rad;
  out.center_size = static_cast<double>(std::count(ecc.begin(), ecc.end(), rad));
  out.periphery_size = static_cast<double>(std::count(ecc.begin(), ecc.end(), dia));
  double ecc_sum = 0;
  for (auto e : ecc) ecc_sum += e;
  out.mean_eccentricity = ecc_sum / static_cast<double>(ecc.size());

  // triangles: local clustering and transitivity
  {
    std::unordered_set<std::uint64_t> edge_set;
    edge_set.reserve(g.edges.size() * 2);
    for (auto [a, b] : g.edges)
      edge_set.insert((static_cast<std::uint64_t>(std::min(a, b)) << 32) | std::max(a, b));
    auto has = [&](std::uint32_t a, std::uint32_t b) {
      return edge_set.count((static_cast<std::uint64_t>(std::min(a, b)) << 32) | std::max(a, b)) !=
             0;
    };
    double clustering_sum = 0;
    double triangles3 = 0;  // 3 * triangle count
    double triads = 0;
    for (std::uint32_t u = 0; u < g.n; ++u) {
      std::uint64_t d = deg[u];
      if (d < 2) continue;
      std::uint64_t tri = 0;
      const auto& nu = adj[u];
      for (std::size_t i = 0; i < nu.size(); ++i)
        for (std::size_t j = i + 1; j < nu.size(); ++j)
          if (has(nu[i], nu[j])) ++tri;
      clustering_sum += 2.0 * static_cast<double>(tri) / (static_cast<double>(d) * (d - 1));
      triangles3 += static_cast<double>(tri);
      triads += static_cast<double>(d) * (d - 1) / 2.0;
    }
    out.clustering = clustering_sum / g.n;
    out.transitivity = triads > 0 ? triangles3 / triads : 0.0;
  }

  // degree assortativity (Pearson over directed edge endpoints)
  {
    double sx = 0, sxx = 0, sxy = 0;
    double count = 2.0 * static_cast<double>(g.edges.size());
    for (auto [a, b] : g.edges) {
      double da = deg[a], db = deg[b];
      sx += da + db;
      sxx += da * da + db * db;
      sxy += 2 * da * db;
    }
    if (count > 0) {
      double mean = sx / count;
      double var = sxx / count - mean * mean;
      if (var > 1e-12) {
        out.assortativity = (sxy / count - mean * mean) / var;
      }
    }
  }

  out.maximal_clique_count = static_cast<double>(
      count_maximal_cliques(g, options.clique_step_guard, &out.clique_count_aborted));

  // modularity of the best partition, averaged over seeded restarts
  double q_sum = 0;
  int runs = std::max(1, options.runs);
  for (int r = 0; r < runs; ++r)
    q_sum += louvain(g, options.seed + static_cast<std::uint64_t>(r) * 7919 + 1).modularity;
  out.modularity = q_sum / runs;

  return out;
}

namespace {

void accumulate(GraphMetrics* acc, const GraphMetrics& x) {
  acc->component_coverage += x.component_coverage;
  acc->diameter += x.diameter;
  acc->radius += x.radius;
  acc->periphery_size += x.periphery_size;
  acc->center_size += x.center_size;
  acc->mean_eccentricity += x.mean_eccentricity;
  acc->clustering += x.clustering;
  acc->transitivity += x.transitivity;
  if (x.assortativity) {
    acc->assortativity = acc->assortativity.value_or(0.0) + *x.assortativity;
  }
  acc->maximal_clique_count += x.maximal_clique_count;
  acc->clique_count_aborted |= x.clique_count_aborted;
  acc->modularity += x.modularity;
}

void divide(GraphMetrics* acc, double k, int assort_count) {
  acc->component_coverage /= k;
  acc->diameter /= k;
  acc->radius /= k;
  acc->periphery_size /= k;
  acc->center_size /= k;
  acc->mean_eccentricity /= k;
  acc->clustering /= k;
  acc->transitivity /= k;
  if (acc->assortativity && assort_count > 0) *acc->assortativity /= assort_count;
  acc->maximal_clique_count /= k;
  acc->modularity /= k;
}

template <typename Gen>
GraphMetrics averaged(Gen gen, int runs, std::uint64_t seed) {
  GraphMetrics acc;
  int assort_count = 0;
  for (int r = 0; r < runs; ++r) {
    Graph g = gen(seed + static_cast<std::uint64_t>(r));
    MetricsOptions opt;
    opt.runs = 1;
    opt.seed = seed + static_cast<std::uint64_t>(r) * 131 + 17;
    GraphMetrics m = compute_metrics(g, opt);
    if (m.assortativity) ++assort_count;
    acc.n = m.n;
    acc.m = m.m;
    accumulate(&acc, m);
  }
  divide(&acc, runs, assort_count);
  return acc;
}

}  // namespace

BaselineTable compare_baselines(const Graph& g, int runs, std::uint64_t seed) {
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  BaselineTable table;
  table.runs = runs;
  MetricsOptions opt;
  opt.runs = runs;
  opt.seed = seed;
  table.measured = compute_metrics(g, opt);

  std::uint32_t n = g.n;
  std::uint64_t m = g.edge_count();
  auto degs = g.degrees();
  std::uint32_t avg_degree = n > 0 ? static_cast<std::uint32_t>((2 * m + n / 2) / n) : 0;

  table.er = averaged([&](std::uint64_t s) { return gen_er(n, m, s); }, runs, seed + 1000);
  table.cm = averaged([&](std::uint64_t s) { return gen_cm(degs, s); }, runs, seed + 2000);
  table.ba = averaged([&](std::uint64_t s) { return gen_ba(n, avg_degree, s); }, runs, seed + 3000);
  return table;
}

}  // namespace toposim
