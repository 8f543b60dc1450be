#pragma once

// Shared generators and brute-force oracles for the test binaries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <random>
#include <set>
#include <vector>

#include "sizefn/foliation.hpp"
#include "sizefn/size_pair.hpp"
#include "sizefn/sublevel.hpp"

namespace sizefn::prop {

inline double uniform(std::mt19937& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t uniform_index(std::mt19937& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Random simple graph: a random spanning forest plus extra random edges.
// Values are drawn from a small integer lattice (scaled) when `coarse`, so
// ties are frequent; otherwise uniform reals.
inline SizeGraph random_graph(std::mt19937& rng, std::size_t n, std::size_t k, bool coarse) {
  std::set<std::pair<VertexId, VertexId>> edges;
  for (VertexId v = 1; v < n; ++v) {
    if (uniform(rng, 0, 1) < 0.1) continue;  // leave some components disconnected
    const auto u = static_cast<VertexId>(uniform_index(rng, 0, v - 1));
    edges.insert({u, v});
  }
  const std::size_t extra = n < 2 ? 0 : uniform_index(rng, 0, n);
  for (std::size_t e = 0; e < extra; ++e) {
    auto a = static_cast<VertexId>(uniform_index(rng, 0, n - 1));
    auto b = static_cast<VertexId>(uniform_index(rng, 0, n - 1));
    if (a == b) continue;
    edges.insert(std::minmax(a, b));
  }
  std::vector<Edge> list;
  for (const auto& [a, b] : edges) list.push_back({a, b});
  std::vector<double> values(n * k);
  for (auto& v : values) v = coarse ? static_cast<double>(uniform_index(rng, 0, 8)) * 0.25 : uniform(rng, -2, 2);
  return SizeGraph(k, std::move(values), std::move(list));
}

// Components of the t-sublevel subgraph meeting the s-sublevel vertex set,
// by breadth-first search over qualifying vertices.
template <class Below>
std::size_t count_components(const SizeGraph& g, Below below_x, Below below_y) {
  const auto n = g.vertex_count();
  std::vector<char> seen(n, 0);
  std::size_t count = 0;
  for (VertexId start = 0; start < n; ++start) {
    if (seen[start] || !below_y(start)) continue;
    bool meets = false;
    std::deque<VertexId> queue{start};
    seen[start] = 1;
    while (!queue.empty()) {
      const auto v = queue.front();
      queue.pop_front();
      meets = meets || below_x(v);
      for (auto u : g.neighbors(v))
        if (!seen[u] && below_y(u)) {
          seen[u] = 1;
          queue.push_back(u);
        }
    }
    if (meets) ++count;
  }
  return count;
}

inline std::size_t bfs_size_function(const SizeGraph& g, const ScalarField& f, double x, double y) {
  auto bx = [&](VertexId v) { return f[v] <= x; };
  auto by = [&](VertexId v) { return f[v] <= y; };
  return count_components(g, std::function<bool(VertexId)>(bx), std::function<bool(VertexId)>(by));
}

inline AdmissiblePair random_pair(std::mt19937& rng, std::size_t k, double offset = 1.0) {
  std::vector<double> l(k), b(k);
  for (auto& v : l) v = uniform(rng, 0.1, 1.0);
  for (auto& v : b) v = uniform(rng, -offset, offset);
  return make_admissible(l, b);
}

inline FormalSeries random_series(std::mt19937& rng, std::size_t max_proper, std::size_t max_lines) {
  std::vector<Cornerpoint> pts;
  const auto np = uniform_index(rng, 0, max_proper);
  const auto nl = uniform_index(rng, 0, max_lines);
  for (std::size_t i = 0; i < np; ++i) {
    const double x = uniform(rng, -1, 1);
    pts.push_back({x, x + uniform(rng, 0.01, 2.0), 1});
  }
  for (std::size_t i = 0; i < nl; ++i) pts.push_back({uniform(rng, -1, 1), kInfinity, 1});
  return FormalSeries(std::move(pts));
}

}  // namespace sizefn::prop
