#pragma once

#include "nfg/graph.hpp"
#include "nfg/rational.hpp"

#include <algorithm>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

namespace nfg {

/// coreness[v] = largest k such that v survives peeling to minimum degree k.
struct CoreAssignment {
  std::vector<std::size_t> coreness;
};

/// Bucket peeling in linear time.
[[nodiscard]] inline CoreAssignment core_decomposition(const Topology& t) {
  const std::size_t n = t.size();
  CoreAssignment out;
  out.coreness.assign(n, 0);
  if (n == 0) return out;
  std::vector<std::size_t> deg(n);
  std::size_t max_deg = 0;
  for (NodeId v = 0; v < n; ++v) max_deg = std::max(max_deg, deg[v] = t.degree(v));
  std::vector<std::size_t> bin(max_deg + 1, 0);
  for (auto d : deg) ++bin[d];
  std::size_t start = 0;
  for (auto& b : bin) {
    const auto count = b;
    b = start;
    start += count;
  }
  std::vector<NodeId> order(n);
  std::vector<std::size_t> pos(n);
  for (NodeId v = 0; v < n; ++v) {
    pos[v] = bin[deg[v]]++;
    order[pos[v]] = v;
  }
  for (std::size_t d = max_deg; d > 0; --d) bin[d] = bin[d - 1];
  bin[0] = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const NodeId v = order[i];
    for (NodeId u : t.neighbors(v)) {
      if (deg[u] <= deg[v]) continue;
      // Swap u to the front of its bucket, then shrink it by one.
      const std::size_t du = deg[u];
      const std::size_t pu = pos[u];
      const std::size_t pw = bin[du];
      const NodeId w = order[pw];
      if (u != w) {
        std::swap(order[pu], order[pw]);
        pos[u] = pw;
        pos[w] = pu;
      }
      ++bin[du];
      --deg[u];
    }
  }
  out.coreness = std::move(deg);
  return out;
}

/// Nodes surviving iterative removal of every node with degree below k, ascending.
[[nodiscard]] inline std::vector<NodeId> k_core(const Topology& t, std::size_t k) {
  const auto cores = core_decomposition(t);
  std::vector<NodeId> out;
  for (NodeId v = 0; v < t.size(); ++v)
    if (cores.coreness[v] >= k) out.push_back(v);
  return out;
}

/// The k-core split into its connected pieces, each ascending, ordered by smallest member.
[[nodiscard]] inline std::vector<std::vector<NodeId>> k_core_components(const Topology& t, std::size_t k) {
  const auto members = k_core(t, k);
  std::vector<bool> inside(t.size(), false);
  for (auto v : members) inside[v] = true;
  std::vector<bool> seen(t.size(), false);
  std::vector<std::vector<NodeId>> out;
  for (auto root : members) {
    if (seen[root]) continue;
    std::vector<NodeId> piece{root};
    seen[root] = true;
    for (std::size_t q = 0; q < piece.size(); ++q)
      for (NodeId u : t.neighbors(piece[q]))
        if (inside[u] && !seen[u]) {
          seen[u] = true;
          piece.push_back(u);
        }
    std::sort(piece.begin(), piece.end());
    out.push_back(std::move(piece));
  }
  return out;
}

namespace detail {

inline std::vector<NodeId> checked_node_set(const Topology& t, const std::vector<NodeId>& nodes, const char* what) {
  std::vector<NodeId> sorted = nodes;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument(std::string(what) + " lists a node twice");
  for (auto v : sorted)
    if (!t.contains(v)) throw std::out_of_range(std::string(what) + " names unknown node " + std::to_string(v));
  return sorted;
}

}  // namespace detail

/// Induced link count over C(|nodes|, 2).
[[nodiscard]] inline Rational subgraph_density(const Topology& t, const std::vector<NodeId>& nodes) {
  const auto set = detail::checked_node_set(t, nodes, "node set");
  if (set.size() < 2) throw std::invalid_argument("density needs at least two nodes");
  std::int64_t links = 0;
  for (std::size_t i = 0; i < set.size(); ++i)
    for (std::size_t j = i + 1; j < set.size(); ++j) links += t.has_link(set[i], set[j]);
  const auto m = static_cast<std::int64_t>(set.size());
  return Rational(links, m * (m - 1) / 2);
}

struct CoreDistanceReport {
  /// Mean hop distance to the nearest core node over reachable shell nodes; empty if none reached.
  std::optional<Rational> mean;
  std::size_t reached = 0;
  std::size_t unreachable = 0;
};

/// Multi-source BFS from the core; unreachable shell nodes are counted, not averaged.
[[nodiscard]] inline CoreDistanceReport mean_node_core_distance(const Topology& t, const std::vector<NodeId>& core,
                                                                const std::vector<NodeId>& shell) {
  if (core.empty()) throw std::invalid_argument("core set is empty");
  const auto core_set = detail::checked_node_set(t, core, "core");
  const auto shell_set = detail::checked_node_set(t, shell, "shell");
  std::vector<std::int32_t> dist(t.size(), detail::unreached);
  std::vector<NodeId> queue;
  for (auto v : core_set) {
    dist[v] = 0;
    queue.push_back(v);
  }
  for (std::size_t q = 0; q < queue.size(); ++q)
    for (NodeId u : t.neighbors(queue[q]))
      if (dist[u] == detail::unreached) {
        dist[u] = dist[queue[q]] + 1;
        queue.push_back(u);
      }
  CoreDistanceReport r;
  std::int64_t total = 0;
  for (auto v : shell_set) {
    if (std::binary_search(core_set.begin(), core_set.end(), v))
      throw std::invalid_argument("shell and core overlap at node " + std::to_string(v));
    if (dist[v] == detail::unreached) {
      ++r.unreachable;
    } else {
      ++r.reached;
      total += dist[v];
    }
  }
  if (r.reached) r.mean = Rational(total, static_cast<std::int64_t>(r.reached));
  return r;
}

/// Seed clique of m0 nodes, then each arrival links to `links_per_arrival` distinct nodes
/// drawn with probability proportional to degree.
[[nodiscard]] inline Topology preferential_attachment(std::size_t n, std::size_t m0, std::size_t links_per_arrival,
                                                      std::uint64_t seed) {
  if (links_per_arrival < 1 || m0 < links_per_arrival)
    throw std::invalid_argument("need m0 >= links_per_arrival >= 1");
  if (n < m0) throw std::invalid_argument("n must be at least m0");
  Topology t;
  for (std::size_t i = 0; i < n; ++i) t.add_player(PlayerType::TypeB);
  // Each link end appears once, so a uniform pick is degree-proportional.
  std::vector<NodeId> ends;
  for (NodeId u = 0; u < m0; ++u)
    for (NodeId v = u + 1; v < m0; ++v) {
      t.add_link(u, v);
      ends.push_back(u);
      ends.push_back(v);
    }
  std::mt19937_64 rng(seed);
  for (NodeId v = static_cast<NodeId>(m0); v < n; ++v) {
    std::set<NodeId> targets;
    if (ends.empty()) {
      // m0 == 1: the lone seed node has degree zero.
      targets.insert(0);
    }
    while (targets.size() < links_per_arrival) {
      std::uniform_int_distribution<std::size_t> pick(0, ends.size() - 1);
      targets.insert(ends[pick(rng)]);
    }
    for (auto u : targets) {
      t.add_link(u, v);
      ends.push_back(u);
      ends.push_back(v);
    }
  }
  return t;
}

/// Uniform random graph with exactly `links` links, the size-matched comparator.
[[nodiscard]] inline Topology random_graph(std::size_t n, std::size_t links, std::uint64_t seed) {
  const auto pairs = canonical_pairs(n);
  if (links > pairs.size()) throw std::invalid_argument("more links than node pairs");
  std::vector<std::size_t> idx(pairs.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates; std::shuffle's output is implementation-defined.
  for (std::size_t i = 0; i < links; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  Topology t;
  for (std::size_t i = 0; i < n; ++i) t.add_player(PlayerType::TypeB);
  for (std::size_t i = 0; i < links; ++i) t.add_link(pairs[idx[i]].lo, pairs[idx[i]].hi);
  return t;
}

[[nodiscard]] inline std::size_t max_degree(const Topology& t) {
  std::size_t best = 0;
  for (NodeId v = 0; v < t.size(); ++v) best = std::max(best, t.degree(v));
  return best;
}

}  // namespace nfg
