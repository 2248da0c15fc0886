#pragma once
// Independent reference implementations used only by tests.

#include "nfg/cost.hpp"

#include <random>
#include <vector>

namespace oracle {

inline constexpr int inf = 1 << 20;

/// Floyd-Warshall over the adjacency predicate.
inline std::vector<std::vector<int>> floyd_warshall(const nfg::Topology& t) {
  const std::size_t n = t.size();
  std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
  for (std::size_t i = 0; i < n; ++i) {
    d[i][i] = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && t.has_link(static_cast<nfg::NodeId>(i), static_cast<nfg::NodeId>(j))) d[i][j] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  return d;
}

/// Player cost summed term by term from the all-pairs table.
inline nfg::CostValue player_cost(const nfg::Topology& t, const nfg::GameParams& p, nfg::NodeId i) {
  const auto d = floyd_warshall(t);
  nfg::CostValue c;
  std::size_t degree = 0;
  for (nfg::NodeId j = 0; j < t.size(); ++j) {
    if (j == i) continue;
    if (t.has_link(i, j)) ++degree;
    if (d[i][j] >= inf) {
      ++c.unreachable_count;
      continue;
    }
    c.finite_part += p.weight(t.type(j)) * d[i][j];
  }
  c.finite_part += p.link_cost(t.type(i)) * static_cast<std::int64_t>(degree);
  return c;
}

inline nfg::Rational social_cost(const nfg::Topology& t, const nfg::GameParams& p) {
  nfg::Rational total(0);
  for (nfg::NodeId i = 0; i < t.size(); ++i) total += oracle::player_cost(t, p, i).finite_part;
  return total;
}

/// G(n, 1/2)-style random typed graph.
inline nfg::Topology random_topology(std::mt19937_64& rng, std::size_t n_a, std::size_t n_b, double density = 0.4) {
  nfg::Topology t(nfg::typed_players(n_a, n_b));
  std::bernoulli_distribution coin(density);
  for (nfg::NodeId u = 0; u < t.size(); ++u)
    for (nfg::NodeId v = u + 1; v < t.size(); ++v)
      if (coin(rng)) t.add_link(u, v);
  return t;
}

inline nfg::Topology path(std::size_t n, nfg::PlayerType type = nfg::PlayerType::TypeB) {
  nfg::Topology t(std::vector<nfg::PlayerType>(n, type));
  for (nfg::NodeId v = 1; v < n; ++v) t.add_link(v - 1, v);
  return t;
}

}  // namespace oracle
