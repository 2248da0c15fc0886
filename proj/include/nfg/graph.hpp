#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nfg {

enum class PlayerType : std::uint8_t { TypeA = 0, TypeB = 1 };

inline char type_letter(PlayerType t) { return t == PlayerType::TypeA ? 'A' : 'B'; }

using NodeId = std::uint32_t;

/// Undirected link stored with lo <= hi, so equal links compare equal.
struct Link {
  NodeId lo{};
  NodeId hi{};

  constexpr Link() = default;
  constexpr Link(NodeId u, NodeId v) : lo(u < v ? u : v), hi(u < v ? v : u) {}

  [[nodiscard]] constexpr NodeId other(NodeId end) const { return end == lo ? hi : lo; }
  friend constexpr auto operator<=>(const Link&, const Link&) = default;
};

enum class LinkAction : std::uint8_t { Add, Remove };

/// Undirected simple graph whose nodes carry a player type.
/// Node ids are dense and double as arrival ranks.
class Topology {
 public:
  Topology() = default;

  explicit Topology(std::vector<PlayerType> types)
      : types_(std::move(types)), adjacency_(types_.size()) {}

  Topology(std::vector<PlayerType> types, std::span<const Link> links) : Topology(std::move(types)) {
    for (const auto& l : links) add_link(l.lo, l.hi);
  }

  [[nodiscard]] std::size_t size() const noexcept { return types_.size(); }
  [[nodiscard]] std::size_t link_count() const noexcept { return link_count_; }
  [[nodiscard]] bool contains(NodeId v) const noexcept { return v < types_.size(); }

  [[nodiscard]] PlayerType type(NodeId v) const {
    require_node(v);
    return types_[v];
  }
  [[nodiscard]] const std::vector<PlayerType>& types() const noexcept { return types_; }

  [[nodiscard]] std::span<const NodeId> neighbors(NodeId v) const {
    require_node(v);
    return adjacency_[v];
  }
  [[nodiscard]] std::size_t degree(NodeId v) const { return neighbors(v).size(); }

  [[nodiscard]] bool has_link(NodeId u, NodeId v) const {
    require_node(u);
    require_node(v);
    const auto& a = adjacency_[u];
    return std::binary_search(a.begin(), a.end(), v);
  }

  [[nodiscard]] std::size_t count(PlayerType t) const {
    return static_cast<std::size_t>(std::count(types_.begin(), types_.end(), t));
  }

  [[nodiscard]] std::vector<NodeId> players_of(PlayerType t) const {
    std::vector<NodeId> out;
    for (NodeId v = 0; v < types_.size(); ++v)
      if (types_[v] == t) out.push_back(v);
    return out;
  }

  /// All links in canonical (lo, hi) order.
  [[nodiscard]] std::vector<Link> links() const {
    std::vector<Link> out;
    out.reserve(link_count_);
    for (NodeId u = 0; u < adjacency_.size(); ++u)
      for (NodeId v : adjacency_[u])
        if (u < v) out.emplace_back(u, v);
    return out;
  }

  NodeId add_player(PlayerType t) {
    types_.push_back(t);
    adjacency_.emplace_back();
    return static_cast<NodeId>(types_.size() - 1);
  }

  void add_link(NodeId u, NodeId v) {
    require_node(u);
    require_node(v);
    if (u == v) throw std::domain_error("self-loop on node " + std::to_string(u));
    auto& a = adjacency_[u];
    auto it = std::lower_bound(a.begin(), a.end(), v);
    if (it != a.end() && *it == v)
      throw std::domain_error("link (" + std::to_string(u) + "," + std::to_string(v) + ") already present");
    a.insert(it, v);
    auto& b = adjacency_[v];
    b.insert(std::lower_bound(b.begin(), b.end(), u), u);
    ++link_count_;
  }

  void remove_link(NodeId u, NodeId v) {
    require_node(u);
    require_node(v);
    auto& a = adjacency_[u];
    auto it = std::lower_bound(a.begin(), a.end(), v);
    if (it == a.end() || *it != v)
      throw std::domain_error("link (" + std::to_string(u) + "," + std::to_string(v) + ") not present");
    a.erase(it);
    auto& b = adjacency_[v];
    b.erase(std::lower_bound(b.begin(), b.end(), u));
    --link_count_;
  }

  void apply(Link l, LinkAction action) {
    if (action == LinkAction::Add)
      add_link(l.lo, l.hi);
    else
      remove_link(l.lo, l.hi);
  }

  friend bool operator==(const Topology&, const Topology&) = default;

 private:
  void require_node(NodeId v) const {
    if (v >= types_.size()) throw std::out_of_range("unknown node " + std::to_string(v));
  }

  std::vector<PlayerType> types_;
  std::vector<std::vector<NodeId>> adjacency_;
  std::size_t link_count_ = 0;
};

/// Returns a copy of `t` with the link added or removed; throws if the action is illegal.
[[nodiscard]] inline Topology mutate_link(const Topology& t, Link l, LinkAction action) {
  Topology out = t;
  out.apply(l, action);
  return out;
}

/// Hop counts from one source; std::nullopt marks an unreachable node.
struct DistanceTable {
  NodeId source{};
  std::vector<std::optional<std::uint32_t>> hops;

  [[nodiscard]] std::optional<std::uint32_t> operator[](NodeId v) const { return hops.at(v); }
};

namespace detail {

inline constexpr std::int32_t unreached = -1;

/// BFS into caller-provided buffers; dist[v] == unreached for nodes not reached.
inline void bfs(const Topology& t, NodeId source, std::vector<std::int32_t>& dist, std::vector<NodeId>& queue) {
  dist.assign(t.size(), unreached);
  queue.clear();
  dist[source] = 0;
  queue.push_back(source);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId u = queue[head];
    for (NodeId v : t.neighbors(u)) {
      if (dist[v] == unreached) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
}

struct BfsScratch {
  std::vector<std::int32_t> dist;
  std::vector<NodeId> queue;
};

inline BfsScratch& scratch() {
  thread_local BfsScratch s;
  return s;
}

}  // namespace detail

[[nodiscard]] inline DistanceTable shortest_distances(const Topology& t, NodeId source) {
  if (!t.contains(source)) throw std::out_of_range("unknown node " + std::to_string(source));
  auto& s = detail::scratch();
  detail::bfs(t, source, s.dist, s.queue);
  DistanceTable out{source, {}};
  out.hops.reserve(t.size());
  for (auto d : s.dist)
    out.hops.push_back(d == detail::unreached ? std::nullopt : std::optional<std::uint32_t>(static_cast<std::uint32_t>(d)));
  return out;
}

/// Dense all-pairs hop matrix; entries equal detail::unreached when disconnected.
struct DistanceMatrix {
  std::size_t n = 0;
  std::vector<std::int32_t> cells;
  [[nodiscard]] std::int32_t at(NodeId u, NodeId v) const { return cells[u * n + v]; }
};

[[nodiscard]] inline DistanceMatrix all_pairs_distances(const Topology& t) {
  DistanceMatrix m{t.size(), std::vector<std::int32_t>(t.size() * t.size())};
  auto& s = detail::scratch();
  for (NodeId u = 0; u < t.size(); ++u) {
    detail::bfs(t, u, s.dist, s.queue);
    std::copy(s.dist.begin(), s.dist.end(), m.cells.begin() + static_cast<std::ptrdiff_t>(u * t.size()));
  }
  return m;
}

[[nodiscard]] inline bool is_connected(const Topology& t) {
  if (t.size() <= 1) return true;
  auto& s = detail::scratch();
  detail::bfs(t, 0, s.dist, s.queue);
  return s.queue.size() == t.size();
}

/// Connected components, each sorted, ordered by smallest member.
[[nodiscard]] inline std::vector<std::vector<NodeId>> connected_components(const Topology& t) {
  std::vector<std::vector<NodeId>> out;
  std::vector<bool> seen(t.size(), false);
  auto& s = detail::scratch();
  for (NodeId v = 0; v < t.size(); ++v) {
    if (seen[v]) continue;
    detail::bfs(t, v, s.dist, s.queue);
    std::vector<NodeId> comp(s.queue.begin(), s.queue.end());
    std::sort(comp.begin(), comp.end());
    for (auto u : comp) seen[u] = true;
    out.push_back(std::move(comp));
  }
  return out;
}

/// Largest player count accepted by exhaustive enumeration.
inline constexpr std::size_t max_enumeration_players = 8;

/// The first n_a players are TypeA, the rest TypeB.
[[nodiscard]] inline std::vector<PlayerType> typed_players(std::size_t n_a, std::size_t n_b) {
  std::vector<PlayerType> types(n_a, PlayerType::TypeA);
  types.resize(n_a + n_b, PlayerType::TypeB);
  return types;
}

/// Candidate pairs in canonical order; bit b of an edge mask selects pairs[b].
[[nodiscard]] inline std::vector<Link> canonical_pairs(std::size_t n) {
  std::vector<Link> pairs;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
  return pairs;
}

namespace detail {

inline bool mask_connected(std::size_t n, const std::vector<Link>& pairs, std::uint64_t mask) {
  if (n <= 1) return true;
  std::vector<NodeId> parent(n);
  std::iota(parent.begin(), parent.end(), NodeId{0});
  auto find = [&](NodeId x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t merges = 0;
  for (std::size_t b = 0; b < pairs.size(); ++b) {
    if (!(mask >> b & 1U)) continue;
    auto ra = find(pairs[b].lo), rb = find(pairs[b].hi);
    if (ra != rb) {
      parent[ra] = rb;
      ++merges;
    }
  }
  return merges + 1 == n;
}

inline void check_enumeration_size(std::size_t n_a, std::size_t n_b) {
  if (n_a + n_b == 0) throw std::domain_error("enumeration needs at least one player");
  if (n_a + n_b > max_enumeration_players)
    throw std::domain_error("enumeration limited to " + std::to_string(max_enumeration_players) + " players");
}

}  // namespace detail

[[nodiscard]] inline Topology topology_from_mask(const std::vector<PlayerType>& types, const std::vector<Link>& pairs,
                                                 std::uint64_t mask) {
  Topology t(types);
  for (std::size_t b = 0; b < pairs.size(); ++b)
    if (mask >> b & 1U) t.add_link(pairs[b].lo, pairs[b].hi);
  return t;
}

/// Calls visit(topology, mask) for every labeled graph with the given player split,
/// in increasing edge-mask order. Masks in [mask_begin, mask_end) only.
template <class Visitor>
void for_each_labeled_graph(std::size_t n_a, std::size_t n_b, bool connected_only, Visitor&& visit,
                            std::uint64_t mask_begin = 0, std::uint64_t mask_end = UINT64_MAX) {
  detail::check_enumeration_size(n_a, n_b);
  const auto types = typed_players(n_a, n_b);
  const auto pairs = canonical_pairs(types.size());
  const std::uint64_t total = std::uint64_t{1} << pairs.size();
  mask_end = std::min(mask_end, total);
  for (std::uint64_t mask = mask_begin; mask < mask_end; ++mask) {
    if (connected_only && !detail::mask_connected(types.size(), pairs, mask)) continue;
    visit(topology_from_mask(types, pairs, mask), mask);
  }
}

[[nodiscard]] inline std::vector<Topology> enumerate_labeled_graphs(std::size_t n_a, std::size_t n_b,
                                                                    bool connected_only) {
  std::vector<Topology> out;
  for_each_labeled_graph(n_a, n_b, connected_only, [&](Topology t, std::uint64_t) { out.push_back(std::move(t)); });
  return out;
}

}  // namespace nfg
