#pragma once

#include "nfg/graph.hpp"
#include "nfg/rational.hpp"

#include <compare>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace nfg {

/// Link prices per player type and the weight of type-A destinations.
class GameParams {
 public:
  /// Throws std::domain_error unless importance > 1, link costs are non-negative
  /// and the type-A link cost does not exceed the type-B link cost.
  static GameParams make(Rational link_cost_a, Rational link_cost_b, Rational importance) {
    if (!(importance > 1)) throw std::domain_error("importance must exceed 1, got " + to_string(importance));
    if (link_cost_a < 0 || link_cost_b < 0) throw std::domain_error("link costs must be non-negative");
    if (link_cost_a > link_cost_b)
      throw std::domain_error("type-A link cost " + to_string(link_cost_a) + " exceeds type-B link cost " +
                              to_string(link_cost_b));
    return GameParams(link_cost_a, link_cost_b, importance);
  }

  /// Same link price for both types.
  static GameParams uniform(Rational link_cost, Rational importance) { return make(link_cost, link_cost, importance); }

  [[nodiscard]] const Rational& link_cost_a() const noexcept { return link_cost_a_; }
  [[nodiscard]] const Rational& link_cost_b() const noexcept { return link_cost_b_; }
  [[nodiscard]] const Rational& importance() const noexcept { return importance_; }
  [[nodiscard]] Rational mean_link_cost() const { return (link_cost_a_ + link_cost_b_) / 2; }

  [[nodiscard]] const Rational& link_cost(PlayerType t) const {
    return t == PlayerType::TypeA ? link_cost_a_ : link_cost_b_;
  }
  /// Weight a player puts on its distance to a destination of type t.
  [[nodiscard]] Rational weight(PlayerType t) const { return t == PlayerType::TypeA ? importance_ : Rational(1); }

  friend bool operator==(const GameParams&, const GameParams&) = default;

 private:
  GameParams(Rational a, Rational b, Rational w) : link_cost_a_(a), link_cost_b_(b), importance_(w) {}

  Rational link_cost_a_;
  Rational link_cost_b_;
  Rational importance_;
};

/// Cost ordered first by how many players are unreachable, then by the finite sum.
struct CostValue {
  std::int64_t unreachable_count = 0;
  Rational finite_part{0};

  [[nodiscard]] bool is_finite() const noexcept { return unreachable_count == 0; }

  friend bool operator==(const CostValue&, const CostValue&) = default;
  friend std::strong_ordering operator<=>(const CostValue& a, const CostValue& b) {
    if (a.unreachable_count != b.unreachable_count) return a.unreachable_count <=> b.unreachable_count;
    if (a.finite_part < b.finite_part) return std::strong_ordering::less;
    if (b.finite_part < a.finite_part) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  CostValue& operator+=(const CostValue& o) {
    unreachable_count += o.unreachable_count;
    finite_part += o.finite_part;
    return *this;
  }
};

/// Signed difference of two CostValue, compared to zero lexicographically.
struct CostDelta {
  std::int64_t unreachable_change = 0;
  Rational finite_change{0};

  /// -1, 0 or +1.
  [[nodiscard]] int sign() const {
    if (unreachable_change != 0) return unreachable_change < 0 ? -1 : 1;
    if (finite_change < 0) return -1;
    return finite_change > 0 ? 1 : 0;
  }
  [[nodiscard]] bool is_negative() const { return sign() < 0; }
  [[nodiscard]] bool is_zero() const { return sign() == 0; }
  [[nodiscard]] bool is_finite() const noexcept { return unreachable_change == 0; }

  friend bool operator==(const CostDelta&, const CostDelta&) = default;
  friend std::strong_ordering operator<=>(const CostDelta& a, const CostDelta& b) {
    if (a.unreachable_change != b.unreachable_change) return a.unreachable_change <=> b.unreachable_change;
    if (a.finite_change < b.finite_change) return std::strong_ordering::less;
    if (b.finite_change < a.finite_change) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  friend CostDelta operator+(CostDelta a, const CostDelta& b) {
    a.unreachable_change += b.unreachable_change;
    a.finite_change += b.finite_change;
    return a;
  }
  friend CostDelta operator+(CostDelta a, const Rational& money) {
    a.finite_change += money;
    return a;
  }
  friend CostDelta operator-(const CostDelta& a) { return {-a.unreachable_change, -a.finite_change}; }
};

inline CostDelta operator-(const CostValue& after, const CostValue& before) {
  return {after.unreachable_count - before.unreachable_count, after.finite_part - before.finite_part};
}

inline std::string to_string(const CostValue& c) {
  if (c.unreachable_count == 0) return to_string(c.finite_part);
  return to_string(c.finite_part) + "+" + std::to_string(c.unreachable_count) + "*inf";
}

inline std::string to_string(const CostDelta& d) {
  if (d.unreachable_change == 0) return to_string(d.finite_change);
  return to_string(d.finite_change) + (d.unreachable_change > 0 ? "+" : "") + std::to_string(d.unreachable_change) +
         "*inf";
}

namespace detail {

/// Hop sums from one player, split by destination type.
struct HopSums {
  std::int64_t unreachable = 0;
  std::int64_t to_a = 0;
  std::int64_t to_b = 0;
};

inline HopSums hop_sums(const Topology& t, NodeId i) {
  auto& s = scratch();
  bfs(t, i, s.dist, s.queue);
  HopSums h;
  h.unreachable = static_cast<std::int64_t>(t.size() - s.queue.size());
  const auto& types = t.types();
  for (std::size_t q = 1; q < s.queue.size(); ++q) {
    const NodeId v = s.queue[q];
    (types[v] == PlayerType::TypeA ? h.to_a : h.to_b) += s.dist[v];
  }
  return h;
}

inline CostValue cost_from_sums(const Topology& t, const GameParams& p, NodeId i, const HopSums& h) {
  return {h.unreachable, p.link_cost(t.type(i)) * static_cast<std::int64_t>(t.degree(i)) + p.importance() * h.to_a +
                             Rational(h.to_b)};
}

inline void require_legal(const Topology& t, Link pair, LinkAction action) {
  if (pair.lo == pair.hi) throw std::domain_error("pair must join two distinct players");
  if (!t.contains(pair.hi)) throw std::out_of_range("unknown node " + std::to_string(pair.hi));
  const bool present = t.has_link(pair.lo, pair.hi);
  if (action == LinkAction::Add && present) throw std::domain_error("cannot add a link that is present");
  if (action == LinkAction::Remove && !present) throw std::domain_error("cannot remove a link that is absent");
}

}  // namespace detail

/// Link spending plus importance-weighted hop counts to every other player.
[[nodiscard]] inline CostValue player_cost(const Topology& t, const GameParams& p, NodeId i) {
  return detail::cost_from_sums(t, p, i, detail::hop_sums(t, i));
}

/// player_cost(after) - player_cost(before) for a single link change.
[[nodiscard]] inline CostDelta delta_cost(const Topology& t, const GameParams& p, NodeId i, Link pair,
                                          LinkAction action) {
  detail::require_legal(t, pair, action);
  if (!t.contains(i)) throw std::out_of_range("unknown node " + std::to_string(i));
  const auto before = player_cost(t, p, i);
  return player_cost(mutate_link(t, pair, action), p, i) - before;
}

[[nodiscard]] inline CostValue social_cost(const Topology& t, const GameParams& p) {
  CostValue total;
  for (NodeId i = 0; i < t.size(); ++i) total += player_cost(t, p, i);
  return total;
}

/// One-shot transfers paid when a link formed, keyed by (payer, payee).
class PaymentLedger {
 public:
  void record_transfer(NodeId payer, NodeId payee, const Rational& amount) {
    if (amount < 0) throw std::domain_error("transfer amount must be non-negative");
    if (payer == payee) throw std::domain_error("a player cannot pay itself");
    transfers_[{payer, payee}] += amount;
  }

  /// Drops any transfer attached to the link, in either direction.
  void forget_link(Link l) {
    transfers_.erase({l.lo, l.hi});
    transfers_.erase({l.hi, l.lo});
  }

  [[nodiscard]] Rational transfer(NodeId payer, NodeId payee) const {
    auto it = transfers_.find({payer, payee});
    return it == transfers_.end() ? Rational(0) : it->second;
  }

  /// Paid minus received, over every recorded transfer.
  [[nodiscard]] Rational net_outflow(NodeId i) const {
    Rational net(0);
    for (const auto& [key, amount] : transfers_) {
      if (key.first == i) net += amount;
      if (key.second == i) net -= amount;
    }
    return net;
  }

  /// Every recorded transfer sits on a present link.
  [[nodiscard]] bool consistent_with(const Topology& t) const {
    for (const auto& [key, amount] : transfers_)
      if (!t.contains(key.first) || !t.contains(key.second) || !t.has_link(key.first, key.second)) return false;
    return true;
  }

  [[nodiscard]] const std::map<std::pair<NodeId, NodeId>, Rational>& transfers() const noexcept { return transfers_; }
  [[nodiscard]] bool empty() const noexcept { return transfers_.empty(); }

 private:
  std::map<std::pair<NodeId, NodeId>, Rational> transfers_;
};

/// player_cost plus what the player paid for its links minus what it received.
[[nodiscard]] inline CostValue extended_cost(const Topology& t, const GameParams& p, const PaymentLedger& ledger,
                                             NodeId i) {
  if (!ledger.consistent_with(t)) throw std::domain_error("ledger holds a transfer on an absent link");
  auto c = player_cost(t, p, i);
  c.finite_part += ledger.net_outflow(i);
  return c;
}

}  // namespace nfg
