#pragma once

#include "nfg/cost.hpp"

#include <optional>
#include <random>
#include <vector>

namespace nfg {

/// A priced offer from `actor` to `partner` for a new link.
struct LinkQuote {
  NodeId actor{};
  NodeId partner{};
  Rational payment{0};
  CostDelta actor_delta;
  CostDelta partner_delta;

  /// The actor's change once the payment is included.
  [[nodiscard]] CostDelta effective_delta() const { return actor_delta + payment; }
};

/// Whether the summed change of both endpoints is negative (link forms / is dropped).
[[nodiscard]] inline bool transfer_feasible(const Topology& t, const GameParams& p, Link pair, LinkAction action) {
  return (delta_cost(t, p, pair.lo, pair, action) + delta_cost(t, p, pair.hi, pair, action)).is_negative();
}

namespace detail {

/// Money needed to make a responder whole. A responder that gains reachability asks nothing.
inline Rational compensation(const CostDelta& responder) {
  if (!responder.is_finite() || responder.finite_change < 0) return Rational(0);
  return responder.finite_change;
}

/// The responder's gain as money, counted only when its reachability is unchanged.
inline Rational responder_gain(const CostDelta& responder) {
  if (!responder.is_finite() || responder.finite_change > 0) return Rational(0);
  return responder.finite_change;
}

struct AdditionCandidate {
  NodeId partner{};
  CostDelta actor_delta;
  CostDelta partner_delta;
};

/// Actor and responder deltas for every absent link at `actor`, by increasing partner id.
inline std::vector<AdditionCandidate> addition_candidates(Topology& work, const GameParams& p, NodeId actor) {
  std::vector<AdditionCandidate> out;
  const auto actor_before = player_cost(work, p, actor);
  for (NodeId j = 0; j < work.size(); ++j) {
    if (j == actor || work.has_link(actor, j)) continue;
    const auto partner_before = player_cost(work, p, j);
    work.add_link(actor, j);
    out.push_back({j, player_cost(work, p, actor) - actor_before, player_cost(work, p, j) - partner_before});
    work.remove_link(actor, j);
  }
  return out;
}

inline std::optional<LinkQuote> pref1_from(const std::vector<AdditionCandidate>& candidates, NodeId actor) {
  std::optional<LinkQuote> best;
  CostDelta best_score;
  for (const auto& c : candidates) {
    LinkQuote q{actor, c.partner, compensation(c.partner_delta), c.actor_delta, c.partner_delta};
    if (!q.effective_delta().is_negative()) continue;
    const CostDelta score = c.actor_delta + responder_gain(c.partner_delta);
    if (!best || score < best_score) {
      best = q;
      best_score = score;
    }
  }
  return best;
}

template <class Rng>
std::optional<LinkQuote> pref2_from(const std::vector<AdditionCandidate>& candidates, NodeId actor, Rng& rng) {
  if (candidates.empty()) return std::nullopt;
  // Least useful partner for the actor sets the reference price.
  const AdditionCandidate* least = &candidates.front();
  for (const auto& c : candidates)
    if (c.actor_delta > least->actor_delta) least = &c;
  const Rational base_price = compensation(least->partner_delta);

  std::vector<LinkQuote> best;
  for (const auto& c : candidates) {
    Rational premium(0);
    if (c.actor_delta.unreachable_change == least->actor_delta.unreachable_change)
      premium = least->actor_delta.finite_change + base_price - c.actor_delta.finite_change;
    const Rational price = std::max({Rational(0), premium, compensation(c.partner_delta)});
    LinkQuote q{actor, c.partner, price, c.actor_delta, c.partner_delta};
    if (!q.effective_delta().is_negative()) continue;
    if (best.empty()) {
      best.push_back(q);
      continue;
    }
    const auto cmp = q.effective_delta() <=> best.front().effective_delta();
    if (cmp < 0 || (cmp == 0 && q.payment < best.front().payment)) {
      best.assign(1, q);
    } else if (cmp == 0 && q.payment == best.front().payment) {
      best.push_back(q);
    }
  }
  if (best.empty()) return std::nullopt;
  if (best.size() == 1) return best.front();
  std::uniform_int_distribution<std::size_t> pick(0, best.size() - 1);
  return best[pick(rng)];
}

}  // namespace detail

/// Partner minimizing the actor's change plus the responder's gain; the actor pays the
/// responder's cost increase. Only offers that leave the actor strictly better are considered.
[[nodiscard]] inline std::optional<LinkQuote> pref1_choice(const Topology& t, const GameParams& p, NodeId actor) {
  Topology work = t;
  return detail::pref1_from(detail::addition_candidates(work, p, actor), actor);
}

/// Every seller prices its link off the actor's least useful option, so the actor pays the
/// extra value it gets; ties go to the cheaper price, then to a uniformly random partner.
template <class Rng>
[[nodiscard]] std::optional<LinkQuote> pref2_choice(const Topology& t, const GameParams& p, NodeId actor, Rng& rng) {
  Topology work = t;
  return detail::pref2_from(detail::addition_candidates(work, p, actor), actor, rng);
}

}  // namespace nfg
