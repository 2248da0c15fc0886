#pragma once

#include "nfg/cost.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace nfg {

enum class DeviationKind : std::uint8_t { UnilateralRemoval, BilateralAddition };

/// A profitable deviation: the pair and the per-endpoint cost changes (after - before).
struct DeviationWitness {
  DeviationKind kind{};
  Link pair;
  CostDelta lo_delta;
  CostDelta hi_delta;
};

struct StabilityVerdict {
  bool stable = true;
  std::optional<DeviationWitness> witness;
  /// Some decision hinged on an exactly zero change; counting zero as profitable would flip it.
  bool zero_tie = false;
};

namespace detail {

/// Per-endpoint deltas for toggling `pair`, evaluated in place on `work` and reverted.
struct PairDeltas {
  CostDelta lo;
  CostDelta hi;
};

inline PairDeltas pair_deltas(Topology& work, const GameParams& p, const std::vector<CostValue>& base, Link pair,
                              LinkAction action) {
  work.apply(pair, action);
  PairDeltas d{player_cost(work, p, pair.lo) - base[pair.lo], player_cost(work, p, pair.hi) - base[pair.hi]};
  work.apply(pair, action == LinkAction::Add ? LinkAction::Remove : LinkAction::Add);
  return d;
}

inline std::vector<CostValue> all_costs(const Topology& t, const GameParams& p) {
  std::vector<CostValue> out;
  out.reserve(t.size());
  for (NodeId i = 0; i < t.size(); ++i) out.push_back(player_cost(t, p, i));
  return out;
}

inline StabilityVerdict check_stability(const Topology& t, const GameParams& p, bool transfers) {
  if (!is_connected(t)) throw std::domain_error("stability is defined for connected topologies only");
  StabilityVerdict verdict;
  Topology work = t;
  const auto base = all_costs(t, p);
  const auto pairs = canonical_pairs(t.size());
  std::optional<DeviationWitness> addition;
  for (const auto& pair : pairs) {
    const bool present = t.has_link(pair.lo, pair.hi);
    const auto d = pair_deltas(work, p, base, pair, present ? LinkAction::Remove : LinkAction::Add);
    bool deviates = false;
    if (transfers) {
      const auto joint = d.lo + d.hi;
      deviates = joint.is_negative();
      verdict.zero_tie = verdict.zero_tie || joint.is_zero();
    } else if (present) {
      deviates = d.lo.is_negative() || d.hi.is_negative();
      verdict.zero_tie = verdict.zero_tie || d.lo.is_zero() || d.hi.is_zero();
    } else {
      deviates = d.lo.is_negative() && d.hi.is_negative();
      verdict.zero_tie = verdict.zero_tie || (d.lo.sign() <= 0 && d.hi.sign() <= 0 && !deviates);
    }
    if (!deviates) continue;
    DeviationWitness w{present ? DeviationKind::UnilateralRemoval : DeviationKind::BilateralAddition, pair, d.lo,
                       d.hi};
    if (present && !verdict.witness) verdict.witness = w;
    if (!present && !addition) addition = w;
  }
  if (!verdict.witness) verdict.witness = addition;
  verdict.stable = !verdict.witness.has_value();
  return verdict;
}

}  // namespace detail

/// No endpoint gains by dropping a link and no absent pair gains jointly by adding one.
/// Exact-zero changes count as no deviation. The witness is the lowest profitable removal,
/// else the lowest profitable addition.
[[nodiscard]] inline StabilityVerdict is_pairwise_stable(const Topology& t, const GameParams& p) {
  return detail::check_stability(t, p, false);
}

/// Stability when the endpoints may share the change: a link forms iff the summed change is
/// negative, and is dropped iff the summed change of dropping it is negative.
[[nodiscard]] inline StabilityVerdict is_stable_with_transfers(const Topology& t, const GameParams& p) {
  return detail::check_stability(t, p, true);
}

struct StableTopology {
  Topology topology;
  std::uint64_t mask = 0;
  Rational social_cost{0};
  bool pairwise_stable = false;
  bool stable_with_transfers = false;
  bool zero_tie = false;
};

struct StableEnumeration {
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  bool transfers = false;
  std::size_t graphs_examined = 0;
  /// Stable topologies under the chosen predicate, in edge-mask order.
  std::vector<StableTopology> stable;
  /// Minimum social cost over every connected labeled graph.
  Rational optimum{0};
  std::optional<Rational> min_stable;
  std::optional<Rational> max_stable;
  /// Stable topologies whose verdict hinged on an exactly zero change.
  std::size_t zero_tie_count = 0;
};

/// Exhaustive search over connected labeled graphs with n_a TypeA then n_b TypeB players.
[[nodiscard]] inline StableEnumeration enumerate_stable(std::size_t n_a, std::size_t n_b, const GameParams& p,
                                                        bool transfers) {
  StableEnumeration out;
  out.n_a = n_a;
  out.n_b = n_b;
  out.transfers = transfers;
  std::optional<Rational> optimum;
  for_each_labeled_graph(n_a, n_b, true, [&](Topology t, std::uint64_t mask) {
    ++out.graphs_examined;
    const Rational cost = social_cost(t, p).finite_part;
    if (!optimum || cost < *optimum) optimum = cost;
    const auto basic = is_pairwise_stable(t, p);
    const auto shared = is_stable_with_transfers(t, p);
    const auto& chosen = transfers ? shared : basic;
    if (!chosen.stable) return;
    if (!out.min_stable || cost < *out.min_stable) out.min_stable = cost;
    if (!out.max_stable || cost > *out.max_stable) out.max_stable = cost;
    if (chosen.zero_tie) ++out.zero_tie_count;
    out.stable.push_back({std::move(t), mask, cost, basic.stable, shared.stable, chosen.zero_tie});
  });
  out.optimum = optimum.value_or(Rational(0));
  return out;
}

}  // namespace nfg
