#include "nfg/canonical.hpp"
#include "nfg/stability.hpp"

#include "support/oracles.hpp"

#include <catch_amalgamated.hpp>

using namespace nfg;

namespace {
Rational R(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }

Topology complete(std::size_t n, PlayerType type) {
  Topology t(std::vector<PlayerType>(n, type));
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) t.add_link(u, v);
  return t;
}

/// Re-derives a witness's deltas and checks it really violates stability.
void check_witness(const Topology& t, const GameParams& p, const DeviationWitness& w, bool transfers) {
  const auto action = w.kind == DeviationKind::UnilateralRemoval ? LinkAction::Remove : LinkAction::Add;
  const auto lo = delta_cost(t, p, w.pair.lo, w.pair, action);
  const auto hi = delta_cost(t, p, w.pair.hi, w.pair, action);
  CHECK(lo == w.lo_delta);
  CHECK(hi == w.hi_delta);
  if (transfers)
    CHECK((lo + hi).is_negative());
  else if (action == LinkAction::Remove)
    CHECK((lo.is_negative() || hi.is_negative()));
  else
    CHECK((lo.is_negative() && hi.is_negative()));
}
}  // namespace

TEST_CASE("clique and path examples") {
  const auto half = GameParams::uniform(R(1, 2), R(2));
  CHECK(is_pairwise_stable(complete(3, PlayerType::TypeB), half).stable);

  const auto v = is_pairwise_stable(oracle::path(3), half);
  CHECK_FALSE(v.stable);
  REQUIRE(v.witness);
  CHECK(v.witness->kind == DeviationKind::BilateralAddition);
  CHECK(v.witness->pair == Link(0, 2));
  CHECK(v.witness->lo_delta == CostDelta{0, R(-1, 2)});
  CHECK(v.witness->hi_delta == CostDelta{0, R(-1, 2)});

  const Topology apart(std::vector<PlayerType>(3, PlayerType::TypeB));
  CHECK_THROWS_AS(is_pairwise_stable(apart, half), std::domain_error);
}

TEST_CASE("canonical optima under both stability notions") {
  const auto p = GameParams::uniform(R(2), R(3));
  CHECK(is_pairwise_stable(build(StarOnClique{}, 3, 4), p).stable);

  // (A+1)/2 > c: the full bipartite attachment is stable once transfers are allowed.
  const auto cheap = GameParams::uniform(R(2), R(4));
  CHECK(is_stable_with_transfers(build(FullBipartiteOnClique{}, 3, 4), cheap).stable);

  // (A+1)/2 < c: every extra B-A link has summed removal gain 2c - A - 1 > 0.
  const auto dear = GameParams::uniform(R(4), R(4));
  const auto full = build(FullBipartiteOnClique{}, 3, 4);
  const auto verdict = is_stable_with_transfers(full, dear);
  CHECK_FALSE(verdict.stable);
  REQUIRE(verdict.witness);
  CHECK(verdict.witness->kind == DeviationKind::UnilateralRemoval);
  CHECK((verdict.witness->lo_delta + verdict.witness->hi_delta) == CostDelta{0, -(2 * R(4) - R(4) - 1)});
}

TEST_CASE("small enumerations") {
  const auto k3 = enumerate_stable(0, 3, GameParams::uniform(R(1, 2), R(2)), false);
  REQUIRE(k3.stable.size() == 1);
  CHECK(k3.stable.front().topology == complete(3, PlayerType::TypeB));

  const auto core = enumerate_stable(3, 0, GameParams::uniform(R(2), R(4)), false);
  REQUIRE(core.stable.size() == 1);
  CHECK(core.stable.front().topology == complete(3, PlayerType::TypeA));

  const auto mixed = enumerate_stable(1, 3, GameParams::uniform(R(2), R(4)), false);
  bool has_star = false;
  for (const auto& s : mixed.stable) has_star = has_star || s.topology == build(StarOnClique{}, 1, 3);
  CHECK(has_star);
  CHECK(mixed.graphs_examined == 38);
}

TEST_CASE("witnesses are sound and transfer stability implies basic addition stability") {
  std::mt19937_64 rng(21);
  const std::vector<GameParams> grid{GameParams::uniform(R(3, 2), R(2)), GameParams::uniform(R(2), R(4)),
                                     GameParams::make(R(1), R(3), R(4))};
  for (int round = 0; round < 80; ++round) {
    auto t = oracle::random_topology(rng, 2, 4, 0.45);
    if (!is_connected(t)) continue;
    for (const auto& p : grid) {
      const auto basic = is_pairwise_stable(t, p);
      const auto shared = is_stable_with_transfers(t, p);
      if (basic.witness) check_witness(t, p, *basic.witness, false);
      if (shared.witness) check_witness(t, p, *shared.witness, true);
      if (shared.stable)
        for (const auto& pair : canonical_pairs(t.size())) {
          if (t.has_link(pair.lo, pair.hi)) continue;
          const auto a = delta_cost(t, p, pair.lo, pair, LinkAction::Add);
          const auto b = delta_cost(t, p, pair.hi, pair, LinkAction::Add);
          CHECK_FALSE((a.is_negative() && b.is_negative()));
        }
    }
  }
}

TEST_CASE("stable topologies keep type-A players adjacent when c_A < A") {
  for (const auto& p : {GameParams::uniform(R(2), R(4)), GameParams::uniform(R(3), R(4))}) {
    const auto e = enumerate_stable(2, 3, p, false);
    for (const auto& s : e.stable) CHECK(s.topology.has_link(0, 1));
  }
}

TEST_CASE("price of stability is one on the canonical regime") {
  // (A+1)/2 <= c.
  const auto p = GameParams::uniform(R(3), R(4));
  const auto e = enumerate_stable(2, 3, p, false);
  REQUIRE(e.min_stable);
  CHECK(*e.min_stable == e.optimum);
  CHECK(e.optimum == oracle::social_cost(build(StarOnClique{}, 2, 3), p));
}
