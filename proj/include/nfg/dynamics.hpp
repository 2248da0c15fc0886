#pragma once

#include "nfg/canonical.hpp"
#include "nfg/cost.hpp"
#include "nfg/monetary.hpp"

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace nfg {

/// R2a lets a player chain acts that pay off only at the end of its turn;
/// R2b requires every single act to pay off.
enum class DynamicRule : std::uint8_t { R2a, R2b };

enum class Preference : std::uint8_t { None, PrefOrder1, PrefOrder2 };

struct RoundRobin {};
struct UniformRandom {
  std::uint64_t seed = 0;
};
using TurnOrder = std::variant<RoundRobin, UniformRandom>;

struct DynamicsConfig {
  DynamicRule rule = DynamicRule::R2a;
  bool transfers = false;
  Preference preference = Preference::None;
  std::vector<PlayerType> arrival_schedule;
  TurnOrder turn_order = RoundRobin{};
  /// Turns after the arrival phase; 0 means 10 * N^2.
  std::size_t max_turns = 0;
  /// Acts within one turn; 0 means 2 * N^2.
  std::size_t acts_cap_per_turn = 0;
  /// Seeds random tie-breaks between equally priced offers.
  std::uint64_t seed = 0;
};

enum class EventKind : std::uint8_t { Arrival, LinkAdded, LinkRemoved };

inline std::string event_name(EventKind k) {
  switch (k) {
    case EventKind::Arrival: return "arrival";
    case EventKind::LinkAdded: return "link_added";
    default: return "link_removed";
  }
}

struct TraceEvent {
  std::size_t turn = 0;
  /// Act index within the turn, from 0.
  std::size_t act = 0;
  EventKind kind{};
  /// Arriving player, or the player whose turn it is.
  NodeId actor{};
  Link pair;
  PlayerType arrival_type = PlayerType::TypeB;
  /// Paid by the actor to the other endpoint when the link formed.
  Rational payment{0};
};

enum class Region : std::uint8_t { R1, R2, R3, R4, Undefined };

inline std::string region_name(Region r) {
  switch (r) {
    case Region::R1: return "R1";
    case Region::R2: return "R2";
    case Region::R3: return "R3";
    case Region::R4: return "R4";
    default: return "Undefined";
  }
}

/// Position of the state on the two sign conditions that steer convergence.
/// term1 < 0: TypeA players gain by linking to the TypeB hub.
/// term2 > 0: a fresh TypeB player prefers the hub over the first TypeA linker.
struct PhaseState {
  std::optional<NodeId> hub;
  std::optional<NodeId> first_linker;
  std::size_t hub_stubs = 0;
  std::size_t linker_stubs = 0;
  std::size_t dual_stubs = 0;
  std::size_t core_links_to_hub = 0;
  std::size_t type_a_present = 0;
  bool hub_linked_to_linker = false;
  Rational term1{0};
  Rational term2{0};
  Region region = Region::Undefined;
  bool on_nullcline = false;
};

struct PhaseSnapshot {
  std::size_t turn = 0;
  PhaseState state;
};

struct GameTrace {
  std::vector<TraceEvent> events;
  std::vector<PhaseSnapshot> snapshots;
  /// Number of turns up to and including the last turn that changed the topology.
  std::optional<std::size_t> converged_at;
  std::size_t turns_played = 0;
  std::size_t arrival_turns = 0;
  bool acts_cap_exceeded = false;
  std::optional<NodeId> first_linker;
  PaymentLedger ledger;
};

struct GameResult {
  Topology final_topology;
  GameTrace trace;
};

// ---------------------------------------------------------------------------
// Phase classification

namespace detail {

inline std::optional<NodeId> type_b_hub(const Topology& t) {
  std::optional<NodeId> hub;
  std::size_t best = 0;
  for (NodeId v = 0; v < t.size(); ++v) {
    if (t.type(v) != PlayerType::TypeB) continue;
    std::size_t b_degree = 0;
    for (NodeId u : t.neighbors(v)) b_degree += t.type(u) == PlayerType::TypeB;
    if (b_degree > best) {
      best = b_degree;
      hub = v;
    }
  }
  return hub;
}

inline std::vector<NodeId> neighbors_of_type(const Topology& t, NodeId v, PlayerType type) {
  std::vector<NodeId> out;
  for (NodeId u : t.neighbors(v))
    if (t.type(u) == type) out.push_back(u);
  return out;
}

}  // namespace detail

/// The hub is the TypeB player with most TypeB neighbours (lowest id on ties).
[[nodiscard]] inline PhaseState phase_state(const Topology& t, const GameParams& p, std::optional<NodeId> first_linker,
                                            bool transfers) {
  PhaseState s;
  s.first_linker = first_linker;
  s.hub = detail::type_b_hub(t);
  s.type_a_present = t.count(PlayerType::TypeA);
  std::vector<NodeId> hub_b, linker_b;
  if (s.hub) {
    hub_b = detail::neighbors_of_type(t, *s.hub, PlayerType::TypeB);
    s.core_links_to_hub = detail::neighbors_of_type(t, *s.hub, PlayerType::TypeA).size();
  }
  if (first_linker) linker_b = detail::neighbors_of_type(t, *first_linker, PlayerType::TypeB);
  if (s.hub && first_linker) {
    s.hub_linked_to_linker = t.has_link(*s.hub, *first_linker);
    std::erase(linker_b, *s.hub);
  }
  s.hub_stubs = hub_b.size();
  s.linker_stubs = linker_b.size();
  for (NodeId v : hub_b) s.dual_stubs += std::find(linker_b.begin(), linker_b.end(), v) != linker_b.end();

  const Rational& w = p.importance();
  const Rational stubs(static_cast<std::int64_t>(s.hub_stubs));
  const Rational fan(static_cast<std::int64_t>(s.linker_stubs));
  const Rational core_gap = 1 + static_cast<std::int64_t>(s.type_a_present) - static_cast<std::int64_t>(s.core_links_to_hub);
  s.term1 = (transfers ? 2 * p.mean_link_cost() - w : p.link_cost_a()) - stubs - 1;
  s.term2 = s.hub_linked_to_linker ? -w * core_gap + 1 + stubs - fan : -w * core_gap + 2 * (1 + stubs - fan);
  if (!s.hub || !first_linker) return s;
  s.on_nullcline = s.term1.numerator() == 0 || s.term2.numerator() == 0;
  if (s.on_nullcline) return s;
  const bool t1_neg = s.term1 < 0, t2_pos = s.term2 > 0;
  if (t1_neg && t2_pos) s.region = Region::R3;
  else if (!t1_neg && !t2_pos) s.region = Region::R1;
  else if (!t1_neg && t2_pos) s.region = Region::R4;
  else s.region = Region::R2;
  return s;
}

struct StructureReport {
  bool decomposes = true;
  std::vector<std::string> issues;
  std::size_t cross_tier_links = 0;
};

/// Checks that the state is a TypeA clique, a TypeB star on the hub, a fan of TypeB stubs on
/// the first linker, links from the core to the hub, and only the permitted cross-tier links
/// (hub to a linker stub, hub stub to linker stub, TypeA to hub stub).
[[nodiscard]] inline StructureReport classify_structure(const Topology& t, std::optional<NodeId> first_linker) {
  StructureReport r;
  auto flag = [&](std::string issue) {
    r.decomposes = false;
    r.issues.push_back(std::move(issue));
  };
  const auto hub = detail::type_b_hub(t);
  std::vector<bool> hub_stub(t.size(), false), linker_stub(t.size(), false);
  if (hub)
    for (NodeId v : t.neighbors(*hub)) hub_stub[v] = t.type(v) == PlayerType::TypeB;
  if (first_linker)
    for (NodeId v : t.neighbors(*first_linker)) linker_stub[v] = t.type(v) == PlayerType::TypeB && v != hub;
  for (NodeId v = 0; v < t.size(); ++v)
    if (t.type(v) == PlayerType::TypeB && v != hub && !hub_stub[v] && !linker_stub[v])
      flag("TypeB player " + std::to_string(v) + " attached to neither hub nor first linker");
  for (const auto& l : t.links()) {
    const auto tu = t.type(l.lo), tv = t.type(l.hi);
    if (tu == PlayerType::TypeA && tv == PlayerType::TypeA) continue;
    const bool touches_hub = hub && (l.lo == *hub || l.hi == *hub);
    const bool touches_linker = first_linker && (l.lo == *first_linker || l.hi == *first_linker);
    if (touches_hub || touches_linker) {
      // hub-to-core, hub-to-stub, linker-to-stub; hub-to-linker-stub counts as cross-tier.
      if (touches_hub && linker_stub[l.other(*hub)] && !touches_linker) ++r.cross_tier_links;
      continue;
    }
    if (tu == PlayerType::TypeB && tv == PlayerType::TypeB) {
      if ((hub_stub[l.lo] && linker_stub[l.hi]) || (hub_stub[l.hi] && linker_stub[l.lo])) {
        ++r.cross_tier_links;
        continue;
      }
    } else {
      const NodeId b = tu == PlayerType::TypeB ? l.lo : l.hi;
      if (hub_stub[b]) {
        ++r.cross_tier_links;
        continue;
      }
    }
    flag("link " + std::to_string(l.lo) + "-" + std::to_string(l.hi) + " fits no permitted pattern");
  }
  const auto as = t.players_of(PlayerType::TypeA);
  if (!detail::type_a_clique_complete(t, as)) flag("TypeA players do not form a clique");
  return r;
}

// ---------------------------------------------------------------------------
// Engine

namespace detail {

struct PlannedAct {
  LinkAction action{};
  Link pair;
  NodeId partner{};
  Rational payment{0};
};

class Engine {
 public:
  Engine(const DynamicsConfig& cfg, const GameParams& p) : cfg_(cfg), params_(p), tie_rng_(cfg.seed) {
    if (const auto* random = std::get_if<UniformRandom>(&cfg.turn_order)) order_rng_.seed(random->seed);
    const auto n = cfg.arrival_schedule.size();
    acts_cap_ = cfg.acts_cap_per_turn ? cfg.acts_cap_per_turn : 2 * n * n;
    max_turns_ = cfg.max_turns ? cfg.max_turns : 10 * n * n;
  }

  GameResult run() {
    std::size_t last_change = 0;
    bool any_change = false;
    for (PlayerType type : cfg_.arrival_schedule) {
      const NodeId id = topo_.add_player(type);
      trace_.events.push_back({turn_, 0, EventKind::Arrival, id, Link(id, id), type, Rational(0)});
      if (play_turn(id)) {
        last_change = turn_;
        any_change = true;
      }
      ++turn_;
    }
    trace_.arrival_turns = turn_;
    const std::size_t n = topo_.size();
    std::vector<bool> idle(n, false);
    std::size_t idle_count = 0;
    NodeId next_in_cycle = 0;
    for (std::size_t step = 0; step < max_turns_ && n > 0; ++step, ++turn_) {
      NodeId r;
      if (std::holds_alternative<RoundRobin>(cfg_.turn_order)) {
        r = next_in_cycle;
        next_in_cycle = static_cast<NodeId>((next_in_cycle + 1) % n);
      } else {
        std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
        r = pick(order_rng_);
      }
      if (play_turn(r)) {
        last_change = turn_;
        any_change = true;
        std::fill(idle.begin(), idle.end(), false);
        idle_count = 0;
      } else if (!idle[r]) {
        idle[r] = true;
        ++idle_count;
      }
      if (idle_count == n) {
        trace_.converged_at = any_change ? last_change + 1 : 0;
        ++turn_;
        break;
      }
    }
    if (n <= 1) trace_.converged_at = turn_;
    trace_.turns_played = turn_;
    trace_.ledger = ledger_;
    return {topo_, std::move(trace_)};
  }

 private:
  CostValue cost(const Topology& t, NodeId i) const { return player_cost(t, params_, i); }

  /// Best single act for r on `t`, or nothing when no act pays off.
  template <class Rng>
  std::optional<PlannedAct> best_single_act(Topology& t, NodeId r, Rng& rng) const {
    return cfg_.transfers ? best_priced_act(t, r, rng) : best_unpriced_act(t, r);
  }

  std::optional<PlannedAct> best_unpriced_act(Topology& t, NodeId r) const {
    const auto before = cost(t, r);
    std::optional<PlannedAct> best;
    CostDelta best_delta;
    auto consider = [&](PlannedAct act, const CostDelta& d) {
      if (!d.is_negative()) return;
      if (!best || d < best_delta) {
        best = act;
        best_delta = d;
      }
    };
    for (NodeId j = 0; j < t.size(); ++j) {
      if (j == r || t.has_link(r, j)) continue;
      const auto partner_before = cost(t, j);
      t.add_link(r, j);
      const auto d = cost(t, r) - before;
      const bool consent = d.is_negative() && (cost(t, j) - partner_before).is_negative();
      t.remove_link(r, j);
      if (consent) consider({LinkAction::Add, Link(r, j), j, Rational(0)}, d);
    }
    for (NodeId j : std::vector<NodeId>(t.neighbors(r).begin(), t.neighbors(r).end())) {
      t.remove_link(r, j);
      const auto d = cost(t, r) - before;
      t.add_link(r, j);
      consider({LinkAction::Remove, Link(r, j), j, Rational(0)}, d);
    }
    return best;
  }

  template <class Rng>
  std::optional<PlannedAct> best_priced_act(Topology& t, NodeId r, Rng& rng) const {
    const auto candidates = addition_candidates(t, params_, r);
    std::optional<LinkQuote> quote;
    if (cfg_.preference == Preference::PrefOrder1) {
      quote = pref1_from(candidates, r);
    } else if (cfg_.preference == Preference::PrefOrder2) {
      quote = pref2_from(candidates, r, rng);
    } else {
      for (const auto& c : candidates) {
        LinkQuote q{r, c.partner, compensation(c.partner_delta), c.actor_delta, c.partner_delta};
        if (q.effective_delta().is_negative() && (!quote || q.effective_delta() < quote->effective_delta())) quote = q;
      }
    }
    if (quote) return PlannedAct{LinkAction::Add, Link(r, quote->partner), quote->partner, quote->payment};

    // Joint removals: the pair drops a link when their summed change is negative.
    std::optional<PlannedAct> best;
    CostDelta best_joint;
    const auto before_r = cost(t, r);
    for (NodeId j : std::vector<NodeId>(t.neighbors(r).begin(), t.neighbors(r).end())) {
      const auto before_j = cost(t, j);
      t.remove_link(r, j);
      const auto joint = (cost(t, r) - before_r) + (cost(t, j) - before_j);
      t.add_link(r, j);
      if (joint.is_negative() && (!best || joint < best_joint)) {
        best = PlannedAct{LinkAction::Remove, Link(r, j), j, Rational(0)};
        best_joint = joint;
      }
    }
    return best;
  }

  /// Drop every link, then re-attach greedily from isolation. Returns the act list when the
  /// end state leaves r connected and strictly better off (net of payments made meanwhile).
  std::optional<std::vector<PlannedAct>> grand_plan(NodeId r) {
    if (topo_.type(r) != PlayerType::TypeB || topo_.degree(r) == 0) return std::nullopt;
    Topology sim = topo_;
    auto rng = tie_rng_;
    std::vector<PlannedAct> acts;
    for (NodeId j : std::vector<NodeId>(sim.neighbors(r).begin(), sim.neighbors(r).end())) {
      sim.remove_link(r, j);
      acts.push_back({LinkAction::Remove, Link(r, j), j, Rational(0)});
    }
    Rational outlay(0);
    while (acts.size() < acts_cap_) {
      auto act = best_single_act(sim, r, rng);
      if (!act) break;
      sim.apply(act->pair, act->action);
      outlay += act->payment;
      acts.push_back(*act);
    }
    auto after = cost(sim, r);
    after.finite_part += outlay;
    if (!after.is_finite() || !(after < cost(topo_, r))) return std::nullopt;
    planned_rng_ = rng;
    return acts;
  }

  void apply(NodeId r, const PlannedAct& act, std::size_t index) {
    topo_.apply(act.pair, act.action);
    if (act.action == LinkAction::Add) {
      if (cfg_.transfers) ledger_.record_transfer(r, act.partner, act.payment);
      if (!trace_.first_linker && topo_.type(act.pair.lo) != topo_.type(act.pair.hi))
        trace_.first_linker = topo_.type(act.pair.lo) == PlayerType::TypeA ? act.pair.lo : act.pair.hi;
    } else {
      ledger_.forget_link(act.pair);
    }
    trace_.events.push_back({turn_, index, act.action == LinkAction::Add ? EventKind::LinkAdded : EventKind::LinkRemoved,
                             r, act.pair, topo_.type(r), act.payment});
  }

  /// Plays one turn; returns whether the topology changed.
  bool play_turn(NodeId r) {
    std::size_t acts = 0;
    while (true) {
      if (acts >= acts_cap_) {
        trace_.acts_cap_exceeded = true;
        break;
      }
      if (auto act = best_single_act(topo_, r, tie_rng_)) {
        apply(r, *act, acts++);
        continue;
      }
      if (cfg_.rule != DynamicRule::R2a) break;
      auto plan = grand_plan(r);
      if (!plan) break;
      tie_rng_ = planned_rng_;
      for (const auto& act : *plan) apply(r, act, acts++);
    }
    trace_.snapshots.push_back({turn_, phase_state(topo_, params_, trace_.first_linker, cfg_.transfers)});
    return acts > 0;
  }

  const DynamicsConfig& cfg_;
  GameParams params_;
  Topology topo_;
  PaymentLedger ledger_;
  GameTrace trace_;
  std::mt19937_64 order_rng_;
  std::mt19937_64 tie_rng_;
  std::mt19937_64 planned_rng_;
  std::size_t acts_cap_ = 0;
  std::size_t max_turns_ = 0;
  std::size_t turn_ = 0;
};

}  // namespace detail

/// Plays arrivals in schedule order (each arrival takes a turn at once), then turns in the
/// configured order until every player has had a turn without acting, or max_turns.
[[nodiscard]] inline GameResult run_game(const DynamicsConfig& cfg, const GameParams& p) {
  if (cfg.arrival_schedule.empty()) throw std::domain_error("arrival schedule is empty");
  if (cfg.preference != Preference::None && !cfg.transfers)
    throw std::domain_error("preference orders need transfers enabled");
  return detail::Engine(cfg, p).run();
}

/// Rebuilds the final topology from the event list alone.
[[nodiscard]] inline Topology replay(const GameTrace& trace) {
  Topology t;
  for (const auto& e : trace.events) {
    if (e.kind == EventKind::Arrival)
      t.add_player(e.arrival_type);
    else
      t.apply(e.pair, e.kind == EventKind::LinkAdded ? LinkAction::Add : LinkAction::Remove);
  }
  return t;
}

/// Number of passes of N turns (arrivals included) needed to reach the final state.
[[nodiscard]] inline std::optional<std::size_t> passes_to_converge(const GameTrace& trace, std::size_t players) {
  if (!trace.converged_at || players == 0) return std::nullopt;
  return (*trace.converged_at + players - 1) / players;
}

// ---------------------------------------------------------------------------
// Convergence statistics

struct ConvergenceReport {
  std::size_t players = 0;
  std::size_t trials = 0;
  /// Per trial, turns until the last change; nullopt when max_turns ran out first.
  std::vector<std::optional<std::size_t>> convergence_turns;
  std::size_t not_converged = 0;
  /// survival[t] = share of trials not converged by turn t.
  std::vector<double> survival;
  std::size_t window_lo = 0;
  std::size_t window_hi = 0;
  std::size_t fit_points = 0;
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
};

inline std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (trial + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Fills survival and the log-linear fit over turns [2N, 10N] from convergence_turns.
/// `horizon` is the largest observed convergence turn.
inline void fit_survival_tail(ConvergenceReport& out, std::size_t horizon) {
  const std::size_t trials = out.trials;
  out.window_lo = 2 * out.players;
  out.window_hi = 10 * out.players;
  horizon = std::max(horizon, out.window_hi) + 1;
  out.survival.assign(horizon, 0.0);
  for (std::size_t t = 0; t < horizon; ++t) {
    std::size_t alive = 0;
    for (const auto& c : out.convergence_turns) alive += !c || *c > t;
    out.survival[t] = trials ? static_cast<double>(alive) / static_cast<double>(trials) : 0.0;
  }
  std::vector<double> xs, ys;
  for (std::size_t t = out.window_lo; t <= out.window_hi && t < horizon; ++t) {
    if (out.survival[t] <= 0) continue;
    xs.push_back(static_cast<double>(t));
    ys.push_back(std::log(out.survival[t]));
  }
  out.fit_points = xs.size();
  if (xs.size() >= 2) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    out.slope = denom != 0 ? (n * sxy - sx * sy) / denom : 0;
    out.intercept = (sy - out.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double mean_y = sy / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double fit = out.intercept + out.slope * xs[i];
      ss_res += (ys[i] - fit) * (ys[i] - fit);
      ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
    }
    out.r_squared = ss_tot > 0 ? 1 - ss_res / ss_tot : 1.0;
  }
}

/// Runs independent trials (random orders reseeded per trial) and fits a line to
/// log survival over turns [2N, 10N], skipping turns where no trial survives.
[[nodiscard]] inline ConvergenceReport convergence_statistics(const DynamicsConfig& cfg, const GameParams& p,
                                                              std::size_t trials) {
  ConvergenceReport out;
  out.players = cfg.arrival_schedule.size();
  out.trials = trials;
  std::size_t horizon = 0;
  const auto base_seed = std::holds_alternative<UniformRandom>(cfg.turn_order)
                             ? std::get<UniformRandom>(cfg.turn_order).seed
                             : std::uint64_t{0};
  for (std::size_t i = 0; i < trials; ++i) {
    DynamicsConfig c = cfg;
    if (std::holds_alternative<UniformRandom>(cfg.turn_order)) c.turn_order = UniformRandom{trial_seed(base_seed, i)};
    c.seed = trial_seed(cfg.seed, i);
    const auto result = run_game(c, p);
    out.convergence_turns.push_back(result.trace.converged_at);
    if (result.trace.converged_at)
      horizon = std::max(horizon, *result.trace.converged_at);
    else
      ++out.not_converged;
  }
  fit_survival_tail(out, horizon);
  return out;
}

}  // namespace nfg
