#pragma once

#include "nfg/cost.hpp"
#include "nfg/stability.hpp"

#include <optional>
#include <string>
#include <variant>

namespace nfg {

/// Every TypeB player hangs off one TypeA node of a complete TypeA core.
struct StarOnClique {};
/// Every TypeB player links to every TypeA node of a complete TypeA core.
struct FullBipartiteOnClique {};
/// `lines` paths of `length` TypeB players hanging off TypeA node 0.
struct LinesOnClique {
  std::size_t lines = 1;
  std::size_t length = 1;
};
/// A TypeB path whose ends attach to TypeA nodes 0 and 1.
struct LoopExample {
  std::size_t length = 1;
};
struct FullClique {};
/// One TypeB hub linked to every TypeA node, every other TypeB player a stub of the hub.
struct CliqueAbsorbedStar {};

using CanonicalKind =
    std::variant<StarOnClique, FullBipartiteOnClique, LinesOnClique, LoopExample, FullClique, CliqueAbsorbedStar>;

inline std::string kind_name(const CanonicalKind& kind) {
  struct Namer {
    std::string operator()(StarOnClique) const { return "StarOnClique"; }
    std::string operator()(FullBipartiteOnClique) const { return "FullBipartiteOnClique"; }
    std::string operator()(const LinesOnClique& k) const {
      return "LinesOnClique(" + std::to_string(k.lines) + "," + std::to_string(k.length) + ")";
    }
    std::string operator()(const LoopExample& k) const { return "LoopExample(" + std::to_string(k.length) + ")"; }
    std::string operator()(FullClique) const { return "FullClique"; }
    std::string operator()(CliqueAbsorbedStar) const { return "CliqueAbsorbedStar"; }
  };
  return std::visit(Namer{}, kind);
}

namespace detail {

inline void add_type_a_clique(Topology& t, std::size_t n_a) {
  for (NodeId u = 0; u < n_a; ++u)
    for (NodeId v = u + 1; v < n_a; ++v) t.add_link(u, v);
}

}  // namespace detail

/// Players 0..n_a-1 are TypeA, the rest TypeB. Throws std::domain_error on infeasible sizes.
[[nodiscard]] inline Topology build(const CanonicalKind& kind, std::size_t n_a, std::size_t n_b) {
  Topology t(typed_players(n_a, n_b));
  const auto first_b = static_cast<NodeId>(n_a);
  const auto n = static_cast<NodeId>(n_a + n_b);
  auto need_core = [&](std::size_t min_a) {
    if (n_a < min_a) throw std::domain_error(kind_name(kind) + " needs at least " + std::to_string(min_a) + " TypeA players");
  };
  if (std::holds_alternative<FullClique>(kind)) {
    detail::add_type_a_clique(t, n);
    return t;
  }
  if (std::holds_alternative<StarOnClique>(kind)) {
    need_core(1);
    detail::add_type_a_clique(t, n_a);
    for (NodeId b = first_b; b < n; ++b) t.add_link(0, b);
  } else if (std::holds_alternative<FullBipartiteOnClique>(kind)) {
    need_core(1);
    detail::add_type_a_clique(t, n_a);
    for (NodeId b = first_b; b < n; ++b)
      for (NodeId a = 0; a < first_b; ++a) t.add_link(a, b);
  } else if (const auto* lines = std::get_if<LinesOnClique>(&kind)) {
    need_core(1);
    if (lines->lines == 0 || lines->length == 0 || lines->lines * lines->length != n_b)
      throw std::domain_error("LinesOnClique needs lines * length == n_b with both positive");
    detail::add_type_a_clique(t, n_a);
    NodeId next = first_b;
    for (std::size_t line = 0; line < lines->lines; ++line) {
      NodeId prev = 0;
      for (std::size_t step = 0; step < lines->length; ++step, ++next) {
        t.add_link(prev, next);
        prev = next;
      }
    }
  } else if (const auto* loop = std::get_if<LoopExample>(&kind)) {
    need_core(2);
    if (loop->length == 0 || loop->length != n_b) throw std::domain_error("LoopExample needs length == n_b >= 1");
    detail::add_type_a_clique(t, n_a);
    for (NodeId b = first_b; b + 1 < n; ++b) t.add_link(b, b + 1);
    t.add_link(0, first_b);
    t.add_link(1, n - 1);
  } else {
    need_core(1);
    if (n_b == 0) throw std::domain_error("CliqueAbsorbedStar needs a TypeB hub");
    detail::add_type_a_clique(t, n_a);
    for (NodeId a = 0; a < first_b; ++a) t.add_link(a, first_b);
    for (NodeId b = first_b + 1; b < n; ++b) t.add_link(first_b, b);
  }
  return t;
}

/// Loops and bare cliques have no closed form; their cost comes from direct summation.
[[nodiscard]] inline bool has_closed_form(const CanonicalKind& kind) {
  return !std::holds_alternative<LoopExample>(kind) && !std::holds_alternative<FullClique>(kind);
}

/// Exact social cost of the built topology, by counting link and hop terms.
[[nodiscard]] inline Rational closed_form_cost(const CanonicalKind& kind, std::size_t n_a, std::size_t n_b,
                                               const GameParams& p) {
  const Rational a(static_cast<std::int64_t>(n_a));
  const Rational b(static_cast<std::int64_t>(n_b));
  const Rational& w = p.importance();
  const Rational c = p.mean_link_cost();
  const Rational core = a * (a - 1) * (p.link_cost_a() + w);
  if (n_a == 0) throw std::domain_error("closed forms need a TypeA core");
  if (std::holds_alternative<StarOnClique>(kind))
    return 2 * b * (b - 1 + c + (w + 1) * (a - Rational(1, 2))) + core;
  if (std::holds_alternative<FullBipartiteOnClique>(kind))
    return 2 * b * (b - 1 + ((w + 1) / 2 + c) * a) + core;
  if (std::holds_alternative<CliqueAbsorbedStar>(kind)) {
    if (n_b == 0) throw std::domain_error("CliqueAbsorbedStar needs a TypeB hub");
    const Rational stubs = b - 1;
    return core + 2 * c * a + 2 * p.link_cost_b() * stubs + (w + 1) * a + 2 * stubs + 2 * (w + 1) * a * stubs +
           2 * stubs * (stubs - 1);
  }
  if (const auto* lines = std::get_if<LinesOnClique>(&kind)) {
    if (lines->lines == 0 || lines->length == 0 || lines->lines * lines->length != n_b)
      throw std::domain_error("LinesOnClique needs lines * length == n_b with both positive");
    const Rational m(static_cast<std::int64_t>(lines->lines));
    const Rational k(static_cast<std::int64_t>(lines->length));
    const Rational links = 2 * c * m + 2 * p.link_cost_b() * m * (k - 1);
    const Rational to_root = (w + 1) * m * k * (k + 1) / 2;
    const Rational to_rest_of_core = (w + 1) * (a - 1) * m * k * (k + 3) / 2;
    const Rational within_line = m * k * (k * k - 1) / 3;
    const Rational across_lines = m * (m - 1) * k * k * (k + 1);
    return core + links + to_root + to_rest_of_core + within_line + across_lines;
  }
  throw std::domain_error("no closed form for " + kind_name(kind));
}

/// Reduction in a path end's hop sum when it links to the other end of a k-node path.
[[nodiscard]] inline Rational shortcut_gain(std::int64_t k) {
  if (k < 2) throw std::domain_error("shortcut_gain needs k >= 2");
  return Rational(k * (k - 2) + k % 2, 4);
}

/// Line length of the poor equilibrium: min(floor(sqrt(3 c_A)), floor(sqrt(4 c_B / 5))).
[[nodiscard]] inline std::int64_t poor_equilibrium_line_length(const GameParams& p) {
  return std::min(floor_sqrt(3 * p.link_cost_a()), floor_sqrt(p.link_cost_b() * 4 / 5));
}

/// Whether a loop of k TypeB players satisfies (k+1)^2 < 8c < 4(k+1)^2 and c < importance.
[[nodiscard]] inline bool loop_example_window(std::int64_t k, const GameParams& p) {
  const Rational eight_c = 8 * p.mean_link_cost();
  const Rational sq((k + 1) * (k + 1));
  return sq < eight_c && eight_c < 4 * sq && p.mean_link_cost() < p.importance();
}

enum class Shape : std::uint8_t { Complete, StarOnClique, FullBipartiteOnClique, CliqueAbsorbedStar, Other };

inline std::string shape_name(Shape s) {
  switch (s) {
    case Shape::Complete: return "Complete";
    case Shape::StarOnClique: return "StarOnClique";
    case Shape::FullBipartiteOnClique: return "FullBipartiteOnClique";
    case Shape::CliqueAbsorbedStar: return "CliqueAbsorbedStar";
    default: return "Other";
  }
}

namespace detail {

inline bool type_a_clique_complete(const Topology& t, const std::vector<NodeId>& as) {
  for (std::size_t i = 0; i < as.size(); ++i)
    for (std::size_t j = i + 1; j < as.size(); ++j)
      if (!t.has_link(as[i], as[j])) return false;
  return true;
}

}  // namespace detail

/// Recognizes canonical shapes under any labeling. Complete wins over the other labels;
/// with one TypeA player StarOnClique wins over FullBipartiteOnClique.
[[nodiscard]] inline Shape recognize_shape(const Topology& t) {
  const std::size_t n = t.size();
  if (t.link_count() == n * (n - 1) / 2) return Shape::Complete;
  const auto as = t.players_of(PlayerType::TypeA);
  const auto bs = t.players_of(PlayerType::TypeB);
  if (as.empty() || !detail::type_a_clique_complete(t, as)) return Shape::Other;
  const std::size_t core_links = as.size() * (as.size() - 1) / 2;

  if (t.link_count() == core_links + bs.size() && !bs.empty() && t.degree(bs.front()) == 1) {
    const NodeId hub = t.neighbors(bs.front())[0];
    bool star = t.type(hub) == PlayerType::TypeA;
    for (NodeId v : bs) star = star && t.degree(v) == 1 && t.neighbors(v)[0] == hub;
    if (star) return Shape::StarOnClique;
  }
  if (t.link_count() == core_links + as.size() * bs.size()) {
    bool full = true;
    for (NodeId v : bs)
      for (NodeId a : as) full = full && t.has_link(a, v);
    if (full) return Shape::FullBipartiteOnClique;
  }
  if (!bs.empty() && t.link_count() == core_links + as.size() + bs.size() - 1) {
    for (NodeId hub : bs) {
      if (t.degree(hub) != n - 1) continue;
      bool ok = true;
      for (NodeId v : bs) ok = ok && (v == hub || t.degree(v) == 1);
      if (ok) return Shape::CliqueAbsorbedStar;
    }
  }
  return Shape::Other;
}

/// Short human label: "K<n>" for complete graphs, the shape name, or the link list.
inline std::string topology_label(const Topology& t) {
  const auto shape = recognize_shape(t);
  if (shape == Shape::Complete) return "K" + std::to_string(t.size());
  if (shape != Shape::Other) return shape_name(shape);
  std::string out = "links[";
  bool first = true;
  for (const auto& l : t.links()) {
    if (!first) out += ' ';
    first = false;
    out += std::to_string(l.lo) + "-" + std::to_string(l.hi);
  }
  return out + "]";
}

// ---------------------------------------------------------------------------
// Distance bounds

struct BoundTable {
  /// Any player to a TypeB player.
  std::int64_t to_type_b = 0;
  /// TypeA to TypeA, as sqrt(radicand) + offset.
  SqrtExpr type_a_pair;
  /// TypeB to TypeB once transfers are allowed.
  std::int64_t transfers_type_b = 0;
  /// TypeB to the nearest TypeA node once transfers are allowed.
  std::int64_t transfers_b_to_core = 0;
};

/// The four hop-distance bounds for stable topologies with n_a TypeA players.
[[nodiscard]] inline BoundTable distance_bounds(const GameParams& p, std::size_t n_a) {
  BoundTable out;
  const Rational& w = p.importance();
  out.to_type_b = floor_sqrt(4 * p.link_cost_b());
  out.type_a_pair = SqrtExpr{(1 - 2 * w) * (1 - 2 * w) + 4 * p.link_cost_a(), -2 * (w - 1)};
  out.transfers_type_b = std::max<std::int64_t>(floor_sqrt(4 * p.mean_link_cost()), 1);
  const Rational core_weight = w * static_cast<std::int64_t>(n_a);
  const SqrtExpr to_core{core_weight * core_weight + 4 * p.mean_link_cost() * core_weight, -core_weight};
  out.transfers_b_to_core = std::max<std::int64_t>(to_core.floor(), 2);
  return out;
}

struct BoundViolation {
  std::string bound;
  Link pair;
  std::int32_t hops = 0;
};

/// Pairs whose hop distance exceeds a bound. Unreachable pairs are reported with hops = -1.
[[nodiscard]] inline std::vector<BoundViolation> check_distance_bounds(const Topology& t, const GameParams& p,
                                                                       bool transfers) {
  std::vector<BoundViolation> out;
  const auto bounds = distance_bounds(p, t.count(PlayerType::TypeA));
  const auto dist = all_pairs_distances(t);
  const auto as = t.players_of(PlayerType::TypeA);
  for (NodeId u = 0; u < t.size(); ++u) {
    for (NodeId v = u + 1; v < t.size(); ++v) {
      const auto d = dist.at(u, v);
      const auto tu = t.type(u), tv = t.type(v);
      if (d == detail::unreached) {
        out.push_back({"connected", Link(u, v), d});
        continue;
      }
      if ((tu == PlayerType::TypeB || tv == PlayerType::TypeB) && d > bounds.to_type_b)
        out.push_back({"to_type_b", Link(u, v), d});
      if (tu == PlayerType::TypeA && tv == PlayerType::TypeA && !bounds.type_a_pair.admits(Rational(d)))
        out.push_back({"type_a_pair", Link(u, v), d});
      if (transfers && tu == PlayerType::TypeB && tv == PlayerType::TypeB && d > bounds.transfers_type_b)
        out.push_back({"transfers_type_b", Link(u, v), d});
    }
  }
  if (transfers && !as.empty()) {
    for (NodeId v = 0; v < t.size(); ++v) {
      if (t.type(v) != PlayerType::TypeB) continue;
      std::int32_t nearest = -1;
      for (NodeId a : as) {
        const auto d = dist.at(v, a);
        if (d != detail::unreached && (nearest < 0 || d < nearest)) nearest = d;
      }
      if (nearest > bounds.transfers_b_to_core) out.push_back({"transfers_b_to_core", Link(v, as.front()), nearest});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Price of stability / anarchy

enum class PriceMode : std::uint8_t { SmallN, ClosedForm };

struct PriceReport {
  Rational optimum{0};
  std::optional<Rational> price_of_stability;
  /// SmallN: exact worst stable / optimum. ClosedForm: poor-equilibrium cost / optimum.
  std::optional<Rational> price_of_anarchy_lower;
  /// ClosedForm only: worst-stable-cost bound / optimum.
  std::optional<Rational> price_of_anarchy_upper;
  std::optional<std::int64_t> line_length;
};

/// Social-cost bound for any stable topology, from the longest-distance bounds.
[[nodiscard]] inline Rational worst_stable_cost_bound(std::size_t n_a, std::size_t n_b, const GameParams& p) {
  const Rational a(static_cast<std::int64_t>(n_a));
  const Rational b(static_cast<std::int64_t>(n_b));
  return a * a * (p.link_cost_a() + p.importance()) + b * b * (p.link_cost_b() + floor_sqrt(4 * p.link_cost_b())) +
         (p.importance() + 1) * floor_sqrt(4 * p.mean_link_cost()) * a * b;
}

/// Cheapest connected topology among the two canonical candidates.
[[nodiscard]] inline Rational canonical_optimum(std::size_t n_a, std::size_t n_b, const GameParams& p) {
  return std::min(closed_form_cost(StarOnClique{}, n_a, n_b, p), closed_form_cost(FullBipartiteOnClique{}, n_a, n_b, p));
}

[[nodiscard]] inline PriceReport stability_prices(std::size_t n_a, std::size_t n_b, const GameParams& p, bool transfers,
                                                  PriceMode mode) {
  PriceReport out;
  if (mode == PriceMode::SmallN) {
    const auto e = enumerate_stable(n_a, n_b, p, transfers);
    out.optimum = e.optimum;
    if (e.min_stable) out.price_of_stability = *e.min_stable / e.optimum;
    if (e.max_stable) out.price_of_anarchy_lower = *e.max_stable / e.optimum;
    return out;
  }
  out.optimum = canonical_optimum(n_a, n_b, p);
  out.price_of_stability = transfers ? Rational(1) : closed_form_cost(StarOnClique{}, n_a, n_b, p) / out.optimum;
  const auto k = poor_equilibrium_line_length(p);
  if (k >= 1 && n_b % static_cast<std::size_t>(k) == 0 && n_b > 0) {
    out.line_length = k;
    const LinesOnClique lines{n_b / static_cast<std::size_t>(k), static_cast<std::size_t>(k)};
    out.price_of_anarchy_lower = closed_form_cost(lines, n_a, n_b, p) / out.optimum;
  }
  out.price_of_anarchy_upper = worst_stable_cost_bound(n_a, n_b, p) / out.optimum;
  return out;
}

// ---------------------------------------------------------------------------
// Reference cost expressions, kept verbatim for comparison with the exact counts.

/// Clique-absorbed-star cost expression as printed for the star state reached from late core arrivals.
[[nodiscard]] inline Rational printed_absorbed_star_cost(std::size_t n_a, std::size_t n_b, const GameParams& p) {
  const Rational a(static_cast<std::int64_t>(n_a));
  const Rational b(static_cast<std::int64_t>(n_b));
  const Rational& w = p.importance();
  return a * (a - 1) * (p.link_cost_a() + w) + 2 * p.link_cost_b() * b + (w + 1) * a + 2 * (b - 1) +
         2 * (b - 1) * (w + 1) + 2 * (b - 2) * (b - 1) + (p.link_cost_b() + p.link_cost_a()) * a / 2;
}

/// Upper bound on the converged cost under the grand-plan rule (first printed form).
[[nodiscard]] inline Rational convergence_cost_bound(std::size_t n_a, std::size_t n_b, const GameParams& p) {
  const Rational a(static_cast<std::int64_t>(n_a));
  const Rational b(static_cast<std::int64_t>(n_b));
  const Rational& w = p.importance();
  return a * (a - 1) * (p.mean_link_cost() + w) + 2 * p.link_cost_b() * b + (w + 1) * (3 * a * b + b) +
         2 * (b - 1) * (b - 1);
}

/// The same bound in its second printed form.
[[nodiscard]] inline Rational convergence_cost_bound_alt(std::size_t n_a, std::size_t n_b, const GameParams& p) {
  const Rational a(static_cast<std::int64_t>(n_a));
  const Rational b(static_cast<std::int64_t>(n_b));
  const Rational& w = p.importance();
  return a * a * (p.link_cost_a() + w) - a * (2 * w + p.link_cost_a() / 2) + 2 * b * b + b * (w + 2 * p.link_cost_b()) +
         3 * a * b * (w + 1) + 2;
}

/// Upper bound on the converged cost when every act must pay off on its own.
[[nodiscard]] inline Rational stepwise_rule_cost_bound(std::size_t n_a, std::size_t n_b, const GameParams& p) {
  const Rational a(static_cast<std::int64_t>(n_a));
  const Rational b(static_cast<std::int64_t>(n_b));
  return a * (a - 1) * (p.link_cost_a() + p.importance()) + 3 * b * b + 2 * p.link_cost_b() * b +
         2 * a * b * (p.importance() + 1);
}

/// Poor-equilibrium cost as printed, including its quadratic line term.
[[nodiscard]] inline Rational printed_lines_cost(std::size_t n_a, std::size_t n_b, std::int64_t k, const GameParams& p) {
  const Rational a(static_cast<std::int64_t>(n_a));
  const Rational b(static_cast<std::int64_t>(n_b));
  const Rational kk(k);
  const Rational m = b / kk;
  const Rational& w = p.importance();
  return a * (a - 1) * (p.link_cost_a() / 2 + w) + 2 * p.link_cost_b() * b + (w + 1) * b * (a - 1) * (kk + 3) / 2 +
         b * ((w + 1) * (kk + 1) / 2 + 2 * kk - 4) + 2 * b * b * (kk + 2) * (kk + 2) - 2 * m;
}

}  // namespace nfg
