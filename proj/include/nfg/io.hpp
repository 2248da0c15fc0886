#pragma once

#include "nfg/graph.hpp"
#include "nfg/rational.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nfg {

/// Thrown for malformed edge-list, type or node-list input; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A graph read from text. Input labels are remapped to dense ids in ascending label order.
struct LoadedGraph {
  Topology topology;
  std::vector<std::uint64_t> labels;  // dense id -> original label
  std::size_t duplicate_links = 0;

  [[nodiscard]] std::optional<NodeId> id_of(std::uint64_t label) const {
    auto it = std::lower_bound(labels.begin(), labels.end(), label);
    if (it == labels.end() || *it != label) return std::nullopt;
    return static_cast<NodeId>(it - labels.begin());
  }
};

namespace detail {

/// Splits a line into whitespace-separated tokens; blank and '#' lines give none.
inline std::vector<std::string> tokens_of(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  if (!out.empty() && out.front().starts_with('#')) out.clear();
  return out;
}

inline std::uint64_t parse_label(const std::string& tok, std::size_t line) {
  std::uint64_t v = 0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw ParseError(line, "expected a non-negative integer, got '" + tok + "'");
  return v;
}

inline PlayerType parse_type(const std::string& tok, std::size_t line) {
  if (tok == "A") return PlayerType::TypeA;
  if (tok == "B") return PlayerType::TypeB;
  throw ParseError(line, "player type must be A or B, got '" + tok + "'");
}

}  // namespace detail

/// Reads `u v` records. Nodes default to TypeB unless `types` (label -> type) says otherwise;
/// labels that appear only in `types` become isolated nodes.
inline LoadedGraph read_edge_list(std::istream& in, const std::map<std::uint64_t, PlayerType>& types = {}) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = detail::tokens_of(line);
    if (toks.empty()) continue;
    if (toks.size() != 2) throw ParseError(line_no, "expected two node labels");
    const auto u = detail::parse_label(toks[0], line_no);
    const auto v = detail::parse_label(toks[1], line_no);
    if (u == v) throw ParseError(line_no, "self-loop on " + toks[0]);
    raw.emplace_back(u, v);
  }
  LoadedGraph g;
  for (const auto& [u, v] : raw) {
    g.labels.push_back(u);
    g.labels.push_back(v);
  }
  for (const auto& [label, type] : types) g.labels.push_back(label);
  std::sort(g.labels.begin(), g.labels.end());
  g.labels.erase(std::unique(g.labels.begin(), g.labels.end()), g.labels.end());
  std::vector<PlayerType> node_types(g.labels.size(), PlayerType::TypeB);
  for (const auto& [label, type] : types) node_types[*g.id_of(label)] = type;
  g.topology = Topology(std::move(node_types));
  for (const auto& [u, v] : raw) {
    const auto a = *g.id_of(u), b = *g.id_of(v);
    if (g.topology.has_link(a, b))
      ++g.duplicate_links;
    else
      g.topology.add_link(a, b);
  }
  return g;
}

/// Reads `u t` records with t in {A, B}.
inline std::map<std::uint64_t, PlayerType> read_type_file(std::istream& in) {
  std::map<std::uint64_t, PlayerType> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = detail::tokens_of(line);
    if (toks.empty()) continue;
    if (toks.size() != 2) throw ParseError(line_no, "expected a node label and a type");
    const auto label = detail::parse_label(toks[0], line_no);
    const auto type = detail::parse_type(toks[1], line_no);
    if (!out.emplace(label, type).second) throw ParseError(line_no, "node " + toks[0] + " typed twice");
  }
  return out;
}

/// One label per line.
inline std::vector<std::uint64_t> read_node_list(std::istream& in) {
  std::vector<std::uint64_t> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = detail::tokens_of(line);
    if (toks.empty()) continue;
    if (toks.size() != 1) throw ParseError(line_no, "expected one node label");
    out.push_back(detail::parse_label(toks[0], line_no));
  }
  return out;
}

inline void write_edge_list(std::ostream& out, const Topology& t) {
  for (const auto& l : t.links()) out << l.lo << ' ' << l.hi << '\n';
}

inline void write_type_file(std::ostream& out, const Topology& t) {
  for (NodeId v = 0; v < t.size(); ++v) out << v << ' ' << type_letter(t.type(v)) << '\n';
}

/// Rows of the metric time series `snapshot,metric,value_num,value_den`.
struct MetricRow {
  std::string snapshot;
  std::string metric;
  Rational value{0};
};

inline void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows) {
  out << "snapshot,metric,value_num,value_den\n";
  for (const auto& r : rows)
    out << r.snapshot << ',' << r.metric << ',' << r.value.numerator() << ',' << r.value.denominator() << '\n';
}

}  // namespace nfg
